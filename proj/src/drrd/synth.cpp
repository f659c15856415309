/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The DRRD Authors. All rights reserved.
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "drrd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "drrd/error.hpp"

namespace drrd::synth {
namespace {

// Draws an index from unnormalized weights via the cumulative table.
class Categorical {
 public:
  explicit Categorical(const std::vector<double>& weights) : cdf_(weights.size()) {
    std::partial_sum(weights.begin(), weights.end(), cdf_.begin());
  }

  int sample(Rng& rng) const {
    const double u = rng.uniform() * cdf_.back();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<int>(std::min<std::ptrdiff_t>(it - cdf_.begin(), std::ssize(cdf_) - 1));
  }

 private:
  std::vector<double> cdf_;
};

std::string padded(char prefix, std::size_t value, int width) {
  std::string digits = std::to_string(value);
  if (std::ssize(digits) < width) digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
  return prefix + digits;
}

int pick_user(const SynthConfig& config, Label label, Rng& rng) {
  const int n_susp = suspicious_count(config);
  const int n_plain = config.user_pool - n_susp;
  const double boost = label == Label::Rumour ? config.rumour_affinity : 1.0;
  const double susp_mass = boost * n_susp;
  const bool suspicious = rng.uniform() * (susp_mass + n_plain) < susp_mass;
  if (suspicious) return static_cast<int>(rng.below(static_cast<std::uint64_t>(n_susp)));
  return n_susp + static_cast<int>(rng.below(static_cast<std::uint64_t>(n_plain)));
}

}  // namespace

std::vector<double> decay_profile(double peak, double decay_hours, int hours) {
  std::vector<double> out(static_cast<std::size_t>(std::max(hours, 0)));
  for (int h = 0; h < hours; ++h) out[static_cast<std::size_t>(h)] = peak * std::exp(-h / decay_hours);
  return out;
}

std::vector<double> flat_profile(double rate, int hours) {
  return std::vector<double>(static_cast<std::size_t>(std::max(hours, 0)), rate);
}

void validate(const SynthConfig& c) {
  if (c.n_events < 1) throw UsageError("synth: n_events must be positive");
  if (!(c.rumour_fraction >= 0.0 && c.rumour_fraction <= 1.0)) throw UsageError("synth: rumour_fraction not in [0,1]");
  if (c.horizon_hours < 1) throw UsageError("synth: horizon_hours must be at least 1");
  for (const auto* profile : {&c.rumour_intensity, &c.non_rumour_intensity}) {
    if (std::ssize(*profile) != c.horizon_hours) {
      throw UsageError("synth: intensity profile has " + std::to_string(profile->size()) + " hours, horizon is " +
                       std::to_string(c.horizon_hours));
    }
    for (const double v : *profile) {
      if (!(v >= 0.0) || !std::isfinite(v)) throw UsageError("synth: intensities must be finite and non-negative");
    }
    if (std::accumulate(profile->begin(), profile->end(), 0.0) <= 0.0) {
      throw UsageError("synth: an intensity profile is all zero");
    }
  }
  if (c.user_pool < 1) throw UsageError("synth: user_pool must be positive");
  if (!(c.suspicious_fraction >= 0.0 && c.suspicious_fraction <= 1.0)) {
    throw UsageError("synth: suspicious_fraction not in [0,1]");
  }
  if (!(c.rumour_affinity >= 1.0) || !std::isfinite(c.rumour_affinity)) {
    throw UsageError("synth: rumour_affinity must be at least 1");
  }
  if (c.vocab_size < 1) throw UsageError("synth: vocab_size must be positive");
  if (!std::isfinite(c.token_skew)) throw UsageError("synth: token_skew must be finite");
  if (c.min_post_tokens < 1 || c.max_post_tokens < c.min_post_tokens) {
    throw UsageError("synth: post length bounds must satisfy 1 <= min <= max");
  }
}

int suspicious_count(const SynthConfig& config) {
  return static_cast<int>(std::floor(config.suspicious_fraction * config.user_pool));
}

std::string user_id(int index) { return "u" + std::to_string(index); }
std::string token(int index) { return "w" + std::to_string(index); }

std::vector<double> token_weights(const SynthConfig& config, Label label) {
  const double sign = label == Label::Rumour ? 1.0 : -1.0;
  std::vector<double> w(static_cast<std::size_t>(config.vocab_size));
  for (int i = 0; i < config.vocab_size; ++i) {
    double shift = 0.0;
    if (i % 5 == 1) shift = sign * config.token_skew;
    if (i % 5 == 2) shift = -sign * config.token_skew;
    w[static_cast<std::size_t>(i)] = std::exp(shift) / (i + 1.0);
  }
  return w;
}

Event generate_event(const std::string& event_id, Label label, const SynthConfig& config, Rng& rng) {
  const auto& intensity = label == Label::Rumour ? config.rumour_intensity : config.non_rumour_intensity;
  const Categorical tokens(token_weights(config, label));
  Event event{event_id, label, {}};
  while (event.posts.empty()) {
    for (int h = 0; h < config.horizon_hours; ++h) {
      const auto count = rng.poisson(intensity[static_cast<std::size_t>(h)]);
      for (std::uint64_t i = 0; i < count; ++i) {
        Post post;
        post.timestamp_s = config.origin_timestamp + h * kSecondsPerHour +
                           static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(kSecondsPerHour)));
        post.user_id = user_id(pick_user(config, label, rng));
        const auto length =
            config.min_post_tokens +
            static_cast<int>(rng.below(static_cast<std::uint64_t>(config.max_post_tokens - config.min_post_tokens + 1)));
        for (int t = 0; t < length; ++t) {
          if (t > 0) post.text += ' ';
          post.text += token(tokens.sample(rng));
        }
        event.posts.push_back(std::move(post));
      }
    }
  }
  std::stable_sort(event.posts.begin(), event.posts.end(),
                   [](const Post& a, const Post& b) { return a.timestamp_s < b.timestamp_s; });
  for (std::size_t j = 0; j < event.posts.size(); ++j) event.posts[j].post_id = event_id + "_p" + std::to_string(j);
  // Equal timestamps order by id in the canonical form, where _p10 sorts before _p9.
  sort_posts(event.posts);
  return event;
}

std::vector<Event> generate_corpus(const SynthConfig& config) {
  validate(config);
  Rng rng(config.seed);
  const auto n = static_cast<std::size_t>(config.n_events);
  const auto n_rumour = static_cast<std::size_t>(std::llround(config.rumour_fraction * static_cast<double>(n)));
  std::vector<Label> labels(n, Label::NonRumour);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(n_rumour), Label::Rumour);
  rng.shuffle(labels.begin(), labels.end());

  const int width = std::max(4, static_cast<int>(std::to_string(n - 1).size()));
  std::vector<Event> events;
  events.reserve(n);
  for (std::size_t i = 0; i < n; ++i) events.push_back(generate_event(padded('e', i, width), labels[i], config, rng));
  return events;
}

}  // namespace drrd::synth
