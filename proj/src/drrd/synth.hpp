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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drrd/corpus.hpp"
#include "drrd/rng.hpp"

namespace drrd::synth {

/// peak * exp(-h / decay_hours) for h = 0 .. hours-1.
std::vector<double> decay_profile(double peak, double decay_hours, int hours);
std::vector<double> flat_profile(double rate, int hours);

struct SynthConfig {
  int n_events = 400;
  double rumour_fraction = 0.5;
  int horizon_hours = 48;
  /// Expected posts per hour, one entry per hour of the horizon.
  std::vector<double> rumour_intensity = decay_profile(8.0, 12.0, 48);
  std::vector<double> non_rumour_intensity = decay_profile(20.0, 3.0, 48);
  int user_pool = 2000;
  double suspicious_fraction = 0.1;
  /// Selection weight of a suspicious user inside rumour events, relative to
  /// an ordinary user.
  double rumour_affinity = 5.0;
  int vocab_size = 500;
  /// Log-weight shift applied to the class-leaning tokens.
  double token_skew = 0.3;
  int min_post_tokens = 5;
  int max_post_tokens = 15;
  std::int64_t origin_timestamp = 1500000000;
  std::uint64_t seed = 1;
};

/// Throws UsageError on a violated invariant.
void validate(const SynthConfig& config);

/// Users u0 .. u{pool-1}; the first floor(fraction * pool) are suspicious.
int suspicious_count(const SynthConfig& config);
std::string user_id(int index);
std::string token(int index);

/// Relative token weights for one class: a Zipf base, with every fifth token
/// (index % 5 == 1) scaled by exp(+skew) for rumours and exp(-skew) for
/// non-rumours, and index % 5 == 2 the other way round.
std::vector<double> token_weights(const SynthConfig& config, Label label);

/// Poisson post counts per hour, timestamps uniform inside each hour. An
/// event drawn without posts is redrawn.
Event generate_event(const std::string& event_id, Label label, const SynthConfig& config, Rng& rng);

/// round(n * fraction) rumours in shuffled order; ids e0000, e0001, ...
std::vector<Event> generate_corpus(const SynthConfig& config);

}  // namespace drrd::synth
