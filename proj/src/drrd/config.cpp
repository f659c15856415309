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

#include "drrd/config.hpp"

#include <fstream>
#include <set>
#include <type_traits>

#include "drrd/error.hpp"
#include "drrd/rng.hpp"

namespace drrd {
namespace {

using json = nlohmann::json;

std::string dotted(const std::string& pointer) {
  std::string out = pointer.substr(1);
  for (char& c : out) {
    if (c == '/') c = '.';
  }
  return out;
}

template <typename T>
void read_value(const json& v, T& out, const std::string& pointer) {
  auto fail = [&](const char* want) { throw UsageError("config key " + dotted(pointer) + ": expected " + want); };
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) fail("a boolean");
    out = v.get<bool>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) fail("an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (v.is_number_unsigned()) {
        out = v.get<T>();
      } else {
        if (v.get<std::int64_t>() < 0) fail("a non-negative integer");
        out = static_cast<T>(v.get<std::int64_t>());
      }
    } else {
      out = v.get<T>();
    }
  } else if constexpr (std::is_same_v<T, double>) {
    if (!v.is_number()) fail("a number");
    out = v.get<double>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) fail("a string");
    out = v.get<std::string>();
  } else {
    if (!v.is_array()) fail("an array of numbers");
    out.clear();
    for (const auto& x : v) {
      if (!x.is_number()) fail("an array of numbers");
      out.push_back(x.get<double>());
    }
  }
}

// Lists every configurable field once, by JSON pointer.
template <typename Config, typename F>
void for_each_field(Config& c, F&& f) {
  f("/seed", c.seed);
  for (auto [name, e] : {std::pair{"text", &c.pipeline.text_embed}, std::pair{"user", &c.pipeline.user_embed}}) {
    const std::string base = std::string("/embed/") + name + "/";
    f(base + "epochs", e->epochs);
    f(base + "infer_epochs", e->infer_epochs);
    f(base + "negatives", e->negatives);
    f(base + "min_count", e->min_count);
    f(base + "noise_power", e->noise_power);
    f(base + "lr_start", e->lr_start);
    f(base + "lr_end", e->lr_end);
  }
  auto& m = c.pipeline.model;
  f("/model/d_v", m.d_v);
  f("/model/d_f", m.d_f);
  f("/model/head_hidden", m.head_hidden);
  f("/model/dropout", m.dropout);
  f("/model/between_layer_dropout", m.between_layer_dropout);
  f("/model/use_text_branch", m.use_text_branch);
  f("/model/use_user_branch", m.use_user_branch);
  f("/model/max_hours", m.max_hours);
  f("/model/log_base", m.log_base);
  auto& t = c.pipeline.train;
  f("/train/epochs", t.epochs);
  f("/train/batch_size", t.batch_size);
  f("/train/patience", t.patience);
  f("/train/lr", t.adam.lr);
  f("/train/beta1", t.adam.beta1);
  f("/train/beta2", t.adam.beta2);
  f("/train/eps", t.adam.eps);
  f("/train/fold", c.protocol.fold);
  f("/train/use_holdout", c.protocol.use_holdout);
  f("/eval/protocol", c.eval.protocol);
  f("/eval/folds", c.eval.folds);
  f("/eval/holdout_fraction", c.eval.holdout_fraction);
  f("/eval/deadlines", c.eval.deadlines);
  auto& s = c.synth;
  f("/synth/n_events", s.n_events);
  f("/synth/rumour_fraction", s.rumour_fraction);
  f("/synth/horizon_hours", s.horizon_hours);
  f("/synth/rumour_intensity", s.rumour_intensity);
  f("/synth/non_rumour_intensity", s.non_rumour_intensity);
  f("/synth/user_pool", s.user_pool);
  f("/synth/suspicious_fraction", s.suspicious_fraction);
  f("/synth/rumour_affinity", s.rumour_affinity);
  f("/synth/vocab_size", s.vocab_size);
  f("/synth/token_skew", s.token_skew);
  f("/synth/min_post_tokens", s.min_post_tokens);
  f("/synth/max_post_tokens", s.max_post_tokens);
  f("/synth/origin_timestamp", s.origin_timestamp);
}

}  // namespace

RunConfig RunConfig::resolved() const {
  RunConfig r = *this;
  r.pipeline.text_embed.seed = fork_seed(seed, "embed.text");
  r.pipeline.user_embed.seed = fork_seed(seed, "embed.user");
  r.pipeline.text_embed.dim = r.pipeline.model.d_v;
  r.pipeline.user_embed.dim = r.pipeline.model.d_v;
  r.pipeline.train.seed = fork_seed(seed, "train");
  r.synth.seed = fork_seed(seed, "synth");
  return r;
}

std::uint64_t RunConfig::split_seed() const { return fork_seed(seed, "split"); }

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  for_each_field(const_cast<RunConfig&>(*this), [&j](const std::string& pointer, const auto& value) {
    j[nlohmann::ordered_json::json_pointer(pointer)] = value;
  });
  return j;
}

std::string RunConfig::dump() const { return to_json().dump(2); }

void RunConfig::merge(const json& patch) {
  if (!patch.is_object()) throw UsageError("config must be a JSON object");
  std::set<std::string> unused;
  const json flat = patch.flatten();
  for (const auto& [key, _] : flat.items()) unused.insert(key);
  for_each_field(*this, [&](const std::string& pointer, auto& value) {
    const json::json_pointer ptr(pointer);
    if (!patch.contains(ptr)) return;
    read_value(patch.at(ptr), value, pointer);
    for (auto it = unused.begin(); it != unused.end();) {
      const bool covered = *it == pointer || it->starts_with(pointer + "/");
      it = covered ? unused.erase(it) : std::next(it);
    }
  });
  if (!unused.empty()) {
    std::string key = dotted(*unused.begin());
    throw UsageError("unknown config key " + key);
  }
}

void RunConfig::set(const std::string& path, const std::string& value) {
  if (path.empty()) throw UsageError("empty config key");
  std::string pointer = "/" + path;
  for (char& c : pointer) {
    if (c == '.') c = '/';
  }
  json parsed = json::parse(value, nullptr, false);
  if (parsed.is_discarded()) parsed = value;
  json patch = json::object();
  patch[json::json_pointer(pointer)] = std::move(parsed);
  merge(patch);
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  c.merge(j);
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw UsageError("config " + path + " is not valid JSON");
  return from_json(j);
}

}  // namespace drrd
