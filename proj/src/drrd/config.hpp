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

#include <nlohmann/json.hpp>

#include "drrd/detector.hpp"
#include "drrd/eval.hpp"
#include "drrd/synth.hpp"

namespace drrd {

struct ProtocolConfig {
  /// Fold whose training part `train` fits on; -1 trains on every
  /// non-holdout event.
  int fold = -1;
  /// Reserve the holdout for early stopping. Without it training runs the
  /// full epoch budget.
  bool use_holdout = true;
};

struct EvalConfig {
  std::string protocol = "folds";  // "folds" or "single"
  int folds = eval::kDefaultFolds;
  double holdout_fraction = eval::kDefaultHoldoutFraction;
  std::vector<double> deadlines = eval::default_deadlines();
};

/// Every tunable of a run. Stage seeds inside `pipeline` and `synth` are not
/// read from config files; they are forked from `seed` by resolved().
struct RunConfig {
  std::uint64_t seed = 1;
  PipelineConfig pipeline;
  ProtocolConfig protocol;
  EvalConfig eval;
  synth::SynthConfig synth;

  /// Copy with stage seeds forked from `seed` and embedding widths tied to d_v.
  RunConfig resolved() const;
  std::uint64_t split_seed() const;

  nlohmann::ordered_json to_json() const;
  std::string dump() const;

  /// Overlays the keys present in `patch`. Unknown keys and mistyped values
  /// throw UsageError naming the dotted path.
  void merge(const nlohmann::json& patch);
  /// `path` is dotted (train.lr); `value` is parsed as JSON, falling back to a
  /// plain string.
  void set(const std::string& path, const std::string& value);

  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::string& path);
};

}  // namespace drrd
