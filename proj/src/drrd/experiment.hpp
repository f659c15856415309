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

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "drrd/config.hpp"
#include "drrd/detector.hpp"
#include "drrd/eval.hpp"

namespace drrd {

/// Events with the given ids, in id order. Throws DataError naming the first
/// missing id.
std::vector<Event> select_events(std::span<const Event> events, std::span<const std::string> ids);

eval::FoldSplit split_corpus(std::span<const Event> events, const RunConfig& config);

/// A fitted detector together with the event ids it saw.
struct TrainedRun {
  RunConfig config;
  Detector detector;
  TrainLog log;
  std::vector<std::string> train_ids;
  std::vector<std::string> holdout_ids;  // empty when the holdout is unused
  std::vector<std::string> test_ids;     // events that took no part in training
};

/// Fits on the configured fold (or every non-holdout event when fold is -1).
TrainedRun train_run(std::span<const Event> events, const RunConfig& config);

/// Writes config.json, split.json, train_log.csv and the three checkpoints.
void save_run(const std::string& dir, const TrainedRun& run);
/// Reads what save_run wrote; the training log comes back empty.
TrainedRun load_run(const std::string& dir);

struct EvalReport {
  std::vector<eval::MetricsRow> rows;
  eval::Metrics mean;
  /// Mean accuracy over folds per deadline; n_no_evidence is summed.
  std::vector<eval::DeadlineAccuracy> curve;
};

using FoldProgress = std::function<void(int fold, const eval::Metrics&)>;

/// k-fold protocol: one detector per fold, tested on that fold's test set.
EvalReport evaluate_folds(std::span<const Event> events, const RunConfig& config, bool early_detection,
                          const FoldProgress& progress = {});

/// Tests a trained run on every corpus event it did not train on, with an
/// early-detection curve over `deadlines` when that is non-empty. Throws
/// DataError when the corpus lacks any of the run's training events or
/// nothing is left to test.
EvalReport evaluate_run(const TrainedRun& run, std::span<const Event> events, std::span<const double> deadlines);

}  // namespace drrd
