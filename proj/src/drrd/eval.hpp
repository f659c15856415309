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

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "drrd/corpus.hpp"

namespace drrd {
class Detector;
}

namespace drrd::eval {

constexpr int kDefaultFolds = 4;
constexpr double kDefaultHoldoutFraction = 0.1;

struct Fold {
  std::vector<std::string> train;
  std::vector<std::string> test;
};

/// Hold-out set for early stopping plus k train/test folds over the rest.
/// Ids keep their corpus order inside every list.
struct FoldSplit {
  std::vector<std::string> holdout;
  std::vector<Fold> folds;
  std::uint64_t seed = 0;
};

/// Stratified split. The holdout takes floor(fraction * N) events, shared
/// between classes by largest remainder; the remaining events of each class
/// are shuffled and dealt round-robin into the test sets, so every fold's
/// class counts differ by at most one. Throws UsageError when there are
/// fewer events than folds or the inputs disagree in length.
FoldSplit split_folds(std::span<const std::string> event_ids, std::span<const Label> labels, std::uint64_t seed,
                      int n_folds = kDefaultFolds, double holdout_fraction = kDefaultHoldoutFraction);

/// Binary confusion counts with rumour as the positive class.
struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

/// A metric whose denominator is zero is reported as 0 and flagged.
struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_undefined = false;
  bool recall_undefined = false;
  bool f1_undefined = false;

  friend bool operator==(const ClassMetrics&, const ClassMetrics&) = default;
};

struct Metrics {
  double accuracy = 0.0;
  Confusion confusion;
  ClassMetrics rumour;
  ClassMetrics non_rumour;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

ClassMetrics class_metrics(std::size_t tp, std::size_t fp, std::size_t fn);
Metrics metrics_from_confusion(const Confusion& c);

/// Throws UsageError on empty input or a length mismatch.
Metrics compute_metrics(std::span<const Label> predictions, std::span<const Label> labels);

/// Field-wise mean; flags are set when any input had them set.
Metrics mean_metrics(std::span<const Metrics> runs);

struct DeadlineAccuracy {
  double deadline_hours = 0.0;
  double accuracy = 0.0;
  std::size_t n_no_evidence = 0;
};

std::vector<double> default_deadlines();

/// Accuracy of deadline-restricted predictions for each T. Events without a
/// post before T count as incorrect and are also tallied separately. Throws
/// UsageError on an empty list, a non-positive or non-ascending deadline, or
/// no events.
std::vector<DeadlineAccuracy> early_detection_curve(const Detector& detector, std::span<const Event> events,
                                                    std::span<const double> deadlines);

/// One row of the metrics report.
struct MetricsRow {
  std::string setting;
  std::string fold;
  Metrics metrics;
};

/// Columns setting,fold,class,accuracy,precision,recall,f1; two lines per row.
void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows);
/// Columns deadline_hours,accuracy,n_no_evidence.
void write_early_detection_csv(std::ostream& out, std::span<const DeadlineAccuracy> curve);

}  // namespace drrd::eval
