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

#include "drrd/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "drrd/detector.hpp"
#include "drrd/error.hpp"
#include "drrd/rng.hpp"

namespace drrd::eval {
namespace {

double ratio(std::size_t num, std::size_t den, bool& undefined) {
  if (den == 0) {
    undefined = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

FoldSplit split_folds(std::span<const std::string> event_ids, std::span<const Label> labels, std::uint64_t seed,
                      int n_folds, double holdout_fraction) {
  if (event_ids.size() != labels.size()) throw UsageError("split_folds: ids and labels differ in length");
  if (n_folds < 1) throw UsageError("split_folds: need at least one fold");
  if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) {
    throw UsageError("split_folds: holdout fraction must be in [0, 1)");
  }
  const std::size_t n = event_ids.size();
  const auto holdout_total = static_cast<std::size_t>(std::floor(holdout_fraction * static_cast<double>(n)));
  if (n - holdout_total < static_cast<std::size_t>(n_folds)) {
    throw UsageError("split_folds: " + std::to_string(n) + " events cannot fill " + std::to_string(n_folds) +
                     " folds");
  }

  // Index lists per class, rumours first so the deal order is fixed.
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < n; ++i) by_class[labels[i] == Label::Rumour ? 0 : 1].push_back(i);

  std::size_t quota[2];
  double remainder[2];
  std::size_t assigned = 0;
  for (int c = 0; c < 2; ++c) {
    const double exact = static_cast<double>(by_class[c].size()) * static_cast<double>(holdout_total) /
                         static_cast<double>(std::max<std::size_t>(n, 1));
    quota[c] = static_cast<std::size_t>(std::floor(exact));
    remainder[c] = exact - static_cast<double>(quota[c]);
    assigned += quota[c];
  }
  for (std::size_t left = holdout_total - assigned; left > 0; --left) {
    // Ties go to the rumour class.
    const int c = remainder[0] >= remainder[1] ? 0 : 1;
    ++quota[c];
    remainder[c] = -1.0;
  }

  Rng rng(seed);
  std::vector<int> fold_of(n, -1);  // -1 marks the holdout
  std::size_t deal = 0;
  for (int c = 0; c < 2; ++c) {
    auto& idx = by_class[c];
    rng.shuffle(idx.begin(), idx.end());
    for (std::size_t j = quota[c]; j < idx.size(); ++j) {
      fold_of[idx[j]] = static_cast<int>(deal++ % static_cast<std::size_t>(n_folds));
    }
  }

  FoldSplit split;
  split.seed = seed;
  split.folds.resize(static_cast<std::size_t>(n_folds));
  for (std::size_t i = 0; i < n; ++i) {
    if (fold_of[i] < 0) {
      split.holdout.push_back(event_ids[i]);
      continue;
    }
    for (int f = 0; f < n_folds; ++f) {
      auto& fold = split.folds[static_cast<std::size_t>(f)];
      (fold_of[i] == f ? fold.test : fold.train).push_back(event_ids[i]);
    }
  }
  return split;
}

ClassMetrics class_metrics(std::size_t tp, std::size_t fp, std::size_t fn) {
  ClassMetrics m;
  m.precision = ratio(tp, tp + fp, m.precision_undefined);
  m.recall = ratio(tp, tp + fn, m.recall_undefined);
  if (m.precision + m.recall > 0.0) {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  } else {
    m.f1_undefined = true;
  }
  return m;
}

Metrics metrics_from_confusion(const Confusion& c) {
  if (c.total() == 0) throw UsageError("metrics over zero events");
  Metrics m;
  m.confusion = c;
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  m.rumour = class_metrics(c.tp, c.fp, c.fn);
  m.non_rumour = class_metrics(c.tn, c.fn, c.fp);
  return m;
}

Metrics compute_metrics(std::span<const Label> predictions, std::span<const Label> labels) {
  if (predictions.size() != labels.size()) {
    throw UsageError("compute_metrics: " + std::to_string(predictions.size()) + " predictions for " +
                     std::to_string(labels.size()) + " labels");
  }
  if (labels.empty()) throw UsageError("compute_metrics: no predictions");
  Confusion c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool predicted = predictions[i] == Label::Rumour;
    const bool actual = labels[i] == Label::Rumour;
    if (predicted && actual) {
      ++c.tp;
    } else if (predicted) {
      ++c.fp;
    } else if (actual) {
      ++c.fn;
    } else {
      ++c.tn;
    }
  }
  return metrics_from_confusion(c);
}

Metrics mean_metrics(std::span<const Metrics> runs) {
  if (runs.empty()) throw UsageError("mean_metrics: no runs");
  Metrics out;
  const auto k = static_cast<double>(runs.size());
  auto add = [k](ClassMetrics& acc, const ClassMetrics& m) {
    acc.precision += m.precision / k;
    acc.recall += m.recall / k;
    acc.f1 += m.f1 / k;
    acc.precision_undefined = acc.precision_undefined || m.precision_undefined;
    acc.recall_undefined = acc.recall_undefined || m.recall_undefined;
    acc.f1_undefined = acc.f1_undefined || m.f1_undefined;
  };
  for (const Metrics& m : runs) {
    out.accuracy += m.accuracy / k;
    out.confusion.tp += m.confusion.tp;
    out.confusion.fp += m.confusion.fp;
    out.confusion.fn += m.confusion.fn;
    out.confusion.tn += m.confusion.tn;
    add(out.rumour, m.rumour);
    add(out.non_rumour, m.non_rumour);
  }
  return out;
}

std::vector<double> default_deadlines() { return {12, 24, 36, 48, 60, 72, 84, 96}; }

std::vector<DeadlineAccuracy> early_detection_curve(const Detector& detector, std::span<const Event> events,
                                                    std::span<const double> deadlines) {
  if (deadlines.empty()) throw UsageError("early detection needs at least one deadline");
  if (events.empty()) throw UsageError("early detection needs at least one event");
  for (std::size_t i = 0; i < deadlines.size(); ++i) {
    if (!(deadlines[i] > 0.0)) throw UsageError("deadlines must be positive");
    if (i > 0 && !(deadlines[i] > deadlines[i - 1])) throw UsageError("deadlines must be strictly ascending");
  }
  std::vector<DeadlineAccuracy> curve;
  for (const double t : deadlines) {
    std::size_t correct = 0;
    DeadlineAccuracy point{t, 0.0, 0};
    for (const Event& e : events) {
      const Prediction p = detector.predict(e, t);
      if (p.insufficient_evidence) {
        ++point.n_no_evidence;
      } else if (p.label == e.label) {
        ++correct;
      }
    }
    point.accuracy = static_cast<double>(correct) / static_cast<double>(events.size());
    curve.push_back(point);
  }
  return curve;
}

void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows) {
  out << "setting,fold,class,accuracy,precision,recall,f1\n";
  const auto old_precision = out.precision(17);
  for (const MetricsRow& row : rows) {
    for (const auto& [name, cm] : {std::pair<const char*, const ClassMetrics&>{"rumour", row.metrics.rumour},
                                   std::pair<const char*, const ClassMetrics&>{"non_rumour", row.metrics.non_rumour}}) {
      out << row.setting << ',' << row.fold << ',' << name << ',' << row.metrics.accuracy << ',' << cm.precision << ','
          << cm.recall << ',' << cm.f1 << '\n';
    }
  }
  out.precision(old_precision);
}

void write_early_detection_csv(std::ostream& out, std::span<const DeadlineAccuracy> curve) {
  out << "deadline_hours,accuracy,n_no_evidence\n";
  const auto old_precision = out.precision(17);
  for (const DeadlineAccuracy& p : curve) out << p.deadline_hours << ',' << p.accuracy << ',' << p.n_no_evidence << '\n';
  out.precision(old_precision);
}

}  // namespace drrd::eval
