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

#include "drrd/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "drrd/error.hpp"
#include "drrd/log.hpp"

namespace drrd {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

std::vector<std::string> ids_of(std::span<const Event> events) {
  std::vector<std::string> out;
  out.reserve(events.size());
  for (const Event& e : events) out.push_back(e.event_id);
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw DataError(path.string() + " is not valid JSON");
  return j;
}

std::vector<std::string> string_list(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_array()) throw DataError(std::string("split.json lacks ") + key);
  return j[key].get<std::vector<std::string>>();
}

// Accuracy per deadline averaged over runs; no-evidence counts add up.
std::vector<eval::DeadlineAccuracy> mean_curve(const std::vector<std::vector<eval::DeadlineAccuracy>>& curves) {
  if (curves.empty()) return {};
  std::vector<eval::DeadlineAccuracy> out = curves.front();
  for (auto& p : out) p.accuracy = 0.0;
  for (const auto& c : curves) {
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i].accuracy += c[i].accuracy / static_cast<double>(curves.size());
      if (&c != &curves.front()) out[i].n_no_evidence += c[i].n_no_evidence;
    }
  }
  return out;
}

eval::Metrics test_metrics(const Detector& detector, std::span<const Event> test) {
  std::vector<Label> predicted, actual;
  for (const Event& e : test) {
    predicted.push_back(detector.predict(e).label);
    actual.push_back(e.label);
  }
  return eval::compute_metrics(predicted, actual);
}

}  // namespace

std::vector<Event> select_events(std::span<const Event> events, std::span<const std::string> ids) {
  std::unordered_map<std::string_view, const Event*> by_id;
  for (const Event& e : events) by_id.emplace(e.event_id, &e);
  std::vector<Event> out;
  out.reserve(ids.size());
  for (const std::string& id : ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw DataError("event " + id + " is not in the corpus");
    out.push_back(*it->second);
  }
  return out;
}

eval::FoldSplit split_corpus(std::span<const Event> events, const RunConfig& config) {
  std::vector<Label> labels;
  for (const Event& e : events) labels.push_back(e.label);
  const auto ids = ids_of(events);
  const int folds = config.protocol.fold < 0 ? 1 : config.eval.folds;
  const double holdout = config.protocol.use_holdout ? config.eval.holdout_fraction : 0.0;
  return eval::split_folds(ids, labels, config.split_seed(), folds, holdout);
}

TrainedRun train_run(std::span<const Event> events, const RunConfig& config) {
  const RunConfig cfg = config.resolved();
  if (cfg.protocol.fold >= cfg.eval.folds) {
    throw UsageError("fold " + std::to_string(cfg.protocol.fold) + " out of range for " +
                     std::to_string(cfg.eval.folds) + " folds");
  }
  const eval::FoldSplit split = split_corpus(events, cfg);
  std::vector<std::string> train_ids, test_ids;
  if (cfg.protocol.fold < 0) {
    train_ids = split.folds[0].test;
  } else {
    const auto& fold = split.folds[static_cast<std::size_t>(cfg.protocol.fold)];
    train_ids = fold.train;
    test_ids = fold.test;
  }
  const auto train = select_events(events, train_ids);
  const auto validation = select_events(events, split.holdout);
  TrainLog log;
  Detector detector = Detector::fit(train, validation, cfg.pipeline, &log);
  return TrainedRun{cfg, std::move(detector), std::move(log), std::move(train_ids), split.holdout, std::move(test_ids)};
}

void save_run(const std::string& dir, const TrainedRun& run) {
  const fs::path base(dir);
  fs::create_directories(base);
  run.detector.save(dir);
  write_text(base / "config.json", run.config.dump() + "\n");
  json split = {{"seed", run.config.split_seed()},
                {"fold", run.config.protocol.fold},
                {"train", run.train_ids},
                {"holdout", run.holdout_ids},
                {"test", run.test_ids}};
  write_text(base / "split.json", split.dump(2) + "\n");
  std::ostringstream csv;
  csv.precision(17);
  csv << "epoch,train_loss,val_loss\n";
  for (const EpochRecord& r : run.log.epochs) {
    csv << r.epoch << ',' << r.train_loss << ',';
    if (!std::isnan(r.validation_loss)) csv << r.validation_loss;
    csv << '\n';
  }
  write_text(base / "train_log.csv", csv.str());
}

TrainedRun load_run(const std::string& dir) {
  const fs::path base(dir);
  RunConfig config = RunConfig::from_json(read_json(base / "config.json")).resolved();
  const json split = read_json(base / "split.json");
  Detector detector = Detector::load(dir);
  return TrainedRun{std::move(config), std::move(detector), TrainLog{}, string_list(split, "train"),
                    string_list(split, "holdout"), string_list(split, "test")};
}

EvalReport evaluate_folds(std::span<const Event> events, const RunConfig& config, bool early_detection,
                          const FoldProgress& progress) {
  RunConfig cfg = config.resolved();
  if (cfg.protocol.fold < 0) cfg.protocol.fold = 0;  // force a k-fold split
  const eval::FoldSplit split = split_corpus(events, cfg);
  const auto validation = select_events(events, split.holdout);

  EvalReport report;
  std::vector<eval::Metrics> per_fold;
  std::vector<std::vector<eval::DeadlineAccuracy>> curves;
  for (std::size_t k = 0; k < split.folds.size(); ++k) {
    log_info("fold " + std::to_string(k));
    const auto train = select_events(events, split.folds[k].train);
    const auto test = select_events(events, split.folds[k].test);
    const Detector detector = Detector::fit(train, validation, cfg.pipeline);
    const eval::Metrics m = test_metrics(detector, test);
    per_fold.push_back(m);
    report.rows.push_back({"extended", std::to_string(k), m});
    if (early_detection) curves.push_back(eval::early_detection_curve(detector, test, cfg.eval.deadlines));
    if (progress) progress(static_cast<int>(k), m);
  }
  report.mean = eval::mean_metrics(per_fold);
  report.rows.push_back({"extended", "mean", report.mean});
  report.curve = mean_curve(curves);
  return report;
}

EvalReport evaluate_run(const TrainedRun& run, std::span<const Event> events, std::span<const double> deadlines) {
  std::unordered_set<std::string_view> present;
  for (const Event& e : events) present.insert(e.event_id);
  for (const std::string& id : run.train_ids) {
    if (!present.contains(id)) {
      throw DataError("corpus does not match the checkpoint: training event " + id + " is missing");
    }
  }
  std::unordered_set<std::string_view> seen(run.train_ids.begin(), run.train_ids.end());
  seen.insert(run.holdout_ids.begin(), run.holdout_ids.end());
  std::vector<Event> test;
  for (const Event& e : events) {
    if (!seen.contains(e.event_id)) test.push_back(e);
  }
  if (test.empty()) throw DataError("every corpus event took part in training; nothing to evaluate");

  EvalReport report;
  report.mean = test_metrics(run.detector, test);
  report.rows.push_back({"extended", "single", report.mean});
  if (!deadlines.empty()) report.curve = eval::early_detection_curve(run.detector, test, deadlines);
  return report;
}

}  // namespace drrd
