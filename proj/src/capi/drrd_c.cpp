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

#include "drrd/drrd.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "drrd/config.hpp"
#include "drrd/corpus.hpp"
#include "drrd/error.hpp"
#include "drrd/experiment.hpp"
#include "drrd/log.hpp"
#include "drrd/synth.hpp"

struct drrd_config {
  drrd::RunConfig value;
};

struct drrd_corpus {
  std::vector<drrd::Event> events;
};

struct drrd_detector {
  drrd::TrainedRun run;
};

namespace {

thread_local std::string g_last_error;

drrd_status fail(drrd_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs body, translating exceptions into status codes.
template <typename F>
drrd_status guarded(F&& body) {
  try {
    body();
    return DRRD_OK;
  } catch (const drrd::UsageError& e) {
    return fail(DRRD_ERR_USAGE, e.what());
  } catch (const drrd::DataError& e) {
    return fail(DRRD_ERR_DATA, e.what());
  } catch (const drrd::NumericalError& e) {
    return fail(DRRD_ERR_NUMERICAL, e.what());
  } catch (const drrd::IoError& e) {
    return fail(DRRD_ERR_IO, e.what());
  } catch (const drrd::InsufficientEvidence& e) {
    return fail(DRRD_ERR_INSUFFICIENT_EVIDENCE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(DRRD_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(DRRD_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(DRRD_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw drrd::UsageError(what);
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const drrd::Event& event_at(const drrd_corpus* corpus, std::size_t index) {
  require(corpus != nullptr, "corpus is null");
  if (index >= corpus->events.size()) {
    throw drrd::UsageError("event index " + std::to_string(index) + " out of range");
  }
  return corpus->events[index];
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw drrd::IoError("cannot write " + path);
  out << text;
  if (!out) throw drrd::IoError("write failed for " + path);
}

std::mutex g_log_mutex;
drrd_log_callback g_log_callback = nullptr;
void* g_log_user_data = nullptr;

}  // namespace

extern "C" {

const char* drrd_version(void) { return "1.0.0"; }

const char* drrd_last_error(void) { return g_last_error.c_str(); }

void drrd_string_free(char* s) { std::free(s); }

void drrd_set_log_callback(drrd_log_callback callback, void* user_data) {
  {
    std::lock_guard lock(g_log_mutex);
    g_log_callback = callback;
    g_log_user_data = user_data;
  }
  if (callback == nullptr) {
    drrd::set_log_sink({});
    return;
  }
  drrd::set_log_sink([](std::string_view message) {
    std::lock_guard lock(g_log_mutex);
    if (g_log_callback != nullptr) g_log_callback(std::string(message).c_str(), g_log_user_data);
  });
}

drrd_status drrd_config_create(drrd_config** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = new drrd_config{};
  });
}

drrd_status drrd_config_load(const char* path, drrd_config** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new drrd_config{drrd::RunConfig::load(path)};
  });
}

drrd_status drrd_config_parse(const char* json_text, drrd_config** out) {
  return guarded([&] {
    require(json_text != nullptr && out != nullptr, "null argument");
    const auto j = nlohmann::json::parse(json_text, nullptr, false);
    if (j.is_discarded()) throw drrd::UsageError("config is not valid JSON");
    *out = new drrd_config{drrd::RunConfig::from_json(j)};
  });
}

drrd_status drrd_config_set(drrd_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config != nullptr && key != nullptr && value != nullptr, "null argument");
    config->value.set(key, value);
  });
}

drrd_status drrd_config_to_json(const drrd_config* config, char** json_out) {
  return guarded([&] {
    require(config != nullptr && json_out != nullptr, "null argument");
    *json_out = copy_string(config->value.dump());
  });
}

void drrd_config_destroy(drrd_config* config) { delete config; }

drrd_status drrd_corpus_load(const char* path, drrd_corpus** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new drrd_corpus{drrd::load_events(path)};
  });
}

drrd_status drrd_corpus_save(const drrd_corpus* corpus, const char* path) {
  return guarded([&] {
    require(corpus != nullptr && path != nullptr, "null argument");
    drrd::save_events(path, corpus->events);
  });
}

drrd_status drrd_synth_generate(const drrd_config* config, drrd_corpus** out) {
  return guarded([&] {
    require(config != nullptr && out != nullptr, "null argument");
    *out = new drrd_corpus{drrd::synth::generate_corpus(config->value.resolved().synth)};
  });
}

drrd_status drrd_corpus_summary_get(const drrd_corpus* corpus, drrd_corpus_summary* out) {
  return guarded([&] {
    require(corpus != nullptr && out != nullptr, "null argument");
    const auto s = drrd::summarize(corpus->events);
    *out = {s.events, s.posts, s.users, s.rumours, s.non_rumours};
  });
}

size_t drrd_corpus_size(const drrd_corpus* corpus) { return corpus == nullptr ? 0 : corpus->events.size(); }

const char* drrd_corpus_event_id(const drrd_corpus* corpus, size_t index) {
  if (corpus == nullptr || index >= corpus->events.size()) return nullptr;
  return corpus->events[index].event_id.c_str();
}

void drrd_corpus_destroy(drrd_corpus* corpus) { delete corpus; }

drrd_status drrd_detector_train(const drrd_corpus* corpus, const drrd_config* config, drrd_detector** out) {
  return guarded([&] {
    require(corpus != nullptr && config != nullptr && out != nullptr, "null argument");
    *out = new drrd_detector{drrd::train_run(corpus->events, config->value)};
  });
}

drrd_status drrd_detector_save(const drrd_detector* detector, const char* dir) {
  return guarded([&] {
    require(detector != nullptr && dir != nullptr, "null argument");
    drrd::save_run(dir, detector->run);
  });
}

drrd_status drrd_detector_load(const char* dir, drrd_detector** out) {
  return guarded([&] {
    require(dir != nullptr && out != nullptr, "null argument");
    *out = new drrd_detector{drrd::load_run(dir)};
  });
}

double drrd_detector_final_loss(const drrd_detector* detector) {
  return detector == nullptr ? 0.0 : detector->run.log.final_train_loss();
}

drrd_status drrd_detector_predict(const drrd_detector* detector, const drrd_corpus* corpus, size_t index,
                                  double deadline_hours, drrd_prediction* out) {
  return guarded([&] {
    require(detector != nullptr && out != nullptr, "null argument");
    const drrd::Event& event = event_at(corpus, index);
    std::optional<double> deadline;
    if (deadline_hours > 0.0) deadline = deadline_hours;
    const drrd::Prediction p = detector->run.detector.predict(event, deadline);
    out->insufficient_evidence = p.insufficient_evidence ? 1 : 0;
    out->label = p.label == drrd::Label::Rumour ? DRRD_RUMOUR : DRRD_NON_RUMOUR;
    out->p_rumour = p.p_rumour;
    out->p_non_rumour = p.p_non_rumour;
  });
}

drrd_status drrd_detector_dump_features(const drrd_detector* detector, const drrd_corpus* corpus, size_t index,
                                        const char* dir) {
  return guarded([&] {
    require(detector != nullptr && dir != nullptr, "null argument");
    const drrd::Event& event = event_at(corpus, index);
    const auto [text, user] = detector->run.detector.sequences(event);
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(dir);
    for (const auto& [suffix, features] : {std::pair{"_text.csv", &text}, std::pair{"_user.csv", &user}}) {
      std::ostringstream csv;
      drrd::features::write_csv(csv, *features);
      write_file((base / (event.event_id + suffix)).string(), csv.str());
    }
  });
}

void drrd_detector_destroy(drrd_detector* detector) { delete detector; }

drrd_status drrd_evaluate(const drrd_corpus* corpus, const drrd_config* config, const drrd_detector* detector,
                          const char* metrics_csv, const char* early_csv, drrd_eval_summary* out) {
  return guarded([&] {
    require(corpus != nullptr && config != nullptr && metrics_csv != nullptr, "null argument");
    const bool early = early_csv != nullptr;
    drrd::EvalReport report;
    if (detector == nullptr) {
      report = drrd::evaluate_folds(corpus->events, config->value, early);
    } else {
      const std::vector<double> none;
      report = drrd::evaluate_run(detector->run, corpus->events, early ? config->value.eval.deadlines : none);
    }
    std::ostringstream metrics;
    drrd::eval::write_metrics_csv(metrics, report.rows);
    write_file(metrics_csv, metrics.str());
    if (early) {
      std::ostringstream curve;
      drrd::eval::write_early_detection_csv(curve, report.curve);
      write_file(early_csv, curve.str());
    }
    if (out != nullptr) {
      const auto& m = report.mean;
      *out = {m.accuracy,           m.rumour.precision,     m.rumour.recall, m.rumour.f1,
              m.non_rumour.precision, m.non_rumour.recall, m.non_rumour.f1, m.confusion.total()};
    }
  });
}

}  // extern "C"
