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

// Command-line front end. Talks to the library only through the C API.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "drrd/drrd.h"

namespace fs = std::filesystem;

namespace {

// Exit codes: usage 1, data or I/O 2, numerical 3.
int exit_code(drrd_status status) {
  switch (status) {
    case DRRD_OK:
      return 0;
    case DRRD_ERR_USAGE:
      return 1;
    case DRRD_ERR_NUMERICAL:
      return 3;
    default:
      return 2;
  }
}

struct Failure {
  int code;
};

void check(drrd_status status, const std::string& what) {
  if (status == DRRD_OK) return;
  std::cerr << "drrd: " << what << ": " << drrd_last_error() << "\n";
  throw Failure{exit_code(status)};
}

[[noreturn]] void usage(const std::string& message) {
  std::cerr << "drrd: " << message << "\n";
  throw Failure{1};
}

struct ConfigDeleter {
  void operator()(drrd_config* c) const { drrd_config_destroy(c); }
};
struct CorpusDeleter {
  void operator()(drrd_corpus* c) const { drrd_corpus_destroy(c); }
};
struct DetectorDeleter {
  void operator()(drrd_detector* d) const { drrd_detector_destroy(d); }
};
using ConfigPtr = std::unique_ptr<drrd_config, ConfigDeleter>;
using CorpusPtr = std::unique_ptr<drrd_corpus, CorpusDeleter>;
using DetectorPtr = std::unique_ptr<drrd_detector, DetectorDeleter>;

// Options shared by every subcommand.
struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  bool verbose = false;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON run config")->check(CLI::ExistingFile);
    app->add_option("--set", overrides, "Override a config key, key=value (repeatable)");
    app->add_option("--seed", seed, "Top-level seed");
    app->add_flag("-v,--verbose", verbose, "Progress messages on stderr");
  }
};

ConfigPtr load_config(const std::string& path) {
  drrd_config* c = nullptr;
  if (path.empty()) {
    check(drrd_config_create(&c), "config");
  } else {
    check(drrd_config_load(path.c_str(), &c), "config " + path);
  }
  return ConfigPtr(c);
}

void set_key(drrd_config* config, const std::string& key, const std::string& value) {
  check(drrd_config_set(config, key.c_str(), value.c_str()), "--set " + key);
}

void apply_common(drrd_config* config, const CommonOptions& common) {
  for (const std::string& kv : common.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) usage("--set expects key=value, got '" + kv + "'");
    set_key(config, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (common.seed) set_key(config, "seed", std::to_string(*common.seed));
  if (common.verbose) {
    drrd_set_log_callback([](const char* message, void*) { std::cerr << message << "\n"; }, nullptr);
  }
}

std::string config_json(const drrd_config* config) {
  char* text = nullptr;
  check(drrd_config_to_json(config, &text), "config");
  std::string out(text);
  drrd_string_free(text);
  return out;
}

void echo_config(const std::string& json) { std::cerr << "effective config:\n" << json << "\n"; }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "drrd: cannot write " << path.string() << "\n";
    throw Failure{2};
  }
  out << text;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::vector<char> buffer(1 << 16);
  while (in) {
    in.read(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    EVP_DigestUpdate(ctx.get(), buffer.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", digest[i]);
    hex += byte;
  }
  return hex;
}

// manifest.txt lists "<sha256>  <name>" for every other file in dir.
void write_manifest(const fs::path& dir) {
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().filename() != "manifest.txt") {
      names.push_back(entry.path().filename().string());
    }
  }
  std::sort(names.begin(), names.end());
  std::string manifest;
  for (const std::string& name : names) manifest += sha256_file(dir / name) + "  " + name + "\n";
  write_text(dir / "manifest.txt", manifest);
}

CorpusPtr load_corpus(const std::string& path) {
  drrd_corpus* c = nullptr;
  check(drrd_corpus_load(path.c_str(), &c), "corpus " + path);
  return CorpusPtr(c);
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct SynthOptions {
  CommonOptions common;
  std::optional<int> events;
  std::string out;
};

int run_synth(const SynthOptions& o) {
  ConfigPtr config = load_config(o.common.config_path);
  apply_common(config.get(), o.common);
  if (o.events) set_key(config.get(), "synth.n_events", std::to_string(*o.events));
  echo_config(config_json(config.get()));
  drrd_corpus* raw = nullptr;
  check(drrd_synth_generate(config.get(), &raw), "synth");
  CorpusPtr corpus(raw);
  check(drrd_corpus_save(corpus.get(), o.out.c_str()), "write " + o.out);
  drrd_corpus_summary s{};
  check(drrd_corpus_summary_get(corpus.get(), &s), "summary");
  std::cout << "wrote " << s.events << " events (" << s.rumours << " rumour, " << s.non_rumours << " non-rumour), "
            << s.posts << " posts, " << s.users << " users to " << o.out << "\n";
  return 0;
}

struct TrainOptions {
  CommonOptions common;
  std::string corpus;
  std::string out_dir;
  std::optional<int> fold;
  std::optional<int> epochs;
  bool no_holdout = false;
};

int run_train(const TrainOptions& o) {
  ConfigPtr config = load_config(o.common.config_path);
  apply_common(config.get(), o.common);
  if (o.fold) set_key(config.get(), "train.fold", std::to_string(*o.fold));
  if (o.epochs) set_key(config.get(), "train.epochs", std::to_string(*o.epochs));
  if (o.no_holdout) set_key(config.get(), "train.use_holdout", "false");
  echo_config(config_json(config.get()));
  CorpusPtr corpus = load_corpus(o.corpus);
  drrd_detector* raw = nullptr;
  check(drrd_detector_train(corpus.get(), config.get(), &raw), "train");
  DetectorPtr detector(raw);
  check(drrd_detector_save(detector.get(), o.out_dir.c_str()), "save " + o.out_dir);
  write_manifest(o.out_dir);
  std::cout << "final_train_loss " << format_double(drrd_detector_final_loss(detector.get())) << "\n";
  return 0;
}

struct EvalOptions {
  CommonOptions common;
  std::string corpus;
  std::string out_dir;
  std::string model_dir;
  std::string protocol;
  std::string deadlines;
};

int run_eval(const EvalOptions& o) {
  std::string protocol = o.protocol.empty() ? (o.model_dir.empty() ? "folds" : "single") : o.protocol;
  if (protocol != "folds" && protocol != "single") usage("--protocol must be folds or single");
  if (protocol == "single" && o.model_dir.empty()) usage("--protocol single needs --model-dir");
  if (protocol == "folds" && !o.model_dir.empty()) usage("--model-dir only applies to --protocol single");

  if (!o.model_dir.empty() && !o.common.config_path.empty()) usage("--config and --model-dir are exclusive");
  // A trained model carries its own config; flags and --set refine it.
  ConfigPtr config = load_config(o.model_dir.empty() ? o.common.config_path
                                                     : (fs::path(o.model_dir) / "config.json").string());
  apply_common(config.get(), o.common);
  set_key(config.get(), "eval.protocol", protocol);
  if (!o.deadlines.empty()) set_key(config.get(), "eval.deadlines", "[" + o.deadlines + "]");
  const std::string effective = config_json(config.get());
  echo_config(effective);

  CorpusPtr corpus = load_corpus(o.corpus);
  DetectorPtr detector;
  if (!o.model_dir.empty()) {
    drrd_detector* raw = nullptr;
    check(drrd_detector_load(o.model_dir.c_str(), &raw), "load " + o.model_dir);
    detector.reset(raw);
  }
  fs::create_directories(o.out_dir);
  const fs::path out(o.out_dir);
  const std::string metrics = (out / "metrics.csv").string();
  const std::string early = (out / "early_detection.csv").string();
  drrd_eval_summary summary{};
  check(drrd_evaluate(corpus.get(), config.get(), detector.get(), metrics.c_str(),
                      o.deadlines.empty() ? nullptr : early.c_str(), &summary),
        "eval");
  write_text(out / "config.json", effective + "\n");
  write_manifest(out);
  std::cout << "accuracy " << format_double(summary.accuracy) << " over " << summary.n_evaluated << " events\n";
  return 0;
}

struct PredictOptions {
  CommonOptions common;
  std::string model_dir;
  std::string events;
  std::optional<double> deadline;
  std::string out;
  std::string dump_features;
};

int run_predict(const PredictOptions& o) {
  if (!o.common.config_path.empty() || !o.common.overrides.empty() || o.common.seed) {
    usage("predict takes its configuration from --model-dir");
  }
  if (o.deadline && !(*o.deadline > 0.0)) usage("--deadline must be positive");
  ConfigPtr config = load_config((fs::path(o.model_dir) / "config.json").string());
  apply_common(config.get(), o.common);
  echo_config(config_json(config.get()));
  drrd_detector* raw = nullptr;
  check(drrd_detector_load(o.model_dir.c_str(), &raw), "load " + o.model_dir);
  DetectorPtr detector(raw);
  CorpusPtr corpus = load_corpus(o.events);

  std::ostringstream lines;
  lines << "event_id,p_rumour,p_non_rumour,label\n";
  for (std::size_t i = 0; i < drrd_corpus_size(corpus.get()); ++i) {
    const char* id = drrd_corpus_event_id(corpus.get(), i);
    drrd_prediction p{};
    check(drrd_detector_predict(detector.get(), corpus.get(), i, o.deadline.value_or(0.0), &p),
          std::string("predict ") + id);
    if (p.insufficient_evidence) {
      lines << id << ",,,insufficient_evidence\n";
    } else {
      lines << id << ',' << format_double(p.p_rumour) << ',' << format_double(p.p_non_rumour) << ','
            << (p.label == DRRD_RUMOUR ? "rumour" : "non_rumour") << "\n";
    }
    if (!o.dump_features.empty()) {
      check(drrd_detector_dump_features(detector.get(), corpus.get(), i, o.dump_features.c_str()), "dump features");
    }
  }
  if (o.out.empty()) {
    std::cout << lines.str();
  } else {
    write_text(o.out, lines.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual-branch recurrent rumour detection"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(drrd_version()));

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic labelled corpus");
  synth.common.attach(synth_cmd);
  synth_cmd->add_option("--events", synth.events, "Number of events")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--out", synth.out, "Output corpus file (JSON lines)")->required();

  TrainOptions train;
  auto* train_cmd = app.add_subcommand("train", "Train embeddings and the classifier");
  train.common.attach(train_cmd);
  train_cmd->add_option("--corpus", train.corpus, "Corpus file")->required();
  train_cmd->add_option("--out-dir", train.out_dir, "Directory for checkpoints and logs")->required();
  train_cmd->add_option("--fold", train.fold, "Train on this fold's training part; -1 uses every non-holdout event");
  train_cmd->add_option("--epochs", train.epochs, "Classifier epochs")->check(CLI::PositiveNumber);
  train_cmd->add_flag("--no-holdout", train.no_holdout, "Train without the early-stopping holdout");

  EvalOptions ev;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate by k-fold protocol or on a trained model");
  ev.common.attach(eval_cmd);
  eval_cmd->add_option("--corpus", ev.corpus, "Corpus file")->required();
  eval_cmd->add_option("--out-dir", ev.out_dir, "Directory for metrics")->required();
  eval_cmd->add_option("--model-dir", ev.model_dir, "Trained model directory (single protocol)");
  eval_cmd->add_option("--protocol", ev.protocol, "folds or single");
  eval_cmd->add_option("--deadlines", ev.deadlines, "Comma-separated early-detection deadlines in hours");

  PredictOptions pr;
  auto* predict_cmd = app.add_subcommand("predict", "Score events with a trained model");
  pr.common.attach(predict_cmd);
  predict_cmd->add_option("--model-dir", pr.model_dir, "Trained model directory")->required();
  predict_cmd->add_option("--events", pr.events, "Events file (JSON lines)")->required();
  predict_cmd->add_option("--deadline", pr.deadline, "Only use posts before this many hours");
  predict_cmd->add_option("--out", pr.out, "Write predictions here instead of stdout");
  predict_cmd->add_option("--dump-features", pr.dump_features, "Write per-event feature CSVs into this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*synth_cmd) return run_synth(synth);
    if (*train_cmd) return run_train(train);
    if (*eval_cmd) return run_eval(ev);
    if (*predict_cmd) return run_predict(pr);
  } catch (const Failure& f) {
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "drrd: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
