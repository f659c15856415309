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

#include "drrd/detector.hpp"

#include <filesystem>
#include <mutex>
#include <sstream>
#include <unordered_map>

#include "drrd/error.hpp"
#include "drrd/log.hpp"
#include "drrd/rng.hpp"

namespace drrd {

struct Detector::Cache {
  std::mutex mutex;
  std::unordered_map<std::string, nn::Vector> posts;
};

std::vector<embed::TokenList> post_documents(std::span<const Event> events, std::vector<std::string>& tags) {
  std::vector<embed::TokenList> docs;
  tags.clear();
  for (const Event& e : events) {
    for (const Post& p : e.posts) {
      docs.push_back(embed::tokenize(p.text));
      tags.push_back(p.post_id);
    }
  }
  return docs;
}

std::vector<embed::TokenList> user_documents(std::span<const Event> events, std::vector<std::string>& tags) {
  std::vector<embed::TokenList> docs;
  tags.clear();
  for (auto& d : embed::build_user_documents(events)) {
    tags.push_back(std::move(d.user_id));
    docs.push_back(std::move(d.tokens));
  }
  return docs;
}

Detector::Detector(PipelineConfig config, embed::DocEmbeddingModel text, embed::DocEmbeddingModel user,
                   DrrdModel model)
    : config_(std::move(config)),
      text_(std::move(text)),
      user_(std::move(user)),
      model_(std::move(model)),
      cache_(std::make_unique<Cache>()) {
  if (text_.dim() != model_.config.d_v || user_.dim() != model_.config.d_v) {
    throw DataError("embedding width does not match the classifier's d_v");
  }
}

Detector::Detector(Detector&&) noexcept = default;
Detector& Detector::operator=(Detector&&) noexcept = default;
Detector::~Detector() = default;

Detector Detector::fit(std::span<const Event> train, std::span<const Event> validation, const PipelineConfig& config,
                       TrainLog* log) {
  if (train.empty()) throw UsageError("no training events");
  PipelineConfig cfg = config;
  cfg.text_embed.dim = cfg.model.d_v;
  cfg.user_embed.dim = cfg.model.d_v;

  std::vector<std::string> tags;
  const auto text_docs = post_documents(train, tags);
  log_info("training post embeddings on " + std::to_string(text_docs.size()) + " posts");
  auto text = embed::train_dbow(text_docs, tags, cfg.text_embed);

  const auto user_docs = user_documents(train, tags);
  log_info("training user embeddings on " + std::to_string(user_docs.size()) + " users");
  auto user = embed::train_dbow(user_docs, tags, cfg.user_embed);

  Detector detector(cfg, std::move(text), std::move(user), DrrdModel::initialize(cfg.model, cfg.train));
  std::vector<EncodedEvent> train_encoded, val_encoded;
  for (const Event& e : train) train_encoded.push_back(detector.encode(e));
  for (const Event& e : validation) val_encoded.push_back(detector.encode(e));

  log_info("training classifier on " + std::to_string(train_encoded.size()) + " events (" +
           std::to_string(val_encoded.size()) + " held out)");
  TrainLog result = train_model(detector.model_, train_encoded, val_encoded, [](const EpochRecord& r) {
    std::ostringstream msg;
    msg << "epoch " << r.epoch << " train_loss " << r.train_loss;
    if (r.validation_loss == r.validation_loss) msg << " validation_loss " << r.validation_loss;
    log_info(msg.str());
  });
  if (log != nullptr) *log = std::move(result);
  return detector;
}

nn::Vector Detector::post_vector(const Post& post) const {
  const auto row = text_.find_doc(post.post_id);
  if (row >= 0) return text_.doc_vectors.row(row).transpose();
  {
    std::lock_guard lock(cache_->mutex);
    const auto it = cache_->posts.find(post.post_id);
    if (it != cache_->posts.end()) return it->second;
  }
  const auto tokens = embed::tokenize(post.text);
  auto inferred = embed::infer_vector(text_, tokens, text_.config.infer_epochs,
                                      fork_seed(text_.config.seed, "post:" + post.post_id));
  std::lock_guard lock(cache_->mutex);
  cache_->posts.emplace(post.post_id, inferred.vector);
  return inferred.vector;
}

nn::Vector Detector::user_vector(const std::string& user_id, const std::string& event_id) const {
  const auto row = user_.find_doc(user_id);
  if (row >= 0) return user_.doc_vectors.row(row).transpose();
  const std::string history[] = {event_id};
  return embed::infer_vector(user_, history, user_.config.infer_epochs, fork_seed(user_.config.seed, "user:" + user_id))
      .vector;
}

std::pair<features::SequenceFeatures, features::SequenceFeatures> Detector::sequences(const Event& event) const {
  const auto& mc = model_.config;
  const PartitionedEvent partitioned = partition_event(event, mc.max_hours);
  auto text = features::build_text_sequence(
      partitioned, [this](const Post& p) { return post_vector(p); }, mc.d_v, mc.log_base);
  auto user = features::build_user_sequence(
      partitioned, [this, &event](const std::string& u) { return user_vector(u, event.event_id); }, mc.d_v,
      mc.log_base);
  return {std::move(text), std::move(user)};
}

EncodedEvent Detector::encode(const Event& event) const {
  auto [text, user] = sequences(event);
  return {event.event_id, event.label, std::move(text.x), std::move(user.x)};
}

Prediction Detector::predict(const Event& event, std::optional<double> deadline_hours) const {
  Prediction out;
  EncodedEvent encoded;
  if (deadline_hours) {
    try {
      encoded = encode(filter_by_deadline(event, *deadline_hours));
    } catch (const InsufficientEvidence&) {
      out.insufficient_evidence = true;
      return out;
    }
  } else {
    encoded = encode(event);
  }
  const nn::Vector probs = predict_proba(model_, encoded);
  out.p_non_rumour = probs[0];
  out.p_rumour = probs[1];
  out.label = out.p_rumour >= out.p_non_rumour ? Label::Rumour : Label::NonRumour;
  return out;
}

void Detector::save(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  embed::save_model((base / "text_embed.bin").string(), text_);
  embed::save_model((base / "user_embed.bin").string(), user_);
  save_model((base / "model.bin").string(), model_);
}

Detector Detector::load(const std::string& dir) {
  const std::filesystem::path base(dir);
  auto text = embed::load_model((base / "text_embed.bin").string());
  auto user = embed::load_model((base / "user_embed.bin").string());
  auto model = load_model((base / "model.bin").string());
  PipelineConfig cfg;
  cfg.text_embed = text.config;
  cfg.user_embed = user.config;
  cfg.model = model.config;
  cfg.train = model.train_config;
  return Detector(std::move(cfg), std::move(text), std::move(user), std::move(model));
}

}  // namespace drrd
