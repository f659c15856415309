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

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include "drrd/corpus.hpp"
#include "drrd/embed.hpp"
#include "drrd/features.hpp"
#include "drrd/model.hpp"

namespace drrd {

struct PipelineConfig {
  embed::DbowConfig text_embed;
  embed::DbowConfig user_embed = [] {
    embed::DbowConfig c;
    c.min_count = 1;
    return c;
  }();
  ModelConfig model;
  TrainConfig train;
};

struct Prediction {
  bool insufficient_evidence = false;
  Label label = Label::NonRumour;
  double p_rumour = 0.0;
  double p_non_rumour = 0.0;
};

/// A trained rumour detector: the post-text and user-history embedding models
/// plus the dual-branch classifier. Immutable after construction apart from
/// an internal, thread-safe embedding cache.
class Detector {
 public:
  /// Trains both embedding models on `train` only, then the classifier.
  /// `validation` drives early stopping and may be empty.
  static Detector fit(std::span<const Event> train, std::span<const Event> validation, const PipelineConfig& config,
                      TrainLog* log = nullptr);

  Detector(PipelineConfig config, embed::DocEmbeddingModel text, embed::DocEmbeddingModel user, DrrdModel model);
  Detector(Detector&&) noexcept;
  Detector& operator=(Detector&&) noexcept;
  ~Detector();

  /// Eval-mode prediction; label is the argmax. With a deadline the event is
  /// first restricted to engagements before it; if none remain the result is
  /// flagged insufficient_evidence instead of carrying a label.
  Prediction predict(const Event& event, std::optional<double> deadline_hours = std::nullopt) const;

  std::pair<features::SequenceFeatures, features::SequenceFeatures> sequences(const Event& event) const;
  EncodedEvent encode(const Event& event) const;

  /// Post vector: the trained row for a known post_id, otherwise inferred
  /// from the tokenized text with a seed derived from the post_id.
  nn::Vector post_vector(const Post& post) const;
  /// User vector: the trained row for a known user, otherwise inferred from a
  /// history document holding only `event_id` (all-ones when out of
  /// vocabulary).
  nn::Vector user_vector(const std::string& user_id, const std::string& event_id) const;

  const PipelineConfig& config() const { return config_; }
  const embed::DocEmbeddingModel& text_model() const { return text_; }
  const embed::DocEmbeddingModel& user_model() const { return user_; }
  const DrrdModel& model() const { return model_; }

  /// Writes text_embed.bin, user_embed.bin and model.bin into `dir`.
  void save(const std::string& dir) const;
  static Detector load(const std::string& dir);

 private:
  struct Cache;

  PipelineConfig config_;
  embed::DocEmbeddingModel text_;
  embed::DocEmbeddingModel user_;
  DrrdModel model_;
  std::unique_ptr<Cache> cache_;
};

/// Training documents for the two embedding models.
std::vector<embed::TokenList> post_documents(std::span<const Event> events, std::vector<std::string>& tags);
std::vector<embed::TokenList> user_documents(std::span<const Event> events, std::vector<std::string>& tags);

}  // namespace drrd
