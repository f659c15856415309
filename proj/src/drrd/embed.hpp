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
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "drrd/corpus.hpp"

namespace drrd::embed {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using TokenList = std::vector<std::string>;
using Tokenizer = std::function<TokenList(std::string_view)>;

/// Splits on Unicode whitespace, lowercases ASCII letters and strips
/// punctuation from both ends of each token. Tokens that are pure
/// punctuation disappear.
TokenList tokenize(std::string_view text);

class Vocabulary {
 public:
  Vocabulary() = default;
  /// Rebuilds the noise table from explicit (token, count) pairs.
  Vocabulary(std::vector<std::string> tokens, std::vector<std::uint64_t> counts, double noise_power);

  std::size_t size() const { return tokens_.size(); }
  const std::string& token(std::size_t i) const { return tokens_[i]; }
  std::uint64_t count(std::size_t i) const { return counts_[i]; }
  double noise_power() const { return noise_power_; }
  /// Returns -1 for out-of-vocabulary tokens.
  std::int64_t index_of(std::string_view token) const;
  double noise_probability(std::size_t i) const;
  /// Inverse-CDF lookup for u in [0, 1).
  std::size_t sample_noise(double u) const;

 private:
  std::vector<std::string> tokens_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<double> noise_cdf_;
  double noise_power_ = 0.75;
};

/// Counts tokens, drops those rarer than min_count and orders the rest by
/// descending frequency (ties lexicographic). Throws DataError when nothing
/// survives.
Vocabulary build_vocab(std::span<const TokenList> documents, std::uint64_t min_count, double noise_power);

struct DbowConfig {
  int dim = 100;
  int epochs = 20;
  int infer_epochs = 50;
  int negatives = 5;
  std::uint64_t min_count = 2;
  double noise_power = 0.75;
  double lr_start = 0.025;
  double lr_end = 0.0001;
  std::uint64_t seed = 1;
};

struct DocEmbeddingModel {
  DbowConfig config;
  Vocabulary vocab;
  /// External identifier per training document (post_id or user_id).
  std::vector<std::string> doc_tags;
  /// False when a training document had no in-vocabulary token; such rows
  /// hold the all-ones fallback.
  std::vector<std::uint8_t> doc_in_vocab;
  Matrix doc_vectors;
  Matrix word_output_vectors;
  /// Mean negative-sampling loss per epoch; not serialized.
  std::vector<double> epoch_losses;

  int dim() const { return config.dim; }
  /// Row index for a tag, or -1.
  std::int64_t find_doc(std::string_view tag) const;

  void rebuild_tag_index();

 private:
  std::unordered_map<std::string, std::size_t> tag_index_;
};

/// Trains paragraph vectors with the DBOW objective and negative sampling.
/// Deterministic for a given (documents, tags, config). Throws
/// NumericalError when the loss stops being finite.
DocEmbeddingModel train_dbow(std::span<const TokenList> documents, std::vector<std::string> tags,
                             const DbowConfig& config);

struct InferResult {
  Vector vector;
  bool out_of_vocabulary = false;
};

/// Fits a fresh document vector against the frozen output vectors. With no
/// in-vocabulary token the result is the all-ones vector, flagged.
InferResult infer_vector(const DocEmbeddingModel& model, std::span<const std::string> document, int infer_epochs,
                         std::uint64_t seed);

/// Loss and exact gradients of
///   -log s(v.u_pos) - sum_i log s(-v.u_neg_i)
/// for a single (document, target) pair. grad_negatives has one row per
/// negative.
struct PairGradient {
  double loss = 0.0;
  Vector grad_doc;
  Vector grad_positive;
  Matrix grad_negatives;
};
PairGradient negative_sampling_gradient(const Vector& doc, const Vector& positive, const Matrix& negatives);

/// One SGD step on the pair loss, in place. Dot products are taken before any
/// row is touched, so the step equals -lr times the exact gradient even when a
/// negative repeats. Returns the pre-update loss.
double negative_sampling_step(Eigen::Ref<Vector> doc, Matrix& outputs, std::size_t positive,
                              std::span<const std::size_t> negatives, double lr, bool update_outputs);

struct UserDocument {
  std::string user_id;
  TokenList tokens;
};

/// One document per user; tokens are the event_ids the user posted in,
/// ordered by first engagement (ties by event_id), without repeats. Output is
/// sorted by user_id.
std::vector<UserDocument> build_user_documents(std::span<const Event> events);

void save_model(std::ostream& out, const DocEmbeddingModel& model);
DocEmbeddingModel load_model(std::istream& in);
void save_model(const std::string& path, const DocEmbeddingModel& model);
DocEmbeddingModel load_model(const std::string& path);

}  // namespace drrd::embed
