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

#include "drrd/embed.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "drrd/binary_io.hpp"
#include "drrd/error.hpp"
#include "drrd/rng.hpp"

namespace drrd::embed {
namespace {

constexpr char kMagic[8] = {'D', 'R', 'R', 'D', 'E', 'M', 'B', '\0'};
constexpr std::uint32_t kFormatVersion = 1;

// Decodes one UTF-8 code point starting at text[i]; invalid bytes decode to
// themselves with width 1.
char32_t decode(std::string_view text, std::size_t i, std::size_t& width) {
  const auto b0 = static_cast<unsigned char>(text[i]);
  auto cont = [&](std::size_t k) -> int {
    if (i + k >= text.size()) return -1;
    const auto b = static_cast<unsigned char>(text[i + k]);
    return (b & 0xC0u) == 0x80u ? (b & 0x3F) : -1;
  };
  if (b0 < 0x80) {
    width = 1;
    return b0;
  }
  if ((b0 & 0xE0u) == 0xC0u && cont(1) >= 0) {
    width = 2;
    return static_cast<char32_t>(((b0 & 0x1Fu) << 6) | static_cast<unsigned>(cont(1)));
  }
  if ((b0 & 0xF0u) == 0xE0u && cont(1) >= 0 && cont(2) >= 0) {
    width = 3;
    return static_cast<char32_t>(((b0 & 0x0Fu) << 12) | (static_cast<unsigned>(cont(1)) << 6) |
                                 static_cast<unsigned>(cont(2)));
  }
  if ((b0 & 0xF8u) == 0xF0u && cont(1) >= 0 && cont(2) >= 0 && cont(3) >= 0) {
    width = 4;
    return static_cast<char32_t>(((b0 & 0x07u) << 18) | (static_cast<unsigned>(cont(1)) << 12) |
                                 (static_cast<unsigned>(cont(2)) << 6) | static_cast<unsigned>(cont(3)));
  }
  width = 1;
  return b0;
}

bool is_space(char32_t c) {
  return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F || c == 0x205F || c == 0x3000;
}

bool is_punct(char32_t c) {
  if (c < 0x80) return std::ispunct(static_cast<int>(c)) != 0;
  return c == 0xA1 || c == 0xA7 || c == 0xAB || c == 0xB6 || c == 0xB7 || c == 0xBB || c == 0xBF ||
         (c >= 0x2010 && c <= 0x2027) || (c >= 0x2030 && c <= 0x205E) || (c >= 0x3001 && c <= 0x3003) ||
         (c >= 0x3008 && c <= 0x3011) || (c >= 0x3014 && c <= 0x301F) || (c >= 0xFF01 && c <= 0xFF0F) ||
         (c >= 0xFF1A && c <= 0xFF20) || (c >= 0xFF3B && c <= 0xFF40) || (c >= 0xFF5B && c <= 0xFF65);
}

struct Glyph {
  std::size_t begin;
  std::size_t end;
  bool punct;
};

std::string finish_token(std::string_view text, const std::vector<Glyph>& glyphs) {
  std::size_t lo = 0;
  std::size_t hi = glyphs.size();
  while (lo < hi && glyphs[lo].punct) ++lo;
  while (hi > lo && glyphs[hi - 1].punct) --hi;
  if (lo == hi) return {};
  std::string token(text.substr(glyphs[lo].begin, glyphs[hi - 1].end - glyphs[lo].begin));
  for (char& ch : token) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  return token;
}

inline double log_sigmoid(double x) {
  // log s(x) = -log(1 + e^-x), stable for both signs.
  return x >= 0.0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::vector<std::size_t> to_indices(const Vocabulary& vocab, std::span<const std::string> tokens) {
  std::vector<std::size_t> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    const auto idx = vocab.index_of(t);
    if (idx >= 0) out.push_back(static_cast<std::size_t>(idx));
  }
  return out;
}

Vector random_doc_vector(int dim, Rng& rng) {
  Vector v(dim);
  for (int j = 0; j < dim; ++j) v[j] = (rng.uniform() - 0.5) / dim;
  return v;
}

void draw_negatives(const Vocabulary& vocab, std::size_t target, int k, Rng& rng, std::vector<std::size_t>& out) {
  out.clear();
  for (int i = 0; i < k; ++i) {
    const auto n = vocab.sample_noise(rng.uniform());
    if (n != target) out.push_back(n);
  }
}

double lr_at(const DbowConfig& c, double progress) {
  return std::max(c.lr_end, c.lr_start - (c.lr_start - c.lr_end) * progress);
}

}  // namespace

TokenList tokenize(std::string_view text) {
  TokenList tokens;
  std::vector<Glyph> glyphs;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t width = 1;
    const char32_t c = decode(text, i, width);
    if (is_space(c)) {
      if (!glyphs.empty()) {
        auto t = finish_token(text, glyphs);
        if (!t.empty()) tokens.push_back(std::move(t));
        glyphs.clear();
      }
    } else {
      glyphs.push_back({i, i + width, is_punct(c)});
    }
    i += width;
  }
  if (!glyphs.empty()) {
    auto t = finish_token(text, glyphs);
    if (!t.empty()) tokens.push_back(std::move(t));
  }
  return tokens;
}

Vocabulary::Vocabulary(std::vector<std::string> tokens, std::vector<std::uint64_t> counts, double noise_power)
    : tokens_(std::move(tokens)), counts_(std::move(counts)), noise_power_(noise_power) {
  if (tokens_.size() != counts_.size()) throw DataError("vocabulary token/count length mismatch");
  if (tokens_.empty()) throw DataError("empty vocabulary");
  index_.reserve(tokens_.size());
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], i).second) throw DataError("duplicate vocabulary token '" + tokens_[i] + "'");
  }
  noise_cdf_.resize(tokens_.size());
  double total = 0.0;
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    total += std::pow(static_cast<double>(counts_[i]), noise_power_);
    noise_cdf_[i] = total;
  }
  for (double& v : noise_cdf_) v /= total;
  noise_cdf_.back() = 1.0;
}

std::int64_t Vocabulary::index_of(std::string_view token) const {
  const auto it = index_.find(std::string(token));
  return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

double Vocabulary::noise_probability(std::size_t i) const {
  return i == 0 ? noise_cdf_[0] : noise_cdf_[i] - noise_cdf_[i - 1];
}

std::size_t Vocabulary::sample_noise(double u) const {
  const auto it = std::upper_bound(noise_cdf_.begin(), noise_cdf_.end(), u);
  return std::min(static_cast<std::size_t>(it - noise_cdf_.begin()), noise_cdf_.size() - 1);
}

Vocabulary build_vocab(std::span<const TokenList> documents, std::uint64_t min_count, double noise_power) {
  if (documents.empty()) throw DataError("cannot build a vocabulary from zero documents");
  std::map<std::string, std::uint64_t> freq;
  for (const auto& doc : documents) {
    for (const auto& t : doc) ++freq[t];
  }
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [token, count] : freq) {
    if (count >= min_count) kept.emplace_back(token, count);
  }
  if (kept.empty()) throw DataError("every token is below min_count");
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tokens;
  std::vector<std::uint64_t> counts;
  for (auto& [token, count] : kept) {
    tokens.push_back(token);
    counts.push_back(count);
  }
  return Vocabulary(std::move(tokens), std::move(counts), noise_power);
}

std::int64_t DocEmbeddingModel::find_doc(std::string_view tag) const {
  const auto it = tag_index_.find(std::string(tag));
  return it == tag_index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

void DocEmbeddingModel::rebuild_tag_index() {
  tag_index_.clear();
  tag_index_.reserve(doc_tags.size());
  for (std::size_t i = 0; i < doc_tags.size(); ++i) {
    if (!tag_index_.emplace(doc_tags[i], i).second) throw DataError("duplicate document tag '" + doc_tags[i] + "'");
  }
}

PairGradient negative_sampling_gradient(const Vector& doc, const Vector& positive, const Matrix& negatives) {
  PairGradient g;
  const double fp = doc.dot(positive);
  g.loss = -log_sigmoid(fp);
  const double gp = sigmoid(fp) - 1.0;
  g.grad_doc = gp * positive;
  g.grad_positive = gp * doc;
  g.grad_negatives.resize(negatives.rows(), doc.size());
  for (Eigen::Index i = 0; i < negatives.rows(); ++i) {
    const double fn = negatives.row(i).dot(doc);
    g.loss -= log_sigmoid(-fn);
    const double gn = sigmoid(fn);
    g.grad_doc += gn * negatives.row(i).transpose();
    g.grad_negatives.row(i) = gn * doc.transpose();
  }
  return g;
}

double negative_sampling_step(Eigen::Ref<Vector> doc, Matrix& outputs, std::size_t positive,
                              std::span<const std::size_t> negatives, double lr, bool update_outputs) {
  // Coefficients c_i = dL/df_i: s(f) - 1 for the target, s(f) for negatives.
  const auto k = negatives.size();
  double coeffs[64];
  std::vector<double> spill;
  double* c = coeffs;
  if (k + 1 > 64) {
    spill.resize(k + 1);
    c = spill.data();
  }
  thread_local Vector doc_old;
  doc_old = doc;
  const double fp = outputs.row(static_cast<Eigen::Index>(positive)).dot(doc_old);
  double loss = -log_sigmoid(fp);
  c[0] = sigmoid(fp) - 1.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double fn = outputs.row(static_cast<Eigen::Index>(negatives[i])).dot(doc_old);
    loss -= log_sigmoid(-fn);
    c[i + 1] = sigmoid(fn);
  }
  doc.noalias() -= lr * c[0] * outputs.row(static_cast<Eigen::Index>(positive)).transpose();
  for (std::size_t i = 0; i < k; ++i) {
    doc.noalias() -= lr * c[i + 1] * outputs.row(static_cast<Eigen::Index>(negatives[i])).transpose();
  }
  if (update_outputs) {
    outputs.row(static_cast<Eigen::Index>(positive)).noalias() -= lr * c[0] * doc_old.transpose();
    for (std::size_t i = 0; i < k; ++i) {
      outputs.row(static_cast<Eigen::Index>(negatives[i])).noalias() -= lr * c[i + 1] * doc_old.transpose();
    }
  }
  return loss;
}

DocEmbeddingModel train_dbow(std::span<const TokenList> documents, std::vector<std::string> tags,
                             const DbowConfig& config) {
  if (config.dim < 1) throw UsageError("embedding dimension must be positive");
  if (config.epochs < 1) throw UsageError("epochs must be positive");
  if (config.negatives < 0) throw UsageError("negatives must be non-negative");
  if (tags.size() != documents.size()) throw UsageError("one tag per document required");

  DocEmbeddingModel model;
  model.config = config;
  model.vocab = build_vocab(documents, config.min_count, config.noise_power);
  model.doc_tags = std::move(tags);
  model.rebuild_tag_index();

  const auto n_docs = documents.size();
  std::vector<std::vector<std::size_t>> encoded(n_docs);
  std::size_t total_tokens = 0;
  for (std::size_t d = 0; d < n_docs; ++d) {
    encoded[d] = to_indices(model.vocab, documents[d]);
    total_tokens += encoded[d].size();
  }

  Rng rng(config.seed);
  model.doc_vectors.resize(static_cast<Eigen::Index>(n_docs), config.dim);
  model.doc_in_vocab.assign(n_docs, 1);
  for (std::size_t d = 0; d < n_docs; ++d) {
    model.doc_vectors.row(static_cast<Eigen::Index>(d)) = random_doc_vector(config.dim, rng).transpose();
  }
  model.word_output_vectors = Matrix::Zero(static_cast<Eigen::Index>(model.vocab.size()), config.dim);

  std::vector<std::size_t> order(n_docs);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<std::size_t> negatives;
  const double total_steps = static_cast<double>(std::max<std::size_t>(1, total_tokens)) * config.epochs;
  double steps_done = 0.0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    double epoch_loss = 0.0;
    std::size_t pairs = 0;
    for (const std::size_t d : order) {
      for (const std::size_t target : encoded[d]) {
        const double lr = lr_at(config, steps_done / total_steps);
        draw_negatives(model.vocab, target, config.negatives, rng, negatives);
        epoch_loss += negative_sampling_step(model.doc_vectors.row(static_cast<Eigen::Index>(d)).transpose(),
                                             model.word_output_vectors, target, negatives, lr, true);
        ++pairs;
        steps_done += 1.0;
      }
    }
    const double mean = pairs > 0 ? epoch_loss / static_cast<double>(pairs) : 0.0;
    if (!std::isfinite(mean)) {
      throw NumericalError("DBOW training diverged at epoch " + std::to_string(epoch) +
                           " (non-finite loss); lower the learning rate");
    }
    model.epoch_losses.push_back(mean);
  }

  for (std::size_t d = 0; d < n_docs; ++d) {
    if (encoded[d].empty()) {
      model.doc_in_vocab[d] = 0;
      model.doc_vectors.row(static_cast<Eigen::Index>(d)).setOnes();
    }
  }
  if (!model.doc_vectors.allFinite() || !model.word_output_vectors.allFinite()) {
    throw NumericalError("DBOW training produced non-finite vectors");
  }
  return model;
}

InferResult infer_vector(const DocEmbeddingModel& model, std::span<const std::string> document, int infer_epochs,
                         std::uint64_t seed) {
  if (infer_epochs < 1) throw UsageError("infer_epochs must be positive");
  const auto tokens = to_indices(model.vocab, document);
  if (tokens.empty()) return {Vector::Ones(model.dim()), true};

  Rng rng(seed);
  Vector doc = random_doc_vector(model.dim(), rng);
  // The outputs are never written when update_outputs is false.
  auto& outputs = const_cast<Matrix&>(model.word_output_vectors);
  std::vector<std::size_t> negatives;
  const double total = static_cast<double>(tokens.size()) * infer_epochs;
  double step = 0.0;
  for (int epoch = 0; epoch < infer_epochs; ++epoch) {
    for (const std::size_t target : tokens) {
      draw_negatives(model.vocab, target, model.config.negatives, rng, negatives);
      negative_sampling_step(doc, outputs, target, negatives, lr_at(model.config, step / total), false);
      step += 1.0;
    }
  }
  if (!doc.allFinite()) throw NumericalError("inferred vector is not finite");
  return {std::move(doc), false};
}

std::vector<UserDocument> build_user_documents(std::span<const Event> events) {
  // user -> event -> first engagement time
  std::map<std::string, std::map<std::string, std::int64_t>> first_seen;
  for (const Event& e : events) {
    for (const Post& p : e.posts) {
      auto& per_event = first_seen[p.user_id];
      const auto [it, inserted] = per_event.emplace(e.event_id, p.timestamp_s);
      if (!inserted) it->second = std::min(it->second, p.timestamp_s);
    }
  }
  std::vector<UserDocument> docs;
  docs.reserve(first_seen.size());
  for (auto& [user, per_event] : first_seen) {
    std::vector<std::pair<std::int64_t, std::string>> ordered;
    ordered.reserve(per_event.size());
    for (auto& [event_id, t] : per_event) ordered.emplace_back(t, event_id);
    std::sort(ordered.begin(), ordered.end());
    UserDocument doc{user, {}};
    for (auto& [t, event_id] : ordered) doc.tokens.push_back(std::move(event_id));
    docs.push_back(std::move(doc));
  }
  return docs;
}

void save_model(std::ostream& out, const DocEmbeddingModel& model) {
  BinaryWriter w(out);
  w.bytes(std::string_view(kMagic, sizeof(kMagic)));
  w.u32(kFormatVersion);
  const auto& c = model.config;
  w.u64(static_cast<std::uint64_t>(c.dim));
  w.u64(model.vocab.size());
  w.u64(model.doc_tags.size());
  w.u64(static_cast<std::uint64_t>(c.epochs));
  w.u64(static_cast<std::uint64_t>(c.infer_epochs));
  w.u64(static_cast<std::uint64_t>(c.negatives));
  w.u64(c.min_count);
  w.u64(c.seed);
  w.f64(c.noise_power);
  w.f64(c.lr_start);
  w.f64(c.lr_end);
  for (std::size_t i = 0; i < model.vocab.size(); ++i) {
    w.str(model.vocab.token(i));
    w.u64(model.vocab.count(i));
  }
  for (std::size_t i = 0; i < model.doc_tags.size(); ++i) {
    w.str(model.doc_tags[i]);
    w.u8(model.doc_in_vocab[i]);
  }
  w.f64s({model.doc_vectors.data(), static_cast<std::size_t>(model.doc_vectors.size())});
  w.f64s({model.word_output_vectors.data(), static_cast<std::size_t>(model.word_output_vectors.size())});
}

DocEmbeddingModel load_model(std::istream& in) {
  BinaryReader r(in, "embedding checkpoint");
  if (r.bytes(sizeof(kMagic)) != std::string_view(kMagic, sizeof(kMagic))) {
    throw DataError("embedding checkpoint: bad magic bytes");
  }
  const auto version = r.u32();
  if (version != kFormatVersion) {
    throw DataError("embedding checkpoint: unsupported format version " + std::to_string(version));
  }
  DocEmbeddingModel model;
  auto& c = model.config;
  const auto dim = r.u64();
  const auto vocab_size = r.u64();
  const auto n_docs = r.u64();
  if (dim == 0 || dim > (1u << 20)) throw DataError("embedding checkpoint: implausible dimension");
  c.dim = static_cast<int>(dim);
  c.epochs = static_cast<int>(r.u64());
  c.infer_epochs = static_cast<int>(r.u64());
  c.negatives = static_cast<int>(r.u64());
  c.min_count = r.u64();
  c.seed = r.u64();
  c.noise_power = r.f64();
  c.lr_start = r.f64();
  c.lr_end = r.f64();
  std::vector<std::string> tokens;
  std::vector<std::uint64_t> counts;
  for (std::uint64_t i = 0; i < vocab_size; ++i) {
    tokens.push_back(r.str());
    counts.push_back(r.u64());
  }
  model.vocab = Vocabulary(std::move(tokens), std::move(counts), c.noise_power);
  for (std::uint64_t i = 0; i < n_docs; ++i) {
    model.doc_tags.push_back(r.str());
    model.doc_in_vocab.push_back(r.u8());
  }
  model.rebuild_tag_index();
  model.doc_vectors.resize(static_cast<Eigen::Index>(n_docs), c.dim);
  model.word_output_vectors.resize(static_cast<Eigen::Index>(vocab_size), c.dim);
  r.f64s({model.doc_vectors.data(), static_cast<std::size_t>(model.doc_vectors.size())});
  r.f64s({model.word_output_vectors.data(), static_cast<std::size_t>(model.word_output_vectors.size())});
  r.expect_end();
  return model;
}

void save_model(const std::string& path, const DocEmbeddingModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write embedding checkpoint '" + path + "'");
  save_model(out, model);
  if (!out) throw IoError("write failed for '" + path + "'");
}

DocEmbeddingModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open embedding checkpoint '" + path + "'");
  return load_model(in);
}

}  // namespace drrd::embed
