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

#include "drrd/model.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>

#include "drrd/binary_io.hpp"
#include "drrd/error.hpp"

namespace drrd {
namespace {

using nn::Index;
using nn::Matrix;
using nn::Vector;

constexpr char kMagic[8] = {'D', 'R', 'R', 'D', 'M', 'D', 'L', '\0'};
constexpr std::uint32_t kFormatVersion = 1;

void check_config(const ModelConfig& c) {
  if (c.d_v < 1 || c.d_f < 1 || c.head_hidden < 0) throw UsageError("model dimensions must be positive");
  if (!(c.dropout >= 0.0 && c.dropout < 1.0) || !(c.between_layer_dropout >= 0.0 && c.between_layer_dropout < 1.0)) {
    throw UsageError("dropout rates must lie in [0, 1)");
  }
  if (!c.use_text_branch && !c.use_user_branch) throw UsageError("at least one branch must be enabled");
  if (c.max_hours < 1) throw UsageError("max_hours must be at least 1");
  if (!(c.log_base > 1.0)) throw UsageError("log base must exceed 1");
}

// Runs one branch up to the pooled feature vector.
Vector branch_forward(const nn::GruStackParams& p, const ModelConfig& c, const Matrix& x, nn::Mode mode, Rng* rng,
                      nn::GruStackCache* cache, nn::MaxPoolResult* pool) {
  if (x.cols() != c.d_v) throw UsageError("feature width does not match d_v");
  std::optional<Matrix> mask;
  if (mode == nn::Mode::Train && c.between_layer_dropout > 0.0) {
    mask = nn::dropout_mask(x.rows(), c.d_f, c.between_layer_dropout, *rng);
  }
  const Matrix states = nn::gru_forward(x, p, mask ? &*mask : nullptr, cache);
  nn::MaxPoolResult pooled = nn::max_pool_over_time(states);
  Vector out = pooled.values;
  if (pool != nullptr) *pool = std::move(pooled);
  return out;
}

}  // namespace

DrrdParams DrrdParams::zeros(const ModelConfig& c) {
  check_config(c);
  DrrdParams p;
  p.text = nn::GruStackParams::zeros(c.d_v, c.d_f);
  p.user = nn::GruStackParams::zeros(c.d_v, c.d_f);
  if (c.head_hidden > 0) {
    p.hidden = nn::DenseParams::zeros(2 * c.d_f, c.head_hidden);
    p.output = nn::DenseParams::zeros(c.head_hidden, 2);
  } else {
    p.output = nn::DenseParams::zeros(2 * c.d_f, 2);
  }
  return p;
}

DrrdParams DrrdParams::glorot(const ModelConfig& c, Rng& rng) {
  check_config(c);
  DrrdParams p;
  p.text = nn::GruStackParams::glorot(c.d_v, c.d_f, rng);
  p.user = nn::GruStackParams::glorot(c.d_v, c.d_f, rng);
  if (c.head_hidden > 0) {
    p.hidden = nn::DenseParams::glorot(2 * c.d_f, c.head_hidden, rng);
    p.output = nn::DenseParams::glorot(c.head_hidden, 2, rng);
  } else {
    p.output = nn::DenseParams::glorot(2 * c.d_f, 2, rng);
  }
  return p;
}

nn::ParamViews DrrdParams::views() {
  nn::ParamViews out;
  text.collect(out, "text");
  user.collect(out, "user");
  if (hidden.w.size() > 0) hidden.collect(out, "head.hidden");
  output.collect(out, "head.output");
  return out;
}

Vector forward(const DrrdParams& params, const ModelConfig& c, const Matrix& text_x, const Matrix& user_x,
               nn::Mode mode, Rng* rng, ForwardTape* tape) {
  check_config(c);
  if (mode == nn::Mode::Train && rng == nullptr) throw UsageError("train-mode forward needs an rng");
  if (text_x.rows() != user_x.rows()) {
    throw UsageError("text and user sequences have different lengths (" + std::to_string(text_x.rows()) + " vs " +
                     std::to_string(user_x.rows()) + ")");
  }
  const Index d_f = c.d_f;
  Vector features = Vector::Zero(2 * d_f);
  if (c.use_text_branch) {
    features.head(d_f) = branch_forward(params.text, c, text_x, mode, rng, tape ? &tape->text_cache : nullptr,
                                        tape ? &tape->text_pool : nullptr);
  }
  if (c.use_user_branch) {
    features.tail(d_f) = branch_forward(params.user, c, user_x, mode, rng, tape ? &tape->user_cache : nullptr,
                                        tape ? &tape->user_pool : nullptr);
  }

  const bool train = mode == nn::Mode::Train;
  Vector features_mask = train ? nn::dropout_mask(2 * d_f, c.dropout, *rng) : Vector::Ones(2 * d_f);
  Vector head_input = features.cwiseProduct(features_mask);

  Vector hidden, hidden_mask, hidden_dropped;
  Vector logits;
  if (c.head_hidden > 0) {
    hidden = nn::dense_forward(head_input, params.hidden).array().tanh().matrix();
    hidden_mask = train ? nn::dropout_mask(c.head_hidden, c.dropout, *rng) : Vector::Ones(c.head_hidden);
    hidden_dropped = hidden.cwiseProduct(hidden_mask);
    logits = nn::dense_forward(hidden_dropped, params.output);
  } else {
    logits = nn::dense_forward(head_input, params.output);
  }
  Vector probs = nn::softmax(logits);

  if (tape != nullptr) {
    tape->recorded = true;
    tape->n_steps = text_x.rows();
    tape->features = std::move(features);
    tape->features_mask = std::move(features_mask);
    tape->head_input = std::move(head_input);
    tape->hidden = std::move(hidden);
    tape->hidden_mask = std::move(hidden_mask);
    tape->hidden_dropped = std::move(hidden_dropped);
    tape->probs = probs;
  }
  return probs;
}

void backward(const DrrdParams& params, const ModelConfig& c, const ForwardTape& tape, Label label, DrrdParams& grads,
              Matrix* d_text_x, Matrix* d_user_x) {
  if (!tape.recorded) throw UsageError("backward called without a recorded forward pass");
  const Index d_f = c.d_f;
  Vector d_logits = tape.probs;
  d_logits[static_cast<int>(label)] -= 1.0;

  Vector d_head_input;
  if (c.head_hidden > 0) {
    const Vector d_hidden_dropped = nn::dense_backward(tape.hidden_dropped, params.output, d_logits, grads.output);
    const Vector d_pre = (d_hidden_dropped.array() * tape.hidden_mask.array() * (1.0 - tape.hidden.array().square()))
                             .matrix();
    d_head_input = nn::dense_backward(tape.head_input, params.hidden, d_pre, grads.hidden);
  } else {
    d_head_input = nn::dense_backward(tape.head_input, params.output, d_logits, grads.output);
  }
  const Vector d_features = d_head_input.cwiseProduct(tape.features_mask);

  if (c.use_text_branch) {
    const Matrix d_states = nn::max_pool_backward(tape.text_pool, tape.n_steps, d_features.head(d_f));
    Matrix dx = nn::gru_backward(tape.text_cache, params.text, d_states, grads.text);
    if (d_text_x != nullptr) *d_text_x = std::move(dx);
  } else if (d_text_x != nullptr) {
    *d_text_x = Matrix::Zero(tape.n_steps, c.d_v);
  }
  if (c.use_user_branch) {
    const Matrix d_states = nn::max_pool_backward(tape.user_pool, tape.n_steps, d_features.tail(d_f));
    Matrix dx = nn::gru_backward(tape.user_cache, params.user, d_states, grads.user);
    if (d_user_x != nullptr) *d_user_x = std::move(dx);
  } else if (d_user_x != nullptr) {
    *d_user_x = Matrix::Zero(tape.n_steps, c.d_v);
  }
}

DrrdModel DrrdModel::initialize(const ModelConfig& config, const TrainConfig& train_config) {
  DrrdModel m;
  m.config = config;
  m.train_config = train_config;
  Rng rng(fork_seed(train_config.seed, "init"));
  m.params = DrrdParams::glorot(config, rng);
  m.adam.config = train_config.adam;
  m.adam.reset(m.params.views());
  return m;
}

Vector predict_proba(const DrrdModel& model, const EncodedEvent& event) {
  return forward(model.params, model.config, event.text_x, event.user_x, nn::Mode::Eval, nullptr);
}

double mean_loss(const DrrdModel& model, std::span<const EncodedEvent> events) {
  if (events.empty()) return 0.0;
  double total = 0.0;
  for (const auto& e : events) total += nn::cross_entropy(predict_proba(model, e), static_cast<int>(e.label));
  return total / static_cast<double>(events.size());
}

TrainLog train_model(DrrdModel& model, std::span<const EncodedEvent> train, std::span<const EncodedEvent> validation,
                     const ProgressFn& progress) {
  const TrainConfig& tc = model.train_config;
  if (train.empty()) throw UsageError("training set is empty");
  if (tc.epochs < 1 || tc.batch_size < 1) throw UsageError("epochs and batch size must be positive");

  model.adam.config = tc.adam;
  nn::ParamViews param_views = model.params.views();
  if (model.adam.m.size() != param_views.size()) model.adam.reset(param_views);
  DrrdParams grads = DrrdParams::zeros(model.config);
  nn::ParamViews grad_views = grads.views();

  Rng rng(fork_seed(tc.seed, "train"));
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  TrainLog log;
  DrrdParams best = model.params;
  double best_loss = std::numeric_limits<double>::infinity();
  int since_best = 0;
  ForwardTape tape;

  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(tc.batch_size)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(tc.batch_size));
      nn::zero(grad_views);
      for (std::size_t i = start; i < stop; ++i) {
        const EncodedEvent& e = train[order[i]];
        const Vector probs = forward(model.params, model.config, e.text_x, e.user_x, nn::Mode::Train, &rng, &tape);
        const double loss = nn::cross_entropy(probs, static_cast<int>(e.label));
        if (!std::isfinite(loss)) {
          throw NumericalError("non-finite training loss at epoch " + std::to_string(epoch) + " on event '" +
                               e.event_id + "'");
        }
        epoch_loss += loss;
        backward(model.params, model.config, tape, e.label, grads);
      }
      const double scale = 1.0 / static_cast<double>(stop - start);
      for (auto& g : grad_views) {
        for (double& v : g.values()) v *= scale;
      }
      try {
        nn::adam_step(param_views, grad_views, model.adam);
      } catch (const NumericalError& err) {
        throw NumericalError(std::string(err.what()) + " at epoch " + std::to_string(epoch));
      }
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = epoch_loss / static_cast<double>(train.size());
    if (!validation.empty()) {
      record.validation_loss = mean_loss(model, validation);
      if (!std::isfinite(record.validation_loss)) {
        throw NumericalError("non-finite validation loss at epoch " + std::to_string(epoch));
      }
    }
    log.epochs.push_back(record);
    if (progress) progress(record);

    if (!validation.empty()) {
      if (record.validation_loss < best_loss) {
        best_loss = record.validation_loss;
        best = model.params;
        log.best_epoch = epoch;
        since_best = 0;
      } else if (tc.patience > 0 && ++since_best >= tc.patience) {
        log.stopped_early = true;
        break;
      }
    }
  }
  if (!validation.empty()) {
    model.params = std::move(best);
  } else {
    log.best_epoch = static_cast<int>(log.epochs.size()) - 1;
  }
  if (!nn::all_finite(model.params.views())) throw NumericalError("parameters became non-finite during training");
  return log;
}

void save_model(std::ostream& out, const DrrdModel& model) {
  BinaryWriter w(out);
  w.bytes(std::string_view(kMagic, sizeof(kMagic)));
  w.u32(kFormatVersion);
  const auto& c = model.config;
  w.u64(static_cast<std::uint64_t>(c.d_v));
  w.u64(static_cast<std::uint64_t>(c.d_f));
  w.u64(static_cast<std::uint64_t>(c.head_hidden));
  w.f64(c.dropout);
  w.f64(c.between_layer_dropout);
  w.u8(c.use_text_branch ? 1 : 0);
  w.u8(c.use_user_branch ? 1 : 0);
  w.u64(static_cast<std::uint64_t>(c.max_hours));
  w.f64(c.log_base);
  const auto& t = model.train_config;
  w.u64(static_cast<std::uint64_t>(t.epochs));
  w.u64(static_cast<std::uint64_t>(t.batch_size));
  w.i64(t.patience);
  w.f64(t.adam.lr);
  w.f64(t.adam.beta1);
  w.f64(t.adam.beta2);
  w.f64(t.adam.eps);
  w.u64(t.seed);

  auto& params = const_cast<DrrdParams&>(model.params);
  const nn::ParamViews views = params.views();
  w.u64(views.size());
  for (const auto& v : views) {
    w.str(v.name);
    w.u64(static_cast<std::uint64_t>(v.rows));
    w.u64(static_cast<std::uint64_t>(v.cols));
    w.f64s(v.values());
  }
  w.u64(model.adam.t);
  for (std::size_t i = 0; i < views.size(); ++i) {
    if (model.adam.m.size() == views.size()) {
      w.f64s(model.adam.m[i]);
      w.f64s(model.adam.v[i]);
    } else {
      for (std::size_t j = 0; j < 2 * views[i].size(); ++j) w.f64(0.0);
    }
  }
}

DrrdModel load_model(std::istream& in) {
  BinaryReader r(in, "model checkpoint");
  if (r.bytes(sizeof(kMagic)) != std::string_view(kMagic, sizeof(kMagic))) {
    throw DataError("model checkpoint: bad magic bytes");
  }
  const auto version = r.u32();
  if (version != kFormatVersion) throw DataError("model checkpoint: unsupported format version " + std::to_string(version));
  DrrdModel m;
  auto& c = m.config;
  c.d_v = static_cast<int>(r.u64());
  c.d_f = static_cast<int>(r.u64());
  c.head_hidden = static_cast<int>(r.u64());
  c.dropout = r.f64();
  c.between_layer_dropout = r.f64();
  c.use_text_branch = r.u8() != 0;
  c.use_user_branch = r.u8() != 0;
  c.max_hours = static_cast<int>(r.u64());
  c.log_base = r.f64();
  auto& t = m.train_config;
  t.epochs = static_cast<int>(r.u64());
  t.batch_size = static_cast<int>(r.u64());
  t.patience = static_cast<int>(r.i64());
  t.adam.lr = r.f64();
  t.adam.beta1 = r.f64();
  t.adam.beta2 = r.f64();
  t.adam.eps = r.f64();
  t.seed = r.u64();

  try {
    m.params = DrrdParams::zeros(c);
  } catch (const UsageError& e) {
    throw DataError(std::string("model checkpoint: invalid config (") + e.what() + ")");
  }
  const nn::ParamViews views = m.params.views();
  if (r.u64() != views.size()) throw DataError("model checkpoint: tensor count does not match config");
  for (const auto& v : views) {
    const std::string name = r.str();
    const auto rows = r.u64();
    const auto cols = r.u64();
    if (name != v.name || rows != static_cast<std::uint64_t>(v.rows) || cols != static_cast<std::uint64_t>(v.cols)) {
      throw DataError("model checkpoint: unexpected tensor '" + name + "'");
    }
    r.f64s(v.values());
  }
  m.adam.config = t.adam;
  m.adam.reset(views);
  m.adam.t = r.u64();
  for (std::size_t i = 0; i < views.size(); ++i) {
    r.f64s(m.adam.m[i]);
    r.f64s(m.adam.v[i]);
  }
  r.expect_end();
  return m;
}

void save_model(const std::string& path, const DrrdModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model checkpoint '" + path + "'");
  save_model(out, model);
  if (!out) throw IoError("write failed for '" + path + "'");
}

DrrdModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model checkpoint '" + path + "'");
  return load_model(in);
}

}  // namespace drrd
