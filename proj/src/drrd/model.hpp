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
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "drrd/corpus.hpp"
#include "drrd/nn/adam.hpp"
#include "drrd/nn/gru.hpp"
#include "drrd/nn/layers.hpp"

namespace drrd {

struct ModelConfig {
  int d_v = 100;
  int d_f = 128;
  /// Width of the tanh layer between the concatenated features and the
  /// softmax output; 0 connects the features straight to the output.
  int head_hidden = 128;
  double dropout = 0.6;
  /// Dropout between the two GRU layers of each branch.
  double between_layer_dropout = 0.0;
  bool use_text_branch = true;
  bool use_user_branch = true;
  /// Sequence truncation and scaling used when the features were built; kept
  /// with the model so prediction rebuilds identical inputs.
  int max_hours = kDefaultMaxHours;
  double log_base = std::numbers::e;
};

/// All trainable tensors. The head input is always 2 * d_f; a disabled
/// branch contributes zeros.
struct DrrdParams {
  nn::GruStackParams text;
  nn::GruStackParams user;
  nn::DenseParams hidden;  // empty when head_hidden == 0
  nn::DenseParams output;

  static DrrdParams zeros(const ModelConfig& config);
  static DrrdParams glorot(const ModelConfig& config, Rng& rng);
  nn::ParamViews views();
};

/// Cached activations of one forward pass.
struct ForwardTape {
  bool recorded = false;
  nn::GruStackCache text_cache;
  nn::GruStackCache user_cache;
  nn::MaxPoolResult text_pool;
  nn::MaxPoolResult user_pool;
  nn::Index n_steps = 0;
  nn::Vector features;      // [X_F; U_F]
  nn::Vector features_mask;
  nn::Vector head_input;    // features after dropout
  nn::Vector hidden;        // tanh activations
  nn::Vector hidden_mask;
  nn::Vector hidden_dropped;
  nn::Vector probs;         // index 0 non-rumour, index 1 rumour
};

/// Class probabilities indexed by label value. Train mode draws dropout masks
/// from rng; eval mode ignores it. Throws UsageError when the two branches
/// disagree on n.
nn::Vector forward(const DrrdParams& params, const ModelConfig& config, const nn::Matrix& text_x,
                   const nn::Matrix& user_x, nn::Mode mode, Rng* rng, ForwardTape* tape = nullptr);

/// Accumulates dL/dparams for the cross-entropy loss of the recorded pass.
/// Optional outputs receive dL/dX for each branch.
void backward(const DrrdParams& params, const ModelConfig& config, const ForwardTape& tape, Label label,
              DrrdParams& grads, nn::Matrix* d_text_x = nullptr, nn::Matrix* d_user_x = nullptr);

struct TrainConfig {
  int epochs = 30;
  int batch_size = 32;
  int patience = 5;
  nn::AdamConfig adam;
  std::uint64_t seed = 1;
};

struct DrrdModel {
  ModelConfig config;
  TrainConfig train_config;
  DrrdParams params;
  nn::AdamState adam;

  static DrrdModel initialize(const ModelConfig& config, const TrainConfig& train_config);
};

/// Feature matrices for one event, ready for the model.
struct EncodedEvent {
  std::string event_id;
  Label label = Label::NonRumour;
  nn::Matrix text_x;
  nn::Matrix user_x;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;  // mean loss of the dropout-mode passes
  double validation_loss = std::numeric_limits<double>::quiet_NaN();
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
  int best_epoch = -1;
  bool stopped_early = false;

  double final_train_loss() const { return epochs.empty() ? 0.0 : epochs.back().train_loss; }
};

using ProgressFn = std::function<void(const EpochRecord&)>;

/// Mean cross-entropy over mini-batches of per-event gradients, Adam after
/// each batch. With a validation set, keeps the parameters of the epoch with
/// the lowest validation loss and stops after `patience` epochs without
/// improvement. Throws NumericalError naming epoch and event on a non-finite
/// loss.
TrainLog train_model(DrrdModel& model, std::span<const EncodedEvent> train, std::span<const EncodedEvent> validation,
                     const ProgressFn& progress = {});

/// Mean eval-mode cross-entropy.
double mean_loss(const DrrdModel& model, std::span<const EncodedEvent> events);

/// Eval-mode probabilities.
nn::Vector predict_proba(const DrrdModel& model, const EncodedEvent& event);

void save_model(std::ostream& out, const DrrdModel& model);
DrrdModel load_model(std::istream& in);
void save_model(const std::string& path, const DrrdModel& model);
DrrdModel load_model(const std::string& path);

}  // namespace drrd
