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

#include <vector>

#include "drrd/nn/tensor.hpp"
#include "drrd/rng.hpp"

namespace drrd::nn {

struct MaxPoolResult {
  Vector values;
  /// Winning time step per column; ties go to the earliest step.
  std::vector<Index> argmax;
};

MaxPoolResult max_pool_over_time(const Matrix& states);

/// Routes each column's upstream gradient to its argmax row.
Matrix max_pool_backward(const MaxPoolResult& pooled, Index n_steps, const Vector& upstream);

struct DenseParams {
  Matrix w;  // d_in x d_out
  RowVector b;

  static DenseParams zeros(Index d_in, Index d_out);
  static DenseParams glorot(Index d_in, Index d_out, Rng& rng);
  void collect(ParamViews& out, const std::string& prefix);
};

/// W^T x + b.
Vector dense_forward(const Vector& x, const DenseParams& p);
/// Accumulates dW and db; returns dL/dx.
Vector dense_backward(const Vector& x, const DenseParams& p, const Vector& d_out, DenseParams& grads);

/// Max-subtracted softmax.
Vector softmax(const Vector& logits);
Vector dense_softmax_forward(const Vector& x, const DenseParams& p);

constexpr double kProbabilityFloor = 1e-12;

/// -ln(max(prob[label], 1e-12)).
double cross_entropy(const Vector& prob, int label);

/// Inverted-dropout mask: each entry is 0 with probability rate, otherwise
/// 1 / (1 - rate). Throws UsageError unless 0 <= rate < 1.
Vector dropout_mask(Index size, double rate, Rng& rng);
Matrix dropout_mask(Index rows, Index cols, double rate, Rng& rng);

/// Identity in eval mode; applies a fresh mask in train mode.
Vector dropout(const Vector& x, double rate, Mode mode, Rng& rng);

}  // namespace drrd::nn
