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

#include <optional>

#include "drrd/nn/tensor.hpp"
#include "drrd/rng.hpp"

namespace drrd::nn {

/// One GRU layer. Pre-activations use the row-vector convention
///   a = x W + h U + b,
/// which is W^T x + U^T h for column vectors, and the update
///   z = s(a_z), r = s(a_r), h~ = tanh(x W_h + (r*h_prev) U_h + b_h),
///   h = (1 - z) * h_prev + z * h~.
struct GruLayerParams {
  Matrix w_z, w_r, w_h;  // d_in x d_f
  Matrix u_z, u_r, u_h;  // d_f x d_f
  RowVector b_z, b_r, b_h;

  static GruLayerParams zeros(Index d_in, Index d_f);
  /// Uniform(-s, s) with s = sqrt(6 / (fan_in + fan_out)); zero biases.
  static GruLayerParams glorot(Index d_in, Index d_f, Rng& rng);

  Index input_dim() const { return w_z.rows(); }
  Index hidden_dim() const { return w_z.cols(); }
  void collect(ParamViews& out, const std::string& prefix);
};

struct GruLayerCache {
  Matrix x;   // n x d_in
  Matrix h;   // (n + 1) x d_f, row 0 is the initial state
  Matrix z;   // n x d_f
  Matrix r;   // n x d_f
  Matrix hc;  // n x d_f candidate states
};

/// Runs the layer over every row of x and returns the n hidden states.
Matrix gru_layer_forward(const Matrix& x, const GruLayerParams& p, GruLayerCache* cache = nullptr,
                         const RowVector* h0 = nullptr);

/// Backpropagation through time. Accumulates into grads and returns dL/dx.
/// dh0, when given, receives the gradient with respect to the initial state.
Matrix gru_layer_backward(const GruLayerCache& cache, const GruLayerParams& p, const Matrix& d_states,
                          GruLayerParams& grads, RowVector* dh0 = nullptr);

/// Single step of the cell.
Vector gru_cell_forward(const Vector& x, const Vector& h_prev, const GruLayerParams& p);

struct GruStackParams {
  GruLayerParams layer1;
  GruLayerParams layer2;

  static GruStackParams zeros(Index d_in, Index d_f);
  static GruStackParams glorot(Index d_in, Index d_f, Rng& rng);
  void collect(ParamViews& out, const std::string& prefix);
};

struct GruStackCache {
  GruLayerCache layer1;
  GruLayerCache layer2;
  std::optional<Matrix> between_mask;
};

/// Two stacked layers with zero initial states; layer 2 reads layer 1's
/// states, optionally multiplied element-wise by between_mask (dropout).
/// Returns the n top-layer states. Throws UsageError when x has no rows.
Matrix gru_forward(const Matrix& x, const GruStackParams& p, const Matrix* between_mask = nullptr,
                   GruStackCache* cache = nullptr);

Matrix gru_backward(const GruStackCache& cache, const GruStackParams& p, const Matrix& d_top, GruStackParams& grads);

}  // namespace drrd::nn
