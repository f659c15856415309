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

#include "drrd/nn/layers.hpp"

#include <cmath>

#include "drrd/error.hpp"

namespace drrd::nn {

MaxPoolResult max_pool_over_time(const Matrix& states) {
  if (states.rows() == 0 || states.cols() == 0) throw UsageError("max-pooling over an empty state matrix");
  MaxPoolResult out;
  out.values.resize(states.cols());
  out.argmax.resize(static_cast<std::size_t>(states.cols()));
  for (Index l = 0; l < states.cols(); ++l) {
    Index best = 0;
    for (Index k = 1; k < states.rows(); ++k) {
      if (states(k, l) > states(best, l)) best = k;
    }
    out.values[l] = states(best, l);
    out.argmax[static_cast<std::size_t>(l)] = best;
  }
  return out;
}

Matrix max_pool_backward(const MaxPoolResult& pooled, Index n_steps, const Vector& upstream) {
  if (pooled.argmax.empty()) throw UsageError("max-pool backward without a forward pass");
  if (upstream.size() != static_cast<Index>(pooled.argmax.size())) {
    throw UsageError("max-pool upstream gradient has wrong width");
  }
  Matrix d = Matrix::Zero(n_steps, upstream.size());
  for (Index l = 0; l < upstream.size(); ++l) d(pooled.argmax[static_cast<std::size_t>(l)], l) = upstream[l];
  return d;
}

DenseParams DenseParams::zeros(Index d_in, Index d_out) { return {Matrix::Zero(d_in, d_out), RowVector::Zero(d_out)}; }

DenseParams DenseParams::glorot(Index d_in, Index d_out, Rng& rng) {
  DenseParams p = zeros(d_in, d_out);
  const double s = std::sqrt(6.0 / static_cast<double>(d_in + d_out));
  for (Index i = 0; i < p.w.size(); ++i) p.w.data()[i] = rng.uniform(-s, s);
  return p;
}

void DenseParams::collect(ParamViews& out, const std::string& prefix) {
  out.push_back(view_of(prefix + ".w", w));
  out.push_back(view_of(prefix + ".b", b));
}

Vector dense_forward(const Vector& x, const DenseParams& p) {
  if (x.size() != p.w.rows() || p.b.size() != p.w.cols()) throw UsageError("dense layer shape mismatch");
  Vector y = p.b.transpose();
  y.noalias() += p.w.transpose() * x;
  return y;
}

Vector dense_backward(const Vector& x, const DenseParams& p, const Vector& d_out, DenseParams& grads) {
  grads.w.noalias() += x * d_out.transpose();
  grads.b += d_out.transpose();
  return p.w * d_out;
}

Vector softmax(const Vector& logits) {
  const double top = logits.maxCoeff();
  Vector e = (logits.array() - top).exp().matrix();
  return e / e.sum();
}

Vector dense_softmax_forward(const Vector& x, const DenseParams& p) { return softmax(dense_forward(x, p)); }

double cross_entropy(const Vector& prob, int label) {
  if (label < 0 || label >= prob.size()) throw UsageError("label outside the probability vector");
  return -std::log(std::max(prob[label], kProbabilityFloor));
}

Vector dropout_mask(Index size, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw UsageError("dropout rate must lie in [0, 1)");
  const double keep_scale = 1.0 / (1.0 - rate);
  Vector m(size);
  for (Index i = 0; i < size; ++i) m[i] = rng.uniform() < rate ? 0.0 : keep_scale;
  return m;
}

Matrix dropout_mask(Index rows, Index cols, double rate, Rng& rng) {
  const Vector flat = dropout_mask(rows * cols, rate, rng);
  return Eigen::Map<const Matrix>(flat.data(), rows, cols);
}

Vector dropout(const Vector& x, double rate, Mode mode, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) throw UsageError("dropout rate must lie in [0, 1)");
  if (mode == Mode::Eval || rate == 0.0) return x;
  return x.cwiseProduct(dropout_mask(x.size(), rate, rng));
}

}  // namespace drrd::nn
