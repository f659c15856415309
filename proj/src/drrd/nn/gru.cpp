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

#include "drrd/nn/gru.hpp"

#include <cmath>

#include "drrd/error.hpp"

namespace drrd::nn {
namespace {

Matrix uniform_matrix(Index rows, Index cols, double scale, Rng& rng) {
  Matrix m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-scale, scale);
  return m;
}

template <typename Derived>
auto sigmoid(const Eigen::MatrixBase<Derived>& a) {
  return (1.0 + (-a.array()).exp()).inverse().matrix();
}

void check_shapes(const GruLayerParams& p) {
  const Index d_in = p.w_z.rows();
  const Index d_f = p.w_z.cols();
  const bool ok = p.w_r.rows() == d_in && p.w_h.rows() == d_in && p.w_r.cols() == d_f && p.w_h.cols() == d_f &&
                  p.u_z.rows() == d_f && p.u_z.cols() == d_f && p.u_r.rows() == d_f && p.u_r.cols() == d_f &&
                  p.u_h.rows() == d_f && p.u_h.cols() == d_f && p.b_z.size() == d_f && p.b_r.size() == d_f &&
                  p.b_h.size() == d_f;
  if (!ok) throw UsageError("inconsistent GRU parameter shapes");
}

}  // namespace

GruLayerParams GruLayerParams::zeros(Index d_in, Index d_f) {
  GruLayerParams p;
  p.w_z = p.w_r = p.w_h = Matrix::Zero(d_in, d_f);
  p.u_z = p.u_r = p.u_h = Matrix::Zero(d_f, d_f);
  p.b_z = p.b_r = p.b_h = RowVector::Zero(d_f);
  return p;
}

GruLayerParams GruLayerParams::glorot(Index d_in, Index d_f, Rng& rng) {
  GruLayerParams p = zeros(d_in, d_f);
  const double sw = std::sqrt(6.0 / static_cast<double>(d_in + d_f));
  const double su = std::sqrt(6.0 / static_cast<double>(2 * d_f));
  p.w_z = uniform_matrix(d_in, d_f, sw, rng);
  p.w_r = uniform_matrix(d_in, d_f, sw, rng);
  p.w_h = uniform_matrix(d_in, d_f, sw, rng);
  p.u_z = uniform_matrix(d_f, d_f, su, rng);
  p.u_r = uniform_matrix(d_f, d_f, su, rng);
  p.u_h = uniform_matrix(d_f, d_f, su, rng);
  return p;
}

void GruLayerParams::collect(ParamViews& out, const std::string& prefix) {
  out.push_back(view_of(prefix + ".w_z", w_z));
  out.push_back(view_of(prefix + ".w_r", w_r));
  out.push_back(view_of(prefix + ".w_h", w_h));
  out.push_back(view_of(prefix + ".u_z", u_z));
  out.push_back(view_of(prefix + ".u_r", u_r));
  out.push_back(view_of(prefix + ".u_h", u_h));
  out.push_back(view_of(prefix + ".b_z", b_z));
  out.push_back(view_of(prefix + ".b_r", b_r));
  out.push_back(view_of(prefix + ".b_h", b_h));
}

Matrix gru_layer_forward(const Matrix& x, const GruLayerParams& p, GruLayerCache* cache, const RowVector* h0) {
  check_shapes(p);
  if (x.cols() != p.input_dim()) throw UsageError("GRU input width does not match W rows");
  const Index n = x.rows();
  const Index d_f = p.hidden_dim();

  // Input projections for all steps at once; only the recurrence is serial.
  Matrix xz = x * p.w_z;
  Matrix xr = x * p.w_r;
  Matrix xh = x * p.w_h;
  xz.rowwise() += p.b_z;
  xr.rowwise() += p.b_r;
  xh.rowwise() += p.b_h;

  Matrix h(n + 1, d_f);
  if (h0 != nullptr) {
    if (h0->size() != d_f) throw UsageError("initial state width does not match d_f");
    h.row(0) = *h0;
  } else {
    h.row(0).setZero();
  }
  Matrix z(n, d_f), r(n, d_f), hc(n, d_f);
  RowVector rh(d_f);
  for (Index k = 0; k < n; ++k) {
    const auto hp = h.row(k);
    z.row(k) = sigmoid(xz.row(k) + hp * p.u_z);
    r.row(k) = sigmoid(xr.row(k) + hp * p.u_r);
    rh = r.row(k).cwiseProduct(hp);
    hc.row(k) = (xh.row(k) + rh * p.u_h).array().tanh().matrix();
    h.row(k + 1) = hp + z.row(k).cwiseProduct(hc.row(k) - hp);
  }

  Matrix states = h.bottomRows(n);
  if (cache != nullptr) {
    cache->x = x;
    cache->h = std::move(h);
    cache->z = std::move(z);
    cache->r = std::move(r);
    cache->hc = std::move(hc);
  }
  return states;
}

Matrix gru_layer_backward(const GruLayerCache& c, const GruLayerParams& p, const Matrix& d_states,
                          GruLayerParams& grads, RowVector* dh0) {
  const Index n = c.x.rows();
  const Index d_f = p.hidden_dim();
  if (c.h.rows() != n + 1 || n == 0) throw UsageError("GRU backward called without a recorded forward pass");
  if (d_states.rows() != n || d_states.cols() != d_f) throw UsageError("GRU upstream gradient has wrong shape");

  Matrix da_z(n, d_f), da_r(n, d_f), da_h(n, d_f);
  RowVector dh_next = RowVector::Zero(d_f);
  RowVector dh(d_f), dhp(d_f), d_rh(d_f);
  for (Index k = n - 1; k >= 0; --k) {
    const auto hp = c.h.row(k);
    const auto z = c.z.row(k);
    const auto r = c.r.row(k);
    const auto hc = c.hc.row(k);
    dh = d_states.row(k) + dh_next;

    da_h.row(k) = (dh.array() * z.array() * (1.0 - hc.array().square())).matrix();
    d_rh.noalias() = da_h.row(k) * p.u_h.transpose();
    da_r.row(k) = (d_rh.array() * hp.array() * r.array() * (1.0 - r.array())).matrix();
    da_z.row(k) = (dh.array() * (hc - hp).array() * z.array() * (1.0 - z.array())).matrix();

    dhp = (dh.array() * (1.0 - z.array()) + d_rh.array() * r.array()).matrix();
    dhp.noalias() += da_z.row(k) * p.u_z.transpose();
    dhp.noalias() += da_r.row(k) * p.u_r.transpose();
    dh_next = dhp;
  }
  if (dh0 != nullptr) *dh0 = dh_next;

  const auto h_prev = c.h.topRows(n);
  const Matrix rh = c.r.cwiseProduct(h_prev);
  grads.w_z.noalias() += c.x.transpose() * da_z;
  grads.w_r.noalias() += c.x.transpose() * da_r;
  grads.w_h.noalias() += c.x.transpose() * da_h;
  grads.u_z.noalias() += h_prev.transpose() * da_z;
  grads.u_r.noalias() += h_prev.transpose() * da_r;
  grads.u_h.noalias() += rh.transpose() * da_h;
  grads.b_z += da_z.colwise().sum();
  grads.b_r += da_r.colwise().sum();
  grads.b_h += da_h.colwise().sum();

  Matrix dx = da_z * p.w_z.transpose();
  dx.noalias() += da_r * p.w_r.transpose();
  dx.noalias() += da_h * p.w_h.transpose();
  return dx;
}

Vector gru_cell_forward(const Vector& x, const Vector& h_prev, const GruLayerParams& p) {
  if (h_prev.size() != p.hidden_dim()) throw UsageError("h_prev width does not match d_f");
  const Matrix xs = x.transpose();
  const RowVector h0 = h_prev.transpose();
  return gru_layer_forward(xs, p, nullptr, &h0).row(0).transpose();
}

GruStackParams GruStackParams::zeros(Index d_in, Index d_f) {
  return {GruLayerParams::zeros(d_in, d_f), GruLayerParams::zeros(d_f, d_f)};
}

GruStackParams GruStackParams::glorot(Index d_in, Index d_f, Rng& rng) {
  GruStackParams p;
  p.layer1 = GruLayerParams::glorot(d_in, d_f, rng);
  p.layer2 = GruLayerParams::glorot(d_f, d_f, rng);
  return p;
}

void GruStackParams::collect(ParamViews& out, const std::string& prefix) {
  layer1.collect(out, prefix + ".layer1");
  layer2.collect(out, prefix + ".layer2");
}

Matrix gru_forward(const Matrix& x, const GruStackParams& p, const Matrix* between_mask, GruStackCache* cache) {
  if (x.rows() == 0) throw UsageError("GRU input sequence is empty");
  GruLayerCache* c1 = cache != nullptr ? &cache->layer1 : nullptr;
  GruLayerCache* c2 = cache != nullptr ? &cache->layer2 : nullptr;
  Matrix h1 = gru_layer_forward(x, p.layer1, c1);
  if (between_mask != nullptr) {
    if (between_mask->rows() != h1.rows() || between_mask->cols() != h1.cols()) {
      throw UsageError("dropout mask shape does not match layer-1 states");
    }
    h1 = h1.cwiseProduct(*between_mask);
    if (cache != nullptr) cache->between_mask = *between_mask;
  } else if (cache != nullptr) {
    cache->between_mask.reset();
  }
  return gru_layer_forward(h1, p.layer2, c2);
}

Matrix gru_backward(const GruStackCache& cache, const GruStackParams& p, const Matrix& d_top, GruStackParams& grads) {
  Matrix d_h1 = gru_layer_backward(cache.layer2, p.layer2, d_top, grads.layer2);
  if (cache.between_mask) d_h1 = d_h1.cwiseProduct(*cache.between_mask);
  return gru_layer_backward(cache.layer1, p.layer1, d_h1, grads.layer1);
}

}  // namespace drrd::nn
