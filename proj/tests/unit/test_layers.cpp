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

#include <doctest.h>

#include <cmath>

#include "drrd/error.hpp"
#include "drrd/nn/gradcheck.hpp"
#include "drrd/nn/layers.hpp"
#include "helpers.hpp"

using namespace drrd;
using namespace drrd::nn;

namespace {

Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST_SUITE("layers") {
  TEST_CASE("max-pool over time picks column maxima") {
    const auto r = max_pool_over_time(mat2(1, -2, 0, 3));
    CHECK(r.values == vec2(1, 3));
    CHECK(r.argmax == std::vector<Index>{0, 1});

    Rng rng(1);
    const Matrix one = test::random_matrix(rng, 1, 5);
    CHECK(max_pool_over_time(one).values == one.row(0).transpose());

    Matrix same(4, 3);
    same.rowwise() = RowVector::LinSpaced(3, -1, 1);
    CHECK(max_pool_over_time(same).values == RowVector::LinSpaced(3, -1, 1).transpose());
    CHECK(max_pool_over_time(same).argmax == std::vector<Index>{0, 0, 0});

    CHECK_THROWS_AS(max_pool_over_time(Matrix(0, 3)), UsageError);
  }

  TEST_CASE("max-pool backward routes to the earliest argmax") {
    const Matrix h = mat2(1, -2, 0, 3);
    const Matrix d = max_pool_backward(max_pool_over_time(h), 2, vec2(1, 1));
    CHECK(d == mat2(1, 0, 0, 1));

    const Matrix tie = mat2(5, 1, 5, 1);
    CHECK(max_pool_backward(max_pool_over_time(tie), 2, vec2(2, 3)) == mat2(2, 3, 0, 0));
  }

  TEST_CASE("max-pool dominates every row and equals an entry per column") {
    Rng rng(2);
    for (int trial = 0; trial < 200; ++trial) {
      const Matrix h = test::random_matrix(rng, 1 + static_cast<Index>(rng.below(20)), 1 + static_cast<Index>(rng.below(8)));
      const auto r = max_pool_over_time(h);
      for (Index j = 0; j < h.cols(); ++j) {
        CHECK(h.col(j).maxCoeff() == r.values[j]);
        CHECK(h(r.argmax[static_cast<std::size_t>(j)], j) == r.values[j]);
      }
    }
  }

  TEST_CASE("softmax is stable, normalized and shift invariant") {
    CHECK(softmax(vec2(0, 0)) == vec2(0.5, 0.5));
    const Vector big = softmax(vec2(100, 0));
    CHECK(big[0] > 1 - 1e-12);
    CHECK(big.allFinite());
    CHECK(softmax(vec2(1000, -1000)).allFinite());
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
      const Vector logits = test::random_vector(rng, 2, 30.0);
      const Vector p = softmax(logits);
      CHECK(std::abs(p.sum() - 1.0) < 1e-12);
      const Vector shifted = softmax((logits.array() + 17.5).matrix());
      CHECK((p - shifted).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("cross entropy with probability floor") {
    CHECK(cross_entropy(vec2(0.5, 0.5), 0) == doctest::Approx(std::log(2.0)));
    CHECK(cross_entropy(vec2(0.5, 0.5), 1) == doctest::Approx(std::log(2.0)));
    CHECK(cross_entropy(vec2(1.0, 0.0), 0) == 0.0);
    CHECK(cross_entropy(vec2(1.0 - 1e-20, 1e-20), 1) == doctest::Approx(-std::log(1e-12)));
  }

  TEST_CASE("dense softmax matches a direct evaluation") {
    DenseParams p = DenseParams::zeros(3, 2);
    CHECK(dense_softmax_forward(Vector::Ones(3), p) == vec2(0.5, 0.5));
    Rng rng(4);
    p = DenseParams::glorot(3, 2, rng);
    p.b = test::random_matrix(rng, 1, 2);
    const Vector x = test::random_vector(rng, 3);
    const Vector logits = p.w.transpose() * x + p.b.transpose();
    const Vector expected = logits.array().exp() / logits.array().exp().sum();
    CHECK((dense_softmax_forward(x, p) - expected).cwiseAbs().maxCoeff() < 1e-15);
  }

  TEST_CASE("dense backward matches finite differences") {
    Rng rng(5);
    DenseParams p = DenseParams::glorot(4, 3, rng);
    p.b = test::random_matrix(rng, 1, 3);
    Vector x = test::random_vector(rng, 4);
    const Vector weights = test::random_vector(rng, 3);
    auto loss = [&] { return dense_forward(x, p).dot(weights); };
    DenseParams grads = DenseParams::zeros(4, 3);
    Vector dx = dense_backward(x, p, weights, grads);
    ParamViews params, analytic;
    p.collect(params, "d");
    grads.collect(analytic, "d");
    params.push_back(view_of("x", x));
    analytic.push_back(view_of("x", dx));
    CHECK(finite_difference_check(loss, params, analytic).max_relative_error < 1e-8);
  }

  TEST_CASE("dropout is identity in eval mode and unbiased in train mode") {
    Rng rng(6);
    const Vector x = test::random_vector(rng, 8);
    CHECK(dropout(x, 0.6, Mode::Eval, rng) == x);
    CHECK(dropout(x, 0.0, Mode::Train, rng) == x);
    CHECK_THROWS_AS(dropout(x, 1.0, Mode::Train, rng), UsageError);
    CHECK_THROWS_AS(dropout(x, -0.1, Mode::Train, rng), UsageError);

    const Vector ones = Vector::Ones(8);
    Vector sum = Vector::Zero(8);
    constexpr int kSamples = 100000;
    for (int i = 0; i < kSamples; ++i) sum += dropout(ones, 0.6, Mode::Train, rng);
    const Vector mean = sum / kSamples;
    CHECK((mean.array() - 1.0).abs().maxCoeff() < 0.02);

    const Vector mask = dropout_mask(1000, 0.6, rng);
    for (Index i = 0; i < mask.size(); ++i) CHECK((mask[i] == 0.0 || mask[i] == doctest::Approx(2.5)));
  }

  TEST_CASE("finite-difference checker is exact on a quadratic and handles zero gradients") {
    Rng rng(7);
    Vector theta = test::random_vector(rng, 300);
    Vector grad = 2.0 * theta;
    ParamViews params = {view_of("theta", theta)};
    ParamViews analytic = {view_of("theta", grad)};
    // Central differences are exact on a quadratic up to rounding, which a wide step keeps small.
    const auto r = finite_difference_check([&] { return theta.squaredNorm(); }, params, analytic, 1e-3);
    CHECK(r.coordinates_checked == 200);
    CHECK(r.max_relative_error < 1e-7);
    const Vector before = theta;
    finite_difference_check([&] { return theta.squaredNorm(); }, params, analytic);
    CHECK(theta == before);

    Vector zero = Vector::Zero(5);
    Vector zero_grad = Vector::Zero(5);
    ParamViews zp = {view_of("z", zero)};
    ParamViews za = {view_of("z", zero_grad)};
    CHECK(finite_difference_check([&] { return zero.squaredNorm(); }, zp, za).max_relative_error < 1e-4);
  }
}
