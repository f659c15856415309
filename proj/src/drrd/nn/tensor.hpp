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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace drrd::nn {

using Index = Eigen::Index;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

enum class Mode { Train, Eval };

/// Mutable window onto one trainable tensor, used by the optimizer, the
/// checkpoint writer and the gradient checker.
struct ParamView {
  std::string name;
  double* data = nullptr;
  Index rows = 0;
  Index cols = 0;

  std::size_t size() const { return static_cast<std::size_t>(rows * cols); }
  std::span<double> values() const { return {data, size()}; }
};

template <typename Derived>
ParamView view_of(std::string name, Eigen::PlainObjectBase<Derived>& t) {
  return {std::move(name), t.data(), t.rows(), t.cols()};
}

using ParamViews = std::vector<ParamView>;

inline bool all_finite(const ParamViews& views) {
  for (const auto& v : views) {
    for (const double x : v.values()) {
      if (!std::isfinite(x)) return false;
    }
  }
  return true;
}

inline void zero(const ParamViews& views) {
  for (const auto& v : views) std::fill(v.data, v.data + v.size(), 0.0);
}

}  // namespace drrd::nn
