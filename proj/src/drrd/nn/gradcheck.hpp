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
#include <string>

#include "drrd/nn/tensor.hpp"

namespace drrd::nn {

/// Denominator floor for the relative error. Central differences at eps = 1e-5
/// carry roughly 1e-11 of rounding noise, so gradients below the floor are
/// judged on absolute error instead.
constexpr double kGradCheckFloor = 1e-6;

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t coordinates_checked = 0;
  std::string worst_tensor;
  std::size_t worst_offset = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

/// Compares analytic gradients against central differences
///   (f(theta + eps) - f(theta - eps)) / (2 eps)
/// on a uniform random sample of `samples` coordinates (all coordinates when
/// there are fewer). The error per coordinate is
///   |a - n| / max(|a|, |n|, kGradCheckFloor).
/// `loss` must read the live values behind `params`; each probed coordinate is
/// restored exactly afterwards.
GradCheckResult finite_difference_check(const std::function<double()>& loss, const ParamViews& params,
                                        const ParamViews& analytic, double eps = 1e-5, std::size_t samples = 200,
                                        std::uint64_t seed = 0);

}  // namespace drrd::nn
