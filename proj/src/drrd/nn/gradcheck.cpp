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

#include "drrd/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "drrd/error.hpp"
#include "drrd/rng.hpp"

namespace drrd::nn {

GradCheckResult finite_difference_check(const std::function<double()>& loss, const ParamViews& params,
                                        const ParamViews& analytic, double eps, std::size_t samples,
                                        std::uint64_t seed) {
  if (params.size() != analytic.size()) throw UsageError("gradient check: layout mismatch");
  std::vector<std::size_t> offsets;  // cumulative start of each tensor
  std::size_t total = 0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].size() != analytic[i].size()) throw UsageError("gradient check: shape mismatch");
    offsets.push_back(total);
    total += params[i].size();
  }

  std::vector<std::size_t> coords;
  if (total <= samples) {
    coords.resize(total);
    std::iota(coords.begin(), coords.end(), std::size_t{0});
  } else {
    Rng rng(seed);
    coords.reserve(samples);
    for (std::size_t s = 0; s < samples; ++s) coords.push_back(rng.below(total));
  }

  GradCheckResult result;
  for (const std::size_t flat : coords) {
    const auto it = std::upper_bound(offsets.begin(), offsets.end(), flat);
    const auto t = static_cast<std::size_t>(it - offsets.begin()) - 1;
    const std::size_t j = flat - offsets[t];
    double& theta = params[t].data[j];
    const double saved = theta;
    theta = saved + eps;
    const double up = loss();
    theta = saved - eps;
    const double down = loss();
    theta = saved;

    const double numeric = (up - down) / (2.0 * eps);
    const double a = analytic[t].data[j];
    const double err = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), kGradCheckFloor});
    ++result.coordinates_checked;
    if (err > result.max_relative_error || result.coordinates_checked == 1) {
      result.max_relative_error = std::max(result.max_relative_error, err);
      result.worst_tensor = params[t].name;
      result.worst_offset = j;
      result.worst_analytic = a;
      result.worst_numeric = numeric;
    }
  }
  return result;
}

}  // namespace drrd::nn
