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

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "drrd/corpus.hpp"
#include "drrd/nn/tensor.hpp"

namespace drrd::features {

using nn::Matrix;
using nn::Vector;

/// Scaled partition embeddings for one branch of the model.
struct SequenceFeatures {
  Matrix x;                         // n x d_v
  std::vector<std::size_t> counts;  // m_k per partition

  int n() const { return static_cast<int>(x.rows()); }
};

/// Element-wise mean; the all-ones vector of width `dim` when empty.
Vector partition_embedding(std::span<const Vector> vectors, int dim);

/// c_k = log_base(m_k + 1) + 1. Natural log by default.
double scale_coefficient(std::size_t m_k, double log_base = std::numbers::e);

/// Shared averaging, padding and scaling path. groups[k] holds the vectors
/// observed in partition k; the count used for scaling is groups[k].size().
SequenceFeatures build_sequence(const std::vector<std::vector<Vector>>& groups, int dim,
                                double log_base = std::numbers::e);

using PostEmbedder = std::function<Vector(const Post&)>;
using UserEmbedder = std::function<Vector(const std::string& user_id)>;

/// One vector per post.
SequenceFeatures build_text_sequence(const PartitionedEvent& event, const PostEmbedder& embed, int dim,
                                     double log_base = std::numbers::e);

/// One vector per distinct user within each partition, in order of first
/// appearance; m_k is the distinct-user count.
SequenceFeatures build_user_sequence(const PartitionedEvent& event, const UserEmbedder& embed, int dim,
                                     double log_base = std::numbers::e);

/// Writes X as CSV: a header `hour,count,v0..v{d-1}` then one row per partition.
void write_csv(std::ostream& out, const SequenceFeatures& features);

}  // namespace drrd::features
