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

#include "drrd/features.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <unordered_set>

#include "drrd/error.hpp"

namespace drrd::features {

Vector partition_embedding(std::span<const Vector> vectors, int dim) {
  if (vectors.empty()) return Vector::Ones(dim);
  Vector sum = Vector::Zero(dim);
  for (const Vector& v : vectors) {
    if (v.size() != dim) {
      throw UsageError("embedding of width " + std::to_string(v.size()) + " where " + std::to_string(dim) +
                       " was expected");
    }
    sum += v;
  }
  return sum / static_cast<double>(vectors.size());
}

double scale_coefficient(std::size_t m_k, double log_base) {
  if (!(log_base > 1.0)) throw UsageError("log base must exceed 1");
  return std::log(static_cast<double>(m_k) + 1.0) / std::log(log_base) + 1.0;
}

SequenceFeatures build_sequence(const std::vector<std::vector<Vector>>& groups, int dim, double log_base) {
  SequenceFeatures out;
  out.x.resize(static_cast<nn::Index>(groups.size()), dim);
  out.counts.reserve(groups.size());
  for (std::size_t k = 0; k < groups.size(); ++k) {
    const std::size_t m_k = groups[k].size();
    out.x.row(static_cast<nn::Index>(k)) =
        scale_coefficient(m_k, log_base) * partition_embedding(groups[k], dim).transpose();
    out.counts.push_back(m_k);
  }
  return out;
}

SequenceFeatures build_text_sequence(const PartitionedEvent& event, const PostEmbedder& embed, int dim,
                                     double log_base) {
  std::vector<std::vector<Vector>> groups(event.partitions.size());
  for (std::size_t k = 0; k < event.partitions.size(); ++k) {
    for (const Post& p : event.partitions[k].posts) groups[k].push_back(embed(p));
  }
  return build_sequence(groups, dim, log_base);
}

SequenceFeatures build_user_sequence(const PartitionedEvent& event, const UserEmbedder& embed, int dim,
                                     double log_base) {
  std::vector<std::vector<Vector>> groups(event.partitions.size());
  for (std::size_t k = 0; k < event.partitions.size(); ++k) {
    std::unordered_set<std::string> seen;
    for (const Post& p : event.partitions[k].posts) {
      if (seen.insert(p.user_id).second) groups[k].push_back(embed(p.user_id));
    }
  }
  return build_sequence(groups, dim, log_base);
}

void write_csv(std::ostream& out, const SequenceFeatures& features) {
  out << "hour,count";
  for (nn::Index j = 0; j < features.x.cols(); ++j) out << ",v" << j;
  out << '\n' << std::setprecision(17);
  for (nn::Index k = 0; k < features.x.rows(); ++k) {
    out << k << ',' << features.counts[static_cast<std::size_t>(k)];
    for (nn::Index j = 0; j < features.x.cols(); ++j) out << ',' << features.x(k, j);
    out << '\n';
  }
}

}  // namespace drrd::features
