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
#include <sstream>

#include "drrd/error.hpp"
#include "drrd/features.hpp"
#include "helpers.hpp"

using namespace drrd;
using namespace drrd::features;

namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace

TEST_SUITE("features") {
  TEST_CASE("partition_embedding averages, or pads with ones") {
    const std::vector<Vector> two = {vec({1, 3}), vec({3, 1})};
    CHECK(partition_embedding(two, 2) == vec({2, 2}));
    CHECK(partition_embedding({}, 4) == Vector::Ones(4));
    const std::vector<Vector> one = {vec({0.25, -7})};
    CHECK(partition_embedding(one, 2) == one[0]);
    const std::vector<Vector> mismatch = {vec({1, 2}), vec({1, 2, 3})};
    CHECK_THROWS_AS(partition_embedding(mismatch, 2), UsageError);
  }

  TEST_CASE("scale_coefficient is ln(m + 1) + 1") {
    CHECK(scale_coefficient(0) == 1.0);
    CHECK(scale_coefficient(1) == doctest::Approx(1.6931).epsilon(1e-4));
    CHECK(std::abs(scale_coefficient(1) - (std::log(2.0) + 1.0)) < 1e-12);
    CHECK(std::abs(scale_coefficient(24192) - 11.0936) < 1e-3);
    CHECK(scale_coefficient(9, 10.0) == doctest::Approx(2.0));
    for (std::size_t m = 0; m < 2000; ++m) CHECK(scale_coefficient(m + 1) > scale_coefficient(m));
  }

  TEST_CASE("build_sequence scales each partition mean") {
    const Vector v = vec({0.5, -1.0, 2.0});
    const auto single = build_sequence({{v}}, 3);
    REQUIRE(single.n() == 1);
    CHECK((single.x.row(0).transpose() - (std::log(2.0) + 1.0) * v).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(single.counts == std::vector<std::size_t>{1});

    const auto gap = build_sequence({{v, v}, {}, {v}}, 3);
    REQUIRE(gap.n() == 3);
    CHECK(gap.x.row(1) == Eigen::RowVectorXd::Ones(3));
    CHECK(gap.counts == std::vector<std::size_t>{2, 0, 1});
  }

  TEST_CASE("doubling a partition's vectors doubles its row; norms scale by c_k") {
    Rng rng(2);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<Vector> group;
      const auto m = 1 + rng.below(6);
      for (std::uint64_t i = 0; i < m; ++i) group.push_back(test::random_vector(rng, 5));
      std::vector<Vector> doubled;
      for (const auto& g : group) doubled.push_back(2.0 * g);
      const auto a = build_sequence({group}, 5);
      const auto b = build_sequence({doubled}, 5);
      CHECK((b.x - 2.0 * a.x).cwiseAbs().maxCoeff() < 1e-12);
      const double mean_norm = partition_embedding(group, 5).norm();
      CHECK(a.x.row(0).norm() == doctest::Approx(scale_coefficient(m) * mean_norm).epsilon(1e-12));
    }
  }

  TEST_CASE("text and user sequences follow the partitioning") {
    // Two posts by u1 and one by u2 in hour 0, nothing in hour 1, one post in hour 2.
    const Event e = test::make_event("e", Label::Rumour, {0, 10, 20, 7300}, {"u1", "u1", "u2", "u3"});
    const auto p = partition_event(e, 96);
    auto post_vec = [](const Post& post) { return Vector::Constant(4, static_cast<double>(post.post_id.back() - '0')); };
    auto user_vec = [](const std::string& u) { return Vector::Constant(4, static_cast<double>(u.back() - '0')); };

    const auto text = build_text_sequence(p, post_vec, 4);
    CHECK(text.n() == p.n_hours());
    CHECK(text.counts == std::vector<std::size_t>{3, 0, 1});
    CHECK(text.x(0, 0) == doctest::Approx(scale_coefficient(3) * 1.0));  // mean of 0, 1, 2
    CHECK(text.x.row(1) == Eigen::RowVectorXd::Ones(4));

    const auto users = build_user_sequence(p, user_vec, 4);
    CHECK(users.n() == p.n_hours());
    CHECK(users.counts == std::vector<std::size_t>{2, 0, 1});
    CHECK(users.x(0, 0) == doctest::Approx(scale_coefficient(2) * 1.5));
    CHECK(users.x(2, 3) == doctest::Approx(scale_coefficient(1) * 3.0));

    auto wrong = [](const Post&) { return Vector::Ones(3); };
    CHECK_THROWS_AS(build_text_sequence(p, wrong, 4), UsageError);
  }

  TEST_CASE("write_csv emits a header and one row per partition") {
    const auto seq = build_sequence({{Vector::Constant(2, 0.5)}, {}}, 2);
    std::ostringstream out;
    write_csv(out, seq);
    std::istringstream lines(out.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == "hour,count,v0,v1");
    std::getline(lines, line);
    CHECK(line.rfind("0,1,", 0) == 0);
    std::getline(lines, line);
    CHECK(line == "1,0,1,1");
  }
}
