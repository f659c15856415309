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
#include "drrd/model.hpp"
#include "drrd/nn/gradcheck.hpp"
#include "helpers.hpp"

using namespace drrd;
using nn::Matrix;
using nn::Vector;

namespace {

ModelConfig small_config() {
  ModelConfig c;
  c.d_v = 3;
  c.d_f = 4;
  c.head_hidden = 5;
  return c;
}

EncodedEvent encoded(Rng& rng, const std::string& id, Label label, nn::Index n, int d_v) {
  return {id, label, test::random_matrix(rng, n, d_v), test::random_matrix(rng, n, d_v)};
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("all-zero parameters give an even split") {
    ModelConfig c;
    c.d_v = 6;
    c.d_f = 8;
    c.head_hidden = 4;
    const DrrdParams p = DrrdParams::zeros(c);
    Rng rng(1);
    const Vector probs = forward(p, c, test::random_matrix(rng, 5, 6), test::random_matrix(rng, 5, 6), nn::Mode::Eval,
                                 nullptr);
    CHECK(probs[0] == 0.5);
    CHECK(probs[1] == 0.5);
  }

  TEST_CASE("shape and configuration errors") {
    const ModelConfig c = small_config();
    Rng rng(2);
    const DrrdParams p = DrrdParams::glorot(c, rng);
    CHECK_THROWS_AS(forward(p, c, Matrix::Zero(3, 3), Matrix::Zero(4, 3), nn::Mode::Eval, nullptr), UsageError);
    CHECK_THROWS_AS(forward(p, c, Matrix::Zero(3, 2), Matrix::Zero(3, 2), nn::Mode::Eval, nullptr), UsageError);
    CHECK_THROWS_AS(forward(p, c, Matrix::Zero(3, 3), Matrix::Zero(3, 3), nn::Mode::Train, nullptr), UsageError);
    ModelConfig none = c;
    none.use_text_branch = none.use_user_branch = false;
    CHECK_THROWS_AS(DrrdParams::zeros(none), UsageError);

    DrrdParams grads = DrrdParams::zeros(c);
    CHECK_THROWS_AS(backward(p, c, ForwardTape{}, Label::Rumour, grads), UsageError);
  }

  TEST_CASE("probabilities are a distribution and eval mode is deterministic") {
    const ModelConfig c = small_config();
    Rng rng(3);
    const DrrdParams p = DrrdParams::glorot(c, rng);
    for (int trial = 0; trial < 30; ++trial) {
      const auto e = encoded(rng, "e", Label::Rumour, 1 + static_cast<nn::Index>(rng.below(10)), 3);
      const Vector a = forward(p, c, e.text_x, e.user_x, nn::Mode::Eval, nullptr);
      CHECK(std::abs(a.sum() - 1.0) < 1e-12);
      CHECK((a.array() >= 0.0).all());
      CHECK(forward(p, c, e.text_x, e.user_x, nn::Mode::Eval, nullptr) == a);
    }
  }

  TEST_CASE("the two branches are not interchangeable") {
    const ModelConfig c = small_config();
    Rng rng(4);
    const DrrdParams p = DrrdParams::glorot(c, rng);
    const auto e = encoded(rng, "e", Label::Rumour, 6, 3);
    const Vector a = forward(p, c, e.text_x, e.user_x, nn::Mode::Eval, nullptr);
    const Vector b = forward(p, c, e.user_x, e.text_x, nn::Mode::Eval, nullptr);
    CHECK((a - b).cwiseAbs().maxCoeff() > 1e-6);
  }

  TEST_CASE("a disabled branch ignores its input") {
    ModelConfig c = small_config();
    c.use_user_branch = false;
    Rng rng(5);
    const DrrdParams p = DrrdParams::glorot(c, rng);
    const auto e = encoded(rng, "e", Label::Rumour, 4, 3);
    const Vector a = forward(p, c, e.text_x, e.user_x, nn::Mode::Eval, nullptr);
    const Vector b = forward(p, c, e.text_x, test::random_matrix(rng, 4, 3), nn::Mode::Eval, nullptr);
    CHECK(a == b);
  }

  TEST_CASE("full backward matches finite differences in train mode") {
    for (const int head_hidden : {5, 0}) {
      ModelConfig c = small_config();
      c.head_hidden = head_hidden;
      c.dropout = 0.3;
      c.between_layer_dropout = 0.2;
      Rng init(6);
      DrrdParams p = DrrdParams::glorot(c, init);
      Matrix text_x = test::random_matrix(init, 5, 3);
      Matrix user_x = test::random_matrix(init, 5, 3);

      // Reseeding on every call freezes the dropout masks.
      auto loss = [&] {
        Rng rng(77);
        return nn::cross_entropy(forward(p, c, text_x, user_x, nn::Mode::Train, &rng), 1);
      };
      Rng rng(77);
      ForwardTape tape;
      forward(p, c, text_x, user_x, nn::Mode::Train, &rng, &tape);
      DrrdParams grads = DrrdParams::zeros(c);
      Matrix d_text, d_user;
      backward(p, c, tape, Label::Rumour, grads, &d_text, &d_user);

      nn::ParamViews params = p.views();
      nn::ParamViews analytic = grads.views();
      params.push_back(nn::view_of("text_x", text_x));
      analytic.push_back(nn::view_of("text_x", d_text));
      params.push_back(nn::view_of("user_x", user_x));
      analytic.push_back(nn::view_of("user_x", d_user));
      const auto r = nn::finite_difference_check(loss, params, analytic, 1e-5, 2000, 9);
      INFO("worst tensor " << r.worst_tensor << " analytic " << r.worst_analytic << " numeric " << r.worst_numeric);
      CHECK(r.max_relative_error < 1e-5);
    }
  }

  TEST_CASE("training overfits two events") {
    ModelConfig c = small_config();
    c.dropout = 0.0;
    TrainConfig t;
    t.epochs = 200;
    t.batch_size = 2;
    t.adam.lr = 0.01;
    t.seed = 11;
    DrrdModel m = DrrdModel::initialize(c, t);
    Rng rng(7);
    const std::vector<EncodedEvent> events = {encoded(rng, "a", Label::Rumour, 4, 3),
                                              encoded(rng, "b", Label::NonRumour, 6, 3)};
    const TrainLog log = train_model(m, events, {});
    CHECK(log.epochs.size() == 200);
    CHECK(log.epochs.back().train_loss < log.epochs.front().train_loss);
    CHECK(predict_proba(m, events[0])[1] > 0.95);
    CHECK(predict_proba(m, events[1])[0] > 0.95);
  }

  TEST_CASE("training is reproducible and early stopping keeps the best epoch") {
    ModelConfig c = small_config();
    TrainConfig t;
    t.epochs = 40;
    t.batch_size = 3;
    t.patience = 2;
    t.adam.lr = 0.05;
    Rng rng(8);
    std::vector<EncodedEvent> train, val;
    for (int i = 0; i < 8; ++i) train.push_back(encoded(rng, "t", i % 2 ? Label::Rumour : Label::NonRumour, 3, 3));
    for (int i = 0; i < 4; ++i) val.push_back(encoded(rng, "v", i % 2 ? Label::Rumour : Label::NonRumour, 3, 3));

    DrrdModel a = DrrdModel::initialize(c, t);
    DrrdModel b = DrrdModel::initialize(c, t);
    const TrainLog la = train_model(a, train, val);
    const TrainLog lb = train_model(b, train, val);
    REQUIRE(la.epochs.size() == lb.epochs.size());
    for (std::size_t i = 0; i < la.epochs.size(); ++i) CHECK(la.epochs[i].train_loss == lb.epochs[i].train_loss);

    REQUIRE(la.best_epoch >= 0);
    double best = la.epochs[0].validation_loss;
    for (const auto& e : la.epochs) best = std::min(best, e.validation_loss);
    CHECK(la.epochs[static_cast<std::size_t>(la.best_epoch)].validation_loss == best);
    CHECK(mean_loss(a, val) == doctest::Approx(best).epsilon(1e-12));
    if (la.stopped_early) CHECK(static_cast<int>(la.epochs.size()) == la.best_epoch + 1 + t.patience);
  }

  TEST_CASE("empty training set is rejected") {
    DrrdModel m = DrrdModel::initialize(small_config(), TrainConfig{});
    CHECK_THROWS_AS(train_model(m, {}, {}), UsageError);
  }

  TEST_CASE("checkpoint round trip preserves predictions and optimizer state") {
    ModelConfig c = small_config();
    TrainConfig t;
    t.epochs = 3;
    DrrdModel m = DrrdModel::initialize(c, t);
    Rng rng(9);
    std::vector<EncodedEvent> events = {encoded(rng, "a", Label::Rumour, 3, 3), encoded(rng, "b", Label::NonRumour, 2, 3)};
    train_model(m, events, {});

    std::stringstream buffer;
    save_model(buffer, m);
    const std::string bytes = buffer.str();
    std::istringstream in(bytes);
    const DrrdModel loaded = load_model(in);
    CHECK(loaded.adam.t == m.adam.t);
    CHECK(loaded.adam.m == m.adam.m);
    for (const auto& e : events) CHECK(predict_proba(loaded, e) == predict_proba(m, e));

    std::istringstream truncated(bytes.substr(0, bytes.size() - 9));
    CHECK_THROWS_AS(load_model(truncated), DataError);
    std::string bad = bytes;
    bad[0] = 'X';
    std::istringstream bad_in(bad);
    CHECK_THROWS_AS(load_model(bad_in), DataError);
    std::istringstream extra(bytes + "!");
    CHECK_THROWS_AS(load_model(extra), DataError);
  }
}
