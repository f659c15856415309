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

#include "drrd/detector.hpp"
#include "drrd/error.hpp"
#include "drrd/synth.hpp"
#include "helpers.hpp"

using namespace drrd;

namespace {

struct Fixture {
  std::vector<Event> events;
  Detector detector;
};

Fixture& fixture() {
  static Fixture f = [] {
    const RunConfig config = test::tiny_config().resolved();
    std::vector<Event> events = synth::generate_corpus(config.synth);
    const std::span<const Event> all(events);
    Detector d = Detector::fit(all.subspan(0, 30), all.subspan(30, 5), config.pipeline);
    return Fixture{std::move(events), std::move(d)};
  }();
  return f;
}

}  // namespace

TEST_SUITE("detector") {
  TEST_CASE("predictions are distributions with a consistent label") {
    for (const Event& e : fixture().events) {
      const Prediction p = fixture().detector.predict(e);
      CHECK_FALSE(p.insufficient_evidence);
      CHECK(std::abs(p.p_rumour + p.p_non_rumour - 1.0) < 1e-12);
      CHECK((p.label == Label::Rumour) == (p.p_rumour >= p.p_non_rumour));
    }
  }

  TEST_CASE("a deadline past every post equals no deadline") {
    for (const Event& e : fixture().events) {
      const Prediction a = fixture().detector.predict(e);
      const Prediction b = fixture().detector.predict(e, 1e9);
      CHECK(a.p_rumour == b.p_rumour);
    }
  }

  TEST_CASE("posts after the deadline do not influence the prediction") {
    const Detector& d = fixture().detector;
    for (std::size_t i = 30; i < fixture().events.size(); ++i) {
      const Event& e = fixture().events[i];
      for (const double t : {1.0, 6.0, 24.0}) {
        const Prediction full = d.predict(e, t);
        const Prediction cut = d.predict(filter_by_deadline(e, t), t);
        CHECK(full.p_rumour == cut.p_rumour);
      }
    }
  }

  TEST_CASE("unseen users and posts still receive a prediction") {
    const Event e = test::make_event("fresh", Label::Rumour, {0, 10, 4000, 9000}, {"nobody", "stranger"});
    const Prediction p = fixture().detector.predict(e);
    CHECK(std::isfinite(p.p_rumour));
    CHECK(fixture().detector.predict(e).p_rumour == p.p_rumour);
    CHECK(fixture().detector.user_vector("nobody", "fresh").size() == 8);
  }

  TEST_CASE("an event without posts has insufficient evidence") {
    const Event empty{"empty", Label::Rumour, {}};
    CHECK(fixture().detector.predict(empty, 12.0).insufficient_evidence);
  }

  TEST_CASE("sequences span the partition horizon") {
    const Event e = test::make_event("s", Label::Rumour, {0, 100, 3 * 3600 + 5});
    const auto [text, user] = fixture().detector.sequences(e);
    CHECK(text.x.rows() == 4);
    CHECK(user.x.rows() == 4);
    CHECK(text.x.cols() == 8);
  }

  TEST_CASE("save and load reproduce predictions") {
    test::TempDir dir;
    fixture().detector.save(dir.path().string());
    const Detector loaded = Detector::load(dir.path().string());
    const Event fresh = test::make_event("fresh2", Label::NonRumour, {0, 50}, {"x"});
    for (const Event* e : std::vector<const Event*>{&fixture().events[0], &fixture().events[37], &fresh}) {
      CHECK(loaded.predict(*e).p_rumour == fixture().detector.predict(*e).p_rumour);
      CHECK(loaded.predict(*e, 2.0).p_rumour == fixture().detector.predict(*e, 2.0).p_rumour);
    }
    CHECK_THROWS(Detector::load(dir.file("missing")));
  }

  TEST_CASE("mismatched embedding width is rejected") {
    const Detector& d = fixture().detector;
    ModelConfig wide = d.config().model;
    wide.d_v = 9;
    CHECK_THROWS_AS(Detector(d.config(), d.text_model(), d.user_model(), DrrdModel::initialize(wide, TrainConfig{})),
                    DataError);
  }

  TEST_CASE("document builders tag posts and users") {
    std::vector<std::string> tags;
    const std::vector<Event> events = {test::make_event("a", Label::Rumour, {0, 5}, {"u1", "u2"}),
                                       test::make_event("b", Label::NonRumour, {0}, {"u1"})};
    CHECK(post_documents(events, tags).size() == 3);
    CHECK(tags == std::vector<std::string>{"a_0", "a_1", "b_0"});
    const auto docs = user_documents(events, tags);
    CHECK(tags == std::vector<std::string>{"u1", "u2"});
    CHECK(docs[0] == embed::TokenList{"a", "b"});
    CHECK(docs[1] == embed::TokenList{"a"});
  }
}
