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

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "drrd/detector.hpp"
#include "drrd/error.hpp"
#include "drrd/eval.hpp"
#include "drrd/synth.hpp"
#include "helpers.hpp"

using namespace drrd;
using namespace drrd::eval;

namespace {

struct Labelled {
  std::vector<std::string> ids;
  std::vector<Label> labels;
};

Labelled labelled(std::size_t rumours, std::size_t non_rumours, Rng& rng) {
  Labelled out;
  for (std::size_t i = 0; i < rumours + non_rumours; ++i) {
    out.ids.push_back("e" + std::to_string(i));
    out.labels.push_back(i < rumours ? Label::Rumour : Label::NonRumour);
  }
  rng.shuffle(out.labels.begin(), out.labels.end());
  return out;
}

std::size_t count_rumours(const std::vector<std::string>& ids, const Labelled& l) {
  std::size_t n = 0;
  for (const auto& id : ids) {
    const auto it = std::find(l.ids.begin(), l.ids.end(), id);
    if (l.labels[static_cast<std::size_t>(it - l.ids.begin())] == Label::Rumour) ++n;
  }
  return n;
}

const Detector& tiny_detector() {
  static const Detector d = [] {
    const RunConfig c = test::tiny_config(9).resolved();
    const auto events = synth::generate_corpus(c.synth);
    return Detector::fit(events, {}, c.pipeline);
  }();
  return d;
}

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("991 events split into 99 holdout and 669/223 folds") {
    Rng rng(1);
    const Labelled l = labelled(498, 493, rng);
    const FoldSplit s = split_folds(l.ids, l.labels, 17);
    CHECK(s.holdout.size() == 99);
    CHECK(count_rumours(s.holdout, l) == 50);
    REQUIRE(s.folds.size() == 4);
    for (const Fold& f : s.folds) {
      CHECK(f.train.size() == 669);
      CHECK(f.test.size() == 223);
    }
  }

  TEST_CASE("splits are deterministic in the seed") {
    Rng rng(2);
    const Labelled l = labelled(30, 25, rng);
    const FoldSplit a = split_folds(l.ids, l.labels, 5);
    const FoldSplit b = split_folds(l.ids, l.labels, 5);
    const FoldSplit c = split_folds(l.ids, l.labels, 6);
    CHECK(a.holdout == b.holdout);
    for (std::size_t f = 0; f < a.folds.size(); ++f) CHECK(a.folds[f].test == b.folds[f].test);
    bool differs = a.holdout != c.holdout;
    for (std::size_t f = 0; f < a.folds.size(); ++f) differs = differs || a.folds[f].test != c.folds[f].test;
    CHECK(differs);
  }

  TEST_CASE("folds partition the non-holdout events and stay stratified") {
    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t r = rng.below(60), nr = rng.below(60);
      const int k = 1 + static_cast<int>(rng.below(6));
      const double frac = rng.uniform(0.0, 0.3);
      if (r + nr - static_cast<std::size_t>(frac * static_cast<double>(r + nr)) < static_cast<std::size_t>(k)) continue;
      const Labelled l = labelled(r, nr, rng);
      const FoldSplit s = split_folds(l.ids, l.labels, rng.next(), k, frac);

      std::multiset<std::string> seen(s.holdout.begin(), s.holdout.end());
      for (const Fold& f : s.folds) {
        seen.insert(f.test.begin(), f.test.end());
        std::set<std::string> train(f.train.begin(), f.train.end());
        for (const auto& id : f.test) CHECK(train.count(id) == 0);
        for (const auto& id : s.holdout) CHECK(train.count(id) == 0);
        CHECK(f.train.size() + f.test.size() + s.holdout.size() == l.ids.size());
      }
      CHECK(seen == std::multiset<std::string>(l.ids.begin(), l.ids.end()));

      std::size_t lo = SIZE_MAX, hi = 0, lo_n = SIZE_MAX, hi_n = 0;
      for (const Fold& f : s.folds) {
        const std::size_t fr = count_rumours(f.test, l);
        lo = std::min(lo, fr);
        hi = std::max(hi, fr);
        lo_n = std::min(lo_n, f.test.size());
        hi_n = std::max(hi_n, f.test.size());
      }
      CHECK(hi - lo <= 1);
      CHECK(hi_n - lo_n <= 1);
      const double exact = static_cast<double>(r) * static_cast<double>(s.holdout.size()) / static_cast<double>(r + nr);
      CHECK(std::abs(static_cast<double>(count_rumours(s.holdout, l)) - exact) < 1.0);
    }
  }

  TEST_CASE("split argument errors") {
    Rng rng(4);
    const Labelled l = labelled(3, 3, rng);
    CHECK_THROWS_AS(split_folds(l.ids, std::span(l.labels).subspan(1), 1), UsageError);
    CHECK_THROWS_AS(split_folds(l.ids, l.labels, 1, 0), UsageError);
    CHECK_THROWS_AS(split_folds(l.ids, l.labels, 1, 7, 0.0), UsageError);
    CHECK_THROWS_AS(split_folds(l.ids, l.labels, 1, 2, 1.0), UsageError);
  }

  TEST_CASE("metrics example with eight true positives") {
    std::vector<Label> pred, truth;
    auto add = [&](Label p, Label t, int n) {
      for (int i = 0; i < n; ++i) {
        pred.push_back(p);
        truth.push_back(t);
      }
    };
    add(Label::Rumour, Label::Rumour, 8);
    add(Label::Rumour, Label::NonRumour, 2);
    add(Label::NonRumour, Label::Rumour, 2);
    add(Label::NonRumour, Label::NonRumour, 8);
    const Metrics m = compute_metrics(pred, truth);
    CHECK(m.confusion == Confusion{8, 2, 2, 8});
    for (const double v : {m.accuracy, m.rumour.precision, m.rumour.recall, m.rumour.f1, m.non_rumour.precision,
                           m.non_rumour.recall, m.non_rumour.f1}) {
      CHECK(v == doctest::Approx(0.8));
    }
  }

  TEST_CASE("no predicted positives marks rumour precision undefined") {
    const std::vector<Label> pred(4, Label::NonRumour);
    const std::vector<Label> truth = {Label::Rumour, Label::NonRumour, Label::NonRumour, Label::Rumour};
    const Metrics m = compute_metrics(pred, truth);
    CHECK(m.rumour.precision_undefined);
    CHECK(m.rumour.precision == 0.0);
    CHECK(m.rumour.recall == 0.0);
    CHECK(m.rumour.f1_undefined);
    CHECK_FALSE(m.non_rumour.precision_undefined);
    CHECK(m.non_rumour.recall == 1.0);
    CHECK(m.accuracy == 0.5);
    CHECK_THROWS_AS(compute_metrics(pred, std::span(truth).subspan(1)), UsageError);
    CHECK_THROWS_AS(compute_metrics({}, {}), UsageError);
  }

  TEST_CASE("metrics agree with a counting oracle") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t n = 1 + rng.below(40);
      std::vector<Label> pred(n), truth(n);
      for (std::size_t i = 0; i < n; ++i) {
        pred[i] = rng.below(2) ? Label::Rumour : Label::NonRumour;
        truth[i] = rng.below(2) ? Label::Rumour : Label::NonRumour;
      }
      const Metrics m = compute_metrics(pred, truth);
      std::map<std::pair<Label, Label>, double> count;
      for (std::size_t i = 0; i < n; ++i) count[{pred[i], truth[i]}] += 1;
      const double correct = count[{Label::Rumour, Label::Rumour}] + count[{Label::NonRumour, Label::NonRumour}];
      CHECK(m.accuracy == doctest::Approx(correct / static_cast<double>(n)));
      for (const Label c : {Label::Rumour, Label::NonRumour}) {
        const Label o = c == Label::Rumour ? Label::NonRumour : Label::Rumour;
        const double tp = count[{c, c}], fp = count[{c, o}], fn = count[{o, c}];
        const ClassMetrics& cm = c == Label::Rumour ? m.rumour : m.non_rumour;
        CHECK(cm.precision_undefined == (tp + fp == 0));
        if (tp + fp > 0) CHECK(cm.precision == doctest::Approx(tp / (tp + fp)));
        if (tp + fn > 0) CHECK(cm.recall == doctest::Approx(tp / (tp + fn)));
        if (tp > 0) CHECK(cm.f1 == doctest::Approx(2 * tp / (2 * tp + fp + fn)));
        CHECK(cm.f1 >= 0.0);
        CHECK(cm.f1 <= 1.0);
      }
    }
  }

  TEST_CASE("mean metrics average fields and sum confusions") {
    const Metrics a = metrics_from_confusion({8, 2, 2, 8});
    const Metrics b = metrics_from_confusion({0, 0, 5, 5});
    const std::vector<Metrics> runs = {a, b};
    const Metrics m = mean_metrics(runs);
    CHECK(m.accuracy == doctest::Approx((0.8 + 0.5) / 2));
    CHECK(m.rumour.precision == doctest::Approx(0.4));
    CHECK(m.rumour.precision_undefined);
    CHECK(m.confusion == Confusion{8, 2, 7, 13});
    CHECK_THROWS_AS(mean_metrics({}), UsageError);
  }

  TEST_CASE("early detection curve validates deadlines") {
    const std::vector<Event> events = {test::make_event("a", Label::Rumour, {0, 7200})};
    const Detector& d = tiny_detector();
    CHECK_THROWS_AS(early_detection_curve(d, events, std::vector<double>{}), UsageError);
    CHECK_THROWS_AS(early_detection_curve(d, events, std::vector<double>{12, 12}), UsageError);
    CHECK_THROWS_AS(early_detection_curve(d, events, std::vector<double>{-1, 12}), UsageError);
    CHECK_THROWS_AS(early_detection_curve(d, {}, std::vector<double>{12}), UsageError);

    const std::vector<double> deadlines = {1, 2, 48};
    const auto curve = early_detection_curve(d, events, deadlines);
    REQUIRE(curve.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(curve[i].deadline_hours == deadlines[i]);
      CHECK(curve[i].n_no_evidence == 0);
      const bool right = d.predict(events[0], deadlines[i]).label == Label::Rumour;
      CHECK(curve[i].accuracy == (right ? 1.0 : 0.0));
    }

    const std::vector<Event> with_empty = {events[0], Event{"z", Label::NonRumour, {}}};
    const auto c2 = early_detection_curve(d, with_empty, std::vector<double>{12});
    CHECK(c2[0].n_no_evidence == 1);
    CHECK(c2[0].accuracy <= 0.5);
  }

  TEST_CASE("CSV writers emit the documented columns") {
    std::ostringstream m;
    const std::vector<MetricsRow> rows = {{"extended", "0", metrics_from_confusion({8, 2, 2, 8})}};
    write_metrics_csv(m, rows);
    CHECK(m.str() ==
          "setting,fold,class,accuracy,precision,recall,f1\n"
          "extended,0,rumour,0.80000000000000004,0.80000000000000004,0.80000000000000004,0.80000000000000016\n"
          "extended,0,non_rumour,0.80000000000000004,0.80000000000000004,0.80000000000000004,0.80000000000000016\n");
    std::ostringstream e;
    const std::vector<DeadlineAccuracy> curve = {{12, 0.5, 1}, {24, 0.75, 0}};
    write_early_detection_csv(e, curve);
    CHECK(e.str() == "deadline_hours,accuracy,n_no_evidence\n12,0.5,1\n24,0.75,0\n");
    CHECK(default_deadlines() == std::vector<double>{12, 24, 36, 48, 60, 72, 84, 96});
  }
}
