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

#include "drrd/config.hpp"
#include "drrd/error.hpp"
#include "drrd/rng.hpp"
#include "helpers.hpp"

using namespace drrd;
using json = nlohmann::json;

TEST_SUITE("config") {
  TEST_CASE("defaults round trip through JSON") {
    const RunConfig c;
    const RunConfig back = RunConfig::from_json(json::parse(c.dump()));
    CHECK(back.dump() == c.dump());
    const auto j = c.to_json();
    CHECK(j["model"]["d_v"] == 100);
    CHECK(j["model"]["d_f"] == 128);
    CHECK(j["model"]["dropout"] == 0.6);
    CHECK(j["train"]["batch_size"] == 32);
    CHECK(j["train"]["epochs"] == 30);
    CHECK(j["embed"]["text"]["min_count"] == 2);
    CHECK(j["embed"]["user"]["min_count"] == 1);
    CHECK(j["eval"]["folds"] == 4);
    CHECK(j["synth"]["n_events"] == 400);
  }

  TEST_CASE("partial patches merge onto defaults") {
    RunConfig c;
    c.merge(json::parse(R"({"model": {"d_f": 16}, "synth": {"rumour_intensity": [1, 2]}, "seed": 9})"));
    CHECK(c.pipeline.model.d_f == 16);
    CHECK(c.pipeline.model.d_v == 100);
    CHECK(c.synth.rumour_intensity == std::vector<double>{1, 2});
    CHECK(c.seed == 9);
  }

  TEST_CASE("unknown keys and wrong types are rejected by path") {
    RunConfig c;
    try {
      c.merge(json::parse(R"({"model": {"d_vv": 3}})"));
      FAIL("expected an error");
    } catch (const UsageError& e) {
      CHECK(std::string(e.what()).find("model.d_vv") != std::string::npos);
    }
    CHECK_THROWS_AS(c.merge(json::parse(R"({"model": {"d_v": "big"}})")), UsageError);
    CHECK_THROWS_AS(c.merge(json::parse(R"({"model": {"d_v": 1.5}})")), UsageError);
    CHECK_THROWS_AS(c.merge(json::parse(R"({"seed": -1})")), UsageError);
    CHECK_THROWS_AS(c.merge(json::parse(R"({"eval": {"deadlines": [1, "x"]}})")), UsageError);
    CHECK_THROWS_AS(c.merge(json::parse(R"([1, 2])")), UsageError);
    CHECK_THROWS_AS(c.merge(json::parse(R"({"train": 3})")), UsageError);
  }

  TEST_CASE("set parses values as JSON with a string fallback") {
    RunConfig c;
    c.set("train.epochs", "7");
    c.set("model.use_user_branch", "false");
    c.set("eval.protocol", "single");
    c.set("eval.deadlines", "[6, 12]");
    CHECK(c.pipeline.train.epochs == 7);
    CHECK_FALSE(c.pipeline.model.use_user_branch);
    CHECK(c.eval.protocol == "single");
    CHECK(c.eval.deadlines == std::vector<double>{6, 12});
    CHECK_THROWS_AS(c.set("train.epoch", "7"), UsageError);
    CHECK_THROWS_AS(c.set("", "7"), UsageError);
  }

  TEST_CASE("resolved forks one seed per stage") {
    RunConfig c;
    c.seed = 42;
    c.pipeline.model.d_v = 12;
    const RunConfig r = c.resolved();
    CHECK(r.pipeline.text_embed.seed == fork_seed(42, "embed.text"));
    CHECK(r.pipeline.user_embed.seed == fork_seed(42, "embed.user"));
    CHECK(r.pipeline.train.seed == fork_seed(42, "train"));
    CHECK(r.synth.seed == fork_seed(42, "synth"));
    CHECK(c.split_seed() == fork_seed(42, "split"));
    CHECK(r.pipeline.text_embed.dim == 12);
    CHECK(r.pipeline.user_embed.dim == 12);
  }

  TEST_CASE("files load and report bad JSON") {
    test::TempDir dir;
    test::write_file(dir.file("c.json"), R"({"train": {"lr": 0.01}})");
    CHECK(RunConfig::load(dir.file("c.json")).pipeline.train.adam.lr == 0.01);
    test::write_file(dir.file("bad.json"), "{");
    CHECK_THROWS_AS(RunConfig::load(dir.file("bad.json")), UsageError);
    CHECK_THROWS_AS(RunConfig::load(dir.file("none.json")), IoError);
  }
}
