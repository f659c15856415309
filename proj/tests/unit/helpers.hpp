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
#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "drrd/config.hpp"
#include "drrd/corpus.hpp"
#include "drrd/nn/tensor.hpp"
#include "drrd/rng.hpp"

namespace drrd::test {

/// Scratch directory removed on scope exit.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    Rng rng(static_cast<std::uint64_t>(std::rand()) ^ reinterpret_cast<std::uintptr_t>(this));
    path_ = std::filesystem::temp_directory_path() /
            ("drrd_test_" + std::to_string(rng.next() % 1000000007) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

/// Event whose posts sit at the given offsets (seconds) from t0, authored by
/// the matching users.
inline Event make_event(const std::string& id, Label label, const std::vector<std::int64_t>& offsets,
                        const std::vector<std::string>& users = {}, std::int64_t t0 = 1000) {
  Event e{id, label, {}};
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    Post p;
    p.post_id = id + "_" + std::to_string(i);
    p.user_id = users.empty() ? "u" + std::to_string(i) : users[i % users.size()];
    p.timestamp_s = t0 + offsets[i];
    p.text = "post " + std::to_string(i);
    e.posts.push_back(std::move(p));
  }
  sort_posts(e.posts);
  return e;
}

inline nn::Matrix random_matrix(Rng& rng, nn::Index rows, nn::Index cols, double scale = 1.0) {
  nn::Matrix m(rows, cols);
  for (nn::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-scale, scale);
  return m;
}

inline nn::Vector random_vector(Rng& rng, nn::Index n, double scale = 1.0) {
  nn::Vector v(n);
  for (nn::Index i = 0; i < n; ++i) v[i] = rng.uniform(-scale, scale);
  return v;
}

/// Configuration small enough to train in well under a second.
inline RunConfig tiny_config(std::uint64_t seed = 5) {
  RunConfig c;
  c.seed = seed;
  c.pipeline.model.d_v = 8;
  c.pipeline.model.d_f = 6;
  c.pipeline.model.head_hidden = 4;
  c.pipeline.text_embed.epochs = 3;
  c.pipeline.text_embed.infer_epochs = 5;
  c.pipeline.user_embed.epochs = 3;
  c.pipeline.user_embed.infer_epochs = 5;
  c.pipeline.train.epochs = 3;
  c.pipeline.train.batch_size = 8;
  c.synth.n_events = 40;
  c.synth.user_pool = 200;
  c.synth.vocab_size = 60;
  return c;
}

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

/// Runs the drrd binary with the given argument string.
inline CommandResult run_cli(const std::string& args, const TempDir& scratch) {
  const std::string out = scratch.file("cli_stdout.txt");
  const std::string err = scratch.file("cli_stderr.txt");
  const std::string cmd = std::string("\"") + DRRD_CLI_PATH + "\" " + args + " >\"" + out + "\" 2>\"" + err + "\"";
  const int status = std::system(cmd.c_str());
  CommandResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(out);
  r.err = read_file(err);
  return r;
}

}  // namespace drrd::test
