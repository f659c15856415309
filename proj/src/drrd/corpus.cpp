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

#include "drrd/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "drrd/error.hpp"

namespace drrd {
namespace {

using nlohmann::json;

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

const json& require(const json& obj, const char* key, std::size_t line) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw DataError(at_line(line) + "missing field '" + key + "'");
  return *it;
}

std::string require_string(const json& obj, const char* key, std::size_t line) {
  const json& v = require(obj, key, line);
  if (!v.is_string()) throw DataError(at_line(line) + "field '" + key + "' must be a string");
  return v.get<std::string>();
}

std::int64_t require_integer(const json& obj, const char* key, std::size_t line) {
  const json& v = require(obj, key, line);
  if (!v.is_number_integer()) throw DataError(at_line(line) + "field '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

Event event_from_json(const json& record, std::size_t line) {
  if (!record.is_object()) throw DataError(at_line(line) + "record must be a JSON object");
  Event event;
  event.event_id = require_string(record, "event_id", line);
  if (event.event_id.empty()) throw DataError(at_line(line) + "empty event_id");
  const auto label = require_integer(record, "label", line);
  if (label != 0 && label != 1) throw DataError(at_line(line) + "label must be 0 or 1");
  event.label = static_cast<Label>(label);

  const json& posts = require(record, "posts", line);
  if (!posts.is_array()) throw DataError(at_line(line) + "field 'posts' must be an array");
  event.posts.reserve(posts.size());
  for (const json& p : posts) {
    if (!p.is_object()) throw DataError(at_line(line) + "post must be a JSON object");
    Post post;
    post.post_id = require_string(p, "post_id", line);
    post.user_id = require_string(p, "user_id", line);
    post.timestamp_s = require_integer(p, "timestamp", line);
    post.text = require_string(p, "text", line);
    event.posts.push_back(std::move(post));
  }
  try {
    validate_event(event);
  } catch (const DataError& e) {
    throw DataError(at_line(line) + e.what());
  }
  return event;
}

}  // namespace

void sort_posts(std::vector<Post>& posts) {
  std::sort(posts.begin(), posts.end(), [](const Post& a, const Post& b) {
    if (a.timestamp_s != b.timestamp_s) return a.timestamp_s < b.timestamp_s;
    return a.post_id < b.post_id;
  });
}

void validate_event(Event& event) {
  if (event.posts.empty()) throw DataError("event '" + event.event_id + "' has no posts");
  for (const Post& p : event.posts) {
    if (p.post_id.empty()) throw DataError("event '" + event.event_id + "' has a post with empty post_id");
    if (p.user_id.empty()) throw DataError("post '" + p.post_id + "' has empty user_id");
    if (p.timestamp_s < 0) throw DataError("post '" + p.post_id + "' has negative timestamp");
  }
  sort_posts(event.posts);
}

std::vector<Event> parse_engagements(std::istream& in) {
  std::vector<Event> events;
  std::unordered_set<std::string> event_ids;
  std::unordered_set<std::string> post_ids;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(text);
    } catch (const json::parse_error& e) {
      throw DataError(at_line(line) + "malformed JSON (" + e.what() + ")");
    }
    Event event = event_from_json(record, line);
    if (!event_ids.insert(event.event_id).second) {
      throw DataError(at_line(line) + "duplicate event_id '" + event.event_id + "'");
    }
    for (const Post& p : event.posts) {
      if (!post_ids.insert(p.post_id).second) {
        throw DataError(at_line(line) + "duplicate post_id '" + p.post_id + "'");
      }
    }
    events.push_back(std::move(event));
  }
  return events;
}

std::vector<Event> load_events(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open event file '" + path + "'");
  return parse_engagements(in);
}

void write_events(std::ostream& out, const std::vector<Event>& events) {
  for (const Event& e : events) {
    json posts = json::array();
    for (const Post& p : e.posts) {
      posts.push_back({{"post_id", p.post_id}, {"user_id", p.user_id}, {"timestamp", p.timestamp_s}, {"text", p.text}});
    }
    json record = {{"event_id", e.event_id}, {"label", static_cast<int>(e.label)}, {"posts", std::move(posts)}};
    out << record.dump() << '\n';
  }
}

void save_events(const std::string& path, const std::vector<Event>& events) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write event file '" + path + "'");
  write_events(out, events);
  if (!out) throw IoError("write failed for '" + path + "'");
}

CorpusSummary summarize(const std::vector<Event>& events) {
  CorpusSummary s;
  std::unordered_set<std::string> users;
  s.events = events.size();
  for (const Event& e : events) {
    s.posts += e.posts.size();
    (e.label == Label::Rumour ? s.rumours : s.non_rumours) += 1;
    for (const Post& p : e.posts) users.insert(p.user_id);
  }
  s.users = users.size();
  return s;
}

int assign_hour_index(const Post& post, std::int64_t t0) {
  if (post.timestamp_s < t0) {
    throw DataError("post '" + post.post_id + "' precedes the event origin");
  }
  return static_cast<int>((post.timestamp_s - t0) / kSecondsPerHour);
}

PartitionedEvent partition_event(const Event& event, int max_hours) {
  if (max_hours < 1) throw UsageError("max_hours must be at least 1");
  if (event.posts.empty()) throw DataError("event '" + event.event_id + "' has no posts");

  PartitionedEvent out;
  out.event_id = event.event_id;
  out.label = event.label;
  const std::int64_t t0 = event.origin();
  const int last = assign_hour_index(event.posts.back(), t0);
  const int n = std::min(max_hours, last + 1);
  out.partitions.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out.partitions[static_cast<std::size_t>(k)].hour_index = k;

  for (const Post& p : event.posts) {
    const int k = assign_hour_index(p, t0);
    if (k >= n) break;  // posts are sorted, so every later post is truncated too
    out.partitions[static_cast<std::size_t>(k)].posts.push_back(p);
  }
  return out;
}

Event filter_by_deadline(const Event& event, double deadline_hours) {
  if (!(deadline_hours > 0.0)) throw UsageError("deadline must be positive");
  Event out{event.event_id, event.label, {}};
  if (event.posts.empty()) throw InsufficientEvidence("no engagements before deadline");
  const double limit_s = deadline_hours * static_cast<double>(kSecondsPerHour);
  const std::int64_t t0 = event.origin();
  for (const Post& p : event.posts) {
    if (static_cast<double>(p.timestamp_s - t0) < limit_s) out.posts.push_back(p);
  }
  if (out.posts.empty()) throw InsufficientEvidence("no engagements before deadline");
  return out;
}

}  // namespace drrd
