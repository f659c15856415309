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
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace drrd {

constexpr std::int64_t kSecondsPerHour = 3600;
constexpr int kDefaultMaxHours = 96;

enum class Label : int { NonRumour = 0, Rumour = 1 };

/// One social engagement: a post written by a user at a point in time.
struct Post {
  std::string post_id;
  std::string user_id;
  std::int64_t timestamp_s = 0;
  std::string text;

  friend bool operator==(const Post&, const Post&) = default;
};

/// A news item with its veracity label and time-ordered engagements.
struct Event {
  std::string event_id;
  Label label = Label::NonRumour;
  std::vector<Post> posts;

  /// Timestamp of the earliest post. Requires a non-empty, sorted event.
  std::int64_t origin() const { return posts.front().timestamp_s; }

  friend bool operator==(const Event&, const Event&) = default;
};

struct Partition {
  int hour_index = 0;
  std::vector<Post> posts;

  std::size_t m_k() const { return posts.size(); }
};

/// An event grouped into contiguous one-hour buckets, starting at the earliest
/// post. Empty hours are materialized.
struct PartitionedEvent {
  std::string event_id;
  Label label = Label::NonRumour;
  std::vector<Partition> partitions;

  int n_hours() const { return static_cast<int>(partitions.size()); }
};

struct CorpusSummary {
  std::size_t events = 0;
  std::size_t posts = 0;
  std::size_t users = 0;
  std::size_t rumours = 0;
  std::size_t non_rumours = 0;
};

/// Orders posts by timestamp, breaking ties on post_id.
void sort_posts(std::vector<Post>& posts);

/// Validates field invariants and sorts the posts. Throws DataError.
void validate_event(Event& event);

/// Parses the line-delimited JSON event format. Blank lines are skipped.
/// Errors name the 1-based line number.
std::vector<Event> parse_engagements(std::istream& in);
std::vector<Event> load_events(const std::string& path);

/// Writes one compact JSON record per event; keys are emitted sorted.
void write_events(std::ostream& out, const std::vector<Event>& events);
void save_events(const std::string& path, const std::vector<Event>& events);

CorpusSummary summarize(const std::vector<Event>& events);

/// floor((t - t0) / 3600). Throws DataError when the post precedes t0.
int assign_hour_index(const Post& post, std::int64_t t0);

/// Hours past max_hours are dropped; n = min(max_hours, 1 + last hour index).
PartitionedEvent partition_event(const Event& event, int max_hours = kDefaultMaxHours);

/// Keeps posts with (t - t0) < deadline_hours * 3600. Throws
/// InsufficientEvidence when nothing survives.
Event filter_by_deadline(const Event& event, double deadline_hours);

}  // namespace drrd
