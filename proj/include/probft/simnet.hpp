// Copyright 2026 The probft Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "probft/config.hpp"
#include "probft/message.hpp"
#include "probft/replica.hpp"

namespace probft {

using Tick = std::uint64_t;

enum class SchedulerPolicy { kUniformRandom, kFixed, kOrderRandomized };

std::string_view to_string(SchedulerPolicy p);
std::optional<SchedulerPolicy> parse_scheduler_policy(std::string_view s);

struct NetConfig {
  Tick gst = 0;
  Tick delta = 10;
  Tick pre_gst_max_delay = 100;
  Tick view_duration = 100;  // >= 5 * delta
  Tick fixed_delay = 1;      // kFixed only; must be <= delta
  Tick post_gst_skew = 0;    // view-entry skew after GST; < delta
  SchedulerPolicy policy = SchedulerPolicy::kOrderRandomized;

  /// Throws ConfigError on inconsistent timing parameters.
  void validate() const;

  static NetConfig with_defaults(Tick delta = 10) {
    NetConfig c;
    c.delta = delta;
    c.view_duration = 10 * delta;
    c.pre_gst_max_delay = 10 * delta;
    return c;
  }
};

struct Delivery {
  Tick time = 0;
  std::uint64_t order = 0;  // tie-break among equal times; 0 keeps FIFO
};

/// Delivery time for a message sent at `now`. The signature deliberately has
/// no sender argument: delays are independent of who sent the message.
Delivery deliver_policy(Tick now, const NetConfig& net, std::mt19937_64& rng);

/// Oracle synchronizer. Nominal start of view v is (v - 1) * view_duration;
/// each replica enters at that time plus a policy-driven skew (bounded by
/// pre_gst_max_delay before GST and post_gst_skew after it). Entry times are
/// strictly increasing per replica.
class Synchronizer {
 public:
  Synchronizer(const NetConfig& net, std::uint32_t n, std::uint64_t seed);

  /// Time at which `replica` enters view v; call with increasing v.
  Tick entry_time(ReplicaId replica, View v);

 private:
  NetConfig net_;
  std::mt19937_64 rng_;
  std::vector<Tick> last_entry_;
};


struct ViewMetrics {
  std::array<std::uint64_t, 5> sent{};  // indexed by MessageKind
  std::uint64_t blocks = 0;
  std::uint64_t new_leader_quorums = 0;
  std::uint64_t prepare_quorums = 0;
  std::uint64_t commit_quorums = 0;
  std::map<Value, std::uint32_t> decisions;  // correct replicas only
  std::vector<std::uint32_t> prepare_in;     // per replica, index id - 1
  std::vector<std::uint32_t> commit_in;

  std::uint64_t sent_of(MessageKind k) const { return sent[static_cast<std::size_t>(k)]; }
  std::uint64_t total_sent() const;
};

struct ReplicaOutcome {
  bool faulty = false;
  std::optional<Value> decided;
  View decided_view;
};

enum class RunOutcome { kAllDecided, kNonQuiescent };

struct RunMetrics {
  RunOutcome outcome = RunOutcome::kNonQuiescent;
  std::map<View, ViewMetrics> views;
  std::vector<ReplicaOutcome> replicas;  // index id - 1
  View last_view;
  Tick end_time = 0;

  // Harness audits.
  std::uint64_t correct_votes = 0;
  std::uint64_t correct_votes_honest = 0;  // recipients == sample, VRF verifies
  std::uint64_t adversary_votes = 0;
  std::uint64_t adversary_votes_valid = 0;
  std::uint64_t decision_conflicts = 0;    // later decisions differing from the first
  std::vector<MessagePtr> view_proposals;  // Propose messages sent, in order
  Tick post_gst_entry_skew = 0;            // widest correct view-entry spread after GST

  bool all_correct_decided() const;
  bool agreement_violated() const;
  std::uint64_t total_sent() const;
  std::size_t decided_count() const;
};

/// Line-delimited JSON trace of protocol events.
class TraceWriter {
 public:
  explicit TraceWriter(std::ostream& out) : out_(out) {}

  void note(Tick t, const ReplicaNote& n);
  void new_view(Tick t, ReplicaId r, View v);
  void send(Tick t, ReplicaId from, const MessagePtr& m, std::span<const ReplicaId> to);
  void broadcast(Tick t, ReplicaId from, const MessagePtr& m);
  void line(const nlohmann::ordered_json& record);

 private:
  std::ostream& out_;
};

}  // namespace probft
