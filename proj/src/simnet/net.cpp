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

#include <algorithm>
#include <string>

#include "probft/random.hpp"
#include "probft/simnet.hpp"

namespace probft {

std::string_view to_string(SchedulerPolicy p) {
  switch (p) {
    case SchedulerPolicy::kUniformRandom:
      return "uniform_random";
    case SchedulerPolicy::kFixed:
      return "fixed";
    case SchedulerPolicy::kOrderRandomized:
      return "order_randomized";
  }
  return "unknown";
}

std::optional<SchedulerPolicy> parse_scheduler_policy(std::string_view s) {
  for (auto p : {SchedulerPolicy::kUniformRandom, SchedulerPolicy::kFixed,
                 SchedulerPolicy::kOrderRandomized}) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

void NetConfig::validate() const {
  if (delta == 0) throw ConfigError("delta must be positive");
  if (view_duration < 5 * delta) throw ConfigError("view_duration must be at least 5 * delta");
  if (pre_gst_max_delay == 0) throw ConfigError("pre_gst_max_delay must be positive");
  if (post_gst_skew >= delta) throw ConfigError("post_gst_skew must be below delta");
  if (policy == SchedulerPolicy::kFixed && (fixed_delay == 0 || fixed_delay > delta)) {
    throw ConfigError("fixed_delay must lie in [1, delta]");
  }
}

Delivery deliver_policy(Tick now, const NetConfig& net, std::mt19937_64& rng) {
  Delivery d;
  if (net.policy == SchedulerPolicy::kFixed) {
    d.time = now + net.fixed_delay;
    return d;
  }
  const Tick cap = now < net.gst ? net.pre_gst_max_delay : net.delta;
  d.time = now + uniform_between(rng, 1, cap);
  // Partial synchrony: everything in flight at GST lands by GST + delta.
  d.time = std::min(d.time, std::max(now, net.gst) + net.delta);
  if (net.policy == SchedulerPolicy::kOrderRandomized) d.order = rng() | 1;
  return d;
}

Synchronizer::Synchronizer(const NetConfig& net, std::uint32_t n, std::uint64_t seed)
    : net_(net), rng_(stream_engine(seed, 0, 0x5c)), last_entry_(n, 0) {}

Tick Synchronizer::entry_time(ReplicaId replica, View v) {
  const Tick nominal = (v.value - 1) * net_.view_duration;
  Tick skew = 0;
  if (nominal < net_.gst) {
    // Bounded so an entry never crosses the next nominal start.
    skew = uniform_between(rng_, 0, std::min(net_.pre_gst_max_delay, net_.view_duration - 1));
  } else if (net_.post_gst_skew > 0) {
    skew = uniform_between(rng_, 0, net_.post_gst_skew);
  }
  Tick& last = last_entry_[replica.value - 1];
  Tick t = nominal + skew;
  if (v.value > 1) t = std::max(t, last + 1);
  last = t;
  return t;
}

std::uint64_t ViewMetrics::total_sent() const {
  std::uint64_t t = 0;
  for (auto c : sent) t += c;
  return t;
}

bool RunMetrics::all_correct_decided() const {
  return std::all_of(replicas.begin(), replicas.end(),
                     [](const ReplicaOutcome& r) { return r.faulty || r.decided.has_value(); });
}

bool RunMetrics::agreement_violated() const {
  const Value* first = nullptr;
  for (const auto& [view, vm] : views) {
    for (const auto& [value, count] : vm.decisions) {
      if (first && !(*first == value)) return true;
      first = &value;
    }
  }
  return false;
}

std::uint64_t RunMetrics::total_sent() const {
  std::uint64_t t = 0;
  for (const auto& [view, vm] : views) t += vm.total_sent();
  return t;
}

std::size_t RunMetrics::decided_count() const {
  return static_cast<std::size_t>(std::count_if(replicas.begin(), replicas.end(),
      [](const ReplicaOutcome& r) { return !r.faulty && r.decided.has_value(); }));
}

namespace {

std::string_view note_name(NoteKind k) {
  switch (k) {
    case NoteKind::kProposed:
      return "proposed";
    case NoteKind::kNewLeaderQuorum:
      return "new_leader_quorum";
    case NoteKind::kVoted:
      return "voted";
    case NoteKind::kPrepared:
      return "prepared";
    case NoteKind::kDecided:
      return "decided";
    case NoteKind::kBlocked:
      return "blocked";
  }
  return "unknown";
}

}  // namespace

void TraceWriter::line(const nlohmann::ordered_json& record) { out_ << record.dump() << '\n'; }

void TraceWriter::note(Tick t, const ReplicaNote& n) {
  nlohmann::ordered_json j;
  j["t"] = t;
  j["replica"] = n.replica.value;
  j["event"] = note_name(n.kind);
  j["view"] = n.view.value;
  j["value"] = n.value.bytes;
  line(j);
}

void TraceWriter::new_view(Tick t, ReplicaId r, View v) {
  nlohmann::ordered_json j;
  j["t"] = t;
  j["replica"] = r.value;
  j["event"] = "new_view";
  j["view"] = v.value;
  line(j);
}

namespace {

nlohmann::ordered_json send_record(Tick t, ReplicaId from, const Message& m) {
  nlohmann::ordered_json j;
  j["t"] = t;
  j["replica"] = from.value;
  j["event"] = "send";
  j["kind"] = to_string(m.kind);
  j["view"] = m.view.value;
  if (m.proposal) {
    j["value"] = m.proposal->value.bytes;
  } else if (m.kind == MessageKind::kNewLeader) {
    j["prepared_view"] = m.prepared_view.value;
    if (m.prepared_val) j["prepared_val"] = m.prepared_val->bytes;
  }
  return j;
}

}  // namespace

void TraceWriter::send(Tick t, ReplicaId from, const MessagePtr& m, std::span<const ReplicaId> to) {
  auto j = send_record(t, from, *m);
  auto& ids = j["to"] = nlohmann::ordered_json::array();
  for (auto r : to) ids.push_back(r.value);
  line(j);
}

void TraceWriter::broadcast(Tick t, ReplicaId from, const MessagePtr& m) {
  auto j = send_record(t, from, *m);
  j["to"] = "all";
  line(j);
}

}  // namespace probft
