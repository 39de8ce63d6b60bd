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
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "probft/cli.hpp"
#include "probft/simnet.hpp"
#include "probft/simulation.hpp"

using namespace probft;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string traced(const ProtocolConfig& cfg, const NetConfig& net, const AdversarySpec& adv,
                   std::uint32_t max_views, RunMetrics* out = nullptr) {
  std::ostringstream text;
  TraceWriter tw(text);
  SimulationOptions opts;
  opts.trace = &tw;
  opts.max_views = max_views;
  auto m = run_simulation(cfg, net, adv, opts);
  if (out) *out = std::move(m);
  return text.str();
}

AdversarySpec equivocating(std::uint32_t f) {
  AdversarySpec adv;
  for (std::uint32_t i = 1; i <= f; ++i) adv.faulty.push_back(ReplicaId{i});
  adv.leader = LeaderStrategy::kEquivOptimal;
  adv.replica = ReplicaStrategy::kPartitionConsistent;
  return adv;
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

}  // namespace

TEST_CASE("delivery policies") {
  std::mt19937_64 rng(3);
  NetConfig net = NetConfig::with_defaults(10);
  net.policy = SchedulerPolicy::kFixed;
  net.fixed_delay = 4;
  for (Tick now : {0, 7, 1000}) CHECK(deliver_policy(now, net, rng).time == now + 4);

  for (auto policy : {SchedulerPolicy::kUniformRandom, SchedulerPolicy::kOrderRandomized, SchedulerPolicy::kFixed}) {
    net.policy = policy;
    net.gst = 500;
    for (int k = 0; k < 2000; ++k) {
      const Tick now = static_cast<Tick>(k % 1000);
      const auto d = deliver_policy(now, net, rng);
      CHECK(d.time > now);
      CHECK(d.time <= std::max(now, net.gst) + net.delta);
      if (now >= net.gst) CHECK(d.time <= now + net.delta);
      if (policy != SchedulerPolicy::kFixed && now < net.gst) CHECK(d.time <= now + net.pre_gst_max_delay);
    }
  }
}

TEST_CASE("net config validation") {
  NetConfig net;
  CHECK_NOTHROW(net.validate());
  net.view_duration = 4 * net.delta;
  CHECK_THROWS_AS(net.validate(), ConfigError);
  net = NetConfig{};
  net.fixed_delay = net.delta + 1;
  CHECK_NOTHROW(net.validate());  // ignored by the random policies
  net.policy = SchedulerPolicy::kFixed;
  CHECK_THROWS_AS(net.validate(), ConfigError);
  net = NetConfig{};
  net.post_gst_skew = net.delta;
  CHECK_THROWS_AS(net.validate(), ConfigError);
  CHECK(parse_scheduler_policy("uniform_random") == SchedulerPolicy::kUniformRandom);
  CHECK_FALSE(parse_scheduler_policy("lifo").has_value());
}

TEST_CASE("synchronizer") {
  NetConfig net = NetConfig::with_defaults(10);
  {
    Synchronizer sync(net, 5, 1);
    for (std::uint32_t i = 1; i <= 5; ++i) CHECK(sync.entry_time(ReplicaId{i}, View{1}) == 0);
  }
  net.gst = 450;
  net.post_gst_skew = 9;
  Synchronizer sync(net, 7, 2);
  std::vector<Tick> last(8, 0);
  bool skewed_before_gst = false;
  for (std::uint64_t v = 1; v <= 12; ++v) {
    Tick lo = ~Tick{0}, hi = 0;
    for (std::uint32_t i = 1; i <= 7; ++i) {
      const Tick t = sync.entry_time(ReplicaId{i}, View{v});
      if (v > 1) CHECK(t > last[i]);
      last[i] = t;
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
    const Tick nominal = (v - 1) * net.view_duration;
    if (nominal >= net.gst) {
      CHECK(hi - lo < net.delta);
    } else if (hi > lo) {
      skewed_before_gst = true;
    }
  }
  CHECK(skewed_before_gst);
}

TEST_CASE("honest run message counts are exact") {
  const auto cfg = ProtocolConfig::make(100, 0, 2, 1.7, 9);
  RunMetrics m;
  traced(cfg, NetConfig::with_defaults(10), AdversarySpec{}, 3, &m);
  REQUIRE(m.outcome == RunOutcome::kAllDecided);
  const auto& v1 = m.views.at(View{1});
  CHECK(v1.sent_of(MessageKind::kPropose) == 99);
  CHECK(v1.sent_of(MessageKind::kPrepare) == 100 * 34);
  CHECK(v1.prepare_quorums == 100);
  CHECK(v1.sent_of(MessageKind::kCommit) == v1.prepare_quorums * 34);
  CHECK(v1.sent_of(MessageKind::kNewLeader) == 0);
  CHECK(m.views.size() == 1);
  CHECK(m.correct_votes == m.correct_votes_honest);
  CHECK(m.correct_votes == 200);
}

TEST_CASE("silent faults: counts reconcile with prepared replicas") {
  const auto cfg = ProtocolConfig::make(100, 20, 2, 1.7, 5);
  AdversarySpec adv;
  for (std::uint32_t i = 81; i <= 100; ++i) adv.faulty.push_back(ReplicaId{i});
  SimulationOptions opts;
  opts.max_views = 1;
  const auto m = run_simulation(cfg, NetConfig::with_defaults(10), adv, opts);
  const auto& v1 = m.views.at(View{1});
  CHECK(v1.sent_of(MessageKind::kPropose) == 99);
  CHECK(v1.sent_of(MessageKind::kPrepare) == 80 * 34);
  CHECK(v1.sent_of(MessageKind::kCommit) == v1.prepare_quorums * 34);
  std::uint64_t in = 0;
  for (auto c : v1.prepare_in) in += c;
  CHECK(in == v1.sent_of(MessageKind::kPrepare));
}

TEST_CASE("runs are deterministic") {
  const auto cfg = ProtocolConfig::make(25, 5, 2, 1.7, 77);
  NetConfig net = NetConfig::with_defaults(10);
  net.gst = 150;
  net.policy = SchedulerPolicy::kUniformRandom;
  RunMetrics a, b;
  const auto ta = traced(cfg, net, equivocating(5), 6, &a);
  const auto tb = traced(cfg, net, equivocating(5), 6, &b);
  CHECK(ta == tb);
  CHECK(a.total_sent() == b.total_sent());
  CHECK(a.end_time == b.end_time);
  CHECK(ta != traced(cfg.with_seed(78), net, equivocating(5), 6));
}

TEST_CASE("non-quiescence is an outcome, not an error") {
  const auto cfg = ProtocolConfig::make(4, 1, 1, 2, 1);
  AdversarySpec adv;
  adv.faulty = {ReplicaId{1}};
  SimulationOptions opts;
  opts.max_views = 1;
  const auto m = run_simulation(cfg, NetConfig::with_defaults(10), adv, opts);
  CHECK(m.outcome == RunOutcome::kNonQuiescent);
  CHECK(m.decided_count() == 0);
}

TEST_CASE("delays do not depend on the sender") {
  // Faulty senders (equivocating leader and partition-consistent replicas)
  // against correct ones, pre-GST uniform delays.
  NetConfig net = NetConfig::with_defaults(10);
  net.gst = 1'000'000;
  net.policy = SchedulerPolicy::kUniformRandom;
  std::vector<double> faulty, correct;
  for (std::uint64_t seed = 1; faulty.size() + correct.size() < 10000 || faulty.size() < 2000; ++seed) {
    const auto cfg = ProtocolConfig::make(25, 8, 2, 1.7, seed);
    const auto adv = equivocating(8);
    SimulationOptions opts;
    opts.max_views = 2;
    opts.on_schedule = [&](ReplicaId from, ReplicaId, Tick sent, Tick at) {
      (adv.is_faulty(from) ? faulty : correct).push_back(static_cast<double>(at - sent));
    };
    run_simulation(cfg, net, adv, opts);
    REQUIRE(seed < 200);
  }
  const double n = faulty.size(), m = correct.size();
  const double d = ks_statistic(faulty, correct);
  const double critical = 1.628 * std::sqrt((n + m) / (n * m));  // alpha = 0.01
  MESSAGE("KS D=" << d << " critical=" << critical << " faulty=" << n << " correct=" << m);
  CHECK(d < critical);
}

TEST_CASE("vote audits under an equivocating leader") {
  const auto cfg = ProtocolConfig::make(25, 5, 2, 1.7, 11);
  RunMetrics m;
  traced(cfg, NetConfig::with_defaults(10), equivocating(5), 4, &m);
  CHECK(m.correct_votes > 0);
  CHECK(m.correct_votes == m.correct_votes_honest);
  CHECK(m.adversary_votes > 0);
  CHECK(m.adversary_votes == m.adversary_votes_valid);
  CHECK(m.views.at(View{1}).blocks > 0);
}

TEST_CASE("golden traces for four replicas") {
  for (const char* name : {"honest", "silent_leader", "equivocating_leader"}) {
    CAPTURE(name);
    const std::string dir = PROBFT_GOLDEN_DIR;
    const auto sc = cli::load_scenario(dir + "/" + name + ".yaml");
    const auto trace = traced(sc.protocol(), sc.net, sc.adversary, sc.run.max_views);
    CHECK(trace == slurp(dir + "/" + name + ".trace.jsonl"));
  }
}
