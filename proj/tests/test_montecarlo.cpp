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

#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "probft/montecarlo.hpp"

using namespace probft;
using namespace probft::mc;

namespace {

bool same(const Estimate& a, const Estimate& b) {
  return a.p_hat == b.p_hat && a.lo == b.lo && a.hi == b.hi && a.trials == b.trials;
}

double sigma(double p, double t) { return std::sqrt(p * (1 - p) / t); }

}  // namespace

TEST_CASE("wilson interval") {
  const auto e = wilson(50, 100);
  CHECK(e.p_hat == doctest::Approx(0.5));
  CHECK(e.lo == doctest::Approx(0.4038).epsilon(1e-3));
  CHECK(e.hi == doctest::Approx(0.5962).epsilon(1e-3));
  const auto z = wilson(0, 1000);
  CHECK(z.p_hat == 0);
  CHECK(z.lo == 0);
  CHECK(z.rule_of_three == doctest::Approx(0.003));
  CHECK(z.lo <= z.p_hat);
  CHECK(z.p_hat <= z.hi);
}

TEST_CASE("prepare quorum marginal matches the exact binomial") {
  const auto cfg = ProtocolConfig::make(100, 20, 2, 1.7);
  const std::uint64_t trials = 20000;
  const auto r = estimate_prepare_quorum(cfg, trials, Control{});
  const double exact = oracle::binom_at_least(80, 0.34, 20);
  CHECK(std::abs(r.target.p_hat - exact) <= 4 * sigma(exact, trials));
  CHECK(r.target.lo <= r.target.p_hat);
  CHECK(r.target.p_hat <= r.target.hi);
  // Every correct target has the same marginal.
  double mean = 0;
  for (double p : r.per_target) mean += p;
  mean /= static_cast<double>(r.per_target.size());
  CHECK(r.per_target.size() == 80);
  CHECK(std::abs(r.per_replica.p_hat - mean) < 1e-12);
  CHECK(std::abs(mean - exact) <= 4 * r.per_replica.standard_error());
  CHECK(r.all_correct.p_hat < r.target.p_hat);
}

TEST_CASE("prepare quorum trivial cases") {
  // s = n: every sender reaches everyone.
  const auto full = ProtocolConfig::make(16, 1, 1, 4);
  REQUIRE(full.s() == 16);
  const auto a = estimate_prepare_quorum(full, 100, Control{});
  CHECK(a.target.p_hat == 1);
  CHECK(a.all_correct.p_hat == 1);
}

TEST_CASE("estimates are reproducible and independent of thread count") {
  const auto cfg = ProtocolConfig::make(50, 10, 2, 1.7);
  Control one;
  one.base_seed = 42;
  Control four = one;
  four.parallelism = 4;
  const std::uint64_t trials = 5000;  // several chunks
  const auto a = estimate_termination(cfg, trials, Mode::kOrderFree, one);
  const auto b = estimate_termination(cfg, trials, Mode::kOrderFree, four);
  const auto c = estimate_termination(cfg, trials, Mode::kOrderFree, one);
  CHECK(same(a.per_replica, b.per_replica));
  CHECK(same(a.all_replicas, b.all_replicas));
  CHECK(same(a.per_replica, c.per_replica));

  const auto p1 = estimate_prepare_quorum(cfg, trials, one);
  const auto p4 = estimate_prepare_quorum(cfg, trials, four);
  CHECK(p1.covariance == p4.covariance);
  CHECK(p1.per_target == p4.per_target);

  const auto g1 = estimate_agreement_violation(cfg, trials, Mode::kOrderFree, one);
  const auto g4 = estimate_agreement_violation(cfg, trials, Mode::kOrderFree, four);
  CHECK(same(g1.violation, g4.violation));

  Control other = one;
  other.base_seed = 43;
  CHECK_FALSE(same(estimate_termination(cfg, trials, Mode::kOrderFree, other).per_replica, a.per_replica));
}

TEST_CASE("termination exceeds the per-replica lower bound") {
  const auto cfg = ProtocolConfig::make(100, 20, 2, 1.7);
  const auto r = estimate_termination(cfg, 5000, Mode::kOrderFree, Control{});
  CHECK(r.per_replica.lo >= 0.6142);
  const double exact = oracle::binom_at_least(80, 0.34, 20);
  CHECK(std::abs(r.prepare_target.p_hat - exact) <= 4 * sigma(exact, 5000));
}

TEST_CASE("event-ordered termination agrees with the order-free model") {
  // Silent faults and a correct leader: delivery order cannot matter.
  const auto cfg = ProtocolConfig::make(25, 5, 2, 1.7);
  const std::uint64_t trials = 200;
  const auto eo = estimate_termination(cfg, trials, Mode::kEventOrdered, Control{});
  const auto of = estimate_termination(cfg, 20000, Mode::kOrderFree, Control{});
  const double se = std::sqrt(eo.per_replica.standard_error() * eo.per_replica.standard_error() +
                              of.per_replica.standard_error() * of.per_replica.standard_error());
  CHECK(std::abs(eo.per_replica.p_hat - of.per_replica.p_hat) <= 4 * se);
}

TEST_CASE("optimal split shape") {
  std::vector<ReplicaId> faulty;
  for (std::uint32_t i = 1; i <= 20; ++i) faulty.push_back(ReplicaId{i});
  const auto cfg = ProtocolConfig::make(100, 20, 2, 1.7);
  const auto plan = optimal_split(cfg, faulty);
  REQUIRE(plan.sets.size() == 2);
  CHECK(plan.sets[0].size() == 60);  // 40 correct + 20 faulty
  CHECK(plan.sets[1].size() == 60);
  const auto merged = merge_sets(plan, 0, 1);
  REQUIRE(merged.sets.size() == 1);
  CHECK(merged.sets[0].size() == 100);
}

TEST_CASE("agreement violation order-free sanity") {
  // f = 0: halves of 50 with expected in-degree 16 < q = 20.
  const auto cfg = ProtocolConfig::make(100, 0, 2, 1.6);
  const auto r = estimate_agreement_violation(cfg, 20000, Mode::kOrderFree, Control{});
  const double per_quorum = oracle::binom_at_least(50, 0.32, 20);
  CHECK(per_quorum == doctest::Approx(0.134).epsilon(0.01));
  // Too few committers per half for any commit quorum.
  CHECK(r.violation.p_hat == 0);

  // One correct replica per set cannot gather q votes for its own value.
  const auto small = ProtocolConfig::make(30, 0, 1, 2);
  SplitPlan singles;
  for (std::uint32_t i = 1; i <= 30; ++i) singles.sets.push_back({ReplicaId{i}});
  CHECK(estimate_agreement_violation(small, singles, 2000, Control{}).violation.p_hat == 0);
}

TEST_CASE("event-ordered violation is at most the order-free rate") {
  const auto cfg = ProtocolConfig::make(25, 5, 2, 1.7);
  const auto eo = estimate_agreement_violation(cfg, 60, Mode::kEventOrdered, Control{});
  const auto of = estimate_agreement_violation(cfg, 20000, Mode::kOrderFree, Control{});
  CHECK(eo.violation.lo <= of.violation.hi);
}

TEST_CASE("merge comparison") {
  const auto cfg = ProtocolConfig::make(30, 6, 2, 1.7);
  std::vector<ReplicaId> faulty;
  for (std::uint32_t i = 1; i <= 6; ++i) faulty.push_back(ReplicaId{i});
  SplitPlan three;
  three.sets.resize(3);
  for (std::uint32_t i = 7; i <= 30; ++i) three.sets[(i - 7) % 3].push_back(ReplicaId{i});
  for (auto& s : three.sets) s.insert(s.end(), faulty.begin(), faulty.end());

  const auto r = compare_merge_strategies(cfg, three, 0, 1, 20000, Control{});
  CHECK(r.mean_diff == doctest::Approx(r.merged.p_hat - r.split.p_hat));
  CHECK(r.mean_diff >= 0);

  // Merging with an empty set changes nothing.
  SplitPlan with_empty = three;
  with_empty.sets.push_back({});
  const auto same_plan = compare_merge_strategies(cfg, with_empty, 2, 3, 5000, Control{});
  CHECK(same_plan.discordant == 0);
  CHECK(same_plan.mean_diff == 0);
}

TEST_CASE("view change with no faults") {
  const auto cfg = ProtocolConfig::make(10, 0, 1, 2);
  const auto r = estimate_view_change_violation(cfg, 10, true, Control{});
  CHECK(r.decided_trials == 10);
  CHECK(r.violation.p_hat == 0);
}

TEST_CASE("mode names") {
  CHECK(parse_mode("order_free") == Mode::kOrderFree);
  CHECK(parse_mode("event_ordered") == Mode::kEventOrdered);
  CHECK_FALSE(parse_mode("fast").has_value());
  CHECK(to_string(Mode::kEventOrdered) == "event_ordered");
}
