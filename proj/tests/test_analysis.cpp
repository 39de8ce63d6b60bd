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
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "probft/analysis.hpp"
#include "probft/config.hpp"

using namespace probft;
using namespace probft::analysis;
using doctest::Approx;

TEST_CASE("expected in-degree") {
  CHECK(expected_in_degree(10, 5, 50) == Approx(1.0));
  CHECK(expected_in_degree(0, 5, 50) == 0);
  CHECK(expected_in_degree(80, 34, 100) == Approx(27.2));
}

TEST_CASE("quorum probability lower bound") {
  const auto b = quorum_prob_lower_bound(100, 20, 1.7, 20);
  CHECK(b.applicable);
  CHECK(b.raw == Approx(0.6144).epsilon(1e-4));
  CHECK(b.raw <= oracle::binom_at_least(80, 0.34, 20));
  CHECK_FALSE(quorum_prob_lower_bound(100, 50, 1.7, 20).applicable);
  double prev = 0;
  for (double q = 5; q < 400; q += 5) {
    const double r = quorum_prob_lower_bound(100, 20, 1.7, q).raw;
    CHECK(r > prev);
    prev = r;
  }
}

TEST_CASE("epsilon quorum bound") {
  // c solves 2 = 2c / (c - 1)^2, i.e. c = (3 + sqrt 5) / 2.
  const double c = (3 + std::sqrt(5.0)) / 2;
  const double o = c * 100 / 80;
  const auto b = epsilon_quorum_bound(100, 20, o, 2);
  CHECK(b.applicable);
  CHECK(b.raw == Approx(0.9999546).epsilon(1e-7));
  CHECK_FALSE(epsilon_quorum_bound(100, 20, 1.7, 2).applicable);
  CHECK_FALSE(epsilon_quorum_bound(100, 20, 5 * 100.0 / 80, 2).applicable);
}

TEST_CASE("commit and termination bounds") {
  const auto c = commit_quorum_lower_bound(100, 20, 1.7, 20);
  CHECK(c.applicable);
  CHECK(c.raw == Approx(0.6143).epsilon(1e-4));
  // alpha = 68/400 * 320 * (1 - e^-20) = 54.4
  CHECK(commit_quorum_lower_bound(400, 80, 1.7, 40).raw == Approx(0.8513).epsilon(1e-4));
  CHECK(per_replica_termination_bound(100, 20, 1.7, 20).raw == Approx(0.6142).epsilon(1e-4));

  const auto all400 = all_replicas_termination_bound(400, 80, 1.7, 40);
  CHECK(all400.value == 0);
  CHECK(all400.reason == "vacuous");
  // alpha = 0.034 * 8000 * (1 - e^-100) = 272, margin 72 over q
  CHECK(all_replicas_termination_bound(10000, 2000, 1.7, 200).value ==
        Approx(1 - 8000 * (std::exp(-72.0 * 72.0 / 544.0) + std::exp(-100.0))));

  const auto a = asymptotic_termination_bound(100, 20);
  CHECK(a.asymptotic);
  CHECK(a.raw == Approx(0.99274).epsilon(1e-5));
  CHECK(asymptotic_termination_bound(400, 80).raw > asymptotic_termination_bound(100, 20).raw);

  CHECK(termination_after_k_views(0.5, 1) == Approx(0.5));
  CHECK(termination_after_k_views(0.99274, 3) == Approx(0.9999996).epsilon(1e-7));
  CHECK(termination_after_k_views(0.1, 500) == Approx(1.0));
}

TEST_CASE("commit bound below quorum size") {
  // s/n * (n - f) < q: no bound at all.
  const auto b = commit_quorum_lower_bound(25, 7, 1.1, 10);
  CHECK_FALSE(b.applicable);
  CHECK(b.value == 0);
  CHECK_FALSE(per_replica_termination_bound(25, 7, 1.1, 10).applicable);
}

TEST_CASE("decide probability upper bound") {
  const auto b = decide_prob_upper_bound(100, 1.7, 20, 50);
  CHECK(b.applicable);
  CHECK(b.raw == Approx(0.7841).epsilon(1e-4));
  CHECK(b.raw >= oracle::binom_at_least(50, 0.34, 20));
  CHECK_FALSE(decide_prob_upper_bound(100, 1.7, 20, 60).applicable);
  CHECK(decide_prob_upper_bound(100, 1.7, 20, 1e-9).value == 0);
  double prev = 0;
  for (double r = 1; r <= 58; ++r) {
    const double v = decide_prob_upper_bound(100, 1.7, 20, r).raw;
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("agreement and view-change bounds") {
  const auto ag = agreement_violation_in_view_bound(100, 20, 1.6, 20);
  CHECK(ag.applicable);
  CHECK(std::pow(ag.raw, 0.25) == Approx(0.98381).epsilon(1e-5));
  CHECK(ag.raw == Approx(0.9367).epsilon(1e-4));
  CHECK(agreement_violation_squared_bound(100, 20, 1.6, 20).raw == Approx(0.98381 * 0.98381).epsilon(1e-4));
  CHECK_FALSE(agreement_violation_in_view_bound(100, 20, 1.7, 20).applicable);

  const auto vc = view_change_violation_bound(100, 20, 1.6, 20);
  CHECK(vc.applicable);
  CHECK(vc.raw == Approx(2.95).epsilon(0.01));
  CHECK(vc.value == 1);
  CHECK(vc.reason == "vacuous");
  CHECK_FALSE(view_change_violation_bound(100, 20, 1.7, 20).applicable);
  CHECK(view_change_violation_bound(10000, 2000, 1.5, 200).raw == Approx(1.047).epsilon(1e-3));

  const auto s = safety_bound(100, 20, 1.7, 20, 1);
  CHECK_FALSE(s.applicable);
  CHECK(s.value == 0);
  const auto s1 = safety_bound(10000, 1000, 1.5, 200, 1);
  CHECK(s1.applicable);
  CHECK(s1.raw == Approx(1 - agreement_violation_in_view_bound(10000, 1000, 1.5, 200).raw -
                         view_change_violation_bound(10000, 1000, 1.5, 200).raw));
}

TEST_CASE("tail inequalities") {
  CHECK(chernoff_lower(10, 0.5) == Approx(0.2865).epsilon(1e-4));
  CHECK(chernoff_upper(10, 0) == 1);
  CHECK(hypergeometric_tail(100, 50, 10, 0.1) == Approx(0.8187).epsilon(1e-4));
  CHECK(hypergeometric_tail(100, 50, 10, 1e-9) == Approx(1.0));
}

TEST_CASE("exact distributions agree with boost") {
  for (std::uint32_t n : {1u, 5u, 50u, 80u, 400u}) {
    for (double p : {0.01, 0.17, 0.34, 0.5, 0.9}) {
      for (std::uint32_t k = 0; k <= n; k += std::max(1u, n / 17)) {
        CHECK(binomial_sf(n, p, k) == Approx(oracle::binom_at_least(n, p, k)).epsilon(1e-9));
        CHECK(binomial_cdf(n, p, k) == Approx(oracle::binom_at_most(n, p, k)).epsilon(1e-9));
      }
    }
  }
  for (std::uint32_t N : {20u, 100u}) {
    for (std::uint32_t M : {3u, N / 2}) {
      for (std::uint32_t r : {1u, 7u, N / 2}) {
        for (std::uint32_t k = 0; k <= std::min(M, r); ++k) {
          CHECK(hypergeometric_cdf(N, M, r, k) == Approx(oracle::hyper_at_most(N, M, r, k)).epsilon(1e-9));
        }
      }
    }
  }
}

TEST_CASE("bounds are sound on the standard grid") {
  std::size_t checked = 0;
  const auto bad = oracle::check_bounds(Grid{}, checked);
  CHECK(checked > 1000);
  for (const auto& v : bad) MESSAGE(v.what << " bound=" << v.bound << " exact=" << v.exact);
  CHECK(bad.empty());
}

TEST_CASE("binomial tail is monotone in the sender count") {
  std::size_t checked = 0;
  CHECK(oracle::count_monotonicity_breaks(Grid{}, checked) == 0);
  CHECK(checked > 1000);
}

TEST_CASE("message counts") {
  CHECK(message_counts(Protocol::kPbft, 4, 0, 2, 1.7).total() == 27);
  CHECK(message_counts(Protocol::kHotStuff, 4, 0, 2, 1.7).total() == 24);
  CHECK(message_counts(Protocol::kProbft, 100, 20, 2, 1.7).total() == 6899);
  double prev = 1e9;
  for (std::uint32_t n = 100; n <= 1000; n += 50) {
    const double ratio = static_cast<double>(message_counts(Protocol::kProbft, n, 0, 2, 1.7).total()) /
                         message_counts(Protocol::kPbft, n, 0, 2, 1.7).total();
    CHECK(ratio < prev);
    prev = ratio;
  }
}

TEST_CASE("bounds csv") {
  std::ostringstream out;
  Grid g;
  g.n = {100};
  g.f_ratio = {0.2};
  g.o = {1.7};
  write_bounds_csv(out, g);
  const auto text = out.str();
  CHECK(text.rfind(std::string(kBoundsCsvVersion) + "\nn,f,o,l,q,s,bound,value,raw,applicable,reason\n", 0) == 0);
  CHECK(text.find("100,20,1.7,2,20,34,quorum_prob_lower,0.614394779,") != std::string::npos);
  for (const char* name : {"quorum_prob_lower", "epsilon_quorum", "commit_quorum_lower", "per_replica_termination",
                           "all_replicas_termination", "asymptotic_termination", "decide_prob_upper",
                           "agreement_violation_in_view", "agreement_violation_squared",
                           "view_change_violation", "safety_one_view"}) {
    CHECK(text.find(std::string(",") + name + ",") != std::string::npos);
  }
  g.f_ratio = {0.34};
  CHECK_THROWS_AS(write_bounds_csv(out, g), ConfigError);
}

TEST_CASE("message count csv") {
  std::ostringstream out;
  write_msgcount_csv(out, {4, 200}, 2, {1.7});
  CHECK(out.str() == std::string(kMsgCountCsvVersion) +
                         "\nn,pbft,hotstuff,probft_o1.7,ratio_o1.7\n4,27,24,35,1.296296\n"
                         "200,79799,1592,20199,0.253123\n");
}
