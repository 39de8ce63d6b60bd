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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

// Closed-form probability bounds for ProBFT and the exact binomial and
// hypergeometric tails they are checked against.
namespace probft::analysis {

struct BoundResult {
  double value = 0;  // clamp(raw, 0, 1)
  double raw = 0;
  bool applicable = true;
  bool asymptotic = false;
  std::string reason;  // why the bound is inapplicable or vacuous

  static BoundResult make(double raw);
  static BoundResult inapplicable(double raw, std::string why);
};

double expected_in_degree(double r, double s, double n);

/// Probability a correct replica gathers q messages from the n - f correct
/// senders; c = o(n - f)/n must exceed 1.
BoundResult quorum_prob_lower_bound(double n, double f, double o, double q);

/// 1 - exp(-sqrt(n)), valid only when l = 2c/(c-1)^2 for c = o(n - f)/n.
BoundResult epsilon_quorum_bound(double n, double f, double o, double l);

/// s is ceil(o q) clamped to n.
BoundResult commit_quorum_lower_bound(double n, double f, double o, double q);
BoundResult per_replica_termination_bound(double n, double f, double o, double q);
BoundResult all_replicas_termination_bound(double n, double f, double o, double q);
BoundResult asymptotic_termination_bound(double n, double f);
double termination_after_k_views(double p, double k);

/// Upper bound on r senders delivering q messages to one replica.
BoundResult decide_prob_upper_bound(double n, double o, double q, double r);

/// Fourth power of the decide bound at r = (n + f)/2.
BoundResult agreement_violation_in_view_bound(double n, double f, double o, double q);
/// Squared variant, reported alongside the fourth power.
BoundResult agreement_violation_squared_bound(double n, double f, double o, double q);

BoundResult view_change_violation_bound(double n, double f, double o, double q);
BoundResult safety_bound(double n, double f, double o, double q, double views);

double chernoff_lower(double mu, double delta);
double chernoff_upper(double mu, double delta);
/// Tail exp(-2 r t^2) for r draws from N items with M successes.
double hypergeometric_tail(double N, double M, double r, double t);

// Exact tails by direct summation in log space.
double binomial_pmf(std::uint32_t n, double p, std::uint32_t k);
double binomial_sf(std::uint32_t n, double p, std::uint32_t k);   // P(X >= k)
double binomial_cdf(std::uint32_t n, double p, std::uint32_t k);  // P(X <= k)
/// P(X <= k) for X the successes in r draws without replacement from N
/// items of which M are successes.
double hypergeometric_cdf(std::uint32_t N, std::uint32_t M, std::uint32_t r, std::uint32_t k);

enum class Protocol { kPbft, kProbft, kHotStuff };
std::string_view to_string(Protocol p);

struct MessageCount {
  std::uint64_t leader = 0;  // leader-originated messages
  std::uint64_t votes = 0;   // replica-originated messages
  std::uint64_t total() const { return leader + votes; }
};

/// Normal-case count models: PBFT (n-1) + 2n(n-1); ProBFT (n-1) + 2ns;
/// HotStuff 4 phases of 2(n-1).
MessageCount message_counts(Protocol p, std::uint32_t n, std::uint32_t f, double l, double o);

struct Grid {
  std::vector<std::uint32_t> n{25, 50, 100, 200, 400};
  std::vector<double> f_ratio{0.0, 0.1, 0.2, 0.3};
  std::vector<double> o{1.6, 1.7, 1.8};
  std::vector<double> l{2.0};

  /// floor(ratio * n); throws ConfigError when that violates f < n/3.
  static std::uint32_t faults(std::uint32_t n, double ratio);
};

inline constexpr const char* kBoundsCsvVersion = "# probft-bounds v1";
inline constexpr const char* kMsgCountCsvVersion = "# probft-msgcount v1";

/// One row per (n, f, o, l, bound).
void write_bounds_csv(std::ostream& out, const Grid& grid);

/// One row per n with PBFT, ProBFT for each o, HotStuff and the ratios.
void write_msgcount_csv(std::ostream& out, const std::vector<std::uint32_t>& ns, double l,
                        const std::vector<double>& os);

}  // namespace probft::analysis
