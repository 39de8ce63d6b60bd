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
#include <limits>

#include "probft/analysis.hpp"
#include "probft/config.hpp"

namespace probft::analysis {
namespace {

double clamp01(double x) { return x < 0 ? 0 : (x > 1 ? 1 : x); }

double sample_size(double n, double o, double q) {
  return std::min<double>(n, static_cast<double>(tolerant_ceil(o * q)));
}

}  // namespace

BoundResult BoundResult::make(double raw) {
  BoundResult b;
  b.raw = raw;
  b.value = clamp01(raw);
  if (raw < 0 || raw > 1) b.reason = "vacuous";
  return b;
}

BoundResult BoundResult::inapplicable(double raw, std::string why) {
  BoundResult b;
  b.raw = raw;
  b.value = clamp01(raw);
  b.applicable = false;
  b.reason = std::move(why);
  return b;
}

double expected_in_degree(double r, double s, double n) { return r * s / n; }

BoundResult quorum_prob_lower_bound(double n, double f, double o, double q) {
  const double c = o * (n - f) / n;
  const double raw = 1 - std::exp(-q * (c - 1) * (c - 1) / (2 * c));
  if (!(c > 1)) return BoundResult::inapplicable(raw, "c = o(n-f)/n <= 1");
  return BoundResult::make(raw);
}

BoundResult epsilon_quorum_bound(double n, double f, double o, double l) {
  const double c = o * (n - f) / n;
  const double lo = 2 - std::sqrt(3.0);
  const double hi = 2 + std::sqrt(3.0);
  const bool in_range = c >= lo && c <= hi && c != 1;
  const bool solves = in_range && std::abs(l - 2 * c / ((c - 1) * (c - 1))) <= 1e-9;
  if (!solves) {
    auto generic = quorum_prob_lower_bound(n, f, o, static_cast<double>(tolerant_ceil(l * std::sqrt(n))));
    generic.applicable = false;
    generic.reason = in_range ? "l != 2c/(c-1)^2; generic quorum bound reported"
                              : "c outside [2-sqrt3, 2+sqrt3]; generic quorum bound reported";
    return generic;
  }
  return BoundResult::make(1 - std::exp(-std::sqrt(n)));
}

BoundResult commit_quorum_lower_bound(double n, double f, double o, double q) {
  const double s = sample_size(n, o, q);
  const double alpha = (s / n) * (n - f) * (1 - std::exp(-std::sqrt(n)));
  if (alpha < q) return BoundResult::inapplicable(0, "alpha < q");
  auto b = BoundResult::make(1 - std::exp(-(alpha - q) * (alpha - q) / (2 * alpha)));
  if (alpha == q) b.reason = "vacuous";
  return b;
}

BoundResult per_replica_termination_bound(double n, double f, double o, double q) {
  const auto commit = commit_quorum_lower_bound(n, f, o, q);
  const double raw = commit.raw - std::exp(-std::sqrt(n));
  if (!commit.applicable) return BoundResult::inapplicable(std::min(raw, 0.0), commit.reason);
  return BoundResult::make(raw);
}

BoundResult all_replicas_termination_bound(double n, double f, double o, double q) {
  const double s = sample_size(n, o, q);
  const double alpha = (s / n) * (n - f) * (1 - std::exp(-std::sqrt(n)));
  const double miss = std::exp(-(alpha - q) * (alpha - q) / (2 * alpha));
  const double raw = 1 - (n - f) * (miss + std::exp(-std::sqrt(n)));
  if (alpha < q) return BoundResult::inapplicable(std::min(raw, 0.0), "alpha < q");
  return BoundResult::make(raw);
}

BoundResult asymptotic_termination_bound(double n, double f) {
  auto b = BoundResult::make(1 - 2 * (n - f) * std::exp(-std::sqrt(n)));
  b.asymptotic = true;
  if (b.reason.empty()) b.reason = "asymptotic only";
  return b;
}

double termination_after_k_views(double p, double k) { return 1 - std::pow(1 - p, k); }

BoundResult decide_prob_upper_bound(double n, double o, double q, double r) {
  if (!(r > 0)) return BoundResult::make(0);
  const double delta = n / (o * r) - 1;
  if (!(delta > 0)) return BoundResult::inapplicable(1, "r > n/o");
  if (delta > 1e6) {
    auto b = BoundResult::make(0);
    b.reason = "delta > 1e6, sender set cannot reach q";
    return b;
  }
  return BoundResult::make(std::exp(-delta * delta * o * q * r / (n * (delta + 2))));
}

BoundResult agreement_violation_in_view_bound(double n, double f, double o, double q) {
  const auto p1 = decide_prob_upper_bound(n, o, q, (n + f) / 2);
  const double raw = std::pow(p1.raw, 4);
  if (!p1.applicable) return BoundResult::inapplicable(raw, p1.reason);
  return BoundResult::make(raw);
}

BoundResult agreement_violation_squared_bound(double n, double f, double o, double q) {
  const auto p1 = decide_prob_upper_bound(n, o, q, (n + f) / 2);
  const double raw = p1.raw * p1.raw;
  if (!p1.applicable) return BoundResult::inapplicable(raw, p1.reason);
  return BoundResult::make(raw);
}

BoundResult view_change_violation_bound(double n, double f, double o, double q) {
  const double delta = 2 * n / (o * (n + f)) - 1;
  if (!(delta > 0)) return BoundResult::inapplicable(3, "o >= 2n/(n+f)");
  return BoundResult::make(3 * std::exp(-q * delta * delta / ((delta + 1) * (delta + 2))));
}

BoundResult safety_bound(double n, double f, double o, double q, double views) {
  const auto agree = agreement_violation_in_view_bound(n, f, o, q);
  const auto change = view_change_violation_bound(n, f, o, q);
  const double raw = 1 - views * (agree.raw + change.raw);
  if (!agree.applicable || !change.applicable) {
    return BoundResult::inapplicable(raw, !agree.applicable ? "agreement term: " + agree.reason
                                                            : "view-change term: " + change.reason);
  }
  return BoundResult::make(raw);
}

double chernoff_lower(double mu, double delta) { return std::exp(-delta * delta * mu / 2); }

double chernoff_upper(double mu, double delta) { return std::exp(-delta * delta * mu / (2 + delta)); }

double hypergeometric_tail(double, double, double r, double t) { return std::exp(-2 * r * t * t); }

// ---------------------------------------------------------------------------

namespace {

double log_choose(double n, double k) {
  return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1);
}

}  // namespace

double binomial_pmf(std::uint32_t n, double p, std::uint32_t k) {
  if (k > n) return 0;
  if (p <= 0) return k == 0 ? 1 : 0;
  if (p >= 1) return k == n ? 1 : 0;
  return std::exp(log_choose(n, k) + k * std::log(p) + (n - k) * std::log1p(-p));
}

double binomial_sf(std::uint32_t n, double p, std::uint32_t k) {
  if (k == 0) return 1;
  if (k > n) return 0;
  double sum = 0;
  for (std::uint32_t i = k; i <= n; ++i) sum += binomial_pmf(n, p, i);
  return std::min(1.0, sum);
}

double binomial_cdf(std::uint32_t n, double p, std::uint32_t k) {
  if (k >= n) return 1;
  double sum = 0;
  for (std::uint32_t i = 0; i <= k; ++i) sum += binomial_pmf(n, p, i);
  return std::min(1.0, sum);
}

double hypergeometric_cdf(std::uint32_t N, std::uint32_t M, std::uint32_t r, std::uint32_t k) {
  const std::uint32_t lo = r > N - M ? r - (N - M) : 0;
  const std::uint32_t hi = std::min({k, r, M});
  if (k < lo) return 0;
  const double denom = log_choose(N, r);
  double sum = 0;
  for (std::uint32_t i = lo; i <= hi; ++i) {
    sum += std::exp(log_choose(M, i) + log_choose(N - M, r - i) - denom);
  }
  return std::min(1.0, sum);
}

}  // namespace probft::analysis
