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

#include "probft/montecarlo.hpp"

namespace probft::mc {

double Estimate::standard_error() const {
  return trials > 0 ? std::sqrt(p_hat * (1 - p_hat) / trials) : 0;
}

Estimate wilson(double successes, double trials, double z) {
  Estimate e;
  e.trials = trials;
  e.successes = successes;
  if (trials <= 0) return e;
  const double p = successes / trials;
  const double z2 = z * z;
  const double denom = 1 + z2 / trials;
  const double centre = (p + z2 / (2 * trials)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom;
  e.p_hat = p;
  e.lo = std::max(0.0, std::min(p, centre - half));
  e.hi = std::min(1.0, std::max(p, centre + half));
  e.rule_of_three = 3 / trials;
  return e;
}

Estimate pooled(double sum, double sum_sq, std::uint64_t trials, double units) {
  if (trials == 0) return {};
  const double t = static_cast<double>(trials);
  const double p = sum / t;
  const double var = std::max(0.0, sum_sq / t - p * p) * t / std::max(1.0, t - 1);
  double n_eff = t * units;
  if (var > 0 && p > 0 && p < 1) n_eff = p * (1 - p) / (var / t);
  Estimate e = wilson(p * n_eff, n_eff);
  e.p_hat = p;
  return e;
}

std::string_view to_string(Mode m) { return m == Mode::kOrderFree ? "order_free" : "event_ordered"; }

std::optional<Mode> parse_mode(std::string_view s) {
  if (s == "order_free") return Mode::kOrderFree;
  if (s == "event_ordered") return Mode::kEventOrdered;
  return std::nullopt;
}

bool MergeComparison::merged_not_lower() const { return mean_diff - 1.6448536269514722 * diff_se >= 0; }

}  // namespace probft::mc
