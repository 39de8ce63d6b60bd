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
#include <optional>
#include <string>
#include <vector>

#include "probft/adversary.hpp"
#include "probft/config.hpp"
#include "probft/simnet.hpp"

namespace probft::mc {

/// Binomial proportion with a 95% Wilson interval. For pooled per-replica
/// rates `trials` is the design-effect-corrected sample size.
struct Estimate {
  double p_hat = 0;
  double lo = 0;
  double hi = 1;
  double trials = 0;
  double successes = 0;
  /// 3 / trials; the one-sided 95% upper limit when nothing was observed.
  double rule_of_three = 0;

  double standard_error() const;
};

Estimate wilson(double successes, double trials, double z = 1.959963984540054);

/// Mean of per-trial fractions, each over `units` items, with the interval
/// computed from the observed between-trial variance (clustered sampling).
Estimate pooled(double sum, double sum_sq, std::uint64_t trials, double units);

enum class Mode { kOrderFree, kEventOrdered };
std::string_view to_string(Mode m);
std::optional<Mode> parse_mode(std::string_view s);

struct Control {
  std::uint64_t base_seed = 1;
  std::uint32_t parallelism = 1;
  NetConfig net = NetConfig::with_defaults(10);  // EventOrdered only
};

struct PrepareQuorumResult {
  Estimate target;        // designated correct replica reaches q
  Estimate all_correct;   // every correct replica does
  Estimate per_replica;   // pooled over correct replicas
  double covariance = 0;  // mean pairwise covariance of the indicators
  double covariance_se = 0;
  double pair_covariance = 0;  // replicas of index 0 and 1 among the correct ones
  double pair_covariance_se = 0;
  std::vector<double> per_target;  // reach frequency of each correct replica
};

/// Silent faults: the n - f correct replicas each send to a uniform s-subset.
PrepareQuorumResult estimate_prepare_quorum(const ProtocolConfig& cfg, std::uint64_t trials,
                                            const Control& ctl);

struct TerminationResult {
  Estimate per_replica;
  Estimate all_replicas;
  Estimate prepare_target;  // first-stage marginal of the designated replica
  std::uint64_t non_quiescent = 0;
};

/// Correct leader, silent faulty replicas, one view.
TerminationResult estimate_termination(const ProtocolConfig& cfg, std::uint64_t trials, Mode mode,
                                       const Control& ctl);

/// Leader split for the order-free model: sets[k] lists the replicas sent proposal k. A
/// correct replica in several sets votes for its lowest index and, holding
/// two leader-signed proposals, never decides.
struct SplitPlan {
  std::vector<std::vector<ReplicaId>> sets;
};

/// EquivOptimal split of the correct replicas given the faulty set.
SplitPlan optimal_split(const ProtocolConfig& cfg, const std::vector<ReplicaId>& faulty);
/// Merge sets a and b (a < b) into one.
SplitPlan merge_sets(const SplitPlan& plan, std::size_t a, std::size_t b);

struct AgreementResult {
  Estimate violation;
  std::uint64_t non_quiescent = 0;
};

/// Equivocating leader with partition-consistent faulty replicas. The faulty
/// set is {1..f}, so replica 1 leads view 1.
AgreementResult estimate_agreement_violation(const ProtocolConfig& cfg, std::uint64_t trials,
                                             Mode mode, const Control& ctl);

/// Same, order-free, for an arbitrary split.
AgreementResult estimate_agreement_violation(const ProtocolConfig& cfg, const SplitPlan& plan,
                                             std::uint64_t trials, const Control& ctl);

struct MergeComparison {
  Estimate split;   // m + 1 sets
  Estimate merged;  // m sets
  double mean_diff = 0;  // merged - split, paired
  double diff_se = 0;
  std::uint64_t discordant = 0;
  /// One-sided test at 95%: merged >= split.
  bool merged_not_lower() const;
};

/// Paired order-free comparison: both plans see the same samples per trial.
MergeComparison compare_merge_strategies(const ProtocolConfig& cfg, const SplitPlan& split,
                                         std::size_t merge_a, std::size_t merge_b,
                                         std::uint64_t trials, const Control& ctl);

struct ViewChangeResult {
  Estimate violation;  // conditional on a view-1 decision
  std::uint64_t decided_trials = 0;
  std::uint64_t undecided_trials = 0;
};

/// Two-view simulations with an equivocating leader in view 1; the view-2
/// leader is Byzantine when `faulty_next_leader`, correct otherwise.
ViewChangeResult estimate_view_change_violation(const ProtocolConfig& cfg, std::uint64_t trials,
                                                bool faulty_next_leader, const Control& ctl);

}  // namespace probft::mc
