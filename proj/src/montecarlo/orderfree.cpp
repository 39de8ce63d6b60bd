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

// Order-free estimators: every message is delivered and only sample
// membership matters, matching the analysis, which multiplies quorum
// formation events and ignores delivery order and blocking.

#include <algorithm>
#include <cmath>
#include <set>

#include "probft/kernels.hpp"
#include "probft/montecarlo.hpp"
#include "probft/random.hpp"
#include "internal.hpp"
#include "runner.hpp"

namespace probft::mc {
namespace {

constexpr std::uint32_t kSaltPrepare = 0x51;
constexpr std::uint32_t kSaltTermination = 0x52;
constexpr std::uint32_t kSaltAgreement = 0x53;
constexpr std::uint32_t kSaltMerge = 0x54;

struct Scratch {
  explicit Scratch(std::uint32_t n) : sampler(n), counts(n), commits(n), flags(n), cflags(n) {}
  SampleScratch sampler;
  std::vector<std::uint32_t> idx;
  std::vector<std::uint16_t> counts;
  std::vector<std::uint16_t> commits;
  std::vector<std::uint8_t> flags;
  std::vector<std::uint8_t> cflags;
};

// ---------------------------------------------------------------------------

struct PrepareAcc {
  std::uint64_t trials = 0, target = 0, all = 0, a0 = 0, a1 = 0, a01 = 0;
  double k_sum = 0, k_sq = 0, kk_sum = 0, kk_sq = 0, kk_k = 0;
  std::vector<std::uint32_t> per_target;

  void merge(const PrepareAcc& o) {
    trials += o.trials;
    target += o.target;
    all += o.all;
    a0 += o.a0;
    a1 += o.a1;
    a01 += o.a01;
    k_sum += o.k_sum;
    k_sq += o.k_sq;
    kk_sum += o.kk_sum;
    kk_sq += o.kk_sq;
    kk_k += o.kk_k;
    if (per_target.size() < o.per_target.size()) per_target.resize(o.per_target.size(), 0);
    for (std::size_t i = 0; i < o.per_target.size(); ++i) per_target[i] += o.per_target[i];
  }
};

}  // namespace

PrepareQuorumResult estimate_prepare_quorum(const ProtocolConfig& cfg, std::uint64_t trials,
                                            const Control& ctl) {
  const std::uint32_t n = cfg.n(), s = cfg.s(), m = cfg.n() - cfg.f();
  const auto q = static_cast<std::uint16_t>(cfg.q());
  const auto& kt = kernels::active();

  auto acc = detail::run_trials<PrepareAcc>(trials, ctl.parallelism, [&] {
    return [&, sc = Scratch(n)](std::uint64_t i, PrepareAcc& a) mutable {
      if (a.per_target.empty()) a.per_target.assign(m, 0);
      auto rng = stream_engine(ctl.base_seed, i, kSaltPrepare);
      std::fill(sc.counts.begin(), sc.counts.end(), 0);
      for (std::uint32_t j = 0; j < m; ++j) {
        sc.sampler.draw(rng, n, s, sc.idx);
        for (auto t : sc.idx) ++sc.counts[t];
      }
      const std::size_t k = kt.mark_at_least(sc.counts.data(), m, q, sc.flags.data());
      kt.accumulate(sc.flags.data(), m, a.per_target.data());
      const double kd = static_cast<double>(k);
      const double kk = kd * (kd - 1);
      ++a.trials;
      a.target += sc.flags[0];
      a.all += k == m;
      if (m >= 2) {
        a.a0 += sc.flags[0];
        a.a1 += sc.flags[1];
        a.a01 += sc.flags[0] & sc.flags[1];
      }
      a.k_sum += kd;
      a.k_sq += kd * kd;
      a.kk_sum += kk;
      a.kk_sq += kk * kk;
      a.kk_k += kk * kd;
    };
  });

  PrepareQuorumResult r;
  const double t = static_cast<double>(acc.trials);
  r.target = wilson(static_cast<double>(acc.target), t);
  r.all_correct = wilson(static_cast<double>(acc.all), t);
  const double md = m;
  // Per-trial fraction K/m: sum and sum of squares.
  r.per_replica = pooled(acc.k_sum / md, acc.k_sq / (md * md), acc.trials, md);
  for (auto c : acc.per_target) r.per_target.push_back(static_cast<double>(c) / t);

  if (m >= 2 && t > 1) {
    // Exchangeable indicators: E[a_i a_j] = E[K(K-1)] / (m(m-1)).
    const double A = acc.kk_sum / t, B = acc.k_sum / t;
    r.covariance = A / (md * (md - 1)) - (B / md) * (B / md);
    const double vA = acc.kk_sq / t - A * A, vB = acc.k_sq / t - B * B, cAB = acc.kk_k / t - A * B;
    const double gA = 1 / (md * (md - 1)), gB = -2 * B / (md * md);
    r.covariance_se = std::sqrt(std::max(0.0, gA * gA * vA + gB * gB * vB + 2 * gA * gB * cAB) / t);

    const double p0 = acc.a0 / t, p1 = acc.a1 / t, p01 = acc.a01 / t;
    r.pair_covariance = p01 - p0 * p1;
    // Delta method on (mean a0a1, mean a0, mean a1), multinomial cell counts.
    const double g01 = 1, g0 = -p1, g1 = -p0;
    const double v01 = p01 * (1 - p01), v0 = p0 * (1 - p0), v1 = p1 * (1 - p1);
    const double c010 = p01 - p01 * p0, c011 = p01 - p01 * p1, c01 = p01 - p0 * p1;
    const double var = g01 * g01 * v01 + g0 * g0 * v0 + g1 * g1 * v1 + 2 * g01 * g0 * c010 +
                       2 * g01 * g1 * c011 + 2 * g0 * g1 * c01;
    r.pair_covariance_se = std::sqrt(std::max(0.0, var) / t);
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace {

struct TermAcc {
  std::uint64_t trials = 0, all = 0, target = 0;
  double frac = 0, frac_sq = 0;
  void merge(const TermAcc& o) {
    trials += o.trials;
    all += o.all;
    target += o.target;
    frac += o.frac;
    frac_sq += o.frac_sq;
  }
};

}  // namespace

TerminationResult detail::termination_order_free(const ProtocolConfig& cfg, std::uint64_t trials,
                                                 const Control& ctl) {
  const std::uint32_t n = cfg.n(), s = cfg.s(), m = cfg.n() - cfg.f();
  const auto q = static_cast<std::uint16_t>(cfg.q());
  const auto& kt = kernels::active();

  auto acc = detail::run_trials<TermAcc>(trials, ctl.parallelism, [&] {
    return [&, sc = Scratch(n)](std::uint64_t i, TermAcc& a) mutable {
      auto rng = stream_engine(ctl.base_seed, i, kSaltTermination);
      std::fill(sc.counts.begin(), sc.counts.end(), 0);
      std::fill(sc.commits.begin(), sc.commits.end(), 0);
      for (std::uint32_t j = 0; j < m; ++j) {
        sc.sampler.draw(rng, n, s, sc.idx);
        for (auto t : sc.idx) ++sc.counts[t];
      }
      kt.mark_at_least(sc.counts.data(), m, q, sc.flags.data());
      for (std::uint32_t j = 0; j < m; ++j) {
        if (!sc.flags[j]) continue;
        sc.sampler.draw(rng, n, s, sc.idx);
        for (auto t : sc.idx) ++sc.commits[t];
      }
      kt.mark_at_least(sc.commits.data(), m, q, sc.cflags.data());
      std::uint32_t decided = 0;
      for (std::uint32_t t = 0; t < m; ++t) decided += sc.flags[t] & sc.cflags[t];
      const double fr = static_cast<double>(decided) / m;
      ++a.trials;
      a.all += decided == m;
      a.target += sc.flags[0];
      a.frac += fr;
      a.frac_sq += fr * fr;
    };
  });

  TerminationResult r;
  const double t = static_cast<double>(acc.trials);
  r.per_replica = pooled(acc.frac, acc.frac_sq, acc.trials, m);
  r.all_replicas = wilson(static_cast<double>(acc.all), t);
  r.prepare_target = wilson(static_cast<double>(acc.target), t);
  return r;
}

// ---------------------------------------------------------------------------

namespace {

// Roles of every replica under a split plan.
struct Roles {
  std::vector<int> primary;  // lowest set index, -1 if none
  std::vector<std::uint8_t> faulty;
  std::vector<std::uint8_t> overlap;
  std::vector<std::uint32_t> prepare_senders;
  std::size_t values = 0;

  Roles(const ProtocolConfig& cfg, const std::vector<ReplicaId>& faulty_ids, const SplitPlan& plan)
      : primary(cfg.n(), -1), faulty(cfg.n(), 0), overlap(cfg.n(), 0), values(plan.sets.size()) {
    for (auto id : faulty_ids) faulty[id.value - 1] = 1;
    std::vector<int> memberships(cfg.n(), 0);
    for (std::size_t k = 0; k < plan.sets.size(); ++k) {
      std::set<ReplicaId> uniq(plan.sets[k].begin(), plan.sets[k].end());
      for (auto id : uniq) {
        const auto i = id.value - 1;
        if (primary[i] < 0) primary[i] = static_cast<int>(k);
        ++memberships[i];
      }
    }
    for (std::uint32_t i = 0; i < cfg.n(); ++i) {
      overlap[i] = !faulty[i] && memberships[i] > 1;
      if (faulty[i] || primary[i] >= 0) prepare_senders.push_back(i);
    }
  }
};

// Samples for one trial, drawn on first use (lazy) or all at once (eager,
// so that two plans can be evaluated on identical draws).
class TrialSamples {
 public:
  TrialSamples(std::uint32_t n, std::uint32_t s) : n_(n), s_(s), flat_(2ull * n * s), have_(2ull * n) {}

  void reset() { std::fill(have_.begin(), have_.end(), 0); }

  template <class Rng>
  void draw_all(Rng& rng, Scratch& sc) {
    for (std::uint32_t phase = 0; phase < 2; ++phase) {
      for (std::uint32_t j = 0; j < n_; ++j) get(rng, sc, j, phase);
    }
  }

  template <class Rng>
  std::span<const std::uint32_t> get(Rng& rng, Scratch& sc, std::uint32_t j, std::uint32_t phase) {
    const std::size_t slot = phase * n_ + j;
    std::uint32_t* dst = flat_.data() + slot * s_;
    if (!have_[slot]) {
      sc.sampler.draw(rng, n_, s_, sc.idx);
      std::copy(sc.idx.begin(), sc.idx.end(), dst);
      have_[slot] = 1;
    }
    return {dst, s_};
  }

 private:
  std::uint32_t n_, s_;
  std::vector<std::uint32_t> flat_;
  std::vector<std::uint8_t> have_;
};

// True iff two correct replicas decide different values.
template <class Rng>
bool violates(const Roles& roles, std::uint32_t n, std::uint16_t q, Rng& rng, Scratch& sc,
              TrialSamples& samples) {
  std::fill(sc.counts.begin(), sc.counts.end(), 0);
  std::fill(sc.commits.begin(), sc.commits.end(), 0);

  // Faulty senders hand each recipient the value of its partition, so they
  // count toward every target; correct senders only toward their own value.
  auto tally = [&](std::uint32_t j, std::uint32_t phase, std::vector<std::uint16_t>& into) {
    const auto smp = samples.get(rng, sc, j, phase);
    if (roles.faulty[j]) {
      for (auto t : smp) ++into[t];
    } else {
      const int k = roles.primary[j];
      for (auto t : smp) into[t] += roles.primary[t] == k;
    }
  };

  for (auto j : roles.prepare_senders) tally(j, 0, sc.counts);
  for (std::uint32_t j = 0; j < n; ++j) {
    const bool prepared = !roles.faulty[j] && roles.primary[j] >= 0 && sc.counts[j] >= q;
    sc.flags[j] = prepared;
    if (roles.faulty[j] || (prepared && !roles.overlap[j])) tally(j, 1, sc.commits);
  }

  int first = -1;
  for (std::uint32_t t = 0; t < n; ++t) {
    if (!sc.flags[t] || roles.overlap[t] || sc.commits[t] < q) continue;
    if (first < 0) {
      first = roles.primary[t];
    } else if (roles.primary[t] != first) {
      return true;
    }
  }
  return false;
}

struct CountAcc {
  std::uint64_t trials = 0, hits = 0;
  void merge(const CountAcc& o) {
    trials += o.trials;
    hits += o.hits;
  }
};

struct PairAcc {
  std::uint64_t trials = 0, split = 0, merged = 0, discordant = 0;
  double d_sum = 0, d_sq = 0;
  void merge(const PairAcc& o) {
    trials += o.trials;
    split += o.split;
    merged += o.merged;
    discordant += o.discordant;
    d_sum += o.d_sum;
    d_sq += o.d_sq;
  }
};

}  // namespace

std::vector<ReplicaId> detail::leading_faulty(std::uint32_t f) {
  std::vector<ReplicaId> out;
  for (std::uint32_t i = 1; i <= f; ++i) out.push_back(ReplicaId{i});
  return out;
}

SplitPlan optimal_split(const ProtocolConfig& cfg, const std::vector<ReplicaId>& faulty) {
  AdversarySpec spec;
  spec.faulty = faulty;
  spec.leader = LeaderStrategy::kEquivOptimal;
  const auto part = make_partition(spec, cfg, View{1});
  SplitPlan plan;
  plan.sets.resize(2);
  for (std::uint32_t i = 1; i <= cfg.n(); ++i) {
    for (auto k : part.assignment[i - 1]) plan.sets[k].push_back(ReplicaId{i});
  }
  return plan;
}

SplitPlan merge_sets(const SplitPlan& plan, std::size_t a, std::size_t b) {
  SplitPlan out;
  for (std::size_t k = 0; k < plan.sets.size(); ++k) {
    if (k == b) continue;
    auto set = plan.sets[k];
    if (k == a) {
      set.insert(set.end(), plan.sets[b].begin(), plan.sets[b].end());
      std::sort(set.begin(), set.end());
      set.erase(std::unique(set.begin(), set.end()), set.end());
    }
    out.sets.push_back(std::move(set));
  }
  return out;
}

AgreementResult estimate_agreement_violation(const ProtocolConfig& cfg, const SplitPlan& plan,
                                             std::uint64_t trials, const Control& ctl) {
  const std::uint32_t n = cfg.n(), s = cfg.s();
  const auto q = static_cast<std::uint16_t>(cfg.q());
  const Roles roles(cfg, detail::leading_faulty(cfg.f()), plan);

  auto acc = detail::run_trials<CountAcc>(trials, ctl.parallelism, [&] {
    return [&, sc = Scratch(n), samples = TrialSamples(n, s)](std::uint64_t i, CountAcc& a) mutable {
      auto rng = stream_engine(ctl.base_seed, i, kSaltAgreement);
      samples.reset();
      ++a.trials;
      a.hits += violates(roles, n, q, rng, sc, samples);
    };
  });
  AgreementResult r;
  r.violation = wilson(static_cast<double>(acc.hits), static_cast<double>(acc.trials));
  return r;
}

MergeComparison compare_merge_strategies(const ProtocolConfig& cfg, const SplitPlan& split,
                                         std::size_t merge_a, std::size_t merge_b,
                                         std::uint64_t trials, const Control& ctl) {
  const std::uint32_t n = cfg.n(), s = cfg.s();
  const auto q = static_cast<std::uint16_t>(cfg.q());
  const auto faulty = detail::leading_faulty(cfg.f());
  const Roles split_roles(cfg, faulty, split);
  const Roles merged_roles(cfg, faulty, merge_sets(split, merge_a, merge_b));

  auto acc = detail::run_trials<PairAcc>(trials, ctl.parallelism, [&] {
    return [&, sc = Scratch(n), samples = TrialSamples(n, s)](std::uint64_t i, PairAcc& a) mutable {
      auto rng = stream_engine(ctl.base_seed, i, kSaltMerge);
      samples.reset();
      samples.draw_all(rng, sc);
      const bool vs = violates(split_roles, n, q, rng, sc, samples);
      const bool vm = violates(merged_roles, n, q, rng, sc, samples);
      const double d = static_cast<double>(vm) - static_cast<double>(vs);
      ++a.trials;
      a.split += vs;
      a.merged += vm;
      a.discordant += vs != vm;
      a.d_sum += d;
      a.d_sq += d * d;
    };
  });

  MergeComparison r;
  const double t = static_cast<double>(acc.trials);
  r.split = wilson(static_cast<double>(acc.split), t);
  r.merged = wilson(static_cast<double>(acc.merged), t);
  r.discordant = acc.discordant;
  r.mean_diff = acc.d_sum / t;
  const double var = t > 1 ? (acc.d_sq - t * r.mean_diff * r.mean_diff) / (t - 1) : 0;
  r.diff_se = std::sqrt(std::max(0.0, var) / t);
  return r;
}

AgreementResult detail::agreement_order_free(const ProtocolConfig& cfg, std::uint64_t trials,
                                             const Control& ctl) {
  return estimate_agreement_violation(cfg, optimal_split(cfg, leading_faulty(cfg.f())), trials, ctl);
}

}  // namespace probft::mc
