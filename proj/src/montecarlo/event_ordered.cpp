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

// Estimators driven by the full simulation: real messages, signatures and
// delivery order, one simulation per trial.

#include <algorithm>

#include "internal.hpp"
#include "probft/crypto.hpp"
#include "probft/predicates.hpp"
#include "probft/random.hpp"
#include "probft/simulation.hpp"
#include "runner.hpp"

namespace probft::mc {
namespace {

constexpr std::uint32_t kSaltTermination = 0x61;
constexpr std::uint32_t kSaltAgreement = 0x62;
constexpr std::uint32_t kSaltViewChange = 0x63;

ProtocolConfig trial_config(const ProtocolConfig& cfg, const Control& ctl, std::uint64_t i,
                            std::uint32_t salt) {
  auto rng = stream_engine(ctl.base_seed, i, salt);
  return cfg.with_seed(rng());
}

struct TermAcc {
  std::uint64_t trials = 0, all = 0, target = 0, non_quiescent = 0;
  double frac = 0, frac_sq = 0;
  void merge(const TermAcc& o) {
    trials += o.trials;
    all += o.all;
    target += o.target;
    non_quiescent += o.non_quiescent;
    frac += o.frac;
    frac_sq += o.frac_sq;
  }
};

struct AgreeAcc {
  std::uint64_t trials = 0, hits = 0, non_quiescent = 0;
  void merge(const AgreeAcc& o) {
    trials += o.trials;
    hits += o.hits;
    non_quiescent += o.non_quiescent;
  }
};

struct ChangeAcc {
  std::uint64_t decided = 0, undecided = 0, hits = 0;
  void merge(const ChangeAcc& o) {
    decided += o.decided;
    undecided += o.undecided;
    hits += o.hits;
  }
};

TerminationResult termination_event_ordered(const ProtocolConfig& cfg, std::uint64_t trials,
                                            const Control& ctl) {
  const std::uint32_t n = cfg.n(), f = cfg.f(), m = n - f;
  AdversarySpec spec;
  for (std::uint32_t i = m + 1; i <= n; ++i) spec.faulty.push_back(ReplicaId{i});
  spec.leader = LeaderStrategy::kSilent;
  spec.replica = ReplicaStrategy::kSilent;
  SimulationOptions opts;
  opts.max_views = 1;

  auto acc = detail::run_trials<TermAcc>(trials, ctl.parallelism, [&] {
    return [&](std::uint64_t i, TermAcc& a) {
      const auto run = run_simulation(trial_config(cfg, ctl, i, kSaltTermination), ctl.net, spec, opts);
      std::uint32_t decided = 0;
      for (const auto& r : run.replicas) decided += !r.faulty && r.decided && r.decided_view == View{1};
      const double fr = static_cast<double>(decided) / m;
      const auto& v1 = run.views.at(View{1});
      ++a.trials;
      a.all += decided == m;
      a.target += !v1.prepare_in.empty() && v1.prepare_in[0] >= cfg.q();
      a.non_quiescent += run.outcome == RunOutcome::kNonQuiescent;
      a.frac += fr;
      a.frac_sq += fr * fr;
    };
  });

  TerminationResult r;
  const double t = static_cast<double>(acc.trials);
  r.per_replica = pooled(acc.frac, acc.frac_sq, acc.trials, m);
  r.all_replicas = wilson(static_cast<double>(acc.all), t);
  r.prepare_target = wilson(static_cast<double>(acc.target), t);
  r.non_quiescent = acc.non_quiescent;
  return r;
}

AgreementResult agreement_event_ordered(const ProtocolConfig& cfg, std::uint64_t trials,
                                        const Control& ctl) {
  AdversarySpec spec;
  spec.faulty = detail::leading_faulty(cfg.f());
  spec.leader = LeaderStrategy::kEquivOptimal;
  spec.replica = ReplicaStrategy::kPartitionConsistent;
  SimulationOptions opts;
  opts.max_views = 1;

  auto acc = detail::run_trials<AgreeAcc>(trials, ctl.parallelism, [&] {
    return [&](std::uint64_t i, AgreeAcc& a) {
      const auto run = run_simulation(trial_config(cfg, ctl, i, kSaltAgreement), ctl.net, spec, opts);
      ++a.trials;
      a.hits += run.agreement_violated();
      a.non_quiescent += run.outcome == RunOutcome::kNonQuiescent;
    };
  });
  AgreementResult r;
  r.violation = wilson(static_cast<double>(acc.hits), static_cast<double>(acc.trials));
  r.non_quiescent = acc.non_quiescent;
  return r;
}

}  // namespace

TerminationResult estimate_termination(const ProtocolConfig& cfg, std::uint64_t trials, Mode mode,
                                       const Control& ctl) {
  return mode == Mode::kOrderFree ? detail::termination_order_free(cfg, trials, ctl)
                                  : termination_event_ordered(cfg, trials, ctl);
}

AgreementResult estimate_agreement_violation(const ProtocolConfig& cfg, std::uint64_t trials,
                                             Mode mode, const Control& ctl) {
  return mode == Mode::kOrderFree ? detail::agreement_order_free(cfg, trials, ctl)
                                  : agreement_event_ordered(cfg, trials, ctl);
}

ViewChangeResult estimate_view_change_violation(const ProtocolConfig& cfg, std::uint64_t trials,
                                                bool faulty_next_leader, const Control& ctl) {
  const std::uint32_t n = cfg.n(), f = cfg.f();
  AdversarySpec spec;
  if (faulty_next_leader) {
    spec.faulty = detail::leading_faulty(f);
  } else if (f > 0) {
    // Replica 1 leads view 1, replica 2 (correct) leads view 2.
    spec.faulty.push_back(ReplicaId{1});
    for (std::uint32_t i = n - f + 2; i <= n; ++i) spec.faulty.push_back(ReplicaId{i});
  }
  spec.leader = LeaderStrategy::kEquivOptimal;
  spec.replica = ReplicaStrategy::kPartitionConsistent;
  SimulationOptions opts;
  opts.max_views = 2;

  auto acc = detail::run_trials<ChangeAcc>(trials, ctl.parallelism, [&] {
    return [&](std::uint64_t i, ChangeAcc& a) {
      const auto tcfg = trial_config(cfg, ctl, i, kSaltViewChange);
      const auto run = run_simulation(tcfg, ctl.net, spec, opts);
      std::optional<Value> first;
      for (const auto& r : run.replicas) {
        if (!r.faulty && r.decided && r.decided_view == View{1}) {
          first = r.decided;
          break;
        }
      }
      if (!first) {
        ++a.undecided;
        return;
      }
      ++a.decided;
      const crypto::KeyRegistry registry(tcfg.rng_seed(), n);
      for (const auto& p : run.view_proposals) {
        if (p->view != View{2} || !p->proposal || p->proposal->value == *first) continue;
        if (safe_proposal(*p, tcfg, registry, always_valid)) {
          ++a.hits;
          break;
        }
      }
    };
  });

  ViewChangeResult r;
  r.violation = wilson(static_cast<double>(acc.hits), static_cast<double>(acc.decided));
  r.decided_trials = acc.decided;
  r.undecided_trials = acc.undecided;
  return r;
}

}  // namespace probft::mc
