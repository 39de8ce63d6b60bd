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

#include <fstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "probft/cli.hpp"
#include "probft/random.hpp"
#include "probft/simulation.hpp"

namespace probft::cli {
namespace {

namespace fs = std::filesystem;

std::ofstream open_out(const fs::path& dir, const char* name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", (dir / name).string()));
  return out;
}

void write_echo(const Scenario& sc, const fs::path& out) { open_out(out, "scenario.yaml") << echo(sc); }

struct Point {
  std::uint32_t n, f;
  double o, l;
};

std::vector<Point> points(const Scenario& sc) {
  if (!sc.experiment.sweep) return {{sc.n, sc.f, sc.o, sc.l}};
  std::vector<Point> pts;
  const auto& g = *sc.experiment.sweep;
  for (auto n : g.n) {
    for (double r : g.f_ratio) {
      for (double o : g.o) {
        for (double l : g.l) pts.push_back({n, analysis::Grid::faults(n, r), o, l});
      }
    }
  }
  return pts;
}

struct Row {
  std::string metric;
  double p_hat, lo, hi;
  std::string bound;
  std::optional<analysis::BoundResult> b;
  std::uint64_t non_quiescent = 0;
};

Row est_row(std::string metric, const mc::Estimate& e, std::string bound = {},
            std::optional<analysis::BoundResult> b = {}) {
  return {std::move(metric), e.p_hat, e.lo, e.hi, std::move(bound), std::move(b)};
}

Row value_row(std::string metric, double v, double se) {
  return {std::move(metric), v, v - 1.959963984540054 * se, v + 1.959963984540054 * se, {}, {}};
}

std::vector<Row> run_point(const Scenario& sc, const ProtocolConfig& cfg, const mc::Control& ctl) {
  namespace an = analysis;
  const auto& ex = sc.experiment;
  const double n = cfg.n(), f = cfg.f(), o = cfg.o(), q = cfg.q();
  std::vector<Row> rows;
  switch (ex.kind) {
    case ExperimentKind::kPrepareQuorum: {
      const auto r = mc::estimate_prepare_quorum(cfg, ex.trials, ctl);
      const auto b = an::quorum_prob_lower_bound(n, f, o, q);
      rows.push_back(est_row("target", r.target, "quorum_prob_lower", b));
      rows.push_back(est_row("all_correct", r.all_correct));
      rows.push_back(est_row("per_replica", r.per_replica, "quorum_prob_lower", b));
      rows.push_back(value_row("mean_pair_covariance", r.covariance, r.covariance_se));
      rows.push_back(value_row("pair_covariance", r.pair_covariance, r.pair_covariance_se));
      break;
    }
    case ExperimentKind::kTermination: {
      const auto r = mc::estimate_termination(cfg, ex.trials, ex.mode, ctl);
      rows.push_back(est_row("per_replica", r.per_replica, "per_replica_termination",
                             an::per_replica_termination_bound(n, f, o, q)));
      rows.push_back(est_row("all_replicas", r.all_replicas, "all_replicas_termination",
                             an::all_replicas_termination_bound(n, f, o, q)));
      rows.push_back(est_row("prepare_target", r.prepare_target, "quorum_prob_lower",
                             an::quorum_prob_lower_bound(n, f, o, q)));
      for (auto& row : rows) row.non_quiescent = r.non_quiescent;
      break;
    }
    case ExperimentKind::kAgreementOptimalSplit: {
      const auto r = mc::estimate_agreement_violation(cfg, ex.trials, ex.mode, ctl);
      rows.push_back(est_row("violation", r.violation, "agreement_violation_in_view",
                             an::agreement_violation_in_view_bound(n, f, o, q)));
      rows.back().non_quiescent = r.non_quiescent;
      break;
    }
    case ExperimentKind::kAgreementGeneral: {
      const auto r = mc::estimate_agreement_violation(cfg, mc::SplitPlan{ex.plan}, ex.trials, ctl);
      rows.push_back(est_row("violation", r.violation));
      break;
    }
    case ExperimentKind::kMergeComparison: {
      const auto r = mc::compare_merge_strategies(cfg, mc::SplitPlan{ex.plan}, ex.merge_a, ex.merge_b,
                                                  ex.trials, ctl);
      rows.push_back(est_row("split", r.split));
      rows.push_back(est_row("merged", r.merged));
      rows.push_back(value_row("merged_minus_split", r.mean_diff, r.diff_se));
      break;
    }
    case ExperimentKind::kViewChange: {
      const auto r = mc::estimate_view_change_violation(cfg, ex.trials, ex.faulty_next_leader, ctl);
      rows.push_back(est_row("violation", r.violation, "view_change_violation",
                             an::view_change_violation_bound(n, f, o, q)));
      rows.push_back({"undecided_trials", static_cast<double>(r.undecided_trials),
                      static_cast<double>(r.undecided_trials), static_cast<double>(r.undecided_trials),
                      {}, {}});
      break;
    }
  }
  return rows;
}

}  // namespace

int cmd_analyze(const Scenario& sc, const fs::path& out) {
  write_echo(sc, out);
  auto csv = open_out(out, "bounds.csv");
  analysis::write_bounds_csv(csv, sc.grid);
  return kExitOk;
}

int cmd_msgcount(const Scenario& sc, const fs::path& out) {
  write_echo(sc, out);
  auto csv = open_out(out, "msgcount.csv");
  analysis::write_msgcount_csv(csv, sc.msgcount.n, sc.msgcount.l, sc.msgcount.o);
  return kExitOk;
}

int cmd_simulate(const Scenario& sc, const fs::path& out) {
  write_echo(sc, out);
  auto csv = open_out(out, "estimates.csv");
  csv << kEstimatesCsvVersion << '\n';
  csv << "kind,mode,n,f,o,l,q,s,trials,seed,metric,p_hat,lo,hi,bound,bound_value,bound_applicable,"
         "non_quiescent\n";
  mc::Control ctl;
  ctl.base_seed = sc.seed;
  ctl.parallelism = sc.parallelism;
  ctl.net = sc.net;
  bool non_quiescent = false;
  for (const auto& p : points(sc)) {
    const auto cfg = ProtocolConfig::make(p.n, p.f, p.l, p.o, sc.seed);
    for (const auto& row : run_point(sc, cfg, ctl)) {
      fmt::print(csv, "{},{},{},{},{},{},{},{},{},{},{},{:.10g},{:.10g},{:.10g},{},", to_string(sc.experiment.kind),
                 mc::to_string(sc.experiment.mode), p.n, p.f, p.o, p.l, cfg.q(), cfg.s(),
                 sc.experiment.trials, sc.seed, row.metric, row.p_hat, row.lo, row.hi, row.bound);
      if (row.b) {
        fmt::print(csv, "{:.10g},{}", row.b->value, row.b->applicable ? 1 : 0);
      } else {
        csv << ',';
      }
      fmt::print(csv, ",{}\n", row.non_quiescent);
      non_quiescent |= row.non_quiescent > 0;
    }
  }
  return non_quiescent ? kExitNonQuiescent : kExitOk;
}

int cmd_run(const Scenario& sc, const fs::path& out) {
  write_echo(sc, out);
  auto metrics = open_out(out, "metrics.csv");
  auto runs = open_out(out, "runs.csv");
  metrics << kMetricsCsvVersion << '\n' << "run,view,metric,value\n";
  runs << kRunsCsvVersion << '\n'
       << "run,seed,faulty,outcome,last_view,end_time,decided,total_sent,agreement_violated,"
          "correct_votes,correct_votes_honest,adversary_votes,adversary_votes_valid\n";

  std::optional<std::ofstream> trace_file;
  std::optional<TraceWriter> trace;
  if (sc.run.trace) {
    trace_file.emplace(open_out(out, "trace.jsonl"));
    trace.emplace(*trace_file);
  }

  bool non_quiescent = false;
  for (std::uint32_t i = 0; i < sc.run.runs; ++i) {
    const std::uint64_t seed = sc.seed + i;
    const auto cfg = sc.protocol().with_seed(seed);
    auto adv = sc.adversary;
    if (sc.random_faulty) {
      auto rng = stream_engine(sc.seed, i, 0x72);
      adv.faulty = random_faulty_set(cfg.n(), cfg.f(), rng);
    }
    SimulationOptions opts;
    opts.max_views = sc.run.max_views;
    if (i == 0 && trace) opts.trace = &*trace;
    const auto m = run_simulation(cfg, sc.net, adv, opts);

    // Views without traffic still get zero rows.
    for (std::uint64_t v = 1; v <= m.last_view.value; ++v) {
      const auto it = m.views.find(View{v});
      const ViewMetrics vm = it == m.views.end() ? ViewMetrics{} : it->second;
      auto put = [&](std::string_view name, std::uint64_t value) {
        fmt::print(metrics, "{},{},{},{}\n", i, v, name, value);
      };
      for (auto kind : {MessageKind::kPropose, MessageKind::kNewLeader, MessageKind::kPrepare,
                        MessageKind::kCommit}) {
        put(fmt::format("sent_{}", to_string(kind)), vm.sent_of(kind));
      }
      put("sent_total", vm.total_sent());
      put("blocks", vm.blocks);
      put("new_leader_quorums", vm.new_leader_quorums);
      put("prepare_quorums", vm.prepare_quorums);
      put("commit_quorums", vm.commit_quorums);
      std::uint64_t decided = 0;
      for (const auto& [value, count] : vm.decisions) decided += count;
      put("decisions", decided);
      put("distinct_values_decided", vm.decisions.size());
    }

    std::string faulty;
    for (auto id : adv.faulty) faulty += (faulty.empty() ? "" : " ") + std::to_string(id.value);
    fmt::print(runs, "{},{},{},{},{},{},{},{},{},{},{},{},{}\n", i, seed, faulty,
               m.outcome == RunOutcome::kAllDecided ? "all_decided" : "non_quiescent", m.last_view.value,
               m.end_time, m.decided_count(), m.total_sent(), m.agreement_violated() ? 1 : 0,
               m.correct_votes, m.correct_votes_honest, m.adversary_votes, m.adversary_votes_valid);
    non_quiescent |= m.outcome == RunOutcome::kNonQuiescent;
  }
  return non_quiescent ? kExitNonQuiescent : kExitOk;
}

}  // namespace probft::cli
