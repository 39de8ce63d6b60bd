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

// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "oracles.hpp"
#include "probft/analysis.hpp"
#include "probft/cli.hpp"
#include "probft/crypto.hpp"
#include "probft/montecarlo.hpp"
#include "probft/random.hpp"
#include "probft/simulation.hpp"

using namespace probft;
namespace fs = std::filesystem;

namespace {

constexpr double kZ95 = 1.6448536269514722;  // one-sided

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// a < b at one-sided 95%.
bool significantly_below(const mc::Estimate& a, const mc::Estimate& b) {
  const double se = std::hypot(a.standard_error(), b.standard_error());
  return b.p_hat - a.p_hat > kZ95 * se;
}

Outcome quorum_arithmetic() {
  const auto qs = quorum_sizes(100, 33, 2, 1.7);
  return {qs.q == 20 && qs.det_quorum == 67, fmt::format("q={} det_quorum={}", qs.q, qs.det_quorum)};
}

Outcome golden_traces() {
  const std::string dir = PROBFT_GOLDEN_DIR;
  std::vector<std::string> bad;
  for (const char* name : {"honest", "silent_leader", "equivocating_leader"}) {
    const auto sc = cli::load_scenario(dir + "/" + name + ".yaml");
    std::ostringstream text;
    TraceWriter tw(text);
    SimulationOptions opts;
    opts.trace = &tw;
    opts.max_views = sc.run.max_views;
    const auto m = run_simulation(sc.protocol(), sc.net, sc.adversary, opts);
    bool ok = text.str() == slurp(dir + "/" + name + ".trace.jsonl") && m.all_correct_decided();
    // Expected decision views, and blocking on every correct replica that saw both proposals.
    const std::uint64_t want_view = std::string(name) == "honest" ? 1 : 2;
    for (const auto& r : m.replicas) {
      if (!r.faulty) ok = ok && r.decided_view.value == want_view;
    }
    if (std::string(name) == "equivocating_leader") ok = ok && m.views.at(View{1}).blocks == 3;
    if (!ok) bad.emplace_back(name);
  }
  std::string detail = "3 scenarios match";
  if (!bad.empty()) {
    detail = "mismatch:";
    for (const auto& b : bad) detail += " " + b;
  }
  return {bad.empty(), detail};
}

Outcome bound_soundness() {
  std::size_t checked = 0;
  const auto v = oracle::check_bounds(analysis::Grid{}, checked);
  std::string detail = fmt::format("{} comparisons, {} violations", checked, v.size());
  if (!v.empty()) detail += fmt::format(" (first: {} bound={} exact={})", v[0].what, v[0].bound, v[0].exact);
  return {v.empty() && checked > 0, detail};
}

Outcome termination_vs_bound() {
  const auto cfg = ProtocolConfig::make(100, 20, 2, 1.7);
  const std::uint64_t trials = 100000;
  const auto r = mc::estimate_termination(cfg, trials, mc::Mode::kOrderFree, mc::Control{});
  const double bound = analysis::per_replica_termination_bound(100, 20, 1.7, 20).value;
  const double exact = oracle::binom_at_least(80, 34.0 / 100.0, 20);
  const double sigma = std::sqrt(exact * (1 - exact) / static_cast<double>(trials));
  const bool ok = r.per_replica.p_hat >= bound && std::abs(r.prepare_target.p_hat - exact) <= 3 * sigma;
  return {ok, fmt::format("per-replica {:.5f} >= bound {:.5f}; prepare {:.5f} vs exact {:.5f} (3 sigma {:.5f})",
                          r.per_replica.p_hat, bound, r.prepare_target.p_hat, exact, 3 * sigma)};
}

Outcome trends() {
  const std::vector<std::uint32_t> ns{25, 50, 100, 200, 400};
  const std::uint64_t trials = 100000;
  mc::Control ctl;
  bool a_ok = true, b_ok = true, c_ok = true;
  std::string detail;
  for (double o : {1.6, 1.7, 1.8}) {
    std::vector<mc::Estimate> term, viol;
    for (auto n : ns) {
      const auto cfg = ProtocolConfig::make(n, analysis::Grid::faults(n, 0.2), 2, o);
      term.push_back(mc::estimate_termination(cfg, trials, mc::Mode::kOrderFree, ctl).per_replica);
      viol.push_back(mc::estimate_agreement_violation(cfg, trials, mc::Mode::kOrderFree, ctl).violation);
    }
    std::string ts, vs;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      ts += fmt::format("{}{:.4f}", i ? "," : "", term[i].p_hat);
      vs += fmt::format("{}{:.4f}", i ? "," : "", viol[i].p_hat);
      if (i == 0) continue;
      a_ok = a_ok && significantly_below(term[i - 1], term[i]);
      b_ok = b_ok && significantly_below(viol[i], viol[i - 1]);
    }
    detail += fmt::format(" o={}: term[{}] viol[{}];", o, ts, vs);
  }
  std::vector<mc::Estimate> by_f;
  std::string fs_;
  for (std::uint32_t f : {0u, 10u, 20u, 30u}) {
    const auto cfg = ProtocolConfig::make(100, f, 2, 1.7);
    by_f.push_back(mc::estimate_agreement_violation(cfg, trials, mc::Mode::kOrderFree, ctl).violation);
    fs_ += fmt::format("{}{:.4f}", f ? "," : "", by_f.back().p_hat);
    if (by_f.size() > 1) c_ok = c_ok && significantly_below(by_f[by_f.size() - 2], by_f.back());
  }
  detail = fmt::format("(a) {} (b) {} (c) {}; f=0..30 viol[{}];", a_ok ? "ok" : "not monotone",
                       b_ok ? "ok" : "not monotone", c_ok ? "ok" : "not monotone", fs_) +
           detail;
  return {a_ok && b_ok && c_ok, detail};
}

Outcome merge_direction() {
  const auto cfg = ProtocolConfig::make(30, 6, 2, 1.7);
  std::vector<ReplicaId> faulty;
  for (std::uint32_t i = 1; i <= 6; ++i) faulty.push_back(ReplicaId{i});
  mc::SplitPlan three;
  three.sets.resize(3);
  for (std::uint32_t i = 7; i <= 30; ++i) three.sets[(i - 7) % 3].push_back(ReplicaId{i});
  for (auto& s : three.sets) s.insert(s.end(), faulty.begin(), faulty.end());
  const auto r = mc::compare_merge_strategies(cfg, three, 0, 1, 1000000, mc::Control{});
  return {r.merged_not_lower(), fmt::format("split {:.6f} merged {:.6f} diff {:.6f} se {:.6f} discordant {}",
                                            r.split.p_hat, r.merged.p_hat, r.mean_diff, r.diff_se, r.discordant)};
}

Outcome monotone_in_r() {
  std::size_t checked = 0;
  const auto breaks = oracle::count_monotonicity_breaks(analysis::Grid{}, checked);
  return {breaks == 0 && checked > 0, fmt::format("{} points, {} decreases", checked, breaks)};
}

Outcome message_ratio() {
  bool ok = true;
  std::string detail;
  for (std::uint64_t n : {200, 300, 400}) {
    // Independent count: leader broadcast plus two all-to-all (PBFT) or
    // all-to-sample (sampled) vote phases.
    const auto q = static_cast<std::uint64_t>(std::ceil(2 * std::sqrt(static_cast<double>(n)) - 1e-9));
    const auto s = static_cast<std::uint64_t>(std::ceil(1.7 * static_cast<double>(q) - 1e-9));
    const double pbft = static_cast<double>((n - 1) + 2 * n * (n - 1));
    const double sampled = static_cast<double>((n - 1) + 2 * n * s);
    const auto lib_p = analysis::message_counts(analysis::Protocol::kProbft, n, 0, 2, 1.7).total();
    const auto lib_b = analysis::message_counts(analysis::Protocol::kPbft, n, 0, 2, 1.7).total();
    const double ratio = sampled / pbft;
    ok = ok && lib_p == sampled && lib_b == pbft && ratio >= 0.15 && ratio <= 0.27;
    detail += fmt::format("n={} ratio={:.4f} ", n, ratio);
  }
  return {ok, detail + "band [0.15, 0.27]"};
}

Outcome negative_association() {
  const auto cfg = ProtocolConfig::make(100, 20, 2, 1.7);
  const auto r = mc::estimate_prepare_quorum(cfg, 100000, mc::Control{});
  const bool ok = r.covariance <= 3 * r.covariance_se && r.pair_covariance <= 3 * r.pair_covariance_se;
  return {ok, fmt::format("mean pairwise cov {:.3e} (se {:.3e}); pair (1st,2nd) cov {:.3e} (se {:.3e})",
                          r.covariance, r.covariance_se, r.pair_covariance, r.pair_covariance_se)};
}

Outcome command_determinism() {
  const auto root = fs::temp_directory_path() / "probft_acceptance_determinism";
  fs::remove_all(root);
  struct Case {
    std::string name;
    std::string yaml;
    std::function<int(const cli::Scenario&, const fs::path&)> cmd;
  };
  const std::vector<Case> cases{
      {"analyze", "version: 1\n", cli::cmd_analyze},
      {"msgcount", "version: 1\n", cli::cmd_msgcount},
      {"simulate_of", "version: 1\nseed: 11\nparallelism: 3\nexperiment: {kind: agreement_optimal_split, trials: 20000, "
                      "sweep: {n: [25, 100], f_ratio: [0.2], o: [1.7], l: [2]}}\n",
       cli::cmd_simulate},
      {"simulate_eo", "version: 1\nseed: 12\nprotocol: {n: 25, f: 5, l: 2, o: 1.7}\n"
                      "experiment: {kind: agreement_optimal_split, mode: event_ordered, trials: 20}\n",
       cli::cmd_simulate},
      {"run", "version: 1\nseed: 13\nprotocol: {n: 25, f: 5, l: 2, o: 1.7}\nnet: {gst: 200, policy: uniform_random}\n"
              "adversary: {faulty: random, leader: equiv_optimal, replica: partition_consistent}\n"
              "run: {runs: 10, max_views: 10}\n",
       cli::cmd_run},
  };
  std::size_t files = 0;
  std::vector<std::string> bad;
  for (const auto& c : cases) {
    const auto sc = cli::parse_scenario(c.yaml);
    const auto a = root / (c.name + "_a"), b = root / (c.name + "_b");
    c.cmd(sc, a);
    c.cmd(sc, b);
    for (const auto& e : fs::directory_iterator(a)) {
      ++files;
      if (slurp(e.path()) != slurp(b / e.path().filename())) bad.push_back(c.name + "/" + e.path().filename().string());
    }
  }
  fs::remove_all(root);
  std::string detail = fmt::format("{} files compared", files);
  for (const auto& b : bad) detail += " differs:" + b;
  return {bad.empty() && files > 0, detail};
}

Outcome vrf_contract() {
  const std::uint32_t n = 100;
  const auto cfg = ProtocolConfig::make(n, 20, 2, 1.7);
  const std::uint32_t s = cfg.s();
  const crypto::KeyRegistry reg(2026, n);
  const std::uint64_t rounds = 10000;
  std::vector<std::uint64_t> hits(n, 0);
  std::uint64_t verified = 0, tamper_rejected = 0, tamper_tries = 0;
  std::mt19937_64 rng(99);
  for (std::uint64_t i = 0; i < rounds; ++i) {
    const ReplicaId owner{static_cast<std::uint32_t>(i % n) + 1};
    const auto seed = crypto::vrf_seed(View{i / n + 1}, i % 2 ? crypto::Phase::kCommit : crypto::Phase::kPrepare);
    const auto r = reg.signer(owner).vrf_prove(seed, s, n);
    if (reg.vrf_verify(owner, seed, s, r.sample, r.proof)) ++verified;
    for (auto id : r.sample) ++hits[id.value - 1];

    // One single-byte tamper of each kind per round.
    auto sample = r.sample;
    auto& victim = sample[rng() % sample.size()];
    victim = ReplicaId{victim.value ^ (1u + static_cast<std::uint32_t>(rng() % 255))};
    auto proof = r.proof;
    proof.output[rng() % proof.output.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    auto bad_seed = seed;
    bad_seed[rng() % bad_seed.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    auto key = reg.public_key(owner);
    key[rng() % key.size()] ^= static_cast<std::uint8_t>(1 + rng() % 255);
    const bool rejected[] = {
        !reg.vrf_verify(owner, seed, s, sample, r.proof),
        !reg.vrf_verify(owner, seed, s, r.sample, proof),
        !reg.vrf_verify(owner, bad_seed, s, r.sample, r.proof),
        !reg.vrf_verify(key, seed, s, r.sample, r.proof),
    };
    for (bool x : rejected) {
      ++tamper_tries;
      tamper_rejected += x;
    }
  }
  const double p = static_cast<double>(s) / n;
  const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(rounds));
  double worst = 0;
  for (auto h : hits) worst = std::max(worst, std::abs(static_cast<double>(h) / rounds - p) / sigma);
  const bool ok = verified == rounds && tamper_rejected == tamper_tries && worst <= 3;
  return {ok, fmt::format("{}/{} verified, {}/{} tampers rejected, max |freq - s/n| = {:.2f} sigma", verified,
                          rounds, tamper_rejected, tamper_tries, worst)};
}

Outcome termination_in_practice() {
  const std::uint32_t n = 50, f = 10, runs = 1000, horizon = 10;
  NetConfig net = NetConfig::with_defaults(10);
  net.gst = 2 * net.view_duration;
  // First view whose nominal start is at or after GST.
  const std::uint64_t gst_view = (net.gst + net.view_duration - 1) / net.view_duration + 1;
  const std::uint64_t deadline = gst_view - 1 + horizon;
  std::uint32_t ok_runs = 0;
  std::uint64_t worst_view = 0;
  std::vector<std::uint64_t> failed;
  for (std::uint32_t i = 0; i < runs; ++i) {
    auto rng = stream_engine(2026, i, 0x7e);
    const auto cfg = ProtocolConfig::make(n, f, 2, 1.7, rng());
    AdversarySpec adv;
    adv.faulty = random_faulty_set(n, f, rng);
    if (i % 2) {
      adv.leader = LeaderStrategy::kEquivOptimal;
      adv.replica = ReplicaStrategy::kPartitionConsistent;
    }
    SimulationOptions opts;
    opts.max_views = static_cast<std::uint32_t>(deadline);
    const auto m = run_simulation(cfg, net, adv, opts);
    bool ok = m.all_correct_decided() && !m.agreement_violated();
    for (const auto& r : m.replicas) {
      if (r.faulty) continue;
      ok = ok && r.decided && r.decided_view.value <= deadline;
      worst_view = std::max(worst_view, r.decided_view.value);
    }
    if (ok) {
      ++ok_runs;
    } else if (failed.size() < 5) {
      failed.push_back(i);
    }
  }
  std::string detail = fmt::format("{}/{} runs decided by view {} (GST at view {}), latest decision view {}",
                                   ok_runs, runs, deadline, gst_view, worst_view);
  for (auto i : failed) detail += fmt::format(" failed:{}", i);
  return {ok_runs == runs, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> criteria{
      quorum_arithmetic, golden_traces,   bound_soundness,      termination_vs_bound,
      trends,            merge_direction, monotone_in_r,        message_ratio,
      negative_association, command_determinism, vrf_contract, termination_in_practice,
  };
  std::set<std::size_t> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoul(argv[i]));

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && !only.count(i + 1)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::cout << fmt::format("criterion {:>2}: {} [{:.1f}s] {}", i + 1, o.pass ? "PASS" : "FAIL", secs, o.detail)
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
