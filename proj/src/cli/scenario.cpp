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

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "probft/cli.hpp"

namespace probft::cli {

ScenarioError::ScenarioError(const std::string& what, int line, int column)
    : ConfigError(line > 0 ? fmt::format("scenario:{}:{}: {}", line, column, what)
                           : fmt::format("scenario: {}", what)),
      line_(line),
      column_(column) {}

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::kPrepareQuorum:
      return "prepare_quorum";
    case ExperimentKind::kTermination:
      return "termination";
    case ExperimentKind::kAgreementOptimalSplit:
      return "agreement_optimal_split";
    case ExperimentKind::kAgreementGeneral:
      return "agreement_general";
    case ExperimentKind::kMergeComparison:
      return "merge_comparison";
    case ExperimentKind::kViewChange:
      return "view_change";
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view s) {
  for (auto k : {ExperimentKind::kPrepareQuorum, ExperimentKind::kTermination,
                 ExperimentKind::kAgreementOptimalSplit, ExperimentKind::kAgreementGeneral,
                 ExperimentKind::kMergeComparison, ExperimentKind::kViewChange}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

ProtocolConfig Scenario::protocol() const { return ProtocolConfig::make(n, f, l, o, seed); }

namespace {

[[noreturn]] void fail(const YAML::Node& at, const std::string& msg) {
  const auto m = at.Mark();
  if (m.is_null()) throw ScenarioError(msg);
  throw ScenarioError(msg, m.line + 1, m.column + 1);
}

void require_map(const YAML::Node& node, std::string_view where) {
  if (!node.IsMap()) fail(node, fmt::format("'{}' must be a mapping", where));
}

void check_keys(const YAML::Node& node, std::initializer_list<std::string_view> allowed,
                std::string_view where) {
  require_map(node, where);
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(kv.first, fmt::format("unknown key '{}' in {}", key, where));
    }
  }
}

template <class T>
T scalar(const YAML::Node& node, std::string_view what) {
  if (!node.IsScalar()) fail(node, fmt::format("'{}' must be a scalar", what));
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(node, fmt::format("'{}' has the wrong type: '{}'", what, node.Scalar()));
  }
}

template <class T>
void read(const YAML::Node& map, const char* key, T& into) {
  if (const auto node = map[key]) into = scalar<T>(node, key);
}

template <class T>
void read_list(const YAML::Node& map, const char* key, std::vector<T>& into) {
  const auto node = map[key];
  if (!node) return;
  if (!node.IsSequence()) fail(node, fmt::format("'{}' must be a list", key));
  into.clear();
  for (const auto& item : node) into.push_back(scalar<T>(item, key));
}

std::vector<ReplicaId> read_ids(const YAML::Node& node, std::string_view what) {
  if (!node.IsSequence()) fail(node, fmt::format("'{}' must be a list of replica ids", what));
  std::vector<ReplicaId> ids;
  for (const auto& item : node) ids.push_back(ReplicaId{scalar<std::uint32_t>(item, what)});
  return ids;
}

std::vector<std::vector<ReplicaId>> read_sets(const YAML::Node& node, std::string_view what) {
  if (!node.IsSequence()) fail(node, fmt::format("'{}' must be a list of lists", what));
  std::vector<std::vector<ReplicaId>> sets;
  for (const auto& item : node) sets.push_back(read_ids(item, what));
  return sets;
}

void check_grid(const YAML::Node& at, const analysis::Grid& g) {
  if (g.n.empty() || g.f_ratio.empty() || g.o.empty() || g.l.empty()) {
    fail(at, "grid lists must be non-empty");
  }
  for (auto n : g.n) {
    for (double r : g.f_ratio) {
      for (double o : g.o) {
        for (double l : g.l) {
          try {
            quorum_sizes(n, analysis::Grid::faults(n, r), l, o);
          } catch (const ConfigError& e) {
            fail(at, e.what());
          }
        }
      }
    }
  }
}

analysis::Grid read_grid(const YAML::Node& node, std::string_view where) {
  check_keys(node, {"n", "f_ratio", "o", "l"}, where);
  analysis::Grid g;
  read_list(node, "n", g.n);
  read_list(node, "f_ratio", g.f_ratio);
  read_list(node, "o", g.o);
  read_list(node, "l", g.l);
  check_grid(node, g);
  return g;
}

void read_net(const YAML::Node& node, NetConfig& net) {
  check_keys(node,
             {"gst", "delta", "pre_gst_max_delay", "view_duration", "fixed_delay", "post_gst_skew",
              "policy"},
             "net");
  Tick delta = net.delta;
  read(node, "delta", delta);
  if (delta == 0) fail(node["delta"], "delta must be positive");
  const auto policy = net.policy;
  net = NetConfig::with_defaults(delta);
  net.policy = policy;
  read(node, "gst", net.gst);
  read(node, "pre_gst_max_delay", net.pre_gst_max_delay);
  read(node, "view_duration", net.view_duration);
  read(node, "fixed_delay", net.fixed_delay);
  read(node, "post_gst_skew", net.post_gst_skew);
  if (const auto p = node["policy"]) {
    const auto parsed = parse_scheduler_policy(scalar<std::string>(p, "policy"));
    if (!parsed) fail(p, fmt::format("unknown scheduler policy '{}'", p.Scalar()));
    net.policy = *parsed;
  }
  try {
    net.validate();
  } catch (const ConfigError& e) {
    fail(node, e.what());
  }
}

void read_adversary(const YAML::Node& node, Scenario& sc) {
  check_keys(node, {"faulty", "leader", "replica", "sets"}, "adversary");
  if (const auto fnode = node["faulty"]) {
    if (fnode.IsScalar() && fnode.Scalar() == "random") {
      sc.random_faulty = true;
      sc.adversary.faulty.clear();
    } else {
      sc.random_faulty = false;
      sc.adversary.faulty = read_ids(fnode, "faulty");
    }
  }
  if (const auto l = node["leader"]) {
    const auto parsed = parse_leader_strategy(scalar<std::string>(l, "leader"));
    if (!parsed) fail(l, fmt::format("unknown leader strategy '{}'", l.Scalar()));
    sc.adversary.leader = *parsed;
  }
  if (const auto r = node["replica"]) {
    const auto parsed = parse_replica_strategy(scalar<std::string>(r, "replica"));
    if (!parsed) fail(r, fmt::format("unknown replica strategy '{}'", r.Scalar()));
    sc.adversary.replica = *parsed;
  }
  if (const auto s = node["sets"]) sc.adversary.sets = read_sets(s, "sets");
}

void read_experiment(const YAML::Node& node, ExperimentSpec& ex) {
  check_keys(node, {"kind", "mode", "trials", "sweep", "plan", "merge", "faulty_next_leader"},
             "experiment");
  if (const auto k = node["kind"]) {
    const auto parsed = parse_experiment_kind(scalar<std::string>(k, "kind"));
    if (!parsed) fail(k, fmt::format("unknown experiment kind '{}'", k.Scalar()));
    ex.kind = *parsed;
  }
  if (const auto m = node["mode"]) {
    const auto parsed = mc::parse_mode(scalar<std::string>(m, "mode"));
    if (!parsed) fail(m, fmt::format("unknown mode '{}'", m.Scalar()));
    ex.mode = *parsed;
  }
  read(node, "trials", ex.trials);
  if (ex.trials == 0) fail(node["trials"], "trials must be at least 1");
  if (const auto s = node["sweep"]) ex.sweep = read_grid(s, "experiment.sweep");
  if (const auto p = node["plan"]) ex.plan = read_sets(p, "plan");
  if (const auto m = node["merge"]) {
    if (!m.IsSequence() || m.size() != 2) fail(m, "'merge' must be a list of two set indices");
    ex.merge_a = scalar<std::uint32_t>(m[0], "merge");
    ex.merge_b = scalar<std::uint32_t>(m[1], "merge");
  }
  read(node, "faulty_next_leader", ex.faulty_next_leader);
}

void validate_experiment(const YAML::Node& node, const Scenario& sc) {
  const auto& ex = sc.experiment;
  const bool needs_plan =
      ex.kind == ExperimentKind::kAgreementGeneral || ex.kind == ExperimentKind::kMergeComparison;
  if (needs_plan) {
    if (ex.sweep) fail(node["sweep"], "a sweep cannot be combined with an explicit plan");
    if (ex.mode != mc::Mode::kOrderFree) fail(node["mode"], "explicit plans run in order_free mode");
    if (ex.plan.empty()) fail(node, "this experiment kind needs a non-empty 'plan'");
    for (const auto& set : ex.plan) {
      for (auto id : set) {
        if (id.value < 1 || id.value > sc.n) fail(node["plan"], fmt::format("replica {} out of range", id.value));
      }
    }
  }
  if (ex.kind == ExperimentKind::kMergeComparison &&
      !(ex.merge_a < ex.merge_b && ex.merge_b < ex.plan.size())) {
    fail(node["merge"] ? node["merge"] : node, "'merge' needs indices a < b inside the plan");
  }
  if (ex.kind == ExperimentKind::kViewChange && ex.mode != mc::Mode::kEventOrdered) {
    fail(node["mode"] ? node["mode"] : node, "view_change runs in event_ordered mode");
  }
  if (ex.kind == ExperimentKind::kPrepareQuorum && ex.mode != mc::Mode::kOrderFree) {
    fail(node["mode"] ? node["mode"] : node, "prepare_quorum runs in order_free mode");
  }
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ScenarioError(e.msg, e.mark.line + 1, e.mark.column + 1);
  }
  Scenario sc;
  if (!root || root.IsNull()) throw ScenarioError("empty scenario");
  check_keys(root,
             {"version", "seed", "parallelism", "protocol", "net", "adversary", "experiment", "run",
              "grid", "msgcount"},
             "scenario");
  if (!root["version"]) fail(root, "missing key 'version'");
  read(root, "version", sc.version);
  if (sc.version != kScenarioVersion) {
    fail(root["version"], fmt::format("unsupported schema version {}", sc.version));
  }
  read(root, "seed", sc.seed);
  read(root, "parallelism", sc.parallelism);
  if (sc.parallelism == 0) fail(root["parallelism"], "parallelism must be at least 1");

  bool explicit_faulty = false;
  if (const auto p = root["protocol"]) {
    check_keys(p, {"n", "f", "l", "o"}, "protocol");
    read(p, "n", sc.n);
    read(p, "f", sc.f);
    read(p, "l", sc.l);
    read(p, "o", sc.o);
    try {
      quorum_sizes(sc.n, sc.f, sc.l, sc.o);
    } catch (const ConfigError& e) {
      fail(p, e.what());
    }
  }
  if (const auto net = root["net"]) read_net(net, sc.net);
  if (const auto adv = root["adversary"]) {
    read_adversary(adv, sc);
    explicit_faulty = static_cast<bool>(adv["faulty"]);
  }
  if (!explicit_faulty) {
    // Default: the last f replicas, so replica 1 leads view 1 correctly.
    sc.adversary.faulty.clear();
    for (std::uint32_t i = sc.n - sc.f + 1; i <= sc.n; ++i) sc.adversary.faulty.push_back(ReplicaId{i});
  }
  if (!sc.random_faulty) {
    try {
      sc.adversary.validate(sc.protocol());
    } catch (const ConfigError& e) {
      fail(root["adversary"] ? root["adversary"] : root, e.what());
    }
  }
  if (const auto ex = root["experiment"]) {
    read_experiment(ex, sc.experiment);
    validate_experiment(ex, sc);
  }
  if (const auto run = root["run"]) {
    check_keys(run, {"runs", "max_views", "trace"}, "run");
    read(run, "runs", sc.run.runs);
    read(run, "max_views", sc.run.max_views);
    read(run, "trace", sc.run.trace);
    if (sc.run.runs == 0) fail(run["runs"], "runs must be at least 1");
    if (sc.run.max_views == 0) fail(run["max_views"], "max_views must be at least 1");
  }
  if (const auto g = root["grid"]) sc.grid = read_grid(g, "grid");
  if (const auto m = root["msgcount"]) {
    check_keys(m, {"n", "l", "o"}, "msgcount");
    read_list(m, "n", sc.msgcount.n);
    read(m, "l", sc.msgcount.l);
    read_list(m, "o", sc.msgcount.o);
    if (sc.msgcount.n.empty() || sc.msgcount.o.empty()) fail(m, "msgcount lists must be non-empty");
    for (auto n : sc.msgcount.n) {
      for (double o : sc.msgcount.o) {
        try {
          quorum_sizes(n, 0, sc.msgcount.l, o);
        } catch (const ConfigError& e) {
          fail(m, e.what());
        }
      }
    }
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(fmt::format("cannot read {}", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str());
}

void apply(Scenario& sc, const Overrides& o) {
  if (o.seed) sc.seed = *o.seed;
  if (o.trials) {
    if (*o.trials == 0) throw ScenarioError("--trials must be at least 1");
    sc.experiment.trials = *o.trials;
    sc.run.runs = static_cast<std::uint32_t>(*o.trials);
  }
  if (o.parallelism) {
    if (*o.parallelism == 0) throw ScenarioError("--parallelism must be at least 1");
    sc.parallelism = *o.parallelism;
  }
}

namespace {

void emit_ids(YAML::Emitter& e, const std::vector<ReplicaId>& ids) {
  e << YAML::Flow << YAML::BeginSeq;
  for (auto id : ids) e << id.value;
  e << YAML::EndSeq;
}

void emit_sets(YAML::Emitter& e, const std::vector<std::vector<ReplicaId>>& sets) {
  e << YAML::Flow << YAML::BeginSeq;
  for (const auto& s : sets) emit_ids(e, s);
  e << YAML::EndSeq;
}

// Shortest round-trip representation.
std::string num(double x) { return fmt::format("{}", x); }

template <class T>
void emit_list(YAML::Emitter& e, const std::vector<T>& xs) {
  e << YAML::Flow << YAML::BeginSeq;
  for (const auto& x : xs) {
    if constexpr (std::is_floating_point_v<T>) {
      e << num(x);
    } else {
      e << x;
    }
  }
  e << YAML::EndSeq;
}

void emit_grid(YAML::Emitter& e, const analysis::Grid& g) {
  e << YAML::BeginMap;
  e << YAML::Key << "n" << YAML::Value;
  emit_list(e, g.n);
  e << YAML::Key << "f_ratio" << YAML::Value;
  emit_list(e, g.f_ratio);
  e << YAML::Key << "o" << YAML::Value;
  emit_list(e, g.o);
  e << YAML::Key << "l" << YAML::Value;
  emit_list(e, g.l);
  e << YAML::EndMap;
}

}  // namespace

std::string echo(const Scenario& sc) {
  YAML::Emitter e;
  e << YAML::BeginMap;
  e << YAML::Key << "version" << YAML::Value << sc.version;
  e << YAML::Key << "seed" << YAML::Value << sc.seed;
  e << YAML::Key << "parallelism" << YAML::Value << sc.parallelism;

  e << YAML::Key << "protocol" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "n" << YAML::Value << sc.n;
  e << YAML::Key << "f" << YAML::Value << sc.f;
  e << YAML::Key << "l" << YAML::Value << num(sc.l);
  e << YAML::Key << "o" << YAML::Value << num(sc.o);
  e << YAML::EndMap;

  e << YAML::Key << "net" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "gst" << YAML::Value << sc.net.gst;
  e << YAML::Key << "delta" << YAML::Value << sc.net.delta;
  e << YAML::Key << "pre_gst_max_delay" << YAML::Value << sc.net.pre_gst_max_delay;
  e << YAML::Key << "view_duration" << YAML::Value << sc.net.view_duration;
  e << YAML::Key << "fixed_delay" << YAML::Value << sc.net.fixed_delay;
  e << YAML::Key << "post_gst_skew" << YAML::Value << sc.net.post_gst_skew;
  e << YAML::Key << "policy" << YAML::Value << std::string(to_string(sc.net.policy));
  e << YAML::EndMap;

  e << YAML::Key << "adversary" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "faulty" << YAML::Value;
  if (sc.random_faulty) {
    e << "random";
  } else {
    emit_ids(e, sc.adversary.faulty);
  }
  e << YAML::Key << "leader" << YAML::Value << std::string(to_string(sc.adversary.leader));
  e << YAML::Key << "replica" << YAML::Value << std::string(to_string(sc.adversary.replica));
  e << YAML::Key << "sets" << YAML::Value;
  emit_sets(e, sc.adversary.sets);
  e << YAML::EndMap;

  const auto& ex = sc.experiment;
  e << YAML::Key << "experiment" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "kind" << YAML::Value << std::string(to_string(ex.kind));
  e << YAML::Key << "mode" << YAML::Value << std::string(mc::to_string(ex.mode));
  e << YAML::Key << "trials" << YAML::Value << ex.trials;
  if (ex.sweep) {
    e << YAML::Key << "sweep" << YAML::Value;
    emit_grid(e, *ex.sweep);
  }
  e << YAML::Key << "plan" << YAML::Value;
  emit_sets(e, ex.plan);
  e << YAML::Key << "merge" << YAML::Value << YAML::Flow << YAML::BeginSeq << ex.merge_a << ex.merge_b
    << YAML::EndSeq;
  e << YAML::Key << "faulty_next_leader" << YAML::Value << ex.faulty_next_leader;
  e << YAML::EndMap;

  e << YAML::Key << "run" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "runs" << YAML::Value << sc.run.runs;
  e << YAML::Key << "max_views" << YAML::Value << sc.run.max_views;
  e << YAML::Key << "trace" << YAML::Value << sc.run.trace;
  e << YAML::EndMap;

  e << YAML::Key << "grid" << YAML::Value;
  emit_grid(e, sc.grid);

  e << YAML::Key << "msgcount" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "n" << YAML::Value;
  emit_list(e, sc.msgcount.n);
  e << YAML::Key << "l" << YAML::Value << num(sc.msgcount.l);
  e << YAML::Key << "o" << YAML::Value;
  emit_list(e, sc.msgcount.o);
  e << YAML::EndMap;

  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

}  // namespace probft::cli
