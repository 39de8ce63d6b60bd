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
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "probft/adversary.hpp"
#include "probft/analysis.hpp"
#include "probft/montecarlo.hpp"
#include "probft/simnet.hpp"

namespace probft::cli {

inline constexpr int kScenarioVersion = 1;

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNonQuiescent = 3;

inline constexpr const char* kEstimatesCsvVersion = "# probft-estimates v1";
inline constexpr const char* kMetricsCsvVersion = "# probft-metrics v1";
inline constexpr const char* kRunsCsvVersion = "# probft-runs v1";

/// Scenario validation failure. line/column are 1-based; 0 when unknown.
class ScenarioError : public ConfigError {
 public:
  ScenarioError(const std::string& what, int line = 0, int column = 0);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

enum class ExperimentKind {
  kPrepareQuorum,
  kTermination,
  kAgreementOptimalSplit,
  kAgreementGeneral,
  kMergeComparison,
  kViewChange,
};
std::string_view to_string(ExperimentKind k);
std::optional<ExperimentKind> parse_experiment_kind(std::string_view s);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::kTermination;
  mc::Mode mode = mc::Mode::kOrderFree;
  std::uint64_t trials = 10000;
  /// When set, the experiment is repeated over the grid instead of the
  /// single protocol point.
  std::optional<analysis::Grid> sweep;
  std::vector<std::vector<ReplicaId>> plan;  // general split / merge source
  std::uint32_t merge_a = 0;
  std::uint32_t merge_b = 1;
  bool faulty_next_leader = true;  // view-change experiment
};

struct RunSpec {
  std::uint32_t runs = 1;
  std::uint32_t max_views = 10;
  bool trace = true;  // trace of run 0
};

struct MsgCountSpec {
  std::vector<std::uint32_t> n{4, 100, 150, 200, 250, 300, 350, 400};
  double l = 2;
  std::vector<double> o{1.6, 1.7, 1.8};
};

inline AdversarySpec default_adversary() {
  AdversarySpec a;
  a.faulty = {ReplicaId{4}};
  return a;
}

struct Scenario {
  int version = kScenarioVersion;
  std::uint64_t seed = 1;
  std::uint32_t parallelism = 1;
  std::uint32_t n = 4;
  std::uint32_t f = 1;
  double l = 1;
  double o = 2;
  NetConfig net = NetConfig::with_defaults(10);
  AdversarySpec adversary = default_adversary();  // last f replicas, silent
  bool random_faulty = false;  // `faulty: random`, redrawn for every run
  ExperimentSpec experiment;
  RunSpec run;
  analysis::Grid grid;
  MsgCountSpec msgcount;

  ProtocolConfig protocol() const;
};

/// Command-line overrides applied on top of the file.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint32_t> parallelism;
};

/// Parses and validates a schema-v1 scenario. Unknown keys, wrong types and
/// model violations throw ScenarioError with the offending position.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);
void apply(Scenario& sc, const Overrides& o);

/// The fully defaulted scenario as YAML. Parsing the echo reproduces it.
std::string echo(const Scenario& sc);

// Commands write into `out` (created if needed) and return an exit code.
int cmd_analyze(const Scenario& sc, const std::filesystem::path& out);
int cmd_simulate(const Scenario& sc, const std::filesystem::path& out);
int cmd_run(const Scenario& sc, const std::filesystem::path& out);
int cmd_msgcount(const Scenario& sc, const std::filesystem::path& out);

}  // namespace probft::cli
