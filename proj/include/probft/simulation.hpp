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
#include <functional>
#include <vector>

#include "probft/adversary.hpp"
#include "probft/config.hpp"
#include "probft/simnet.hpp"

namespace probft {

struct SimulationOptions {
  std::uint32_t max_views = 10;
  TraceWriter* trace = nullptr;
  ValidFn app_valid = always_valid;
  /// Observer for every scheduled delivery (sender, recipient, send time,
  /// delivery time). Harness use only.
  std::function<void(ReplicaId, ReplicaId, Tick, Tick)> on_schedule;
};

/// Value a correct replica proposes when it leads.
Value replica_value(ReplicaId id);

/// Runs the protocol over the simulated network until every correct replica
/// has decided or max_views views have elapsed. A pure function of its
/// arguments (the RNG seed lives in cfg).
RunMetrics run_simulation(const ProtocolConfig& cfg, const NetConfig& net,
                          const AdversarySpec& adversary, const SimulationOptions& options = {});

}  // namespace probft
