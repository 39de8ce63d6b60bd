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

#include "probft/montecarlo.hpp"

namespace probft::mc::detail {

TerminationResult termination_order_free(const ProtocolConfig& cfg, std::uint64_t trials,
                                         const Control& ctl);
AgreementResult agreement_order_free(const ProtocolConfig& cfg, std::uint64_t trials,
                                     const Control& ctl);

std::vector<ReplicaId> leading_faulty(std::uint32_t f);

}  // namespace probft::mc::detail
