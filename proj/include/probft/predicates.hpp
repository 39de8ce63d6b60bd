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

#include <functional>
#include <span>

#include "probft/config.hpp"
#include "probft/crypto.hpp"
#include "probft/message.hpp"

namespace probft {

/// Application validity predicate for proposed values.
using ValidFn = std::function<bool(const Value&)>;

inline bool always_valid(const Value&) { return true; }

/// True iff `m` is a Prepare/Commit of `kind` for view v carrying a pair
/// signed by leader(v), sent by a correctly signed sender whose VRF sample
/// for (v, phase) verifies and contains `recipient`.
bool valid_vote(const Message& m, MessageKind kind, ReplicaId recipient, const ProtocolConfig& cfg,
                const crypto::Verifier& verifier);

/// prepared(C, v, x, j): C is exactly q Prepare messages from q distinct
/// senders for <v, x> signed by leader(v), each sample containing j and each
/// VRF proof valid for seed v || prepare.
bool prepared(std::span<const MessagePtr> certificate, View v, const Value& x, ReplicaId j,
              const ProtocolConfig& cfg, const crypto::Verifier& verifier);

bool prepared(const PreparedCertificate& cert, const ProtocolConfig& cfg,
              const crypto::Verifier& verifier);

/// validNewLeader(m): prepared_view < view, and a non-zero prepared_view is
/// backed by a certificate for (prepared_view, prepared_val, sender).
bool valid_new_leader(const Message& m, const ProtocolConfig& cfg,
                      const crypto::Verifier& verifier);

/// Max-view-then-mode proposal rule. Ties in the mode go to the smallest
/// value in byte order; each sender votes once. Returns my_value when no
/// message in `new_leaders` is prepared.
Value select_proposal(std::span<const MessagePtr> new_leaders, const Value& my_value);

/// safeProposal(m).
bool safe_proposal(const Message& m, const ProtocolConfig& cfg, const crypto::Verifier& verifier,
                   const ValidFn& app_valid);

}  // namespace probft
