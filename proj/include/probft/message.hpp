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

#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "probft/crypto.hpp"
#include "probft/types.hpp"

namespace probft {

struct Message;
using MessagePtr = std::shared_ptr<const Message>;

/// The pair <v, x> signed by the leader of v. Carried verbatim by Propose,
/// Prepare and Commit so equivocation is detectable from any phase.
struct SignedProposal {
  View view;
  Value value;
  ReplicaId signer;
  crypto::Signature signature;

  bool operator==(const SignedProposal&) const = default;
};

/// q Prepare messages for (view, value), all naming `holder` in their samples.
struct PreparedCertificate {
  View view;
  Value value;
  ReplicaId holder;
  std::vector<MessagePtr> prepares;
};

using CertificatePtr = std::shared_ptr<const PreparedCertificate>;

/// Tagged union of the four protocol messages. Fields not used by a kind are
/// left empty; the canonical encoding writes them anyway so the layout is
/// identical for every kind.
struct Message {
  MessageKind kind = MessageKind::kPropose;
  View view;
  std::optional<SignedProposal> proposal;  // Propose / Prepare / Commit
  std::vector<MessagePtr> justification;   // Propose, views > 1
  View prepared_view;                      // NewLeader; 0 = never prepared
  std::optional<Value> prepared_val;       // NewLeader
  CertificatePtr cert;                     // NewLeader
  std::vector<ReplicaId> sample;           // Prepare / Commit, sorted
  std::optional<crypto::VrfProof> proof;   // Prepare / Commit
  ReplicaId sender;
  crypto::Signature signature;

  /// Canonical encoding of every field before `signature`; what gets signed.
  Bytes body;
};

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Canonical big-endian, length-prefixed encoding.
Bytes encode_body(const Message& m);
Bytes encode(const Message& m);
Bytes encode(const PreparedCertificate& c);
Bytes encode_proposal_pair(View view, const Value& value);
MessagePtr decode_message(std::span<const std::uint8_t> bytes);
PreparedCertificate decode_certificate(std::span<const std::uint8_t> bytes);

// Builders; each returns a fully signed message.
SignedProposal sign_proposal(const crypto::Signer& leader, View view, const Value& value);
MessagePtr make_propose(const crypto::Signer& leader, SignedProposal pair,
                        std::vector<MessagePtr> justification);
MessagePtr make_new_leader(const crypto::Signer& sender, View view, View prepared_view,
                           std::optional<Value> prepared_val, CertificatePtr cert);
MessagePtr make_vote(const crypto::Signer& sender, MessageKind kind, SignedProposal pair,
                     std::vector<ReplicaId> sample, crypto::VrfProof proof);

/// Re-signs a copy of `m` after `mutate` has edited it. Test and adversary
/// helper; the result is signed by `signer`, which need not be m.sender.
template <class F>
MessagePtr resign(const crypto::Signer& signer, const Message& m, F&& mutate) {
  Message copy = m;
  mutate(copy);
  copy.sender = signer.id();
  copy.body = encode_body(copy);
  copy.signature = signer.sign(copy.body);
  return std::make_shared<const Message>(std::move(copy));
}

bool verify_signature(const Message& m, const crypto::Verifier& verifier);
bool verify_proposal_pair(const SignedProposal& pair, const crypto::Verifier& verifier);

}  // namespace probft
