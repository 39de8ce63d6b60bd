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

#include "probft/predicates.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace probft {
namespace {

crypto::Phase phase_of(MessageKind kind) {
  return kind == MessageKind::kCommit ? crypto::Phase::kCommit : crypto::Phase::kPrepare;
}

}  // namespace

bool valid_vote(const Message& m, MessageKind kind, ReplicaId recipient, const ProtocolConfig& cfg,
                const crypto::Verifier& verifier) {
  if (m.kind != kind || !m.proposal || !m.proof) return false;
  const View v = m.view;
  if (v.is_none() || m.proposal->view != v) return false;
  if (m.proposal->signer != cfg.leader_of(v)) return false;
  if (!std::binary_search(m.sample.begin(), m.sample.end(), recipient)) return false;
  if (!verify_proposal_pair(*m.proposal, verifier)) return false;
  if (!verify_signature(m, verifier)) return false;
  const auto seed = crypto::vrf_seed(v, phase_of(kind));
  return verifier.vrf_verify(m.sender, seed, cfg.s(), m.sample, *m.proof);
}

bool prepared(std::span<const MessagePtr> certificate, View v, const Value& x, ReplicaId j,
              const ProtocolConfig& cfg, const crypto::Verifier& verifier) {
  if (certificate.size() != cfg.q()) return false;
  std::set<ReplicaId> senders;
  for (const auto& m : certificate) {
    if (!m || m->view != v || !m->proposal || m->proposal->value != x) return false;
    if (!senders.insert(m->sender).second) return false;
    if (!valid_vote(*m, MessageKind::kPrepare, j, cfg, verifier)) return false;
  }
  return true;
}

bool prepared(const PreparedCertificate& cert, const ProtocolConfig& cfg,
              const crypto::Verifier& verifier) {
  return prepared(cert.prepares, cert.view, cert.value, cert.holder, cfg, verifier);
}

bool valid_new_leader(const Message& m, const ProtocolConfig& cfg,
                      const crypto::Verifier& verifier) {
  if (m.kind != MessageKind::kNewLeader) return false;
  if (!(m.prepared_view < m.view)) return false;
  if (!verify_signature(m, verifier)) return false;
  if (m.prepared_view.is_none()) return true;
  if (!m.cert || !m.prepared_val) return false;
  const auto& c = *m.cert;
  if (c.view != m.prepared_view || c.value != *m.prepared_val || c.holder != m.sender) return false;
  return prepared(c.prepares, m.prepared_view, *m.prepared_val, m.sender, cfg, verifier);
}

Value select_proposal(std::span<const MessagePtr> new_leaders, const Value& my_value) {
  // One vote per distinct sender; the first message seen from a sender wins.
  std::map<ReplicaId, const Message*> by_sender;
  for (const auto& m : new_leaders) by_sender.emplace(m->sender, m.get());

  View v_max;
  for (const auto& [id, m] : by_sender) v_max = std::max(v_max, m->prepared_view);
  if (v_max.is_none()) return my_value;

  std::map<Value, std::size_t> votes;
  for (const auto& [id, m] : by_sender) {
    if (m->prepared_view == v_max && m->prepared_val) ++votes[*m->prepared_val];
  }
  // std::map iterates in ascending byte order, so the first maximum wins ties.
  const Value* best = nullptr;
  std::size_t best_count = 0;
  for (const auto& [value, count] : votes) {
    if (count > best_count) {
      best = &value;
      best_count = count;
    }
  }
  return best ? *best : my_value;
}

bool safe_proposal(const Message& m, const ProtocolConfig& cfg, const crypto::Verifier& verifier,
                   const ValidFn& app_valid) {
  if (m.kind != MessageKind::kPropose || !m.proposal) return false;
  const View v = m.view;
  if (v.is_none() || m.proposal->view != v) return false;
  const ReplicaId expected = cfg.leader_of(v);
  if (m.sender != expected || m.proposal->signer != expected) return false;
  if (!verify_proposal_pair(*m.proposal, verifier) || !verify_signature(m, verifier)) return false;
  const Value& x = m.proposal->value;
  if (!app_valid(x)) return false;
  if (v == View{1}) return true;

  std::set<ReplicaId> senders;
  for (const auto& nl : m.justification) {
    if (!nl || nl->view != v) return false;
    if (!senders.insert(nl->sender).second) return false;
    if (!valid_new_leader(*nl, cfg, verifier)) return false;
  }
  if (senders.size() < cfg.det_quorum()) return false;
  return select_proposal(m.justification, x) == x;
}

}  // namespace probft
