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

#include "probft/replica.hpp"

#include <algorithm>

namespace probft {

Replica::Replica(ReplicaId self, const ProtocolConfig& cfg, crypto::Signer signer,
                 const crypto::Verifier& verifier, Value my_value, ValidFn app_valid)
    : self_(self),
      cfg_(cfg),
      signer_(std::move(signer)),
      verifier_(verifier),
      my_value_(std::move(my_value)),
      app_valid_(std::move(app_valid)) {}

void Replica::note(NoteKind kind, const Value& value) const {
  if (notes_) notes_(ReplicaNote{kind, self_, state_.cur_view, value});
}

Actions Replica::on_new_view(View v) {
  Actions out;
  if (v <= state_.cur_view) return out;

  state_.cur_view = v;
  state_.cur_val.reset();
  state_.voted = false;
  state_.block_view = false;
  state_.proposal.reset();
  prepares_.clear();
  commits_.clear();
  new_leaders_ = {};
  proposed_ = false;
  decided_this_view_ = false;
  early_pairs_.clear();

  std::vector<MessagePtr> held;
  for (auto& m : next_view_) {
    if (m->view == v) held.push_back(std::move(m));
  }
  next_view_.clear();

  if (v == View{1}) {
    if (self_ == cfg_.leader_of(v)) propose(my_value_, {}, out);
  } else {
    auto nl = make_new_leader(signer_, v, state_.prepared_view, state_.prepared_val, state_.cert);
    out.push_back(SendAction{{cfg_.leader_of(v)}, std::move(nl)});
  }
  for (const auto& m : held) process(m, out);
  return out;
}

Actions Replica::on_message(const MessagePtr& m) {
  Actions out;
  if (!m) return out;
  if (m->view == state_.cur_view && !m->view.is_none()) {
    process(m, out);
  } else if (m->view == state_.cur_view.next()) {
    next_view_.push_back(m);
  }
  return out;
}

void Replica::process(const MessagePtr& m, Actions& out) {
  if (check_equivocation(m, out)) return;
  if (state_.block_view) return;
  switch (m->kind) {
    case MessageKind::kPropose:
      handle_propose(m, out);
      break;
    case MessageKind::kNewLeader:
      handle_new_leader(m, out);
      break;
    case MessageKind::kPrepare:
    case MessageKind::kCommit:
      handle_vote(m, out);
      break;
  }
}

bool Replica::check_equivocation(const MessagePtr& m, Actions& out) {
  if (m->kind == MessageKind::kNewLeader || !m->proposal) return false;
  const auto& pair = *m->proposal;
  if (state_.block_view || pair.view != state_.cur_view) return false;
  if (pair.signer != cfg_.leader_of(pair.view)) return false;
  if (!state_.voted) {
    const bool seen = std::any_of(early_pairs_.begin(), early_pairs_.end(), [&](const auto& e) {
      return e->proposal->value == pair.value;
    });
    if (!seen) early_pairs_.push_back(m);
    return false;
  }
  if (*state_.cur_val == pair.value) return false;
  if (!verify_proposal_pair(pair, verifier_)) return false;

  state_.block_view = true;
  out.push_back(BroadcastAction{m});
  out.push_back(BroadcastAction{state_.proposal});
  note(NoteKind::kBlocked, pair.value);
  return true;
}

void Replica::handle_propose(const MessagePtr& m, Actions& out) {
  if (state_.block_view || state_.voted || m->view != state_.cur_view) return;
  if (!safe_proposal(*m, cfg_, verifier_, app_valid_)) return;

  const auto& pair = *m->proposal;
  state_.cur_val = pair.value;
  state_.voted = true;
  state_.proposal = m;
  note(NoteKind::kVoted, pair.value);

  const auto seed = crypto::vrf_seed(state_.cur_view, crypto::Phase::kPrepare);
  auto vrf = signer_.vrf_prove(seed, cfg_.s(), cfg_.n());
  auto recipients = vrf.sample;
  out.push_back(SendAction{
      std::move(recipients),
      make_vote(signer_, MessageKind::kPrepare, pair, std::move(vrf.sample), std::move(vrf.proof))});

  // Pairs that arrived before the vote may now conflict with it.
  const auto early = std::move(early_pairs_);
  early_pairs_.clear();
  for (const auto& e : early) {
    if (check_equivocation(e, out)) return;
  }
  try_prepare_quorum(out);
}

void Replica::handle_new_leader(const MessagePtr& m, Actions& out) {
  if (proposed_ || self_ != cfg_.leader_of(state_.cur_view)) return;
  if (new_leaders_.senders.contains(m->sender)) return;
  if (!valid_new_leader(*m, cfg_, verifier_)) return;
  new_leaders_.senders.insert(m->sender);
  new_leaders_.arrival.push_back(m);
  if (new_leaders_.arrival.size() >= cfg_.det_quorum()) on_new_leader_quorum(out);
}

void Replica::on_new_leader_quorum(Actions& out) {
  std::vector<MessagePtr> quorum(new_leaders_.arrival.begin(),
                                 new_leaders_.arrival.begin() + cfg_.det_quorum());
  const Value x = select_proposal(quorum, my_value_);
  note(NoteKind::kNewLeaderQuorum, x);
  propose(x, std::move(quorum), out);
}

void Replica::propose(const Value& x, std::vector<MessagePtr> justification, Actions& out) {
  proposed_ = true;
  auto m = make_propose(signer_, sign_proposal(signer_, state_.cur_view, x), std::move(justification));
  out.push_back(BroadcastAction{m});
  note(NoteKind::kProposed, x);
  handle_propose(m, out);
}

void Replica::handle_vote(const MessagePtr& m, Actions& out) {
  auto& book = m->kind == MessageKind::kPrepare ? prepares_ : commits_;
  const auto& x = m->proposal ? m->proposal->value : Value{};
  auto& votes = book[x];
  if (votes.senders.contains(m->sender)) return;
  if (!valid_vote(*m, m->kind, self_, cfg_, verifier_)) return;
  votes.senders.insert(m->sender);
  votes.arrival.push_back(m);
  if (m->kind == MessageKind::kPrepare) {
    try_prepare_quorum(out);
  } else {
    try_commit_quorum(out);
  }
}

void Replica::try_prepare_quorum(Actions& out) {
  if (state_.block_view || !state_.voted || state_.prepared_view == state_.cur_view) return;
  auto it = prepares_.find(*state_.cur_val);
  if (it == prepares_.end() || it->second.arrival.size() < cfg_.q()) return;

  auto cert = std::make_shared<PreparedCertificate>();
  cert->view = state_.cur_view;
  cert->value = *state_.cur_val;
  cert->holder = self_;
  cert->prepares.assign(it->second.arrival.begin(), it->second.arrival.begin() + cfg_.q());

  state_.prepared_val = state_.cur_val;
  state_.prepared_view = state_.cur_view;
  state_.cert = std::move(cert);
  note(NoteKind::kPrepared, *state_.cur_val);

  const auto seed = crypto::vrf_seed(state_.cur_view, crypto::Phase::kCommit);
  auto vrf = signer_.vrf_prove(seed, cfg_.s(), cfg_.n());
  auto recipients = vrf.sample;
  out.push_back(SendAction{std::move(recipients),
                           make_vote(signer_, MessageKind::kCommit, *state_.proposal->proposal,
                                     std::move(vrf.sample), std::move(vrf.proof))});
  try_commit_quorum(out);
}

void Replica::try_commit_quorum(Actions& out) {
  if (state_.block_view || decided_this_view_ || state_.prepared_view != state_.cur_view) return;
  auto it = commits_.find(*state_.prepared_val);
  if (it == commits_.end() || it->second.arrival.size() < cfg_.q()) return;

  decided_this_view_ = true;
  if (!state_.decided) {
    state_.decided = state_.cur_val;
    state_.decided_view = state_.cur_view;
  }
  out.push_back(DecideAction{state_.cur_view, *state_.cur_val});
  note(NoteKind::kDecided, *state_.cur_val);
}

}  // namespace probft
