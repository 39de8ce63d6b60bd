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
#include <map>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "probft/config.hpp"
#include "probft/crypto.hpp"
#include "probft/message.hpp"
#include "probft/predicates.hpp"

namespace probft {

struct SendAction {
  std::vector<ReplicaId> recipients;
  MessagePtr msg;
};

/// Delivered to every replica other than the sender.
struct BroadcastAction {
  MessagePtr msg;
};

struct DecideAction {
  View view;
  Value value;
};

using Action = std::variant<SendAction, BroadcastAction, DecideAction>;
using Actions = std::vector<Action>;

struct ReplicaState {
  View cur_view;
  std::optional<Value> cur_val;
  bool voted = false;
  bool block_view = false;
  MessagePtr proposal;
  std::optional<Value> prepared_val;
  View prepared_view;
  CertificatePtr cert;
  std::optional<Value> decided;
  View decided_view;
};

/// State transitions reported to the trace.
enum class NoteKind {
  kProposed,
  kNewLeaderQuorum,
  kVoted,
  kPrepared,
  kDecided,
  kBlocked,
};

struct ReplicaNote {
  NoteKind kind;
  ReplicaId replica;
  View view;
  Value value;
};

using NoteSink = std::function<void(const ReplicaNote&)>;

/// One correct replica running the protocol. Event driven: the caller feeds
/// view notifications and inbound messages and executes the returned actions.
class Replica {
 public:
  Replica(ReplicaId self, const ProtocolConfig& cfg, crypto::Signer signer,
          const crypto::Verifier& verifier, Value my_value, ValidFn app_valid = always_valid);

  ReplicaId id() const { return self_; }
  const ReplicaState& state() const { return state_; }
  void set_note_sink(NoteSink sink) { notes_ = std::move(sink); }

  /// Synchronizer notification. Stale views (v <= curView) are ignored.
  Actions on_new_view(View v);

  /// Inbound message from any sender. Messages for the next view are held
  /// until that view starts; anything older or further ahead is dropped.
  Actions on_message(const MessagePtr& m);

 private:
  struct Votes {
    std::vector<MessagePtr> arrival;
    std::set<ReplicaId> senders;
  };

  void process(const MessagePtr& m, Actions& out);
  bool check_equivocation(const MessagePtr& m, Actions& out);
  void handle_propose(const MessagePtr& m, Actions& out);
  void handle_new_leader(const MessagePtr& m, Actions& out);
  void handle_vote(const MessagePtr& m, Actions& out);
  void on_new_leader_quorum(Actions& out);
  void try_prepare_quorum(Actions& out);
  void try_commit_quorum(Actions& out);
  void propose(const Value& x, std::vector<MessagePtr> justification, Actions& out);
  void note(NoteKind kind, const Value& value) const;

  ReplicaId self_;
  ProtocolConfig cfg_;
  crypto::Signer signer_;
  const crypto::Verifier& verifier_;
  Value my_value_;
  ValidFn app_valid_;
  NoteSink notes_;

  ReplicaState state_;

  // Per-view buffers, reset on every view change.
  std::map<Value, Votes> prepares_;
  std::map<Value, Votes> commits_;
  Votes new_leaders_;
  bool proposed_ = false;
  bool decided_this_view_ = false;
  std::vector<MessagePtr> early_pairs_;  // leader-signed pairs seen before voting
  std::vector<MessagePtr> next_view_;    // held for curView + 1
};

}  // namespace probft
