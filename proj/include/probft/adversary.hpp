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
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "probft/config.hpp"
#include "probft/crypto.hpp"
#include "probft/message.hpp"
#include "probft/replica.hpp"

namespace probft {

enum class LeaderStrategy { kHonest, kSilent, kEquivGeneral, kEquivSuboptimal, kEquivOptimal };
enum class ReplicaStrategy { kSilent, kPartitionConsistent };

std::string_view to_string(LeaderStrategy s);
std::string_view to_string(ReplicaStrategy s);
std::optional<LeaderStrategy> parse_leader_strategy(std::string_view s);
std::optional<ReplicaStrategy> parse_replica_strategy(std::string_view s);

struct AdversarySpec {
  std::vector<ReplicaId> faulty;  // fixed for the whole run
  LeaderStrategy leader = LeaderStrategy::kSilent;
  ReplicaStrategy replica = ReplicaStrategy::kSilent;
  std::vector<std::vector<ReplicaId>> sets;  // EquivGeneral partition, may overlap

  bool is_faulty(ReplicaId id) const;
  /// Throws ConfigError if the strategy does not fit the configuration.
  void validate(const ProtocolConfig& cfg) const;
};

/// f distinct replicas drawn uniformly from [1, n], sorted.
std::vector<ReplicaId> random_faulty_set(std::uint32_t n, std::uint32_t f, std::mt19937_64& rng);

/// What a Byzantine leader sends in one view. assignment[id - 1] lists the
/// proposal indices replica id receives; an empty list means no proposal at all.
struct PartitionPlan {
  View view;
  std::vector<Value> proposals;
  std::vector<std::vector<std::uint32_t>> assignment;
  std::vector<std::vector<MessagePtr>> justification;  // per proposal, views > 1

  /// Proposal index a replica's partition is associated with, if any.
  std::optional<std::uint32_t> primary(ReplicaId id) const;
};

/// Structural split for the equivocating strategies (values still to be
/// filled in). For Honest the plan has one proposal sent to everyone.
PartitionPlan make_partition(const AdversarySpec& spec, const ProtocolConfig& cfg, View view);

/// Options the adversary has when assembling a NewLeader justification: one
/// fixed message per correct sender plus, for each faulty replica, every
/// NewLeader it could sign (always including an unprepared one).
class JustificationPool {
 public:
  void add_correct(const MessagePtr& m);
  void add_faulty(ReplicaId id, std::vector<MessagePtr> options);

  std::size_t slots() const { return slots_.size(); }

  /// Some set of det_quorum messages, at most one per sender, under which
  /// select_proposal yields x when the leader's own value is `fallback`.
  /// Returns nothing when no such set exists. Exact, not heuristic.
  std::optional<std::vector<MessagePtr>> justify(const Value& x, const Value& fallback,
                                                 std::size_t det_quorum) const;

  /// Same question answered by enumerating every subset and option choice.
  /// Exponential; used to cross-check justify() on small pools.
  bool justifiable_exhaustive(const Value& x, const Value& fallback, std::size_t det_quorum) const;

  /// Prepared values that appear in some option, ascending.
  std::vector<Value> prepared_values() const;

 private:
  struct Slot {
    ReplicaId sender;
    std::vector<MessagePtr> options;
  };
  std::vector<Slot> slots_;
};

/// Colluding adversary driving every faulty replica. It owns the faulty
/// replicas' signers only; correct keys never reach it.
class Adversary {
 public:
  Adversary(AdversarySpec spec, const ProtocolConfig& cfg,
            std::map<ReplicaId, crypto::Signer> signers, const crypto::Verifier& verifier);

  Actions on_new_view(ReplicaId who, View v);
  Actions on_message(ReplicaId who, const MessagePtr& m);

  const std::vector<PartitionPlan>& plans() const { return plans_; }
  void set_plan_sink(std::function<void(const PartitionPlan&)> sink) { plan_sink_ = std::move(sink); }

  static Value fresh_value(View v, std::uint32_t index);

 private:
  struct CertKey {
    View view;
    Value value;
    ReplicaId holder;
    auto operator<=>(const CertKey&) const = default;
  };
  struct ViewInbox {
    std::vector<MessagePtr> new_leaders;  // valid, from correct senders, arrival order
    std::set<ReplicaId> senders;
    bool acted = false;
  };

  void lead(View v, Actions& out);
  void fill_values(PartitionPlan& plan);
  void emit(const PartitionPlan& plan, Actions& out);
  void vote(const crypto::Signer& who, MessageKind kind, const PartitionPlan& plan,
            const std::vector<SignedProposal>& pairs, Actions& out);
  JustificationPool pool_for(View v) const;

  AdversarySpec spec_;
  ProtocolConfig cfg_;
  std::map<ReplicaId, crypto::Signer> signers_;
  const crypto::Verifier& verifier_;
  std::function<void(const PartitionPlan&)> plan_sink_;

  std::map<View, ViewInbox> inbox_;
  std::map<CertKey, std::vector<MessagePtr>> prepares_;  // delivered to faulty replicas
  std::map<CertKey, CertificatePtr> certs_;
  std::vector<PartitionPlan> plans_;
};

}  // namespace probft
