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

#include "probft/adversary.hpp"

#include <algorithm>
#include <string>

#include "probft/predicates.hpp"
#include "probft/random.hpp"

namespace probft {

std::string_view to_string(LeaderStrategy s) {
  switch (s) {
    case LeaderStrategy::kHonest:
      return "honest";
    case LeaderStrategy::kSilent:
      return "silent";
    case LeaderStrategy::kEquivGeneral:
      return "equiv_general";
    case LeaderStrategy::kEquivSuboptimal:
      return "equiv_suboptimal";
    case LeaderStrategy::kEquivOptimal:
      return "equiv_optimal";
  }
  return "unknown";
}

std::string_view to_string(ReplicaStrategy s) {
  return s == ReplicaStrategy::kSilent ? "silent" : "partition_consistent";
}

std::optional<LeaderStrategy> parse_leader_strategy(std::string_view s) {
  for (auto v : {LeaderStrategy::kHonest, LeaderStrategy::kSilent, LeaderStrategy::kEquivGeneral,
                 LeaderStrategy::kEquivSuboptimal, LeaderStrategy::kEquivOptimal}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

std::optional<ReplicaStrategy> parse_replica_strategy(std::string_view s) {
  for (auto v : {ReplicaStrategy::kSilent, ReplicaStrategy::kPartitionConsistent}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

bool AdversarySpec::is_faulty(ReplicaId id) const {
  return std::find(faulty.begin(), faulty.end(), id) != faulty.end();
}

void AdversarySpec::validate(const ProtocolConfig& cfg) const {
  std::set<ReplicaId> seen;
  for (auto id : faulty) {
    if (!cfg.contains(id)) throw ConfigError("faulty replica " + std::to_string(id.value) + " out of range");
    if (!seen.insert(id).second) throw ConfigError("faulty replica listed twice");
  }
  if (faulty.size() != cfg.f()) {
    throw ConfigError("faulty set has " + std::to_string(faulty.size()) + " members, f is " +
                      std::to_string(cfg.f()));
  }
  if (leader == LeaderStrategy::kEquivGeneral) {
    if (sets.empty()) throw ConfigError("equiv_general needs at least one set");
    for (const auto& s : sets) {
      for (auto id : s) {
        if (!cfg.contains(id)) throw ConfigError("partition member out of range");
      }
    }
  }
}

std::vector<ReplicaId> random_faulty_set(std::uint32_t n, std::uint32_t f, std::mt19937_64& rng) {
  SampleScratch scratch(n);
  std::vector<std::uint32_t> idx;
  scratch.draw(rng, n, f, idx);
  std::vector<ReplicaId> out;
  for (auto i : idx) out.push_back(ReplicaId{i + 1});
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<std::uint32_t> PartitionPlan::primary(ReplicaId id) const {
  const auto& a = assignment[id.value - 1];
  if (a.empty()) return std::nullopt;
  return a.front();
}

PartitionPlan make_partition(const AdversarySpec& spec, const ProtocolConfig& cfg, View view) {
  PartitionPlan plan;
  plan.view = view;
  plan.assignment.assign(cfg.n(), {});
  auto give = [&](ReplicaId id, std::uint32_t k) {
    auto& a = plan.assignment[id.value - 1];
    if (std::find(a.begin(), a.end(), k) == a.end()) a.push_back(k);
  };

  switch (spec.leader) {
    case LeaderStrategy::kSilent:
      return plan;
    case LeaderStrategy::kHonest:
      plan.proposals.resize(1);
      for (std::uint32_t i = 1; i <= cfg.n(); ++i) give(ReplicaId{i}, 0);
      break;
    case LeaderStrategy::kEquivOptimal: {
      plan.proposals.resize(2);
      std::vector<ReplicaId> correct;
      for (std::uint32_t i = 1; i <= cfg.n(); ++i) {
        if (!spec.is_faulty(ReplicaId{i})) correct.push_back(ReplicaId{i});
      }
      const std::size_t half = correct.size() / 2;
      for (std::size_t k = 0; k < correct.size(); ++k) give(correct[k], k < half ? 0 : 1);
      for (auto id : spec.faulty) {
        give(id, 0);
        give(id, 1);
      }
      break;
    }
    case LeaderStrategy::kEquivSuboptimal:
      plan.proposals.resize(2);
      for (std::uint32_t i = 1; i <= cfg.n(); ++i) give(ReplicaId{i}, i <= cfg.n() / 2 ? 0 : 1);
      break;
    case LeaderStrategy::kEquivGeneral:
      plan.proposals.resize(spec.sets.size());
      for (std::uint32_t k = 0; k < spec.sets.size(); ++k) {
        for (auto id : spec.sets[k]) give(id, k);
      }
      break;
  }
  return plan;
}

// ---------------------------------------------------------------------------

void JustificationPool::add_correct(const MessagePtr& m) { slots_.push_back({m->sender, {m}}); }

void JustificationPool::add_faulty(ReplicaId id, std::vector<MessagePtr> options) {
  slots_.push_back({id, std::move(options)});
}

std::vector<Value> JustificationPool::prepared_values() const {
  std::set<Value> out;
  for (const auto& s : slots_) {
    for (const auto& m : s.options) {
      if (!m->prepared_view.is_none() && m->prepared_val) out.insert(*m->prepared_val);
    }
  }
  return {out.begin(), out.end()};
}

std::optional<std::vector<MessagePtr>> JustificationPool::justify(const Value& x,
                                                                  const Value& fallback,
                                                                  std::size_t det) const {
  auto lowest = [](const Slot& s) {
    return *std::min_element(s.options.begin(), s.options.end(), [](const auto& a, const auto& b) {
      return a->prepared_view < b->prepared_view;
    });
  };

  // Nobody prepared: the leader's own value goes through.
  if (x == fallback) {
    std::vector<MessagePtr> m;
    for (const auto& s : slots_) {
      auto o = lowest(s);
      if (o->prepared_view.is_none()) m.push_back(o);
      if (m.size() == det) return m;
    }
  }

  std::set<View, std::greater<>> levels;
  for (const auto& s : slots_) {
    for (const auto& o : s.options) {
      if (!o->prepared_view.is_none() && o->prepared_val == x) levels.insert(o->prepared_view);
    }
  }

  for (View w : levels) {
    std::vector<MessagePtr> support, lower;
    std::map<Value, std::vector<MessagePtr>> rivals;
    for (const auto& s : slots_) {
      auto hit = std::find_if(s.options.begin(), s.options.end(), [&](const auto& o) {
        return o->prepared_view == w && o->prepared_val == x;
      });
      if (hit != s.options.end()) {
        support.push_back(*hit);
        continue;
      }
      auto o = lowest(s);
      if (o->prepared_view < w) {
        lower.push_back(o);
        continue;
      }
      auto at_w = std::find_if(s.options.begin(), s.options.end(),
                               [&](const auto& c) { return c->prepared_view == w; });
      if (at_w != s.options.end()) rivals[*(*at_w)->prepared_val].push_back(*at_w);
    }

    std::vector<MessagePtr> m;
    for (const auto& v : support) {
      if (m.size() == det) break;
      m.push_back(v);
    }
    for (const auto& v : lower) {
      if (m.size() == det) break;
      m.push_back(v);
    }
    const std::size_t cap_hi = support.size();
    for (const auto& [y, msgs] : rivals) {
      const std::size_t cap = y < x ? (cap_hi == 0 ? 0 : cap_hi - 1) : cap_hi;
      for (std::size_t i = 0; i < msgs.size() && i < cap && m.size() < det; ++i) m.push_back(msgs[i]);
    }
    if (m.size() == det) return m;
  }
  return std::nullopt;
}

bool JustificationPool::justifiable_exhaustive(const Value& x, const Value& fallback,
                                               std::size_t det) const {
  std::vector<MessagePtr> chosen;
  std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
    if (chosen.size() == det) return select_proposal(chosen, fallback) == x;
    if (slots_.size() - i < det - chosen.size()) return false;
    for (const auto& o : slots_[i].options) {
      chosen.push_back(o);
      const bool ok = go(i + 1);
      chosen.pop_back();
      if (ok) return true;
    }
    return go(i + 1);
  };
  return go(0);
}

// ---------------------------------------------------------------------------

Adversary::Adversary(AdversarySpec spec, const ProtocolConfig& cfg,
                     std::map<ReplicaId, crypto::Signer> signers, const crypto::Verifier& verifier)
    : spec_(std::move(spec)), cfg_(cfg), signers_(std::move(signers)), verifier_(verifier) {}

Value Adversary::fresh_value(View v, std::uint32_t index) {
  return Value{"byz-" + std::to_string(v.value) + "-" + std::to_string(index + 1)};
}

Actions Adversary::on_new_view(ReplicaId who, View v) {
  Actions out;
  if (v == View{1} && who == cfg_.leader_of(v)) lead(v, out);
  return out;
}

Actions Adversary::on_message(ReplicaId who, const MessagePtr& m) {
  Actions out;
  if (!m || spec_.is_faulty(m->sender)) return out;

  if (m->kind == MessageKind::kNewLeader) {
    const View v = m->view;
    if (who != cfg_.leader_of(v) || v.is_none()) return out;
    auto& box = inbox_[v];
    if (box.acted || box.senders.contains(m->sender)) return out;
    if (!valid_new_leader(*m, cfg_, verifier_)) return out;
    box.senders.insert(m->sender);
    box.new_leaders.push_back(m);
    const std::size_t need = spec_.leader == LeaderStrategy::kHonest
                                 ? cfg_.det_quorum()
                                 : cfg_.n() - cfg_.f();
    if (box.new_leaders.size() >= need) lead(v, out);
    return out;
  }

  if (m->kind == MessageKind::kPrepare && m->proposal) {
    CertKey key{m->view, m->proposal->value, who};
    if (certs_.contains(key)) return out;
    auto& got = prepares_[key];
    for (const auto& p : got) {
      if (p->sender == m->sender) return out;
    }
    if (!valid_vote(*m, MessageKind::kPrepare, who, cfg_, verifier_)) return out;
    got.push_back(m);
    if (got.size() == cfg_.q()) {
      certs_[key] = std::make_shared<const PreparedCertificate>(
          PreparedCertificate{key.view, key.value, who, got});
    }
  }
  return out;
}

JustificationPool Adversary::pool_for(View v) const {
  JustificationPool pool;
  auto it = inbox_.find(v);
  if (it != inbox_.end()) {
    for (const auto& m : it->second.new_leaders) pool.add_correct(m);
  }
  for (const auto& [id, signer] : signers_) {
    std::vector<MessagePtr> options{make_new_leader(signer, v, View{}, std::nullopt, nullptr)};
    for (const auto& [key, cert] : certs_) {
      if (key.holder == id && key.view < v) {
        options.push_back(make_new_leader(signer, v, key.view, key.value, cert));
      }
    }
    pool.add_faulty(id, std::move(options));
  }
  return pool;
}

void Adversary::fill_values(PartitionPlan& plan) {
  const View v = plan.view;
  const std::size_t m = plan.proposals.size();
  plan.justification.assign(m, {});
  if (v == View{1}) {
    for (std::uint32_t k = 0; k < m; ++k) plan.proposals[k] = fresh_value(v, k);
    return;
  }

  if (spec_.leader == LeaderStrategy::kHonest) {
    const auto& got = inbox_[v].new_leaders;
    std::vector<MessagePtr> quorum(got.begin(), got.begin() + cfg_.det_quorum());
    plan.proposals[0] = select_proposal(quorum, fresh_value(v, 0));
    plan.justification[0] = std::move(quorum);
    return;
  }

  const JustificationPool pool = pool_for(v);
  const auto prepared_vals = pool.prepared_values();
  std::set<Value> used;
  std::vector<bool> keep(m, false);
  for (std::uint32_t k = 0; k < m; ++k) {
    Value x = fresh_value(v, k);
    auto just = pool.justify(x, x, cfg_.det_quorum());
    if (!just) {
      // The mode rule forbids a fresh value; fall back to a prepared one.
      for (const auto& y : prepared_vals) {
        if (used.contains(y)) continue;
        just = pool.justify(y, y, cfg_.det_quorum());
        if (just) {
          x = y;
          break;
        }
      }
    }
    if (!just) continue;
    used.insert(x);
    plan.proposals[k] = x;
    plan.justification[k] = std::move(*just);
    keep[k] = true;
  }

  // Drop values that could not be justified and renumber the rest.
  std::vector<std::int64_t> remap(m, -1);
  std::vector<Value> proposals;
  std::vector<std::vector<MessagePtr>> justification;
  for (std::uint32_t k = 0; k < m; ++k) {
    if (!keep[k]) continue;
    remap[k] = static_cast<std::int64_t>(proposals.size());
    proposals.push_back(std::move(plan.proposals[k]));
    justification.push_back(std::move(plan.justification[k]));
  }
  for (auto& a : plan.assignment) {
    std::vector<std::uint32_t> next;
    for (auto k : a) {
      if (remap[k] >= 0) next.push_back(static_cast<std::uint32_t>(remap[k]));
    }
    a = std::move(next);
  }
  plan.proposals = std::move(proposals);
  plan.justification = std::move(justification);
}

void Adversary::lead(View v, Actions& out) {
  auto& box = inbox_[v];
  if (box.acted) return;
  box.acted = true;

  PartitionPlan plan = make_partition(spec_, cfg_, v);
  if (plan.proposals.empty()) return;
  fill_values(plan);
  if (plan.proposals.empty()) return;
  if (plan_sink_) plan_sink_(plan);
  emit(plan, out);
  plans_.push_back(std::move(plan));
}

void Adversary::emit(const PartitionPlan& plan, Actions& out) {
  const View v = plan.view;
  const ReplicaId lid = cfg_.leader_of(v);
  const auto& leader = signers_.at(lid);

  std::vector<SignedProposal> pairs;
  for (const auto& x : plan.proposals) pairs.push_back(sign_proposal(leader, v, x));

  for (std::uint32_t k = 0; k < pairs.size(); ++k) {
    std::vector<ReplicaId> to;
    for (std::uint32_t i = 1; i <= cfg_.n(); ++i) {
      const auto& a = plan.assignment[i - 1];
      if (ReplicaId{i} != lid && std::find(a.begin(), a.end(), k) != a.end()) to.push_back(ReplicaId{i});
    }
    if (to.empty()) continue;
    out.push_back(SendAction{std::move(to), make_propose(leader, pairs[k], plan.justification[k])});
  }

  if (spec_.replica != ReplicaStrategy::kPartitionConsistent) return;
  for (const auto& [id, signer] : signers_) {
    vote(signer, MessageKind::kPrepare, plan, pairs, out);
    vote(signer, MessageKind::kCommit, plan, pairs, out);
  }
}

void Adversary::vote(const crypto::Signer& who, MessageKind kind, const PartitionPlan& plan,
                     const std::vector<SignedProposal>& pairs, Actions& out) {
  const auto phase = kind == MessageKind::kPrepare ? crypto::Phase::kPrepare : crypto::Phase::kCommit;
  auto vrf = who.vrf_prove(crypto::vrf_seed(plan.view, phase), cfg_.s(), cfg_.n());
  std::vector<std::vector<ReplicaId>> groups(pairs.size());
  for (auto p : vrf.sample) {
    if (auto k = plan.primary(p)) groups[*k].push_back(p);
  }
  for (std::uint32_t k = 0; k < pairs.size(); ++k) {
    if (groups[k].empty()) continue;
    out.push_back(SendAction{std::move(groups[k]), make_vote(who, kind, pairs[k], vrf.sample, vrf.proof)});
  }
}

}  // namespace probft
