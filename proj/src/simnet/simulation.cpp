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

#include "probft/simulation.hpp"

#include <algorithm>
#include <memory>
#include <queue>
#include <string>

#include "probft/random.hpp"

namespace probft {

Value replica_value(ReplicaId id) { return Value{"value-" + std::to_string(id.value)}; }

namespace {

struct Event {
  Tick time = 0;
  std::uint64_t order = 0;
  std::uint64_t seq = 0;
  ReplicaId target;
  View view;        // new-view events
  MessagePtr msg;   // deliveries

  bool operator>(const Event& o) const {
    if (time != o.time) return time > o.time;
    if (order != o.order) return order > o.order;
    return seq > o.seq;
  }
};

class Simulation {
 public:
  Simulation(const ProtocolConfig& cfg, const NetConfig& net, const AdversarySpec& spec,
             const SimulationOptions& opt)
      : cfg_(cfg),
        net_(net),
        spec_(spec),
        opt_(opt),
        registry_(cfg.rng_seed(), cfg.n()),
        sync_(net, cfg.n(), cfg.rng_seed()),
        delivery_rng_(stream_engine(cfg.rng_seed(), 0, 0xde)) {
    std::map<ReplicaId, crypto::Signer> byz;
    for (auto id : spec.faulty) byz.emplace(id, registry_.signer(id));
    adversary_ = std::make_unique<Adversary>(spec, cfg, std::move(byz), registry_);
    if (opt_.trace) {
      adversary_->set_plan_sink([this](const PartitionPlan& p) { trace_plan(p); });
    }

    metrics_.replicas.resize(cfg.n());
    replicas_.resize(cfg.n());
    for (std::uint32_t i = 1; i <= cfg.n(); ++i) {
      const ReplicaId id{i};
      if (spec.is_faulty(id)) {
        metrics_.replicas[i - 1].faulty = true;
        continue;
      }
      auto r = std::make_unique<Replica>(id, cfg, registry_.signer(id), registry_, replica_value(id),
                                         opt_.app_valid);
      r->set_note_sink([this](const ReplicaNote& n) { on_note(n); });
      replicas_[i - 1] = std::move(r);
    }
  }

  RunMetrics run() {
    for (std::uint32_t i = 1; i <= cfg_.n(); ++i) schedule_view(ReplicaId{i}, View{1});

    while (!queue_.empty()) {
      Event e = queue_.top();
      queue_.pop();
      now_ = e.time;
      if (e.msg || !done_) metrics_.end_time = now_;
      if (e.msg) {
        deliver(e);
      } else {
        enter_view(e);
      }
    }
    metrics_.outcome =
        metrics_.all_correct_decided() ? RunOutcome::kAllDecided : RunOutcome::kNonQuiescent;
    return std::move(metrics_);
  }

 private:
  bool faulty(ReplicaId id) const { return metrics_.replicas[id.value - 1].faulty; }

  ViewMetrics& view_metrics(View v) {
    auto& vm = metrics_.views[v];
    if (vm.prepare_in.empty()) {
      vm.prepare_in.assign(cfg_.n(), 0);
      vm.commit_in.assign(cfg_.n(), 0);
    }
    return vm;
  }

  void schedule_view(ReplicaId id, View v) {
    if (v.value > opt_.max_views) return;
    Event e;
    e.time = sync_.entry_time(id, v);
    e.seq = seq_++;
    e.target = id;
    e.view = v;
    queue_.push(std::move(e));
  }

  void enter_view(const Event& e) {
    if (done_) return;
    const ReplicaId id = e.target;
    if (!faulty(id)) {
      metrics_.last_view = std::max(metrics_.last_view, e.view);
      track_entry(e.view);
    }
    if (opt_.trace) opt_.trace->new_view(now_, id, e.view);
    Actions acts = faulty(id) ? adversary_->on_new_view(id, e.view)
                              : replicas_[id.value - 1]->on_new_view(e.view);
    execute(id, acts);
    schedule_view(id, e.view.next());
  }

  void track_entry(View v) {
    const Tick nominal = (v.value - 1) * net_.view_duration;
    if (nominal < net_.gst) return;
    auto [it, fresh] = entry_span_.try_emplace(v, now_, now_);
    auto& [lo, hi] = it->second;
    lo = std::min(lo, now_);
    hi = std::max(hi, now_);
    metrics_.post_gst_entry_skew = std::max(metrics_.post_gst_entry_skew, hi - lo);
  }

  void deliver(const Event& e) {
    const ReplicaId id = e.target;
    Actions acts = faulty(id) ? adversary_->on_message(id, e.msg)
                              : replicas_[id.value - 1]->on_message(e.msg);
    execute(id, acts);
  }

  void enqueue(ReplicaId from, ReplicaId to, const MessagePtr& m) {
    auto& vm = view_metrics(m->view);
    ++vm.sent[static_cast<std::size_t>(m->kind)];
    if (m->kind == MessageKind::kPrepare) ++vm.prepare_in[to.value - 1];
    if (m->kind == MessageKind::kCommit) ++vm.commit_in[to.value - 1];

    const Delivery d = deliver_policy(now_, net_, delivery_rng_);
    if (opt_.on_schedule) opt_.on_schedule(from, to, now_, d.time);
    Event e;
    e.time = d.time;
    e.order = d.order;
    e.seq = seq_++;
    e.target = to;
    e.msg = m;
    queue_.push(std::move(e));
  }

  void audit_vote(const SendAction& s) {
    const auto& m = *s.msg;
    if (m.kind != MessageKind::kPrepare && m.kind != MessageKind::kCommit) return;
    const auto phase = m.kind == MessageKind::kPrepare ? crypto::Phase::kPrepare : crypto::Phase::kCommit;
    const bool vrf_ok = m.proof && m.sample.size() == cfg_.s() &&
                        registry_.vrf_verify(m.sender, crypto::vrf_seed(m.view, phase), cfg_.s(),
                                             m.sample, *m.proof);
    if (faulty(m.sender)) {
      ++metrics_.adversary_votes;
      const bool within = std::all_of(s.recipients.begin(), s.recipients.end(), [&](ReplicaId r) {
        return std::binary_search(m.sample.begin(), m.sample.end(), r);
      });
      if (vrf_ok && within) ++metrics_.adversary_votes_valid;
    } else {
      ++metrics_.correct_votes;
      if (vrf_ok && s.recipients == m.sample) ++metrics_.correct_votes_honest;
    }
  }

  void execute(ReplicaId actor, Actions& acts) {
    for (auto& a : acts) {
      if (auto* s = std::get_if<SendAction>(&a)) {
        audit_vote(*s);
        if (s->msg->kind == MessageKind::kPropose) metrics_.view_proposals.push_back(s->msg);
        if (opt_.trace) opt_.trace->send(now_, s->msg->sender, s->msg, s->recipients);
        for (auto to : s->recipients) enqueue(actor, to, s->msg);
      } else if (auto* b = std::get_if<BroadcastAction>(&a)) {
        // Forwarded proposals (equivocation evidence) are not new proposals.
        if (b->msg->kind == MessageKind::kPropose && b->msg->sender == actor) {
          metrics_.view_proposals.push_back(b->msg);
        }
        if (opt_.trace) opt_.trace->broadcast(now_, actor, b->msg);
        for (std::uint32_t i = 1; i <= cfg_.n(); ++i) {
          if (ReplicaId{i} != actor) enqueue(actor, ReplicaId{i}, b->msg);
        }
      } else if (auto* d = std::get_if<DecideAction>(&a)) {
        record_decision(actor, *d);
      }
    }
  }

  void record_decision(ReplicaId id, const DecideAction& d) {
    if (faulty(id)) return;
    auto& vm = view_metrics(d.view);
    ++vm.decisions[d.value];
    if (!first_decision_) {
      first_decision_ = d.value;
    } else if (!(*first_decision_ == d.value)) {
      ++metrics_.decision_conflicts;
    }
    auto& out = metrics_.replicas[id.value - 1];
    if (!out.decided) {
      out.decided = d.value;
      out.decided_view = d.view;
    }
    if (metrics_.all_correct_decided()) done_ = true;
  }

  void on_note(const ReplicaNote& n) {
    auto& vm = view_metrics(n.view);
    switch (n.kind) {
      case NoteKind::kNewLeaderQuorum:
        ++vm.new_leader_quorums;
        break;
      case NoteKind::kPrepared:
        ++vm.prepare_quorums;
        break;
      case NoteKind::kDecided:
        ++vm.commit_quorums;
        break;
      case NoteKind::kBlocked:
        ++vm.blocks;
        break;
      default:
        break;
    }
    if (opt_.trace) opt_.trace->note(now_, n);
  }

  void trace_plan(const PartitionPlan& p) {
    nlohmann::ordered_json j;
    j["t"] = now_;
    j["replica"] = cfg_.leader_of(p.view).value;
    j["event"] = "partition_plan";
    j["view"] = p.view.value;
    auto& props = j["proposals"] = nlohmann::ordered_json::array();
    for (const auto& v : p.proposals) props.push_back(v.bytes);
    auto& asg = j["assignment"] = nlohmann::ordered_json::array();
    for (const auto& a : p.assignment) asg.push_back(a);
    opt_.trace->line(j);
  }

  ProtocolConfig cfg_;
  NetConfig net_;
  AdversarySpec spec_;
  SimulationOptions opt_;
  crypto::KeyRegistry registry_;
  Synchronizer sync_;
  std::mt19937_64 delivery_rng_;
  std::vector<std::unique_ptr<Replica>> replicas_;
  std::unique_ptr<Adversary> adversary_;

  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t seq_ = 0;
  Tick now_ = 0;
  bool done_ = false;
  std::optional<Value> first_decision_;
  std::map<View, std::pair<Tick, Tick>> entry_span_;
  RunMetrics metrics_;
};

}  // namespace

RunMetrics run_simulation(const ProtocolConfig& cfg, const NetConfig& net,
                          const AdversarySpec& adversary, const SimulationOptions& options) {
  net.validate();
  adversary.validate(cfg);
  Simulation sim(cfg, net, adversary, options);
  return sim.run();
}

}  // namespace probft
