#include "algosim/simulation.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "algosim/errors.hpp"

namespace algosim {

void SimulationConfig::validate() const {
  consensus.validate();
  validation.validate();
  network.bandwidth.validate();
  attack.validate(consensus.max_block_size);
  if (network.n_honest < 2) throw ConfigError("network.n_honest", "must be >= 2");
  if (network.degree < 2) throw ConfigError("network.degree", "must be >= 2");
  if (network.total_stake < network.n_honest) throw ConfigError("network.total_stake", "must be >= n_honest");
  if (!(sortition.committee_votes > 0 && sortition.committee_votes < static_cast<double>(network.total_stake))) {
    throw ConfigError("consensus.committee_votes", "must lie in (0, total_stake)");
  }
  if (!(sortition.proposer_votes > 0 && sortition.proposer_votes < static_cast<double>(network.total_stake))) {
    throw ConfigError("consensus.proposer_votes", "must lie in (0, total_stake)");
  }
  if (sortition.lookback < 0) throw ConfigError("consensus.lookback", "must be >= 0");
  if (block_size > consensus.max_block_size) throw ConfigError("run.block_size", "exceeds consensus.max_block_size");
  if (!(duration_s > 0)) throw ConfigError("run.duration_s", "must be > 0");
  for (auto t : attack.targets) {
    if (t.value >= network.n_honest) throw ConfigError("attack.targets", "target must be an honest node index");
  }
}

struct Simulation::Node {
  struct Work {
    std::uint64_t handle = 0;
    NodeId peer;
    SimTime arrival;
    bool from_pending = false;
  };

  explicit Node(std::uint64_t cap) : pending{cap} {}

  NodeId id;
  bool malicious = false;
  std::unique_ptr<RoundMachine> machine;
  std::unique_ptr<Validator> validator;
  PendingBuffer pending;
  std::vector<NodeId> peers;
  std::unordered_map<std::uint32_t, std::uint32_t> slot_of;
  std::uint64_t banned_mask = 0;
  std::unordered_map<std::uint64_t, std::uint64_t> seen;  // handle -> peers known to have it
  std::vector<Hash256> chain;
  std::map<std::int64_t, Seed> seeds;  // Q^r by r
  std::shared_ptr<const Block> last_block;
  std::int64_t round = 0;
  std::deque<Work> work;
  bool busy = false;
  Work current;
  ValidationVerdict verdict;
  std::uint64_t validation_version = 0;
  std::uint64_t timer_version = 0;
};

Simulation::Simulation(SimulationConfig config)
    : config_{std::move(config)},
      metrics_{config_.network.n_honest + (config_.attack.enabled() ? config_.attack.n_malicious_nodes : 0)} {
  config_.validate();
  const bool attack = config_.attack.enabled();
  const auto n_mal = attack ? config_.attack.n_malicious_nodes : 0;
  topology_ = build_topology(config_.network.n_honest, n_mal, config_.network.degree,
                             attack ? config_.attack.targets : std::vector<NodeId>{}, config_.seed,
                             config_.network.max_connections);

  std::mt19937_64 rng{config_.seed ^ 0x6b657973ULL};
  const std::uint64_t stake = config_.network.total_stake / config_.network.n_honest;
  std::vector<KeyPair> keys;
  for (std::uint32_t i = 0; i < config_.network.n_honest; ++i) {
    keys.push_back(KeyPair::generate(rng, stake, -config_.sortition.lookback));
    registry_.add(keys.back());
  }
  if (attack) {
    auto farm = KeyFarm::generate(config_.attack, config_.sortition.lookback, config_.seed);
    farm.register_all(registry_);
    attacker_ = std::make_unique<AttackCoordinator>(config_.attack, std::move(farm), config_.sizes, config_.seed);
  }

  transport_ = std::make_unique<Transport>(topology_.size(), config_.network.bandwidth);
  transport_->set_skip_filter([this](NodeId, NodeId to, std::uint64_t payload) {
    const auto& nd = node(to);
    return !nd.malicious && nd.seen.count(payload) > 0;
  });
  q0_ = genesis_seed(config_.seed);
  genesis_ = std::make_shared<const Block>(genesis_block(q0_));

  for (std::uint32_t i = 0; i < topology_.size(); ++i) {
    auto nd = std::make_unique<Node>(config_.validation.pending_cap_bytes);
    nd->id = NodeId{i};
    nd->malicious = topology_.is_malicious(nd->id);
    nd->peers = topology_.adjacency[i];
    if (nd->peers.size() > 64) throw TopologyError("more than 64 peers at one node");
    for (std::uint32_t s = 0; s < nd->peers.size(); ++s) nd->slot_of[nd->peers[s].value] = s;
    if (!nd->malicious) {
      nd->machine = std::make_unique<RoundMachine>(keys[i], config_.consensus, config_.sortition, registry_,
                                                   config_.sizes);
      nd->validator = std::make_unique<Validator>(registry_, config_.sortition, config_.validation, config_.sizes);
      nd->seeds[0] = q0_;
      nd->last_block = genesis_;
    }
    nodes_.push_back(std::move(nd));
  }
  if (attack) {
    for (std::uint32_t m = 0; m < n_mal; ++m) {
      for (auto t : config_.attack.targets) transport_->set_parallel(NodeId{config_.network.n_honest + m}, t, true);
    }
  }
  for (std::uint32_t i = 0; i < config_.network.n_honest; ++i) start_round(NodeId{i}, 1);
}

Simulation::~Simulation() = default;

std::vector<NodeId> Simulation::targeted_nodes() const {
  if (!config_.attack.enabled()) return {};
  return config_.attack.targets;
}

std::vector<NodeId> Simulation::untargeted_honest_nodes() const {
  std::vector<NodeId> out;
  auto targets = targeted_nodes();
  for (std::uint32_t i = 0; i < config_.network.n_honest; ++i) {
    if (std::find(targets.begin(), targets.end(), NodeId{i}) == targets.end()) out.push_back(NodeId{i});
  }
  return out;
}

const std::vector<Hash256>& Simulation::chain(NodeId n) const { return node(n).chain; }
std::int64_t Simulation::current_round(NodeId n) const { return node(n).round; }
const RoundState& Simulation::round_state(NodeId n) const { return node(n).machine->state(); }
const PendingBuffer& Simulation::pending(NodeId n) const { return node(n).pending; }
const Validator& Simulation::validator(NodeId n) const { return *node(n).validator; }

std::size_t Simulation::fork_count(const std::vector<NodeId>& among) const {
  std::size_t forks = 0;
  for (std::size_t idx = 0;; ++idx) {
    std::set<Hash256> hashes;
    for (auto n : among) {
      const auto& c = node(n).chain;
      if (idx < c.size()) hashes.insert(c[idx]);
    }
    if (hashes.empty()) break;
    if (hashes.size() > 1) ++forks;
  }
  return forks;
}

std::uint64_t Simulation::register_message(MessagePtr m, NodeId author, bool honest) {
  auto handle = static_cast<std::uint64_t>(messages_.size());
  if (honest) metrics_.note_honest_message(author, m->claimed_round());
  messages_.push_back(MsgInfo{std::move(m), author.value, honest, 0});
  ++stats_.messages;
  return handle;
}

const std::vector<std::uint64_t>& Simulation::mempool(std::int64_t round) {
  auto it = mempool_.find(round);
  if (it == mempool_.end()) {
    std::mt19937_64 rng{config_.seed ^ (static_cast<std::uint64_t>(round) * 0xd1b54a32d192ed03ULL)};
    std::vector<std::uint64_t> stubs(config_.sizes.stubs_for(config_.block_size));
    for (auto& s : stubs) s = rng();
    it = mempool_.emplace(round, std::move(stubs)).first;
  }
  return it->second;
}

void Simulation::run(SimTime until) {
  while (!queue_.empty() && queue_.top().at <= until) {
    auto e = queue_.pop();
    ++stats_.events;
    dispatch(e);
  }
}

void Simulation::dispatch(const SimEvent& e) {
  switch (e.kind) {
    case EventKind::DeliveryComplete:
      if (auto d = transport_->complete(e, queue_)) on_delivery(*d);
      break;
    case EventKind::TimerExpired:
      on_timer(NodeId{e.target}, e.version);
      break;
    case EventKind::ValidationDone:
      on_validation_done(NodeId{e.target}, e.version);
      break;
    case EventKind::AttackTrigger:
      launch_attack(NodeId{e.target}, static_cast<std::int64_t>(e.payload));
      break;
  }
}

bool Simulation::in_time(const Node& n, const Message& m) const {
  if (n.round != m.claimed_round()) return n.round < m.claimed_round();
  return m.claimed_step() >= n.machine->state().step;
}

void Simulation::on_delivery(const Delivery& d) {
  auto& nd = node(d.to);
  const auto& info = messages_[d.payload];
  if (nd.malicious) {
    if (attacker_) {
      if (auto r = attacker_->on_observation(d.from, *info.msg, queue_.now())) {
        queue_.push(queue_.now(), EventKind::AttackTrigger, d.from.value, static_cast<std::uint64_t>(*r));
      }
    }
    return;
  }
  auto slot = nd.slot_of.at(d.from.value);
  if (nd.banned_mask >> slot & 1U) {
    ++stats_.discarded_from_banned;
    return;
  }
  auto [it, fresh] = nd.seen.try_emplace(d.payload, 0);
  it->second |= std::uint64_t{1} << slot;
  if (!fresh) {
    ++stats_.dropped_duplicates;
    return;
  }
  if (info.honest && info.author != d.to.value) {
    metrics_.record_message_fate(d.to, info.msg->claimed_round(), MessageFate::Received, in_time(nd, *info.msg));
  }
  nd.work.push_back(Node::Work{d.payload, d.from, queue_.now(), false});
  pump(d.to);
}

void Simulation::pump(NodeId n) {
  auto& nd = node(n);
  while (!nd.busy && !nd.work.empty()) {
    auto w = nd.work.front();
    nd.work.pop_front();
    auto& info = messages_[w.handle];
    const Message& m = *info.msg;
    const auto round = m.claimed_round();
    ValidationVerdict v;
    bool stale = round < nd.round ||
                 (round == nd.round && m.kind() == MessageKind::Vote && m.claimed_step() < nd.machine->state().step);
    if (stale) {
      v = ValidationVerdict::reject(RejectReason::Stale, SimTime{});
    } else {
      v = w.from_pending ? ValidationVerdict::accept(0, SimTime{}) : nd.validator->stateless_check(m);
      if (v.accepted()) {
        if (!info.honest && !w.from_pending) ++stats_.adversary_stateless_passes;
        auto seed = round <= nd.round ? nd.seeds.find(round - 1) : nd.seeds.end();
        auto full = nd.validator->full_validate(m, seed == nd.seeds.end() ? nullptr : &seed->second);
        full.cost = full.cost + v.cost;
        v = full;
      }
    }
    nd.current = w;
    nd.verdict = v;
    if (v.cost == SimTime{}) {
      apply_verdict(n);
      continue;
    }
    nd.busy = true;
    ++nd.validation_version;
    queue_.push(queue_.now() + v.cost, EventKind::ValidationDone, n.value, 0, nd.validation_version);
  }
}

void Simulation::on_validation_done(NodeId n, std::uint64_t version) {
  auto& nd = node(n);
  if (version != nd.validation_version) return;
  nd.busy = false;
  apply_verdict(n);
  pump(n);
}

void Simulation::apply_verdict(NodeId n) {
  auto& nd = node(n);
  const auto w = nd.current;
  const auto v = nd.verdict;
  const auto& info = messages_[w.handle];
  const Message& m = *info.msg;
  const auto now = queue_.now();

  if (!info.honest) {
    if (!w.from_pending && m.claimed_round() > nd.round) {
      ++stats_.adversary_in_round;
      if (!v.deferred()) ++stats_.adversary_in_round_not_deferred;
    } else {
      ++stats_.adversary_after_advance;
      if (!v.rejected()) ++stats_.adversary_after_advance_not_rejected;
    }
  }

  switch (v.kind) {
    case ValidationVerdict::Kind::Accept: {
      ++stats_.accepts;
      if (!info.honest) ++stats_.adversary_accepts;
      if (info.honest && info.author != n.value) {
        metrics_.record_message_fate(n, m.claimed_round(), MessageFate::Validated, in_time(nd, m));
      }
      gossip(n, w.handle);
      if (m.claimed_round() == nd.round) {
        switch (m.kind()) {
          case MessageKind::Credential:
            nd.machine->on_credential(*v.priority);
            break;
          case MessageKind::BlockProposal:
            nd.machine->on_proposal(m, *v.priority, now);
            break;
          case MessageKind::Vote:
            if (nd.machine->on_vote(m, v.votes)) handle_advance(n, nd.machine->advance(now, false));
            break;
        }
      }
      break;
    }
    case ValidationVerdict::Kind::Reject: {
      ++stats_.rejects;
      ++stats_.reject_reasons[v.reason];
      if (!info.honest && w.from_pending) ++stats_.adversary_rejects_after_defer;
      bool misbehaviour = v.reason == RejectReason::BadStructure || v.reason == RejectReason::BadAuth ||
                          v.reason == RejectReason::BadProof || v.reason == RejectReason::ZeroVotes;
      if (misbehaviour && nd.validator->penalize(w.peer)) ban(n, w.peer);
      break;
    }
    case ValidationVerdict::Kind::Defer: {
      ++stats_.defers;
      if (!info.honest) ++stats_.adversary_defers;
      nd.validator->note_undecided(w.peer, m.byte_size());
      if (!nd.pending.push(PendingEntry{info.msg, w.arrival, w.peer, w.handle})) ++stats_.evictions;
      break;
    }
  }
}

void Simulation::ban(NodeId n, NodeId peer) {
  auto& nd = node(n);
  ++stats_.bans;
  nd.banned_mask |= std::uint64_t{1} << nd.slot_of.at(peer.value);
  if (config_.validation.ban_action == BanAction::Disconnect) transport_->drop_link(n, peer, queue_);
  nd.pending.purge_peer(peer);
  std::erase_if(nd.work, [&](const Node::Work& w) { return w.peer == peer; });
}

void Simulation::gossip(NodeId n, std::uint64_t handle) {
  auto& nd = node(n);
  auto& info = messages_[handle];
  auto& mask = nd.seen[handle];
  for (std::uint32_t s = 0; s < nd.peers.size(); ++s) {
    const auto bit = std::uint64_t{1} << s;
    if (mask & bit) continue;
    if ((nd.banned_mask & bit) && config_.validation.ban_action == BanAction::Disconnect) continue;
    mask |= bit;
    const auto peer = nd.peers[s];
    if (topology_.is_malicious(peer)) {
      // attackers see the announcement and never fetch the body
      if (attacker_) {
        if (auto r = attacker_->on_observation(n, *info.msg, queue_.now())) {
          queue_.push(queue_.now(), EventKind::AttackTrigger, n.value, static_cast<std::uint64_t>(*r));
        }
      }
      continue;
    }
    transport_->send(n, peer, handle, info.msg->byte_size(), queue_);
    ++info.transmissions;
  }
  stats_.max_transmissions_per_message = std::max(stats_.max_transmissions_per_message, info.transmissions);
}

void Simulation::on_timer(NodeId n, std::uint64_t version) {
  auto& nd = node(n);
  if (version != nd.timer_version) return;
  handle_advance(n, nd.machine->advance(queue_.now(), true));
}

void Simulation::handle_advance(NodeId n, Advance adv) {
  auto& nd = node(n);
  for (auto& g : adv.gossip) {
    auto h = register_message(std::move(g), n, true);
    nd.seen.try_emplace(h, 0);
    gossip(n, h);
  }
  if (adv.decision) {
    finalize(n, *adv.decision);
    return;
  }
  if (adv.next_deadline) {
    ++nd.timer_version;
    queue_.push(*adv.next_deadline, EventKind::TimerExpired, n.value, 0, nd.timer_version);
  }
}

void Simulation::finalize(NodeId n, const Decision& d) {
  auto& nd = node(n);
  const auto& st = nd.machine->state();
  const auto now = queue_.now();
  RoundRecord rec;
  rec.node = n;
  rec.round = st.round;
  rec.started_s = st.started_at.seconds();
  rec.duration_s = (now - st.started_at).seconds();
  rec.step_timeouts = st.step_timeouts;
  rec.decided_step = d.step;
  rec.decided_empty = d.block->is_empty();
  if (now - st.started_at < config_.consensus.proposal_window()) {
    throw InvariantViolation("round-duration", "round finished before its proposal window closed");
  }
  metrics_.record_round(rec);
  const auto round = st.round;
  auto fin = finalize_round(*d.block, nd.seeds.at(round - 1));
  nd.seeds[round] = fin.seed;
  nd.chain.push_back(fin.block_hash);
  nd.last_block = d.block;
  start_round(n, round + 1);
}

void Simulation::start_round(NodeId n, std::int64_t round) {
  auto& nd = node(n);
  nd.round = round;
  while (!nd.seeds.empty() && nd.seeds.begin()->first < round - 4) nd.seeds.erase(nd.seeds.begin());
  nd.validator->prune_before(round - 1);
  std::erase_if(nd.seen, [&](const auto& kv) { return messages_[kv.first].msg->claimed_round() < round - 1; });

  auto adv = nd.machine->begin_round(round, *nd.last_block, nd.seeds.at(round - 1), queue_.now(), mempool(round));
  auto drained = nd.pending.take_checkable(round);
  for (auto it = drained.rbegin(); it != drained.rend(); ++it) {
    nd.work.push_front(Node::Work{it->handle, it->peer, it->arrival, true});
  }
  handle_advance(n, std::move(adv));
  pump(n);
}

void Simulation::launch_attack(NodeId target, std::int64_t observed_round) {
  const auto& payload = attacker_->payload_for(observed_round);
  for (std::uint32_t m = 0; m < payload.per_node.size(); ++m) {
    NodeId src{config_.network.n_honest + m};
    if (transport_->dropped(src, target)) continue;
    for (const auto& msg : payload.per_node[m]) {
      auto h = register_message(msg, src, false);
      transport_->send(src, target, h, msg->byte_size(), queue_);
      ++messages_[h].transmissions;
    }
  }
}

}  // namespace algosim
