#include "algosim/adversary.hpp"

#include <algorithm>

#include "algosim/errors.hpp"

namespace algosim {

void AttackConfig::validate(std::uint64_t max_block_size) const {
  if (n_malicious_nodes > 0 && keys_per_node < 1) throw ConfigError("attack.keys_per_node", "must be >= 1");
  if (payload_block_size > max_block_size) {
    throw ConfigError("attack.payload_block_size", "exceeds consensus.max_block_size");
  }
}

KeyFarm KeyFarm::generate(const AttackConfig& cfg, std::int64_t lookback, std::uint64_t rng_seed) {
  KeyFarm f;
  std::mt19937_64 rng{rng_seed ^ 0xa77ac4ULL};
  f.keys.resize(cfg.n_malicious_nodes);
  for (auto& node_keys : f.keys) {
    for (std::uint32_t k = 0; k < cfg.keys_per_node; ++k) node_keys.push_back(KeyPair::generate(rng, 0, -lookback));
  }
  return f;
}

void KeyFarm::register_all(KeyRegistry& registry) const {
  for (const auto& node_keys : keys) {
    for (const auto& k : node_keys) registry.add(k);
  }
}

std::size_t KeyFarm::total_keys() const {
  std::size_t n = 0;
  for (const auto& k : keys) n += k.size();
  return n;
}

std::size_t AttackPayload::count() const {
  std::size_t n = 0;
  for (const auto& p : per_node) n += p.size();
  return n;
}

std::uint64_t AttackPayload::total_bytes() const {
  std::uint64_t n = 0;
  for (const auto& p : per_node) {
    for (const auto& m : p) n += m->byte_size();
  }
  return n;
}

namespace {

Hash256 random_hash(std::mt19937_64& rng) {
  Hash256 h;
  for (std::size_t i = 0; i < h.bytes.size(); i += 8) {
    auto v = rng();
    for (std::size_t j = 0; j < 8; ++j) h.bytes[i + j] = static_cast<std::uint8_t>(v >> (8 * j));
  }
  return h;
}

}  // namespace

AttackPayload precompute_payload(const AttackConfig& cfg, const KeyFarm& farm, std::int64_t claimed_round,
                                 const SizeModel& sizes, std::uint64_t rng_seed) {
  std::mt19937_64 rng{rng_seed ^ static_cast<std::uint64_t>(claimed_round) * 0x9e3779b97f4a7c15ULL};
  // one payset shared by every fabricated block
  std::vector<std::uint64_t> payset(sizes.stubs_for(cfg.payload_block_size));
  for (auto& s : payset) s = rng();

  AttackPayload out;
  out.round = claimed_round;
  out.per_node.resize(farm.keys.size());
  for (std::size_t m = 0; m < farm.keys.size(); ++m) {
    for (const auto& key : farm.keys[m]) {
      auto block = std::make_shared<const Block>(
          make_fabricated_block(key, claimed_round, random_hash(rng), random_hash(rng), payset, sizes));
      SortitionProof proof;
      proof.signature = SimSignature{key.public_id, random_hash(rng), random_hash(rng)};
      proof.role = Role::Proposer;
      proof.step = 0;
      proof.signer = key.public_id;
      out.per_node[m].push_back(std::make_shared<const Message>(make_proposal(key, block, proof, sizes)));
    }
  }
  return out;
}

AttackCoordinator::AttackCoordinator(AttackConfig cfg, KeyFarm farm, SizeModel sizes, std::uint64_t rng_seed)
    : cfg_{std::move(cfg)}, farm_{std::move(farm)}, sizes_{sizes}, seed_{rng_seed} {}

bool AttackCoordinator::is_target(NodeId n) const {
  return std::find(cfg_.targets.begin(), cfg_.targets.end(), n) != cfg_.targets.end();
}

std::optional<std::int64_t> AttackCoordinator::on_observation(NodeId peer, const Message& msg, SimTime now) {
  if (!cfg_.enabled() || !is_target(peer)) return std::nullopt;
  bool fires = msg.kind() == MessageKind::BlockProposal ||
               (cfg_.trigger == AttackTrigger::OnCredential && msg.kind() == MessageKind::Credential);
  if (!fires) return std::nullopt;
  auto round = msg.claimed_round();
  if (!fired_.insert({peer.value, round}).second) return std::nullopt;
  launches_.push_back(AttackLaunch{peer, round, now, payload_for(round).total_bytes()});
  return round;
}

const AttackPayload& AttackCoordinator::payload_for(std::int64_t observed_round) {
  auto it = cache_.find(observed_round + 1);
  if (it == cache_.end()) {
    it = cache_.emplace(observed_round + 1, precompute_payload(cfg_, farm_, observed_round + 1, sizes_, seed_)).first;
    // older payloads are never replayed
    while (cache_.size() > 2) cache_.erase(cache_.begin());
  }
  return it->second;
}

}  // namespace algosim
