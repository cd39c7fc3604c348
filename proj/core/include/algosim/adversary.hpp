#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "algosim/crypto.hpp"
#include "algosim/time.hpp"
#include "algosim/types.hpp"

namespace algosim {

enum class AttackTrigger : std::uint8_t { OnCredential, OnBlockProposal };

struct AttackConfig {
  std::uint32_t n_malicious_nodes = 0;
  std::uint32_t keys_per_node = 0;
  std::uint64_t payload_block_size = 1'000'000;
  std::vector<NodeId> targets;
  // OnCredential fires on whichever of credential or proposal shows up first.
  AttackTrigger trigger = AttackTrigger::OnCredential;

  bool enabled() const { return n_malicious_nodes > 0 && keys_per_node > 0 && !targets.empty(); }
  void validate(std::uint64_t max_block_size) const;
};

/// Zero-stake keys, old enough to pass the lookback rule. keys[m] belongs to malicious node m.
struct KeyFarm {
  std::vector<std::vector<KeyPair>> keys;

  static KeyFarm generate(const AttackConfig& cfg, std::int64_t lookback, std::uint64_t rng_seed);
  void register_all(KeyRegistry& registry) const;
  std::size_t total_keys() const;
};

struct AttackPayload {
  std::int64_t round = 0;  // claimed round r+1
  std::vector<std::vector<MessagePtr>> per_node;

  std::size_t count() const;
  std::uint64_t total_bytes() const;
};

/// One max-size proposal per farm key claiming `claimed_round`, with a garbage
/// sortition proof and genuine outer authentication. Needs no round state.
AttackPayload precompute_payload(const AttackConfig& cfg, const KeyFarm& farm, std::int64_t claimed_round,
                                 const SizeModel& sizes, std::uint64_t rng_seed);

struct AttackLaunch {
  NodeId target;
  std::int64_t observed_round = 0;
  SimTime at;
  std::uint64_t bytes = 0;
};

/// Single logical coordinator for every malicious node.
class AttackCoordinator {
 public:
  AttackCoordinator(AttackConfig cfg, KeyFarm farm, SizeModel sizes, std::uint64_t rng_seed);

  /// A malicious node got `msg` from `peer`. Returns the observed round when
  /// this fires the attack on `peer`; each (target, round) fires once.
  std::optional<std::int64_t> on_observation(NodeId peer, const Message& msg, SimTime now);

  /// Payload claiming observed_round + 1. Built on first use and cached.
  const AttackPayload& payload_for(std::int64_t observed_round);

  bool is_target(NodeId n) const;
  const AttackConfig& config() const { return cfg_; }
  const KeyFarm& farm() const { return farm_; }
  const std::vector<AttackLaunch>& launches() const { return launches_; }

 private:
  AttackConfig cfg_;
  KeyFarm farm_;
  SizeModel sizes_;
  std::uint64_t seed_;
  std::set<std::pair<std::uint32_t, std::int64_t>> fired_;
  std::map<std::int64_t, AttackPayload> cache_;
  std::vector<AttackLaunch> launches_;
};

}  // namespace algosim
