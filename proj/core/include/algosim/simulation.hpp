#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "algosim/adversary.hpp"
#include "algosim/consensus.hpp"
#include "algosim/events.hpp"
#include "algosim/metrics.hpp"
#include "algosim/topology.hpp"
#include "algosim/transport.hpp"
#include "algosim/validation.hpp"

namespace algosim {

struct NetworkConfig {
  std::uint32_t n_honest = 64;
  std::uint32_t degree = 8;
  std::uint32_t max_connections = 0;  // 0: degree + n_malicious
  TransportConfig bandwidth;
  std::uint64_t total_stake = 1'000'000;  // split evenly over honest nodes
};

struct SimulationConfig {
  NetworkConfig network;
  ConsensusConfig consensus;
  SortitionParams sortition;
  ValidationConfig validation;
  AttackConfig attack;
  SizeModel sizes;
  std::uint64_t block_size = 1'000'000;  // honest proposals are full at this size
  double duration_s = 2700.0;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SimulationStats {
  std::uint64_t events = 0;
  std::uint64_t messages = 0;
  std::uint64_t accepts = 0;
  std::uint64_t rejects = 0;
  std::uint64_t defers = 0;
  std::uint64_t adversary_accepts = 0;
  std::uint64_t adversary_defers = 0;
  std::uint64_t adversary_rejects_after_defer = 0;
  std::uint64_t adversary_stateless_passes = 0;
  // verdicts on adversary messages while the target is still below the claimed round,
  // and once it has caught up (from the pending buffer or on late arrival)
  std::uint64_t adversary_in_round = 0;
  std::uint64_t adversary_in_round_not_deferred = 0;
  std::uint64_t adversary_after_advance = 0;
  std::uint64_t adversary_after_advance_not_rejected = 0;
  std::uint64_t evictions = 0;
  std::uint64_t bans = 0;
  std::uint64_t dropped_duplicates = 0;  // exact copies discarded at ingress
  std::uint64_t discarded_from_banned = 0;
  std::uint64_t max_transmissions_per_message = 0;
  std::map<RejectReason, std::uint64_t> reject_reasons;
};

/// One isolated instance: topology, nodes, transport and the attack
/// coordinator driven by a single event loop. Movable between threads as a whole.
class Simulation {
 public:
  explicit Simulation(SimulationConfig config);
  ~Simulation();
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  /// Processes events until the clock would pass `until` or the queue drains.
  void run(SimTime until);
  void run() { run(SimTime::from_seconds(config_.duration_s)); }

  SimTime now() const { return queue_.now(); }
  const SimulationConfig& config() const { return config_; }
  const Topology& topology() const { return topology_; }
  const MetricsCollector& metrics() const { return metrics_; }
  const SimulationStats& stats() const { return stats_; }
  const Transport& transport() const { return *transport_; }
  const AttackCoordinator* attacker() const { return attacker_.get(); }

  std::vector<NodeId> targeted_nodes() const;
  std::vector<NodeId> untargeted_honest_nodes() const;

  /// Decided block hashes, index r-1 for round r.
  const std::vector<Hash256>& chain(NodeId n) const;
  std::int64_t current_round(NodeId n) const;
  const RoundState& round_state(NodeId n) const;
  const PendingBuffer& pending(NodeId n) const;
  const Validator& validator(NodeId n) const;

  /// Rounds where two nodes of `among` decided different blocks.
  std::size_t fork_count(const std::vector<NodeId>& among) const;
  std::size_t edge_count() const { return topology_.edge_count(); }

 private:
  struct Node;
  struct MsgInfo {
    MessagePtr msg;
    std::uint32_t author = 0;  // node index
    bool honest = false;
    std::uint64_t transmissions = 0;
  };

  Node& node(NodeId n) { return *nodes_[n.value]; }
  const Node& node(NodeId n) const { return *nodes_[n.value]; }

  std::uint64_t register_message(MessagePtr m, NodeId author, bool honest);
  void dispatch(const SimEvent& e);
  void on_delivery(const Delivery& d);
  void pump(NodeId n);
  void on_validation_done(NodeId n, std::uint64_t version);
  void apply_verdict(NodeId n);
  void on_timer(NodeId n, std::uint64_t version);
  void handle_advance(NodeId n, Advance adv);
  void gossip(NodeId n, std::uint64_t handle);
  void finalize(NodeId n, const Decision& d);
  void start_round(NodeId n, std::int64_t round);
  void ban(NodeId n, NodeId peer);
  void launch_attack(NodeId target, std::int64_t observed_round);
  bool in_time(const Node& n, const Message& m) const;
  const std::vector<std::uint64_t>& mempool(std::int64_t round);

  SimulationConfig config_;
  Topology topology_;
  KeyRegistry registry_;
  EventQueue queue_;
  std::unique_ptr<Transport> transport_;
  std::unique_ptr<AttackCoordinator> attacker_;
  std::vector<std::unique_ptr<Node>> nodes_;
  std::vector<MsgInfo> messages_;
  std::map<std::int64_t, std::vector<std::uint64_t>> mempool_;
  MetricsCollector metrics_;
  SimulationStats stats_;
  std::shared_ptr<const Block> genesis_;
  Seed q0_;
};

}  // namespace algosim
