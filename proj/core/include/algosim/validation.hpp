#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "algosim/crypto.hpp"
#include "algosim/sortition.hpp"
#include "algosim/time.hpp"
#include "algosim/types.hpp"

namespace algosim {

// Discard: a banned peer's later messages are dropped on arrival without
// processing; the connection stays up. Disconnect: the link is torn down.
enum class BanAction : std::uint8_t { Discard, Disconnect };

struct ValidationConfig {
  double sig_verify_cost_ms = 0.5;
  double block_verify_cost_ms_per_mb = 2.0;
  double tx_verify_cost_ms = 0.05;  // per uncached stub
  // Per elected vote unit on an accepted vote. Sets the pace of the committee steps.
  double vote_verify_cost_ms_per_vote = 7.5;
  std::uint64_t pending_cap_bytes = 4096ULL * 1000 * 1000;
  std::int32_t ban_threshold = 1;
  BanAction ban_action = BanAction::Discard;

  void validate() const;

  SimTime sig_cost() const { return SimTime::from_millis(sig_verify_cost_ms); }
};

enum class RejectReason : std::uint8_t { BadStructure, BadAuth, Duplicate, ZeroVotes, BadProof, Stale };

const char* to_string(RejectReason r);

struct ValidationVerdict {
  enum class Kind : std::uint8_t { Accept, Reject, Defer };
  Kind kind = Kind::Reject;
  RejectReason reason = RejectReason::BadStructure;
  std::uint64_t votes = 0;
  std::optional<Hash256> priority;  // proposals and credentials
  SimTime cost;                     // sim-time consumed producing this verdict

  bool accepted() const { return kind == Kind::Accept; }
  bool deferred() const { return kind == Kind::Defer; }
  bool rejected() const { return kind == Kind::Reject; }

  static ValidationVerdict accept(std::uint64_t votes, SimTime cost) { return {Kind::Accept, {}, votes, {}, cost}; }
  static ValidationVerdict reject(RejectReason r, SimTime cost) { return {Kind::Reject, r, 0, {}, cost}; }
  static ValidationVerdict defer(SimTime cost) { return {Kind::Defer, {}, 0, {}, cost}; }
};

struct PendingEntry {
  MessagePtr msg;
  SimTime arrival;
  NodeId peer;
  std::uint64_t handle = 0;  // caller's message reference
};

/// Undecidable messages waiting for their round's seed. Drop-newest beyond cap.
class PendingBuffer {
 public:
  explicit PendingBuffer(std::uint64_t cap_bytes) : cap_{cap_bytes} {}

  /// False (and counted as an eviction) when the entry would exceed the cap.
  bool push(PendingEntry e);
  /// Removes and returns every entry claiming a round <= `round`, in arrival order.
  std::vector<PendingEntry> take_checkable(std::int64_t round);
  /// Drops all entries from `peer`. Returns the number dropped.
  std::size_t purge_peer(NodeId peer);

  std::uint64_t byte_total() const { return byte_total_; }
  std::uint64_t cap() const { return cap_; }
  std::size_t size() const { return entries_.size(); }
  std::uint64_t evictions() const { return evictions_; }
  std::uint64_t peak_bytes() const { return peak_bytes_; }

 private:
  std::deque<PendingEntry> entries_;
  std::uint64_t byte_total_ = 0;
  std::uint64_t cap_;
  std::uint64_t evictions_ = 0;
  std::uint64_t peak_bytes_ = 0;
};

struct PeerScore {
  NodeId peer;
  std::uint64_t undecided_bytes = 0;
  std::int32_t invalid_count = 0;
  bool banned = false;
};

/// One node's validator. Verdicts carry their sim-time cost; the caller serializes them.
class Validator {
 public:
  Validator(const KeyRegistry& registry, SortitionParams sortition, ValidationConfig config, SizeModel sizes = {});

  /// Structure, outer authentication, and per-key duplicate check. Returns a
  /// Reject verdict on failure and an Accept with zero votes on success.
  ValidationVerdict stateless_check(const Message& msg);

  /// Sortition-proof check against the seed for msg.claimed_round()-1, or
  /// nullptr if that seed is not known yet.
  ValidationVerdict full_validate(const Message& msg, const Seed* seed);

  /// Counts a Reject against `peer`. True if this call banned it.
  bool penalize(NodeId peer);
  void note_undecided(NodeId peer, std::uint64_t bytes);
  bool banned(NodeId peer) const;
  const PeerScore* score(NodeId peer) const;

  /// Forget per-key duplicate state for rounds below `round`.
  void prune_before(std::int64_t round);

  SimTime charged_total() const { return charged_total_; }
  const std::map<std::int64_t, SimTime>& charged_by_round() const { return charged_by_round_; }
  std::size_t tx_cache_size() const { return tx_cache_.size(); }
  const ValidationConfig& config() const { return config_; }

 private:
  SimTime charge(std::int64_t round, SimTime cost);
  SimTime block_cost(const Block& b) const;

  const KeyRegistry* registry_;
  SortitionParams sortition_;
  ValidationConfig config_;
  SizeModel sizes_;
  // (kind, key, round, step) already admitted
  std::set<std::tuple<std::int64_t, std::int32_t, std::uint8_t, PublicId>> admitted_;
  std::unordered_set<std::uint64_t> tx_cache_;
  std::unordered_map<std::uint32_t, PeerScore> scores_;
  SimTime charged_total_;
  std::map<std::int64_t, SimTime> charged_by_round_;
};

}  // namespace algosim
