#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "algosim/crypto.hpp"
#include "algosim/sortition.hpp"
#include "algosim/time.hpp"
#include "algosim/types.hpp"

namespace algosim {

struct ConsensusConfig {
  double proposal_window_s = 150.0;
  double step_timeout_s = 60.0;
  double committee_threshold_fraction = 0.685;
  // Highest step index. Steps 1-2 are reduction, 3..max_steps binary agreement;
  // a node that reaches the end of max_steps without a quorum finalizes E^r.
  std::int32_t max_steps = 4;
  std::uint64_t max_block_size = 1'000'000;

  /// Throws ConfigError naming the first bad field.
  void validate() const;

  SimTime proposal_window() const { return SimTime::from_seconds(proposal_window_s); }
  SimTime step_timeout() const { return SimTime::from_seconds(step_timeout_s); }
};

struct ProposalCandidate {
  Hash256 priority;
  PublicId proposer;
  Hash256 block_hash;
};

/// True when `a` should win over `b`: lower priority, then smaller proposer id.
bool beats(const ProposalCandidate& a, const ProposalCandidate& b);

struct StepTally {
  // (bit, value) -> accumulated votes. Reduction votes always use bit 0.
  std::map<std::pair<std::uint8_t, Hash256>, std::uint64_t> weight;
  std::unordered_set<PublicId, Hash256Hasher> voters;
};

struct RoundState {
  std::int64_t round = 0;
  std::int32_t step = 0;  // 0 = proposal window
  SimTime started_at;
  SimTime step_started_at;
  SimTime phase_deadline;
  Seed prev_seed;
  Hash256 prev_hash;
  Hash256 empty_hash;  // H(E^r)
  std::shared_ptr<const Block> empty_block;
  std::optional<ProposalCandidate> best_proposal;
  std::optional<Hash256> best_credential_priority;
  std::map<std::int32_t, StepTally> tallies;
  std::optional<Hash256> step1_result;
  std::optional<Hash256> reduction_output;
  std::uint8_t last_binary_bit = 0;
  std::unordered_map<Hash256, std::shared_ptr<const Block>, Hash256Hasher> blocks;
  std::int32_t step_timeouts = 0;
  std::vector<SimTime> step_durations;
  std::shared_ptr<const Block> decided;
};

struct Decision {
  std::shared_ptr<const Block> block;
  std::int32_t step = 0;
  std::uint8_t bit = 1;
};

/// Effects of moving a round forward: votes to gossip, the next deadline, or a decision.
struct Advance {
  std::vector<MessagePtr> gossip;
  std::optional<SimTime> next_deadline;
  std::optional<Decision> decision;
  std::int32_t timeouts_recorded = 0;
};

/// Per-node agreement state machine. Owned and driven by one node's event handler.
class RoundMachine {
 public:
  RoundMachine(KeyPair key, ConsensusConfig config, SortitionParams sortition, const KeyRegistry& registry,
               SizeModel sizes = {});

  /// Proposer sortition and, when elected, credential + proposal for gossip
  /// (credential first). Own proposal is taken as received at `now`.
  Advance begin_round(std::int64_t round, const Block& prev_block, const Seed& prev_seed, SimTime now,
                      std::vector<std::uint64_t> pending_stubs);

  /// Updates the best known credential priority. Returns true if it improved.
  bool on_credential(const Hash256& priority);

  /// Records block possession and, inside the window, competes for best proposal.
  /// Returns true if best_proposal changed.
  bool on_proposal(const Message& bp, const Hash256& priority, SimTime now);

  /// Tallies a validated vote. Returns true when the current step now has a quorum.
  bool on_vote(const Message& vm, std::uint64_t votes);

  /// Ends the current phase (window close, quorum, or timeout) and enters the
  /// next step, repeatedly if later steps already hold a quorum.
  Advance advance(SimTime now, bool timed_out);

  /// Reduction vote for step 1 or 2.
  Hash256 reduction_step(std::int32_t step) const;

  /// Vote bit a binary-agreement committee member casts at `step` (>= 3).
  std::uint8_t binary_vote_bit(std::int32_t step) const;

  /// Quorum on bit 0 (matching reduction output) or bit 1 at `step`.
  std::optional<std::uint8_t> binary_quorum(std::int32_t step) const;

  /// Value with a reduction quorum at `step`, if any.
  std::optional<Hash256> reduction_quorum(std::int32_t step) const;

  bool current_step_has_quorum() const;

  std::uint8_t common_coin(std::int32_t step) const;
  std::uint64_t threshold() const { return threshold_; }

  const RoundState& state() const { return state_; }
  const KeyPair& key() const { return key_; }
  const ConsensusConfig& config() const { return config_; }

 private:
  std::optional<MessagePtr> committee_vote(std::int32_t step, const Hash256& value, std::uint8_t bit);
  Decision decide(std::int32_t step, std::uint8_t bit);
  void enter_step(std::int32_t step, SimTime now, Advance& out);

  KeyPair key_;
  ConsensusConfig config_;
  SortitionParams sortition_;
  const KeyRegistry* registry_;
  SizeModel sizes_;
  std::uint64_t threshold_ = 0;
  RoundState state_;
};

struct FinalizedRound {
  Seed seed;         // Q^r
  Hash256 block_hash;  // H(B^r)
};

/// Seed and hash for the consensus block of a round.
FinalizedRound finalize_round(const Block& decision, const Seed& prev_seed);

}  // namespace algosim
