#include "algosim/consensus.hpp"

#include <algorithm>
#include <cmath>

#include "algosim/errors.hpp"

namespace algosim {

void ConsensusConfig::validate() const {
  if (!(proposal_window_s > 0)) throw ConfigError("consensus.proposal_window_s", "must be > 0");
  if (!(step_timeout_s > 0)) throw ConfigError("consensus.step_timeout_s", "must be > 0");
  if (!(committee_threshold_fraction > 0.5 && committee_threshold_fraction <= 1.0)) {
    throw ConfigError("consensus.committee_threshold_fraction", "must lie in (0.5, 1]");
  }
  if (max_steps < 3) throw ConfigError("consensus.max_steps", "must be >= 3 (two reduction steps plus one binary step)");
  if (max_block_size == 0) throw ConfigError("consensus.max_block_size", "must be > 0");
}

bool beats(const ProposalCandidate& a, const ProposalCandidate& b) {
  if (a.priority != b.priority) return a.priority < b.priority;
  return a.proposer < b.proposer;
}

RoundMachine::RoundMachine(KeyPair key, ConsensusConfig config, SortitionParams sortition,
                           const KeyRegistry& registry, SizeModel sizes)
    : key_{std::move(key)}, config_{config}, sortition_{sortition}, registry_{&registry}, sizes_{sizes} {
  config_.validate();
  threshold_ = static_cast<std::uint64_t>(std::ceil(config_.committee_threshold_fraction * sortition_.committee_votes));
}

Advance RoundMachine::begin_round(std::int64_t round, const Block& prev_block, const Seed& prev_seed, SimTime now,
                                  std::vector<std::uint64_t> pending_stubs) {
  state_ = RoundState{};
  state_.round = round;
  state_.step = 0;
  state_.started_at = now;
  state_.step_started_at = now;
  state_.phase_deadline = now + config_.proposal_window();
  state_.prev_seed = prev_seed;
  state_.prev_hash = prev_block.hash();
  state_.empty_block = std::make_shared<const Block>(make_empty_block(round, prev_seed, prev_block.hash(), sizes_));
  state_.empty_hash = state_.empty_block->hash();

  Advance out;
  out.next_deadline = state_.phase_deadline;
  if (key_.stake == 0 || !key_.eligible(round, sortition_.lookback)) return out;

  auto draw = sortition_hash(key_, round, 0, prev_seed, Role::Proposer, sortition_.lookback);
  auto p = sortition_.probability(Role::Proposer, registry_->total_stake());
  auto votes = votes_from_hash(draw.hash, key_.stake, p);
  if (votes == 0) return out;

  auto priority = proposer_priority(draw.proof, votes);
  auto cap = sizes_.stubs_for(config_.max_block_size);
  if (pending_stubs.size() > cap) pending_stubs.resize(cap);
  auto block = std::make_shared<const Block>(
      make_proposed_block(key_, round, prev_seed, prev_block.hash(), std::move(pending_stubs), sizes_));
  auto credential = std::make_shared<const Message>(make_credential(key_, round, draw.proof, sizes_));
  auto proposal = std::make_shared<const Message>(make_proposal(key_, block, draw.proof, sizes_));
  on_credential(priority);
  on_proposal(*proposal, priority, now);
  out.gossip.push_back(std::move(credential));
  out.gossip.push_back(std::move(proposal));
  return out;
}

bool RoundMachine::on_credential(const Hash256& priority) {
  if (!state_.best_credential_priority || priority < *state_.best_credential_priority) {
    state_.best_credential_priority = priority;
    return true;
  }
  return false;
}

bool RoundMachine::on_proposal(const Message& bp, const Hash256& priority, SimTime now) {
  const auto* body = bp.proposal();
  if (body == nullptr || bp.claimed_round() != state_.round) return false;
  state_.blocks.emplace(body->block->hash(), body->block);
  on_credential(priority);
  if (state_.step != 0 || now >= state_.phase_deadline) return false;
  ProposalCandidate cand{priority, bp.sender_key(), body->block->hash()};
  if (!state_.best_proposal || beats(cand, *state_.best_proposal)) {
    state_.best_proposal = cand;
    return true;
  }
  return false;
}

bool RoundMachine::on_vote(const Message& vm, std::uint64_t votes) {
  const auto* body = vm.vote();
  if (body == nullptr || state_.decided || vm.claimed_round() != state_.round) return false;
  auto step = vm.claimed_step();
  if (step < 1 || step < state_.step || step > config_.max_steps) return false;
  auto& tally = state_.tallies[step];
  if (!tally.voters.insert(vm.sender_key()).second) return false;
  std::uint8_t bit = step >= 3 ? body->bit : 0;
  tally.weight[{bit, body->value}] += votes;
  return step == state_.step && current_step_has_quorum();
}

Hash256 RoundMachine::reduction_step(std::int32_t step) const {
  if (step == 1) return state_.best_proposal ? state_.best_proposal->block_hash : state_.empty_hash;
  return state_.step1_result.value_or(state_.empty_hash);
}

std::uint8_t RoundMachine::binary_vote_bit(std::int32_t step) const {
  if (step == 3) return state_.reduction_output && *state_.reduction_output != state_.empty_hash ? 0 : 1;
  return state_.last_binary_bit;
}

std::optional<Hash256> RoundMachine::reduction_quorum(std::int32_t step) const {
  auto it = state_.tallies.find(step);
  if (it == state_.tallies.end()) return std::nullopt;
  for (const auto& [key, w] : it->second.weight) {
    if (key.first == 0 && w >= threshold_) return key.second;
  }
  return std::nullopt;
}

std::optional<std::uint8_t> RoundMachine::binary_quorum(std::int32_t step) const {
  auto it = state_.tallies.find(step);
  if (it == state_.tallies.end()) return std::nullopt;
  std::uint64_t zero = 0;
  std::uint64_t one = 0;
  for (const auto& [key, w] : it->second.weight) {
    if (key.first == 1) {
      one += w;
    } else if (state_.reduction_output && key.second == *state_.reduction_output) {
      zero += w;
    }
  }
  if (zero >= threshold_) return std::uint8_t{0};
  if (one >= threshold_) return std::uint8_t{1};
  return std::nullopt;
}

bool RoundMachine::current_step_has_quorum() const {
  if (state_.step == 0) return false;
  if (state_.step <= 2) return reduction_quorum(state_.step).has_value();
  return binary_quorum(state_.step).has_value();
}

std::uint8_t RoundMachine::common_coin(std::int32_t step) const {
  ByteWriter w;
  w.tag("algosim/coin").hash(state_.prev_seed.value).i64(state_.round).u32(static_cast<std::uint32_t>(step));
  return hash256(w.bytes()).bytes[31] & 1;
}

std::optional<MessagePtr> RoundMachine::committee_vote(std::int32_t step, const Hash256& value, std::uint8_t bit) {
  if (key_.stake == 0 || !key_.eligible(state_.round, sortition_.lookback)) return std::nullopt;
  auto draw = sortition_hash(key_, state_.round, step, state_.prev_seed, Role::Committee, sortition_.lookback);
  auto p = sortition_.probability(Role::Committee, registry_->total_stake());
  auto votes = votes_from_hash(draw.hash, key_.stake, p);
  if (votes == 0) return std::nullopt;
  auto msg = std::make_shared<const Message>(make_vote(key_, state_.round, step, value, bit, draw.proof, sizes_));
  on_vote(*msg, votes);
  return msg;
}

Decision RoundMachine::decide(std::int32_t step, std::uint8_t bit) {
  Decision d;
  d.step = step;
  d.bit = bit;
  d.block = state_.empty_block;
  if (bit == 0 && state_.reduction_output && *state_.reduction_output != state_.empty_hash) {
    auto it = state_.blocks.find(*state_.reduction_output);
    if (it != state_.blocks.end()) d.block = it->second;
  }
  state_.decided = d.block;
  return d;
}

void RoundMachine::enter_step(std::int32_t step, SimTime now, Advance& out) {
  state_.step = step;
  state_.step_started_at = now;
  state_.phase_deadline = now + config_.step_timeout();
  std::optional<MessagePtr> vote;
  if (step <= 2) {
    vote = committee_vote(step, reduction_step(step), 0);
  } else {
    auto bit = binary_vote_bit(step);
    state_.last_binary_bit = bit;
    vote = committee_vote(step, state_.reduction_output.value_or(state_.empty_hash), bit);
  }
  if (vote) out.gossip.push_back(std::move(*vote));
  out.next_deadline = state_.phase_deadline;
}

Advance RoundMachine::advance(SimTime now, bool timed_out) {
  Advance out;
  if (state_.decided) return out;
  bool by_timeout = timed_out;
  for (;;) {
    const auto step = state_.step;
    if (step == 0) {
      enter_step(1, now, out);
    } else {
      state_.step_durations.push_back(now - state_.step_started_at);
      if (by_timeout) {
        ++state_.step_timeouts;
        ++out.timeouts_recorded;
      }
      if (step == 1) {
        state_.step1_result = reduction_quorum(1);
        enter_step(2, now, out);
      } else if (step == 2) {
        state_.reduction_output = reduction_quorum(2).value_or(state_.empty_hash);
        enter_step(3, now, out);
      } else if (auto q = binary_quorum(step)) {
        out.decision = decide(step, *q);
        out.next_deadline.reset();
        return out;
      } else if (step >= config_.max_steps) {
        out.decision = decide(step, 1);
        out.next_deadline.reset();
        return out;
      } else {
        state_.last_binary_bit = common_coin(step);
        enter_step(step + 1, now, out);
      }
    }
    if (!current_step_has_quorum()) return out;
    by_timeout = false;
  }
}

FinalizedRound finalize_round(const Block& decision, const Seed& prev_seed) {
  return FinalizedRound{next_seed(decision, prev_seed), decision.hash()};
}

}  // namespace algosim
