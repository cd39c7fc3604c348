#include "algosim/validation.hpp"

#include <algorithm>

#include "algosim/errors.hpp"

namespace algosim {

void ValidationConfig::validate() const {
  if (sig_verify_cost_ms < 0) throw ConfigError("validation.sig_verify_cost_ms", "must be >= 0");
  if (block_verify_cost_ms_per_mb < 0) throw ConfigError("validation.block_verify_cost_ms_per_mb", "must be >= 0");
  if (tx_verify_cost_ms < 0) throw ConfigError("validation.tx_verify_cost_ms", "must be >= 0");
  if (vote_verify_cost_ms_per_vote < 0) throw ConfigError("validation.vote_verify_cost_ms_per_vote", "must be >= 0");
  if (pending_cap_bytes == 0) throw ConfigError("validation.pending_cap_bytes", "must be > 0");
  if (ban_threshold < 1) throw ConfigError("validation.ban_threshold", "must be >= 1");
}

const char* to_string(RejectReason r) {
  switch (r) {
    case RejectReason::BadStructure: return "bad_structure";
    case RejectReason::BadAuth: return "bad_auth";
    case RejectReason::Duplicate: return "duplicate";
    case RejectReason::ZeroVotes: return "zero_votes";
    case RejectReason::BadProof: return "bad_proof";
    case RejectReason::Stale: return "stale";
  }
  return "unknown";
}

bool PendingBuffer::push(PendingEntry e) {
  auto bytes = e.msg->byte_size();
  if (byte_total_ + bytes > cap_) {
    ++evictions_;
    return false;
  }
  byte_total_ += bytes;
  peak_bytes_ = std::max(peak_bytes_, byte_total_);
  entries_.push_back(std::move(e));
  return true;
}

std::vector<PendingEntry> PendingBuffer::take_checkable(std::int64_t round) {
  std::vector<PendingEntry> out;
  std::deque<PendingEntry> keep;
  for (auto& e : entries_) {
    if (e.msg->claimed_round() <= round) {
      byte_total_ -= e.msg->byte_size();
      out.push_back(std::move(e));
    } else {
      keep.push_back(std::move(e));
    }
  }
  entries_.swap(keep);
  return out;
}

std::size_t PendingBuffer::purge_peer(NodeId peer) {
  std::size_t before = entries_.size();
  std::erase_if(entries_, [&](const PendingEntry& e) {
    if (e.peer != peer) return false;
    byte_total_ -= e.msg->byte_size();
    return true;
  });
  return before - entries_.size();
}

Validator::Validator(const KeyRegistry& registry, SortitionParams sortition, ValidationConfig config,
                     SizeModel sizes)
    : registry_{&registry}, sortition_{sortition}, config_{config}, sizes_{sizes} {
  config_.validate();
}

SimTime Validator::charge(std::int64_t round, SimTime cost) {
  charged_total_ = charged_total_ + cost;
  auto& slot = charged_by_round_[round];
  slot = slot + cost;
  return cost;
}

namespace {

bool well_formed(const Message& m) {
  switch (m.kind()) {
    case MessageKind::BlockProposal: {
      const auto* b = m.proposal();
      return b != nullptr && b->block && m.claimed_step() == 0 && b->block->round() == m.claimed_round() &&
             b->proof.role == Role::Proposer && b->proof.signer == m.sender_key();
    }
    case MessageKind::Credential: {
      const auto* c = m.credential();
      return c != nullptr && m.claimed_step() == 0 && c->proof.role == Role::Proposer &&
             c->proof.signer == m.sender_key();
    }
    case MessageKind::Vote: {
      const auto* v = m.vote();
      return v != nullptr && m.claimed_step() >= 1 && v->bit <= 1 && v->proof.role == Role::Committee &&
             v->proof.signer == m.sender_key();
    }
  }
  return false;
}

}  // namespace

ValidationVerdict Validator::stateless_check(const Message& msg) {
  const auto round = msg.claimed_round();
  if (round < 1 || !well_formed(msg)) return ValidationVerdict::reject(RejectReason::BadStructure, SimTime{});
  auto cost = charge(round, config_.sig_cost());
  if (!sim_verify(*registry_, msg.auth(), msg.sender_key(), msg.signing_bytes())) {
    return ValidationVerdict::reject(RejectReason::BadAuth, cost);
  }
  auto key = std::make_tuple(round, msg.claimed_step(), static_cast<std::uint8_t>(msg.kind()), msg.sender_key());
  if (!admitted_.insert(key).second) return ValidationVerdict::reject(RejectReason::Duplicate, cost);
  return ValidationVerdict::accept(0, cost);
}

SimTime Validator::block_cost(const Block& b) const {
  std::uint64_t uncached = 0;
  for (auto stub : b.payset()) uncached += tx_cache_.count(stub) == 0 ? 1 : 0;
  double ms = config_.block_verify_cost_ms_per_mb * static_cast<double>(b.byte_size()) / 1e6 +
              config_.tx_verify_cost_ms * static_cast<double>(uncached);
  return SimTime::from_millis(ms);
}

ValidationVerdict Validator::full_validate(const Message& msg, const Seed* seed) {
  const auto round = msg.claimed_round();
  const auto& proof = msg.proof();
  if (seed == nullptr) return ValidationVerdict::defer(SimTime{});
  auto cost = charge(round, config_.sig_cost());
  auto pv = verify_sortition(proof, round, msg.claimed_step(), seed, *registry_, sortition_);
  if (pv.status != ProofStatus::Valid) {
    return ValidationVerdict::reject(pv.zero_votes ? RejectReason::ZeroVotes : RejectReason::BadProof, cost);
  }
  ValidationVerdict v = ValidationVerdict::accept(pv.votes, cost);
  switch (msg.kind()) {
    case MessageKind::Vote: {
      const auto* body = msg.vote();
      v.cost = v.cost + charge(round, config_.sig_cost());
      if (!sim_verify(*registry_, body->vote_sig, msg.sender_key(),
                      vote_payload(round, msg.claimed_step(), body->value, body->bit))) {
        return ValidationVerdict::reject(RejectReason::BadAuth, v.cost);
      }
      v.cost = v.cost + charge(round, SimTime::from_millis(config_.vote_verify_cost_ms_per_vote *
                                                           static_cast<double>(pv.votes)));
      break;
    }
    case MessageKind::BlockProposal: {
      const auto* body = msg.proposal();
      v.cost = v.cost + charge(round, config_.sig_cost());
      ByteWriter w;
      w.tag("algosim/block-hash").hash(body->block->hash());
      if (!sim_verify(*registry_, body->block_sig, msg.sender_key(), w.bytes())) {
        return ValidationVerdict::reject(RejectReason::BadAuth, v.cost);
      }
      v.cost = v.cost + charge(round, block_cost(*body->block));
      for (auto stub : body->block->payset()) tx_cache_.insert(stub);
      v.priority = proposer_priority(proof, pv.votes);
      break;
    }
    case MessageKind::Credential:
      v.priority = proposer_priority(proof, pv.votes);
      break;
  }
  return v;
}

bool Validator::penalize(NodeId peer) {
  auto& s = scores_[peer.value];
  s.peer = peer;
  ++s.invalid_count;
  if (!s.banned && s.invalid_count >= config_.ban_threshold) {
    s.banned = true;
    return true;
  }
  return false;
}

void Validator::note_undecided(NodeId peer, std::uint64_t bytes) {
  auto& s = scores_[peer.value];
  s.peer = peer;
  s.undecided_bytes += bytes;
}

bool Validator::banned(NodeId peer) const {
  auto it = scores_.find(peer.value);
  return it != scores_.end() && it->second.banned;
}

const PeerScore* Validator::score(NodeId peer) const {
  auto it = scores_.find(peer.value);
  return it == scores_.end() ? nullptr : &it->second;
}

void Validator::prune_before(std::int64_t round) {
  auto end = admitted_.lower_bound(std::make_tuple(round, std::int32_t{-1}, std::uint8_t{0}, PublicId{}));
  admitted_.erase(admitted_.begin(), end);
}

}  // namespace algosim
