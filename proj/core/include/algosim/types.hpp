#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "algosim/crypto.hpp"
#include "algosim/hash.hpp"

namespace algosim {

/// Network participant index inside one simulation instance.
struct NodeId {
  std::uint32_t value = 0;
  auto operator<=>(const NodeId&) const = default;
};

/// Byte-size model for messages on the wire.
struct SizeModel {
  std::uint64_t block_header_bytes = 200;
  std::uint64_t tx_stub_bytes = 250;
  std::uint64_t credential_bytes = 200;
  std::uint64_t vote_bytes = 300;
  std::uint64_t proposal_overhead_bytes = 300;

  /// Number of transaction stubs that fit in a block of `block_bytes`.
  std::uint64_t stubs_for(std::uint64_t block_bytes) const {
    return block_bytes > block_header_bytes ? (block_bytes - block_header_bytes) / tx_stub_bytes : 0;
  }
};

struct Seed {
  Hash256 value;
  std::int64_t round = 0;
  bool operator==(const Seed&) const = default;
};

/// Genesis seed Q^0 derived from the run's master seed.
Seed genesis_seed(std::uint64_t master_seed);

/// Immutable block. Proposed blocks carry sig_l(Q^{r-1}, r) as seed material;
/// the empty block E^r carries the raw pair (Q^{r-1}, r).
class Block {
 public:
  std::int64_t round() const { return round_; }
  const std::vector<std::uint64_t>& payset() const { return payset_; }
  const Hash256& prev_hash() const { return prev_hash_; }
  const Hash256& prev_seed() const { return prev_seed_; }
  const std::optional<SimSignature>& seed_signature() const { return seed_signature_; }
  const PublicId& proposer() const { return proposer_; }
  bool is_empty() const { return is_empty_; }
  std::uint64_t byte_size() const { return byte_size_; }
  const Hash256& hash() const { return hash_; }

  Bytes encode() const;
  static Block decode(ByteReader& in);

  bool operator==(const Block& o) const { return hash_ == o.hash_ && byte_size_ == o.byte_size_; }

  friend Block make_empty_block(std::int64_t round, const Seed& prev_seed, const Hash256& prev_hash,
                                const SizeModel& sizes);
  friend Block make_proposed_block(const KeyPair& proposer, std::int64_t round, const Seed& prev_seed,
                                   const Hash256& prev_hash, std::vector<std::uint64_t> payset,
                                   const SizeModel& sizes);
  friend Block make_fabricated_block(const KeyPair& author, std::int64_t round, const Hash256& fake_prev_seed,
                                     const Hash256& fake_prev_hash, std::vector<std::uint64_t> payset,
                                     const SizeModel& sizes);
  friend Block genesis_block(const Seed& q0);

 private:
  void seal();

  std::int64_t round_ = 0;
  std::vector<std::uint64_t> payset_;
  Hash256 prev_hash_;
  Hash256 prev_seed_;
  std::optional<SimSignature> seed_signature_;
  PublicId proposer_;
  bool is_empty_ = true;
  std::uint64_t byte_size_ = 0;
  Hash256 hash_;
};

/// E^r = (r, Q^{r-1}, H(B^{r-1})).
Block make_empty_block(std::int64_t round, const Seed& prev_seed, const Hash256& prev_hash, const SizeModel& sizes = {});
Block make_proposed_block(const KeyPair& proposer, std::int64_t round, const Seed& prev_seed, const Hash256& prev_hash,
                          std::vector<std::uint64_t> payset, const SizeModel& sizes = {});
/// Block whose seed signature is garbage. Used to build undecidable attack payloads.
Block make_fabricated_block(const KeyPair& author, std::int64_t round, const Hash256& fake_prev_seed,
                            const Hash256& fake_prev_hash, std::vector<std::uint64_t> payset,
                            const SizeModel& sizes = {});
Block genesis_block(const Seed& q0);

/// Canonical bytes signed by the round leader: (Q^{r-1}, r).
Bytes seed_signing_payload(const Hash256& prev_seed, std::int64_t round);

/// Q^r from the consensus block of round r and Q^{r-1}.
Seed next_seed(const Block& decided, const Seed& prev_seed);

enum class Role : std::uint8_t { Proposer = 0, Committee = 1 };

/// sig_i(r, s, Q^{r-1}) plus the role/step it claims.
struct SortitionProof {
  SimSignature signature;
  Role role = Role::Committee;
  std::int32_t step = 0;
  PublicId signer;
  bool operator==(const SortitionProof&) const = default;
};

/// Canonical bytes covered by a sortition proof.
Bytes sortition_payload(std::int64_t round, std::int32_t step, const Hash256& prev_seed);

enum class MessageKind : std::uint8_t { BlockProposal = 1, Vote = 2, Credential = 3 };

struct CredentialBody {
  SortitionProof proof;
  bool operator==(const CredentialBody&) const = default;
};

struct ProposalBody {
  std::shared_ptr<const Block> block;
  SimSignature block_sig;  // sig_i(H(B))
  SortitionProof proof;
  bool operator==(const ProposalBody& o) const {
    return block_sig == o.block_sig && proof == o.proof && (block == o.block || (block && o.block && *block == *o.block));
  }
};

/// Reduction votes carry a block hash; binary-agreement votes carry a bit
/// relative to the voter's reduction output `value`.
struct VoteBody {
  Hash256 value;
  std::uint8_t bit = 0;
  SimSignature vote_sig;  // sig_i(v)
  SortitionProof proof;
  bool operator==(const VoteBody&) const = default;
};

Bytes vote_payload(std::int64_t round, std::int32_t step, const Hash256& value, std::uint8_t bit);

class Message {
 public:
  using Body = std::variant<ProposalBody, VoteBody, CredentialBody>;

  MessageKind kind() const { return kind_; }
  const PublicId& sender_key() const { return sender_key_; }
  std::int64_t claimed_round() const { return claimed_round_; }
  std::int32_t claimed_step() const { return claimed_step_; }
  const Body& body() const { return body_; }
  std::uint64_t byte_size() const { return byte_size_; }
  const SimSignature& auth() const { return auth_; }
  const Hash256& id() const { return id_; }

  const ProposalBody* proposal() const { return std::get_if<ProposalBody>(&body_); }
  const VoteBody* vote() const { return std::get_if<VoteBody>(&body_); }
  const CredentialBody* credential() const { return std::get_if<CredentialBody>(&body_); }
  const SortitionProof& proof() const;

  /// Bytes covered by the outer authentication signature.
  Bytes signing_bytes() const;
  /// Full canonical encoding; byte_size() is recorded inside, padding is implicit.
  Bytes encode() const;
  static Message decode(ByteView bytes);

  bool operator==(const Message& o) const {
    return kind_ == o.kind_ && sender_key_ == o.sender_key_ && claimed_round_ == o.claimed_round_ &&
           claimed_step_ == o.claimed_step_ && body_ == o.body_ && byte_size_ == o.byte_size_ &&
           auth_ == o.auth_ && id_ == o.id_;
  }

  friend Message make_credential(const KeyPair&, std::int64_t, const SortitionProof&, const SizeModel&);
  friend Message make_proposal(const KeyPair&, std::shared_ptr<const Block>, const SortitionProof&, const SizeModel&);
  friend Message make_vote(const KeyPair&, std::int64_t, std::int32_t, const Hash256&, std::uint8_t,
                           const SortitionProof&, const SizeModel&);

 private:
  void seal(const KeyPair& author);
  void write_unsigned(ByteWriter& w) const;

  MessageKind kind_ = MessageKind::Vote;
  PublicId sender_key_;
  std::int64_t claimed_round_ = 0;
  std::int32_t claimed_step_ = 0;
  Body body_;
  std::uint64_t byte_size_ = 0;
  SimSignature auth_;
  Hash256 id_;
};

using MessagePtr = std::shared_ptr<const Message>;

/// cm^r_i = (sigma^{r,1}_i).
Message make_credential(const KeyPair& author, std::int64_t round, const SortitionProof& proof,
                        const SizeModel& sizes = {});
/// bp^r_i = (B^r_i, sig_i(H(B^r_i)), sigma^{r,1}_i).
Message make_proposal(const KeyPair& author, std::shared_ptr<const Block> block, const SortitionProof& proof,
                      const SizeModel& sizes = {});
/// vm^{r,s}_i = (sig(v^{r,s}_i), sigma^{r,s}_i).
Message make_vote(const KeyPair& author, std::int64_t round, std::int32_t step, const Hash256& value,
                  std::uint8_t bit, const SortitionProof& proof, const SizeModel& sizes = {});

}  // namespace algosim
