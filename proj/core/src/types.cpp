#include "algosim/types.hpp"

#include "algosim/errors.hpp"

namespace algosim {

namespace {

void write_sig(ByteWriter& w, const SimSignature& s) { w.hash(s.signer).hash(s.payload_digest).hash(s.tag); }

SimSignature read_sig(ByteReader& r) {
  SimSignature s;
  s.signer = r.hash();
  s.payload_digest = r.hash();
  s.tag = r.hash();
  return s;
}

void write_proof(ByteWriter& w, const SortitionProof& p) {
  w.u8(static_cast<std::uint8_t>(p.role)).u32(static_cast<std::uint32_t>(p.step)).hash(p.signer);
  write_sig(w, p.signature);
}

SortitionProof read_proof(ByteReader& r) {
  SortitionProof p;
  auto role = r.u8();
  if (role > 1) throw DecodeError("unknown sortition role");
  p.role = static_cast<Role>(role);
  p.step = static_cast<std::int32_t>(r.u32());
  p.signer = r.hash();
  p.signature = read_sig(r);
  return p;
}

}  // namespace

Seed genesis_seed(std::uint64_t master_seed) {
  ByteWriter w;
  w.tag("algosim/genesis-seed").u64(master_seed);
  return Seed{hash256(w.bytes()), 0};
}

Bytes seed_signing_payload(const Hash256& prev_seed, std::int64_t round) {
  ByteWriter w;
  w.tag("algosim/seed").hash(prev_seed).i64(round);
  return std::move(w).take();
}

Bytes sortition_payload(std::int64_t round, std::int32_t step, const Hash256& prev_seed) {
  ByteWriter w;
  w.tag("algosim/sortition").i64(round).u32(static_cast<std::uint32_t>(step)).hash(prev_seed);
  return std::move(w).take();
}

Bytes vote_payload(std::int64_t round, std::int32_t step, const Hash256& value, std::uint8_t bit) {
  ByteWriter w;
  w.tag("algosim/vote").i64(round).u32(static_cast<std::uint32_t>(step)).hash(value).u8(bit);
  return std::move(w).take();
}

Bytes Block::encode() const {
  ByteWriter w;
  w.i64(round_).hash(prev_hash_).u8(is_empty_ ? 1 : 0).hash(prev_seed_);
  w.u8(seed_signature_ ? 1 : 0);
  if (seed_signature_) write_sig(w, *seed_signature_);
  w.hash(proposer_).u64(byte_size_).u32(static_cast<std::uint32_t>(payset_.size()));
  for (auto stub : payset_) w.u64(stub);
  return std::move(w).take();
}

Block Block::decode(ByteReader& in) {
  Block b;
  b.round_ = in.i64();
  b.prev_hash_ = in.hash();
  b.is_empty_ = in.u8() != 0;
  b.prev_seed_ = in.hash();
  if (in.u8() != 0) b.seed_signature_ = read_sig(in);
  b.proposer_ = in.hash();
  b.byte_size_ = in.u64();
  auto n = in.u32();
  b.payset_.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) b.payset_.push_back(in.u64());
  if (b.is_empty_ && !b.payset_.empty()) throw DecodeError("empty block with non-empty payset");
  b.seal();
  return b;
}

void Block::seal() { hash_ = hash256(encode()); }

Block make_empty_block(std::int64_t round, const Seed& prev_seed, const Hash256& prev_hash, const SizeModel& sizes) {
  if (round < 1) throw ParameterError("empty block round must be >= 1");
  Block b;
  b.round_ = round;
  b.prev_hash_ = prev_hash;
  b.prev_seed_ = prev_seed.value;
  b.is_empty_ = true;
  b.byte_size_ = sizes.block_header_bytes;
  b.seal();
  return b;
}

Block make_proposed_block(const KeyPair& proposer, std::int64_t round, const Seed& prev_seed,
                          const Hash256& prev_hash, std::vector<std::uint64_t> payset, const SizeModel& sizes) {
  Block b;
  b.round_ = round;
  b.prev_hash_ = prev_hash;
  b.prev_seed_ = prev_seed.value;
  b.is_empty_ = false;
  b.seed_signature_ = sim_sign(proposer, seed_signing_payload(prev_seed.value, round));
  b.proposer_ = proposer.public_id;
  b.byte_size_ = sizes.block_header_bytes + sizes.tx_stub_bytes * payset.size();
  b.payset_ = std::move(payset);
  b.seal();
  return b;
}

Block make_fabricated_block(const KeyPair& author, std::int64_t round, const Hash256& fake_prev_seed,
                            const Hash256& fake_prev_hash, std::vector<std::uint64_t> payset,
                            const SizeModel& sizes) {
  Block b;
  b.round_ = round;
  b.prev_hash_ = fake_prev_hash;
  b.prev_seed_ = fake_prev_seed;
  b.is_empty_ = false;
  b.seed_signature_ = sim_sign(author, seed_signing_payload(fake_prev_seed, round));
  b.proposer_ = author.public_id;
  b.byte_size_ = sizes.block_header_bytes + sizes.tx_stub_bytes * payset.size();
  b.payset_ = std::move(payset);
  b.seal();
  return b;
}

Block genesis_block(const Seed& q0) {
  Block b;
  b.round_ = 0;
  b.prev_seed_ = q0.value;
  b.is_empty_ = true;
  b.seal();
  return b;
}

Seed next_seed(const Block& decided, const Seed& prev_seed) {
  ByteWriter w;
  if (!decided.is_empty() && decided.seed_signature()) {
    w.tag("algosim/seed-signed").hash(decided.seed_signature()->tag);
  } else {
    w.tag("algosim/seed-empty").hash(prev_seed.value).i64(decided.round());
  }
  return Seed{hash256(w.bytes()), decided.round()};
}

const SortitionProof& Message::proof() const {
  return std::visit([](const auto& b) -> const SortitionProof& { return b.proof; }, body_);
}

void Message::write_unsigned(ByteWriter& w) const {
  w.u8(static_cast<std::uint8_t>(kind_))
      .hash(sender_key_)
      .i64(claimed_round_)
      .u32(static_cast<std::uint32_t>(claimed_step_))
      .u64(byte_size_);
  switch (kind_) {
    case MessageKind::BlockProposal: {
      const auto& p = std::get<ProposalBody>(body_);
      w.blob(p.block->encode());
      write_sig(w, p.block_sig);
      write_proof(w, p.proof);
      break;
    }
    case MessageKind::Vote: {
      const auto& v = std::get<VoteBody>(body_);
      w.hash(v.value).u8(v.bit);
      write_sig(w, v.vote_sig);
      write_proof(w, v.proof);
      break;
    }
    case MessageKind::Credential:
      write_proof(w, std::get<CredentialBody>(body_).proof);
      break;
  }
}

Bytes Message::signing_bytes() const {
  ByteWriter w;
  write_unsigned(w);
  return std::move(w).take();
}

Bytes Message::encode() const {
  ByteWriter w;
  write_unsigned(w);
  write_sig(w, auth_);
  return std::move(w).take();
}

Message Message::decode(ByteView bytes) {
  ByteReader r{bytes};
  Message m;
  auto kind = r.u8();
  if (kind < 1 || kind > 3) throw DecodeError("unknown message kind");
  m.kind_ = static_cast<MessageKind>(kind);
  m.sender_key_ = r.hash();
  m.claimed_round_ = r.i64();
  m.claimed_step_ = static_cast<std::int32_t>(r.u32());
  m.byte_size_ = r.u64();
  switch (m.kind_) {
    case MessageKind::BlockProposal: {
      ProposalBody p;
      auto blob = r.blob();
      ByteReader br{blob};
      p.block = std::make_shared<const Block>(Block::decode(br));
      if (!br.done()) throw DecodeError("trailing bytes in block");
      p.block_sig = read_sig(r);
      p.proof = read_proof(r);
      m.body_ = std::move(p);
      break;
    }
    case MessageKind::Vote: {
      VoteBody v;
      v.value = r.hash();
      v.bit = r.u8();
      v.vote_sig = read_sig(r);
      v.proof = read_proof(r);
      m.body_ = v;
      break;
    }
    case MessageKind::Credential:
      m.body_ = CredentialBody{read_proof(r)};
      break;
  }
  m.auth_ = read_sig(r);
  if (!r.done()) throw DecodeError("trailing bytes in message");
  m.id_ = hash256(bytes);
  return m;
}

void Message::seal(const KeyPair& author) {
  auth_ = sim_sign(author, signing_bytes());
  id_ = hash256(encode());
}

Message make_credential(const KeyPair& author, std::int64_t round, const SortitionProof& proof,
                        const SizeModel& sizes) {
  Message m;
  m.kind_ = MessageKind::Credential;
  m.sender_key_ = author.public_id;
  m.claimed_round_ = round;
  m.claimed_step_ = proof.step;
  m.body_ = CredentialBody{proof};
  m.byte_size_ = sizes.credential_bytes;
  m.seal(author);
  return m;
}

Message make_proposal(const KeyPair& author, std::shared_ptr<const Block> block, const SortitionProof& proof,
                      const SizeModel& sizes) {
  Message m;
  m.kind_ = MessageKind::BlockProposal;
  m.sender_key_ = author.public_id;
  m.claimed_round_ = block->round();
  m.claimed_step_ = proof.step;
  ProposalBody p;
  ByteWriter bw;
  bw.tag("algosim/block-hash").hash(block->hash());
  p.block_sig = sim_sign(author, bw.bytes());
  p.proof = proof;
  m.byte_size_ = block->byte_size() + sizes.proposal_overhead_bytes;
  p.block = std::move(block);
  m.body_ = std::move(p);
  m.seal(author);
  return m;
}

Message make_vote(const KeyPair& author, std::int64_t round, std::int32_t step, const Hash256& value,
                  std::uint8_t bit, const SortitionProof& proof, const SizeModel& sizes) {
  Message m;
  m.kind_ = MessageKind::Vote;
  m.sender_key_ = author.public_id;
  m.claimed_round_ = round;
  m.claimed_step_ = step;
  VoteBody v;
  v.value = value;
  v.bit = bit;
  v.vote_sig = sim_sign(author, vote_payload(round, step, value, bit));
  v.proof = proof;
  m.body_ = v;
  m.byte_size_ = sizes.vote_bytes;
  m.seal(author);
  return m;
}

}  // namespace algosim
