#include "algosim/crypto.hpp"

namespace algosim {

namespace {

Hash256 derive_tag(const Hash256& secret, const Hash256& digest) {
  ByteWriter w;
  w.tag("algosim/sig").hash(secret).hash(digest);
  return hash256(w.bytes());
}

}  // namespace

KeyPair KeyPair::generate(std::mt19937_64& rng, std::uint64_t stake, std::int64_t created_round) {
  KeyPair k;
  for (std::size_t i = 0; i < 32; i += 8) {
    auto v = rng();
    for (std::size_t j = 0; j < 8; ++j) k.secret.bytes[i + j] = static_cast<std::uint8_t>(v >> (8 * j));
  }
  ByteWriter w;
  w.tag("algosim/pk").hash(k.secret);
  k.public_id = hash256(w.bytes());
  k.stake = stake;
  k.created_round = created_round;
  return k;
}

SimSignature sim_sign(const KeyPair& key, ByteView payload) {
  SimSignature sig;
  sig.signer = key.public_id;
  sig.payload_digest = hash256(payload);
  sig.tag = derive_tag(key.secret, sig.payload_digest);
  return sig;
}

void KeyRegistry::add(const KeyPair& key) {
  auto [it, inserted] = keys_.emplace(key.public_id, key);
  if (!inserted) {
    total_stake_ -= it->second.stake;
    it->second = key;
  }
  total_stake_ += key.stake;
}

const KeyPair* KeyRegistry::find(const PublicId& id) const {
  auto it = keys_.find(id);
  return it == keys_.end() ? nullptr : &it->second;
}

std::uint64_t KeyRegistry::stake_of(const PublicId& id) const {
  const auto* k = find(id);
  return k ? k->stake : 0;
}

bool sim_verify(const KeyRegistry& registry, const SimSignature& sig, const PublicId& public_id, ByteView payload) {
  if (sig.signer != public_id) return false;
  const auto* key = registry.find(public_id);
  if (key == nullptr) return false;
  auto digest = hash256(payload);
  if (digest != sig.payload_digest) return false;
  return derive_tag(key->secret, digest) == sig.tag;
}

}  // namespace algosim
