#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <unordered_map>

#include "algosim/hash.hpp"

namespace algosim {

using PublicId = Hash256;

struct KeyPair {
  PublicId public_id;
  Hash256 secret;
  std::uint64_t stake = 0;
  std::int64_t created_round = 0;

  /// Sortition-eligible in round r when created at least `lookback` rounds earlier.
  bool eligible(std::int64_t round, std::int64_t lookback) const { return created_round <= round - lookback; }

  static KeyPair generate(std::mt19937_64& rng, std::uint64_t stake, std::int64_t created_round);
};

// Keyed-digest stand-in for a public-key signature. `tag` can only be
// re-derived by someone holding the signer's secret.
struct SimSignature {
  PublicId signer;
  Hash256 payload_digest;
  Hash256 tag;

  bool operator==(const SimSignature&) const = default;
};

SimSignature sim_sign(const KeyPair& key, ByteView payload);

/// Public registry standing in for a PKI plus the stake table: resolves
/// public ids to the material needed for verification.
class KeyRegistry {
 public:
  void add(const KeyPair& key);
  const KeyPair* find(const PublicId& id) const;

  std::uint64_t stake_of(const PublicId& id) const;
  std::uint64_t total_stake() const { return total_stake_; }
  std::size_t size() const { return keys_.size(); }

 private:
  std::unordered_map<PublicId, KeyPair, Hash256Hasher> keys_;
  std::uint64_t total_stake_ = 0;
};

/// True iff `sig` is sim_sign(key_of(public_id), payload). Unknown ids verify false.
bool sim_verify(const KeyRegistry& registry, const SimSignature& sig, const PublicId& public_id, ByteView payload);

}  // namespace algosim
