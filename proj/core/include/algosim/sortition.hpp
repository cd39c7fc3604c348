#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "algosim/crypto.hpp"
#include "algosim/types.hpp"

namespace algosim {

/// Protocol-wide sortition constants.
struct SortitionParams {
  double proposer_votes = 26.0;     // expected proposer sub-users per round
  double committee_votes = 2000.0;  // expected committee votes per step
  std::int64_t lookback = 2;        // keys must exist at least this many rounds

  /// p = pi_role / W.
  double probability(Role role, std::uint64_t total_stake) const;
};

struct SortitionOutcome {
  std::uint64_t votes = 0;
  Hash256 hash;
  std::optional<Hash256> priority;  // proposer role with votes >= 1
};

struct SortitionDraw {
  Hash256 hash;
  SortitionProof proof;
};

/// y = H(sig_i(r, s, Q^{r-1})). Throws EligibilityError for keys created too recently.
SortitionDraw sortition_hash(const KeyPair& key, std::int64_t round, std::int32_t step, const Seed& prev_seed,
                             Role role, std::int64_t lookback);

/// Hash of the proof signature; identical for prover and verifier.
Hash256 proof_hash(const SortitionProof& proof);

/// Endpoints of the interval partition of [0,1): element j is sum_{x<=j} B(x; w, p).
/// The final element is the full cumulative mass (1 up to rounding).
std::vector<long double> binomial_cdf_endpoints(std::uint64_t stake, double p);

/// j such that hash/2^256 lies in [CDF(j-1), CDF(j)). Throws ParameterError unless 0 < p < 1.
std::uint64_t votes_from_hash(const Hash256& hash, std::uint64_t stake, double p);

/// min_u H(tag || u) over u in [0, votes). Throws ParameterError when votes == 0.
Hash256 proposer_priority(const SortitionProof& proof, std::uint64_t votes);

enum class ProofStatus { Valid, Invalid, Undecidable };

struct ProofVerdict {
  ProofStatus status = ProofStatus::Invalid;
  std::uint64_t votes = 0;
  bool zero_votes = false;  // proof authentic but the key drew no votes
};

/// Stateful proof check. `local_seed` is Q^{claimed_round-1} when the verifier
/// has it; nullptr means the verifier has not finished that round yet.
ProofVerdict verify_sortition(const SortitionProof& proof, std::int64_t claimed_round, std::int32_t claimed_step,
                              const Seed* local_seed, const KeyRegistry& stake_table, const SortitionParams& params);

}  // namespace algosim
