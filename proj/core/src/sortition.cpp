#include "algosim/sortition.hpp"

#include <cmath>

#include "algosim/errors.hpp"

namespace algosim {

double SortitionParams::probability(Role role, std::uint64_t total_stake) const {
  if (total_stake == 0) throw ParameterError("total stake is zero");
  double expected = role == Role::Proposer ? proposer_votes : committee_votes;
  return expected / static_cast<double>(total_stake);
}

SortitionDraw sortition_hash(const KeyPair& key, std::int64_t round, std::int32_t step, const Seed& prev_seed,
                             Role role, std::int64_t lookback) {
  if (!key.eligible(round, lookback)) throw EligibilityError("key not eligible for sortition in this round");
  SortitionDraw d;
  d.proof.signature = sim_sign(key, sortition_payload(round, step, prev_seed.value));
  d.proof.role = role;
  d.proof.step = step;
  d.proof.signer = key.public_id;
  d.hash = proof_hash(d.proof);
  return d;
}

Hash256 proof_hash(const SortitionProof& proof) {
  ByteWriter w;
  w.tag("algosim/vrf").hash(proof.signature.tag);
  return hash256(w.bytes());
}

namespace {

void check_probability(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("sortition probability must lie in (0,1)");
}

// B(0; w, p) = (1-p)^w evaluated in log space.
long double binomial_zero(std::uint64_t stake, double p) {
  return std::exp(static_cast<long double>(stake) * std::log1p(-static_cast<long double>(p)));
}

}  // namespace

std::vector<long double> binomial_cdf_endpoints(std::uint64_t stake, double p) {
  check_probability(p);
  std::vector<long double> ends;
  ends.reserve(stake + 1);
  const long double ratio = static_cast<long double>(p) / (1.0L - static_cast<long double>(p));
  long double term = binomial_zero(stake, p);
  long double cdf = term;
  ends.push_back(cdf);
  for (std::uint64_t x = 0; x < stake; ++x) {
    term *= static_cast<long double>(stake - x) / static_cast<long double>(x + 1) * ratio;
    cdf += term;
    ends.push_back(cdf);
  }
  return ends;
}

std::uint64_t votes_from_hash(const Hash256& hash, std::uint64_t stake, double p) {
  check_probability(p);
  if (stake == 0) return 0;
  const long double x = hash.unit_interval();
  const long double ratio = static_cast<long double>(p) / (1.0L - static_cast<long double>(p));
  long double term = binomial_zero(stake, p);
  long double cdf = term;
  std::uint64_t j = 0;
  while (x >= cdf && j < stake) {
    term *= static_cast<long double>(stake - j) / static_cast<long double>(j + 1) * ratio;
    ++j;
    cdf += term;
  }
  return j;
}

Hash256 proposer_priority(const SortitionProof& proof, std::uint64_t votes) {
  if (votes == 0) throw ParameterError("priority requires at least one vote");
  Hash256 best;
  for (std::uint64_t u = 0; u < votes; ++u) {
    ByteWriter w;
    w.hash(proof.signature.tag).u64(u);
    auto h = hash256(w.bytes());
    if (u == 0 || h < best) best = h;
  }
  return best;
}

ProofVerdict verify_sortition(const SortitionProof& proof, std::int64_t claimed_round, std::int32_t claimed_step,
                              const Seed* local_seed, const KeyRegistry& stake_table, const SortitionParams& params) {
  if (local_seed == nullptr) return {ProofStatus::Undecidable, 0};
  if (proof.step != claimed_step || proof.signature.signer != proof.signer) return {ProofStatus::Invalid, 0};
  const auto* key = stake_table.find(proof.signer);
  if (key == nullptr || !key->eligible(claimed_round, params.lookback)) return {ProofStatus::Invalid, 0};
  if (!sim_verify(stake_table, proof.signature, proof.signer,
                  sortition_payload(claimed_round, claimed_step, local_seed->value))) {
    return {ProofStatus::Invalid, 0};
  }
  auto p = params.probability(proof.role, stake_table.total_stake());
  auto votes = votes_from_hash(proof_hash(proof), key->stake, p);
  if (votes == 0) return {ProofStatus::Invalid, 0, true};
  return {ProofStatus::Valid, votes};
}

}  // namespace algosim
