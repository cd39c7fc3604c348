#include <random>

#include <gtest/gtest.h>

#include "algosim/consensus.hpp"
#include "algosim/errors.hpp"

using namespace algosim;

namespace {

struct Solo {
  explicit Solo(std::uint64_t stake, std::uint64_t others) {
    std::mt19937_64 rng{21};
    key = KeyPair::generate(rng, stake, -2);
    reg.add(key);
    if (others > 0) reg.add(KeyPair::generate(rng, others, -2));
  }
  KeyPair key;
  KeyRegistry reg;
  Seed q0 = genesis_seed(3);
  Block g = genesis_block(q0);
};

}  // namespace

TEST(Consensus, ThresholdIsCeilOfFraction) {
  Solo s{1'000'000, 0};
  RoundMachine m{s.key, {}, {}, s.reg};
  EXPECT_EQ(m.threshold(), 1370U);  // ceil(0.685 * 2000)
}

TEST(Consensus, ConfigValidation) {
  ConsensusConfig c;
  c.max_steps = 2;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.step_timeout_s = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.committee_threshold_fraction = 1.2;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_NO_THROW(ConsensusConfig{}.validate());
}

TEST(Consensus, BeatsOrdersByPriorityThenProposer) {
  ProposalCandidate a, b;
  a.priority.bytes[0] = 1;
  b.priority.bytes[0] = 2;
  EXPECT_TRUE(beats(a, b));
  EXPECT_FALSE(beats(b, a));
  b.priority = a.priority;
  a.proposer.bytes[0] = 1;
  b.proposer.bytes[0] = 9;
  EXPECT_TRUE(beats(a, b));
}

TEST(Consensus, SoleStakeholderDecidesOwnBlockAtFirstBinaryStep) {
  Solo s{1'000'000, 0};
  RoundMachine m{s.key, {}, {}, s.reg};
  auto t0 = SimTime::from_seconds(10);
  auto begin = m.begin_round(1, s.g, s.q0, t0, {1, 2, 3});
  ASSERT_EQ(begin.gossip.size(), 2U);
  EXPECT_EQ(begin.gossip[0]->kind(), MessageKind::Credential);
  EXPECT_EQ(begin.gossip[1]->kind(), MessageKind::BlockProposal);
  ASSERT_TRUE(begin.next_deadline);
  EXPECT_EQ(*begin.next_deadline, t0 + SimTime::from_seconds(150));

  auto adv = m.advance(*begin.next_deadline, true);
  ASSERT_TRUE(adv.decision);
  EXPECT_EQ(adv.decision->step, 3);
  EXPECT_EQ(adv.decision->bit, 0);
  EXPECT_FALSE(adv.decision->block->is_empty());
  EXPECT_EQ(adv.decision->block->payset(), (std::vector<std::uint64_t>{1, 2, 3}));
  EXPECT_EQ(m.state().step_timeouts, 0);
  EXPECT_EQ(adv.gossip.size(), 3U);  // one vote per step 1..3
}

TEST(Consensus, MinorityNodeTimesOutToEmptyBlock) {
  Solo s{100, 999'900};  // its own votes never reach 1370
  RoundMachine m{s.key, {}, {}, s.reg};
  auto now = SimTime::from_seconds(0);
  auto adv = m.begin_round(1, s.g, s.q0, now, {});
  now = *adv.next_deadline;
  int calls = 0;
  std::optional<Decision> d;
  while (!d) {
    adv = m.advance(now, calls > 0);
    ++calls;
    if (adv.decision) {
      d = adv.decision;
    } else {
      ASSERT_TRUE(adv.next_deadline);
      EXPECT_EQ(*adv.next_deadline, now + SimTime::from_seconds(60));
      now = *adv.next_deadline;
    }
  }
  EXPECT_EQ(d->step, 4);
  EXPECT_EQ(d->bit, 1);
  EXPECT_TRUE(d->block->is_empty());
  EXPECT_EQ(m.state().step_timeouts, 4);
  EXPECT_EQ(now, SimTime::from_seconds(390));  // 150 + 4 x 60
}

TEST(Consensus, ProposalsAfterWindowIgnored) {
  Solo s{500'000, 500'000};
  RoundMachine m{s.key, {}, {}, s.reg};
  auto adv = m.begin_round(1, s.g, s.q0, SimTime{}, {});
  auto deadline = *adv.next_deadline;
  m.advance(deadline, true);
  EXPECT_EQ(m.state().step, 1);
  std::mt19937_64 rng{1};
  auto other = KeyPair::generate(rng, 1, -2);
  auto blk = std::make_shared<const Block>(make_proposed_block(other, 1, s.q0, s.g.hash(), {9}));
  auto bp = make_proposal(other, blk, SortitionProof{});
  Hash256 best;  // all-zero priority beats anything
  EXPECT_FALSE(m.on_proposal(bp, best, deadline + SimTime::from_seconds(1)));
}

TEST(Consensus, CoinIsDeterministicPerStep) {
  Solo s{1'000'000, 0};
  RoundMachine a{s.key, {}, {}, s.reg};
  RoundMachine b{s.key, {}, {}, s.reg};
  a.begin_round(1, s.g, s.q0, SimTime{}, {});
  b.begin_round(1, s.g, s.q0, SimTime{}, {});
  int ones = 0;
  for (int step = 3; step < 40; ++step) {
    EXPECT_EQ(a.common_coin(step), b.common_coin(step));
    ones += a.common_coin(step);
  }
  EXPECT_GT(ones, 5);
  EXPECT_LT(ones, 32);
}

TEST(Consensus, FinalizeChainsSeedAndHash) {
  Solo s{1'000'000, 0};
  auto e = make_empty_block(1, s.q0, s.g.hash());
  auto f = finalize_round(e, s.q0);
  EXPECT_EQ(f.block_hash, e.hash());
  EXPECT_EQ(f.seed, next_seed(e, s.q0));
  EXPECT_EQ(f.seed.round, 1);
}
