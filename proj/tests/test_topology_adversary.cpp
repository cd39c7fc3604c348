#include <random>

#include <gtest/gtest.h>

#include "algosim/adversary.hpp"
#include "algosim/errors.hpp"
#include "algosim/topology.hpp"

using namespace algosim;

TEST(Topology, ConnectedWithinDegreeCap) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto t = build_topology(64, 0, 8, {}, seed);
    EXPECT_NO_THROW(check_topology(t));
    EXPECT_TRUE(honest_connected(t));
    for (std::uint32_t i = 0; i < 64; ++i) {
      EXPECT_GE(t.degree(NodeId{i}), 2U);
      EXPECT_LE(t.degree(NodeId{i}), 8U);
    }
  }
}

TEST(Topology, AttackersLinkedToEveryTargetOnly) {
  auto t = build_topology(20, 3, 6, {NodeId{0}, NodeId{5}}, 4);
  check_topology(t);
  for (std::uint32_t m = 20; m < 23; ++m) {
    EXPECT_TRUE(t.is_malicious(NodeId{m}));
    EXPECT_EQ(t.degree(NodeId{m}), 2U);
    EXPECT_TRUE(t.linked(NodeId{m}, NodeId{0}));
    EXPECT_TRUE(t.linked(NodeId{m}, NodeId{5}));
  }
  EXPECT_EQ(t.max_connections, 9U);
}

TEST(Topology, SameSeedSameGraph) {
  auto a = build_topology(40, 2, 8, {NodeId{1}}, 77);
  auto b = build_topology(40, 2, 8, {NodeId{1}}, 77);
  EXPECT_EQ(a.adjacency, b.adjacency);
}

TEST(Topology, Errors) {
  EXPECT_THROW(build_topology(1, 0, 8, {}, 1), TopologyError);
  EXPECT_THROW(build_topology(10, 2, 4, {NodeId{99}}, 1), TopologyError);
}

TEST(Adversary, KeysAreZeroStakeAndOldEnough) {
  AttackConfig cfg;
  cfg.n_malicious_nodes = 3;
  cfg.keys_per_node = 4;
  cfg.targets = {NodeId{0}};
  auto farm = KeyFarm::generate(cfg, 2, 8);
  EXPECT_EQ(farm.total_keys(), 12U);
  for (const auto& node_keys : farm.keys) {
    for (const auto& k : node_keys) {
      EXPECT_EQ(k.stake, 0U);
      EXPECT_TRUE(k.eligible(1, 2));
    }
  }
  KeyRegistry reg;
  farm.register_all(reg);
  EXPECT_EQ(reg.size(), 12U);
  EXPECT_EQ(reg.total_stake(), 0U);
}

TEST(Adversary, PayloadSizeAndSharedPayset) {
  AttackConfig cfg;
  cfg.n_malicious_nodes = 2;
  cfg.keys_per_node = 5;
  cfg.payload_block_size = 100'000;
  cfg.targets = {NodeId{0}};
  auto farm = KeyFarm::generate(cfg, 2, 8);
  auto p = precompute_payload(cfg, farm, 7, {}, 3);
  EXPECT_EQ(p.round, 7);
  EXPECT_EQ(p.count(), 10U);
  const auto* first = p.per_node[0][0]->proposal();
  ASSERT_NE(first, nullptr);
  for (const auto& per : p.per_node) {
    for (const auto& m : per) {
      EXPECT_EQ(m->kind(), MessageKind::BlockProposal);
      EXPECT_EQ(m->claimed_round(), 7);
      EXPECT_GE(m->byte_size(), 100'000U);
      EXPECT_EQ(m->proposal()->block->payset(), first->block->payset());
    }
  }
  EXPECT_GE(p.total_bytes(), 10U * 100'000U);
}

TEST(Adversary, FiresOncePerTargetRound) {
  AttackConfig cfg;
  cfg.n_malicious_nodes = 1;
  cfg.keys_per_node = 1;
  cfg.targets = {NodeId{2}};
  auto farm = KeyFarm::generate(cfg, 2, 8);
  AttackCoordinator c{cfg, farm, {}, 5};
  std::mt19937_64 rng{1};
  auto k = KeyPair::generate(rng, 10, -2);
  auto cm = make_credential(k, 4, SortitionProof{{}, Role::Proposer, 0, k.public_id});
  EXPECT_FALSE(c.on_observation(NodeId{1}, cm, SimTime{}));  // not a target
  auto r = c.on_observation(NodeId{2}, cm, SimTime{});
  ASSERT_TRUE(r);
  EXPECT_EQ(*r, 4);
  EXPECT_FALSE(c.on_observation(NodeId{2}, cm, SimTime{}));
  EXPECT_EQ(c.payload_for(4).round, 5);
  EXPECT_TRUE(c.is_target(NodeId{2}));
}

TEST(Adversary, PayloadLargerThanMaxBlockRejected) {
  AttackConfig cfg;
  cfg.n_malicious_nodes = 1;
  cfg.keys_per_node = 1;
  cfg.payload_block_size = 3'000'000;
  EXPECT_THROW(cfg.validate(2'000'000), ConfigError);
}
