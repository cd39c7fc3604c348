#include <sstream>

#include <gtest/gtest.h>

#include "algosim/simulation.hpp"

using namespace algosim;

namespace {

SimulationConfig small(std::uint64_t seed, double duration) {
  SimulationConfig c;
  c.network.n_honest = 16;
  c.network.degree = 4;
  c.duration_s = duration;
  c.seed = seed;
  return c;
}

std::vector<NodeId> honest_nodes(const Simulation& s) {
  std::vector<NodeId> out;
  for (std::uint32_t i = 0; i < s.topology().n_honest; ++i) out.push_back(NodeId{i});
  return out;
}

}  // namespace

TEST(Simulation, QuietNetworkAgreesOnEveryRound) {
  Simulation sim{small(3, 1200)};
  sim.run();
  auto all = honest_nodes(sim);
  EXPECT_EQ(sim.fork_count(all), 0U);
  for (auto n : all) EXPECT_GE(sim.chain(n).size(), 5U);
  // never sent twice on a link: at most one copy per direction per edge
  EXPECT_LE(sim.stats().max_transmissions_per_message, 2 * sim.edge_count());
  EXPECT_EQ(sim.stats().adversary_accepts, 0U);
  auto s = summarize(sim.metrics(), all, 150);
  EXPECT_FALSE(s.empty);
  EXPECT_GT(s.avg_round_time_s, 150.0);
  EXPECT_LT(s.avg_round_time_s, 240.0);
  EXPECT_GT(s.pct_received, 90.0);
}

TEST(Simulation, SameSeedSameRecords) {
  auto csv = [](std::uint64_t seed) {
    Simulation sim{small(seed, 700)};
    sim.run();
    std::ostringstream out;
    write_round_records_csv(out, sim.metrics().records());
    return out.str();
  };
  auto a = csv(5);
  EXPECT_EQ(a, csv(5));
  EXPECT_NE(a, csv(6));
}

TEST(Simulation, ClockNeverPassesHorizon) {
  Simulation sim{small(1, 400)};
  sim.run();
  EXPECT_LE(sim.now(), SimTime::from_seconds(400));
  sim.run(SimTime::from_seconds(600));
  EXPECT_LE(sim.now(), SimTime::from_seconds(600));
  EXPECT_GT(sim.stats().events, 0U);
}

TEST(Simulation, HeavyFloodStallsTarget) {
  auto c = small(2, 1500);
  c.consensus.max_block_size = 2'000'000;
  c.attack.n_malicious_nodes = 10;
  c.attack.keys_per_node = 50;
  c.attack.payload_block_size = 2'000'000;
  c.attack.targets = {NodeId{0}};
  Simulation sim{c};
  sim.run();
  const auto& st = sim.stats();
  EXPECT_EQ(st.adversary_accepts, 0U);
  EXPECT_GT(st.adversary_defers, 0U);
  EXPECT_GT(st.adversary_rejects_after_defer, 0U);
  EXPECT_LE(st.max_transmissions_per_message, 2 * sim.edge_count());
  auto tgt = summarize(sim.metrics(), sim.targeted_nodes(), 150);
  auto rest = summarize(sim.metrics(), sim.untargeted_honest_nodes(), 150);
  EXPECT_LT(tgt.rounds_completed, rest.rounds_completed);
  EXPECT_GE(tgt.avg_round_time_s, 390.0);
  EXPECT_EQ(sim.fork_count(sim.untargeted_honest_nodes()), 0U);
  ASSERT_NE(sim.attacker(), nullptr);
  EXPECT_FALSE(sim.attacker()->launches().empty());
}

TEST(Simulation, ConfigValidationRejectsBadGrid) {
  auto c = small(1, 100);
  c.attack.n_malicious_nodes = 2;
  c.attack.keys_per_node = 1;
  c.attack.payload_block_size = 5'000'000;  // above max_block_size
  c.attack.targets = {NodeId{0}};
  EXPECT_ANY_THROW(Simulation{c});
}
