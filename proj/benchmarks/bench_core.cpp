#include <random>

#include <benchmark/benchmark.h>

#include "algosim/simulation.hpp"
#include "algosim/sortition.hpp"

using namespace algosim;

static void BM_Hash256_1KiB(benchmark::State& state) {
  Bytes buf(1024, 0x5a);
  for (auto _ : state) benchmark::DoNotOptimize(hash256(buf));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * 1024);
}
BENCHMARK(BM_Hash256_1KiB);

static void BM_VotesFromHash(benchmark::State& state) {
  const auto stake = static_cast<std::uint64_t>(state.range(0));
  std::mt19937_64 rng{1};
  Hash256 h;
  for (auto _ : state) {
    auto v = rng();
    for (int i = 0; i < 8; ++i) h.bytes[i] = static_cast<std::uint8_t>(v >> (8 * i));
    benchmark::DoNotOptimize(votes_from_hash(h, stake, 0.002));
  }
}
BENCHMARK(BM_VotesFromHash)->Arg(2'000)->Arg(15'625)->Arg(1'000'000);

static void BM_SortitionDraw(benchmark::State& state) {
  std::mt19937_64 rng{2};
  auto key = KeyPair::generate(rng, 2000, -2);
  auto q = genesis_seed(1);
  std::int64_t r = 1;
  for (auto _ : state) benchmark::DoNotOptimize(sortition_hash(key, r++, 1, q, Role::Committee, 2));
}
BENCHMARK(BM_SortitionDraw);

// n senders into one receiver, 100 kB each
static void BM_TransportFanIn(benchmark::State& state) {
  const auto n = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) {
    Transport tr{n + 1, TransportConfig{}};
    EventQueue q;
    for (std::uint32_t i = 0; i < n; ++i) tr.send(NodeId{i + 1}, NodeId{0}, i, 100'000, q);
    while (!q.empty()) {
      auto e = q.pop();
      benchmark::DoNotOptimize(tr.complete(e, q));
    }
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * n);
}
BENCHMARK(BM_TransportFanIn)->Arg(8)->Arg(64)->Arg(512);

static void BM_QuietNetwork(benchmark::State& state) {
  for (auto _ : state) {
    SimulationConfig c;
    c.network.n_honest = static_cast<std::uint32_t>(state.range(0));
    c.duration_s = 400;
    Simulation sim{c};
    sim.run();
    state.counters["events"] = static_cast<double>(sim.stats().events);
  }
}
BENCHMARK(BM_QuietNetwork)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
