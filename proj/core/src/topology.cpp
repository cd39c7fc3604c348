#include "algosim/topology.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <random>
#include <string>

#include "algosim/errors.hpp"

namespace algosim {

bool Topology::linked(NodeId a, NodeId b) const {
  const auto& adj = adjacency[a.value];
  return std::find(adj.begin(), adj.end(), b) != adj.end();
}

std::size_t Topology::edge_count() const {
  std::size_t sum = 0;
  for (const auto& a : adjacency) sum += a.size();
  return sum / 2;
}

namespace {

void link(Topology& t, std::uint32_t a, std::uint32_t b) {
  t.adjacency[a].push_back(NodeId{b});
  t.adjacency[b].push_back(NodeId{a});
}

}  // namespace

Topology build_topology(std::uint32_t n_honest, std::uint32_t n_malicious, std::uint32_t degree,
                        const std::vector<NodeId>& attack_targets, std::uint64_t rng_seed,
                        std::uint32_t max_connections) {
  if (n_honest < 2) throw TopologyError("need at least 2 honest nodes");
  if (degree < 2) throw TopologyError("degree must be >= 2");
  if (degree > n_honest - 1) throw TopologyError("degree " + std::to_string(degree) + " exceeds n_honest - 1");
  Topology t;
  t.n_honest = n_honest;
  t.n_malicious = n_malicious;
  t.max_connections = max_connections == 0 ? degree + n_malicious : max_connections;
  t.adjacency.resize(n_honest + n_malicious);
  for (auto target : attack_targets) {
    if (target.value >= n_honest) throw TopologyError("attack target must be an honest node");
  }
  if (n_malicious > 0 && !attack_targets.empty() && degree + n_malicious > t.max_connections) {
    throw TopologyError("max_connections too small for targets to accept every malicious peer");
  }

  std::mt19937_64 rng{rng_seed};
  std::vector<std::uint32_t> order(n_honest);
  std::iota(order.begin(), order.end(), 0U);
  std::shuffle(order.begin(), order.end(), rng);
  if (n_honest == 2) {
    link(t, order[0], order[1]);
  } else {
    for (std::uint32_t i = 0; i < n_honest; ++i) link(t, order[i], order[(i + 1) % n_honest]);
  }

  // chords: each node asks random partners until full or out of attempts
  std::uniform_int_distribution<std::uint32_t> pick(0, n_honest - 1);
  std::shuffle(order.begin(), order.end(), rng);
  for (auto a : order) {
    for (int attempt = 0; t.adjacency[a].size() < degree && attempt < 64 * static_cast<int>(degree); ++attempt) {
      auto b = pick(rng);
      if (b == a || t.adjacency[b].size() >= degree || t.linked(NodeId{a}, NodeId{b})) continue;
      link(t, a, b);
    }
  }

  for (std::uint32_t m = 0; m < n_malicious; ++m) {
    for (auto target : attack_targets) link(t, n_honest + m, target.value);
  }
  check_topology(t);
  return t;
}

bool honest_connected(const Topology& t) {
  if (t.n_honest == 0) return true;
  std::vector<bool> seen(t.n_honest, false);
  std::queue<std::uint32_t> q;
  q.push(0);
  seen[0] = true;
  std::uint32_t count = 1;
  while (!q.empty()) {
    auto a = q.front();
    q.pop();
    for (auto b : t.adjacency[a]) {
      if (b.value >= t.n_honest || seen[b.value]) continue;
      seen[b.value] = true;
      ++count;
      q.push(b.value);
    }
  }
  return count == t.n_honest;
}

void check_topology(const Topology& t) {
  for (std::uint32_t a = 0; a < t.size(); ++a) {
    const auto& adj = t.adjacency[a];
    if (adj.size() > t.max_connections) throw TopologyError("node " + std::to_string(a) + " exceeds max_connections");
    for (std::size_t i = 0; i < adj.size(); ++i) {
      if (adj[i].value == a) throw TopologyError("self-loop at node " + std::to_string(a));
      if (adj[i].value >= t.size()) throw TopologyError("link to unknown node");
      for (std::size_t j = i + 1; j < adj.size(); ++j) {
        if (adj[i] == adj[j]) throw TopologyError("duplicate link at node " + std::to_string(a));
      }
      if (!t.linked(adj[i], NodeId{a})) throw TopologyError("asymmetric link at node " + std::to_string(a));
    }
  }
  if (!honest_connected(t)) throw TopologyError("honest subgraph is disconnected");
}

}  // namespace algosim
