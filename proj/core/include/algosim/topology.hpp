#pragma once

#include <cstdint>
#include <vector>

#include "algosim/types.hpp"

namespace algosim {

/// Undirected peer graph. Honest nodes are 0..n_honest-1, malicious ones follow.
struct Topology {
  std::uint32_t n_honest = 0;
  std::uint32_t n_malicious = 0;
  std::uint32_t max_connections = 0;
  std::vector<std::vector<NodeId>> adjacency;

  std::uint32_t size() const { return n_honest + n_malicious; }
  bool is_malicious(NodeId n) const { return n.value >= n_honest; }
  std::size_t degree(NodeId n) const { return adjacency[n.value].size(); }
  bool linked(NodeId a, NodeId b) const;
  std::size_t edge_count() const;
};

/// Random connected honest graph (a Hamiltonian cycle topped up with random
/// chords to `degree`), plus every malicious node linked to every target.
/// max_connections == 0 means degree + n_malicious.
Topology build_topology(std::uint32_t n_honest, std::uint32_t n_malicious, std::uint32_t degree,
                        const std::vector<NodeId>& attack_targets, std::uint64_t rng_seed,
                        std::uint32_t max_connections = 0);

/// BFS over honest nodes only.
bool honest_connected(const Topology& t);

/// Checks symmetry, no self-loops, no duplicates and the degree cap. Throws TopologyError.
void check_topology(const Topology& t);

}  // namespace algosim
