#pragma once

#include <vector>

#include "stlam/graph.hpp"

namespace stlam {

struct OracleResult {
    double cost = 0.0;
    std::vector<int> edges;  // witness tree when the method produces one
};

// Exact Steiner tree cost by the terminal-subset recurrence: grow trees over
// subsets of terminals, merging at a node and relaxing through the graph.
// Self-contained (own Dijkstra, 64-bit integer arithmetic); requires integer
// costs and at most 12 terminals. No witness edges.
OracleResult dreyfus_wagner(const Instance& g);

// Exact cost by exhausting Steiner-node subsets W: minimum over W of the
// metric-closure MST on terminals plus W. The winning MST is expanded to
// shortest paths and pruned into a witness tree of equal cost. Requires
// |V \ R| <= 16. Self-contained (own Floyd-Warshall all-pairs).
OracleResult brute_force_subset_mst(const Instance& g);

}  // namespace stlam
