#pragma once

#include <cstdint>
#include <vector>

#include "stlam/graph.hpp"
#include "stlam/laminar.hpp"
#include "stlam/lp_model.hpp"

namespace stlam {

// One family subproblem solved combinatorially: every member set walks a
// shortest path from where its parent stopped to where it stops itself, and
// each partition picks the split node minimizing the subtree total.
struct SetPath {
    int start = -1;
    int end = -1;
    std::vector<int> arcs;  // oriented start -> end, empty when start == end
};

struct SubproblemSolution {
    std::uint64_t family_id = 0;
    double objective = 0.0;
    std::vector<int> split_node;     // per partition index
    std::vector<SetPath> paths;      // per family node index
    int root = -1;
};

// Table recurrence over (family node, graph node): a singleton costs its
// distance to its terminal; an inner set costs the best split-node choice of
// own-path length plus children totals. Split candidates range over all n
// nodes; ties break to the lowest node id, which keeps results reproducible.
// O(n^2) work per inner set with distances served by the shared oracle.
SubproblemSolution solve_family(const BidirectedView& view, const DistanceOracle& oracle,
                                int root, const LaminarFamily& family);

// 0/1 point of the family LP induced by a combinatorial solution: flow 1 on
// path arcs, start/end markers at path endpoints, split markers at the chosen
// nodes. Satisfies every row of the matching build_lp model exactly.
std::vector<double> induced_lp_point(const SubproblemSolution& sol, const LpModel& model);

}  // namespace stlam
