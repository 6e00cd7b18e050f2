#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stlam/dp_solver.hpp"
#include "stlam/graph.hpp"
#include "stlam/simplex.hpp"

namespace stlam {

enum class Backend { dp, lp };

struct SteinerTree {
    std::vector<int> edges;  // indices into Instance::edges(), ascending
    double cost = 0.0;
    std::vector<int> steiner_nodes;  // non-terminal nodes the tree touches
};

// Edge indicator obtained by collapsing per-set arc flows onto undirected
// edges, capped at one: an edge shared by several sets, or used in both
// directions, counts once. The indicator's support always contains a tree
// spanning the terminals.
std::vector<char> edge_support(const SubproblemSolution& sol, const Instance& g);
std::vector<char> edge_support(const std::vector<double>& x, const LpModel& model,
                               const BidirectedView& view);

// Deterministic tree inside the support: spanning tree of the component
// holding the terminals, non-terminal leaves pruned away. Throws Error when
// the support fails to connect the terminals.
SteinerTree extract_steiner_tree(const std::vector<char>& edge_mask, const Instance& g);

struct SolveOptions {
    std::optional<int> root;  // 0-based node id; defaults to the first terminal
    Backend backend = Backend::dp;
    int threads = 1;
    bool keep_all = false;  // retain every family objective
    SimplexConfig simplex;
};

struct SolveReport {
    int root = -1;
    Backend backend = Backend::dp;
    std::uint64_t families_solved = 0;
    std::uint64_t best_family = 0;
    double optimal_cost = 0.0;
    SteinerTree tree;
    double best_objective = 0.0;            // subproblem optimum of the best family
    std::vector<double> family_objectives;  // filled when keep_all
    double mean_family_seconds = 0.0;
    double max_family_seconds = 0.0;
    double total_seconds = 0.0;
};

// Full solve: enumerate every laminar family over the commodities (terminals
// minus root), solve each subproblem with the chosen backend, keep the
// minimum. Family ranks are distributed over a worker pool; the reduction is
// associative with ties broken toward the lowest family id, so the report is
// identical for any worker count.
SolveReport solve_instance(const Instance& g, const SolveOptions& options = {});

}  // namespace stlam
