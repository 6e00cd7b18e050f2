#include "stlam/dp_solver.hpp"

#include <bit>
#include <limits>

#include "stlam/error.hpp"

namespace stlam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<int> commodity_sinks(const Instance& g, int root) {
    if (root < 0 || root >= g.node_count() || !g.is_terminal(root))
        throw Error("root must be a terminal node");
    std::vector<int> sinks;
    for (int t : g.terminals())
        if (t != root) sinks.push_back(t);
    return sinks;
}

}  // namespace

SubproblemSolution solve_family(const BidirectedView& view, const DistanceOracle& oracle,
                                int root, const LaminarFamily& family) {
    const Instance& g = view.instance();
    const std::vector<int> sinks = commodity_sinks(g, root);
    if (static_cast<int>(sinks.size()) != family.commodity_count())
        throw Error("family commodity count does not match the instance");

    const int n = g.node_count();
    const int S = family.node_count();

    // Children before parents.
    std::vector<int> order;
    order.reserve(static_cast<size_t>(S));
    std::vector<int> stack{family.root()};
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        order.push_back(v);
        for (int c : family.node(v).children) stack.push_back(c);
    }

    std::vector<std::vector<double>> cost(static_cast<size_t>(S));
    std::vector<std::vector<int>> choice(static_cast<size_t>(S));
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        const int s = *it;
        auto& cs = cost[static_cast<size_t>(s)];
        if (family.is_leaf(s)) {
            const int k = std::countr_zero(family.node(s).set);
            cs = oracle.from(sinks[static_cast<size_t>(k)]).dist;  // dist is symmetric
            continue;
        }
        std::vector<double> subtotal(static_cast<size_t>(n), 0.0);
        for (int c : family.node(s).children) {
            const auto& cc = cost[static_cast<size_t>(c)];
            for (int j = 0; j < n; ++j) subtotal[static_cast<size_t>(j)] += cc[static_cast<size_t>(j)];
        }
        cs.assign(static_cast<size_t>(n), kInf);
        auto& ch = choice[static_cast<size_t>(s)];
        ch.assign(static_cast<size_t>(n), -1);
        for (int j = 0; j < n; ++j) {
            const double base = subtotal[static_cast<size_t>(j)];
            if (base == kInf) continue;
            const auto& dj = oracle.from(j).dist;
            for (int i = 0; i < n; ++i) {
                const double v = dj[static_cast<size_t>(i)] + base;
                if (v < cs[static_cast<size_t>(i)]) {
                    cs[static_cast<size_t>(i)] = v;
                    ch[static_cast<size_t>(i)] = j;
                }
            }
        }
    }

    SubproblemSolution sol;
    sol.family_id = family.id();
    sol.root = root;
    sol.objective = cost[static_cast<size_t>(family.root())][static_cast<size_t>(root)];
    if (sol.objective == kInf) throw Error("terminals unreachable from the root");
    sol.split_node.assign(family.partitions().size(), -1);
    sol.paths.assign(static_cast<size_t>(S), SetPath{});

    // Top-down path recovery along the recorded split choices.
    std::vector<std::pair<int, int>> walk{{family.root(), root}};  // (family node, start)
    while (!walk.empty()) {
        const auto [s, at] = walk.back();
        walk.pop_back();
        SetPath& path = sol.paths[static_cast<size_t>(s)];
        path.start = at;
        if (family.is_leaf(s)) {
            const int k = std::countr_zero(family.node(s).set);
            path.end = sinks[static_cast<size_t>(k)];
        } else {
            path.end = choice[static_cast<size_t>(s)][static_cast<size_t>(at)];
            sol.split_node[static_cast<size_t>(family.partition_of(s))] = path.end;
            for (int c : family.node(s).children) walk.emplace_back(c, path.end);
        }
        path.arcs = oracle.shortest_path(at, path.end).second;
    }
    return sol;
}

std::vector<double> induced_lp_point(const SubproblemSolution& sol, const LpModel& model) {
    if (static_cast<int>(sol.paths.size()) != model.set_count() ||
        static_cast<int>(sol.split_node.size()) != model.partition_count() ||
        sol.root != model.root())
        throw Error("solution shape does not match the model");

    std::vector<double> x(static_cast<size_t>(model.column_count()), 0.0);
    for (int s = 0; s < model.set_count(); ++s) {
        const SetPath& path = sol.paths[static_cast<size_t>(s)];
        if (path.start < 0) throw Error("solution is missing a set path");
        for (int a : path.arcs) x[static_cast<size_t>(model.flow_col(s, a))] = 1.0;
        x[static_cast<size_t>(model.start_col(s, path.start))] = 1.0;
        x[static_cast<size_t>(model.end_col(s, path.end))] = 1.0;
    }
    for (int p = 0; p < model.partition_count(); ++p)
        x[static_cast<size_t>(model.split_col(p, sol.split_node[static_cast<size_t>(p)]))] = 1.0;
    return x;
}

}  // namespace stlam
