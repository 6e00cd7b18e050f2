#include "stlam/driver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "stlam/error.hpp"
#include "stlam/laminar.hpp"
#include "stlam/lp_model.hpp"

namespace stlam {

std::vector<char> edge_support(const SubproblemSolution& sol, const Instance& g) {
    std::vector<char> mask(static_cast<size_t>(g.edge_count()), 0);
    for (const SetPath& path : sol.paths)
        for (int a : path.arcs) mask[static_cast<size_t>(a / 2)] = 1;
    return mask;
}

std::vector<char> edge_support(const std::vector<double>& x, const LpModel& model,
                               const BidirectedView& view) {
    std::vector<char> mask(static_cast<size_t>(view.instance().edge_count()), 0);
    for (int s = 0; s < model.set_count(); ++s)
        for (int a = 0; a < model.arc_count(); ++a)
            if (x[static_cast<size_t>(model.flow_col(s, a))] > 0.5)
                mask[static_cast<size_t>(view.arc(a).edge)] = 1;
    return mask;
}

SteinerTree extract_steiner_tree(const std::vector<char>& edge_mask, const Instance& g) {
    const int n = g.node_count();
    std::vector<std::vector<std::pair<int, int>>> adj(static_cast<size_t>(n));  // (nbr, edge)
    for (int e = 0; e < g.edge_count(); ++e) {
        if (!edge_mask[static_cast<size_t>(e)]) continue;
        const Edge& ed = g.edges()[static_cast<size_t>(e)];
        adj[static_cast<size_t>(ed.u)].emplace_back(ed.v, e);
        adj[static_cast<size_t>(ed.v)].emplace_back(ed.u, e);
    }
    for (auto& lst : adj) std::sort(lst.begin(), lst.end());

    // Breadth-first spanning tree from the first terminal.
    std::vector<int> parent_edge(static_cast<size_t>(n), -1);
    std::vector<char> seen(static_cast<size_t>(n), 0);
    std::vector<int> queue{g.terminals().front()};
    seen[static_cast<size_t>(queue.front())] = 1;
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        const int u = queue[qi];
        for (const auto& [v, e] : adj[static_cast<size_t>(u)]) {
            if (seen[static_cast<size_t>(v)]) continue;
            seen[static_cast<size_t>(v)] = 1;
            parent_edge[static_cast<size_t>(v)] = e;
            queue.push_back(v);
        }
    }
    for (int t : g.terminals())
        if (!seen[static_cast<size_t>(t)])
            throw Error("support does not connect the terminals");

    std::vector<char> in_tree(static_cast<size_t>(g.edge_count()), 0);
    std::vector<int> degree(static_cast<size_t>(n), 0);
    for (int v = 0; v < n; ++v) {
        const int e = parent_edge[static_cast<size_t>(v)];
        if (e < 0) continue;
        in_tree[static_cast<size_t>(e)] = 1;
        ++degree[static_cast<size_t>(g.edges()[static_cast<size_t>(e)].u)];
        ++degree[static_cast<size_t>(g.edges()[static_cast<size_t>(e)].v)];
    }

    // Peel non-terminal leaves until only the terminal-spanning core remains.
    bool changed = true;
    while (changed) {
        changed = false;
        for (int v = 0; v < n; ++v) {
            if (g.is_terminal(v) || degree[static_cast<size_t>(v)] != 1) continue;
            for (const auto& [w, e] : adj[static_cast<size_t>(v)]) {
                if (!in_tree[static_cast<size_t>(e)]) continue;
                in_tree[static_cast<size_t>(e)] = 0;
                --degree[static_cast<size_t>(v)];
                --degree[static_cast<size_t>(w)];
                changed = true;
                break;
            }
        }
    }

    SteinerTree tree;
    for (int e = 0; e < g.edge_count(); ++e) {
        if (!in_tree[static_cast<size_t>(e)]) continue;
        tree.edges.push_back(e);
        tree.cost += g.edges()[static_cast<size_t>(e)].cost;
    }
    std::vector<char> touched(static_cast<size_t>(n), 0);
    for (int e : tree.edges) {
        touched[static_cast<size_t>(g.edges()[static_cast<size_t>(e)].u)] = 1;
        touched[static_cast<size_t>(g.edges()[static_cast<size_t>(e)].v)] = 1;
    }
    for (int v = 0; v < n; ++v)
        if (touched[static_cast<size_t>(v)] && !g.is_terminal(v)) tree.steiner_nodes.push_back(v);
    return tree;
}

namespace {

struct FamilyOutcome {
    bool valid = false;
    std::uint64_t family = 0;
    double objective = 0.0;
    SteinerTree tree;

    // Lexicographic (objective, family id); associative and commutative, so
    // the parallel reduction is order-insensitive.
    void fold(FamilyOutcome&& other) {
        if (!other.valid) return;
        if (!valid || other.objective < objective ||
            (other.objective == objective && other.family < family)) {
            *this = std::move(other);
        }
    }
};

}  // namespace

SolveReport solve_instance(const Instance& g, const SolveOptions& options) {
    const auto wall_start = std::chrono::steady_clock::now();
    int root = options.root.value_or(g.terminals().front());
    if (root < 0 || root >= g.node_count() || !g.is_terminal(root))
        throw Error("root must be a terminal node");

    SolveReport report;
    report.root = root;
    report.backend = options.backend;

    const int b = static_cast<int>(g.terminals().size()) - 1;
    if (b == 0) {  // single terminal: the empty tree
        report.total_seconds = 0.0;
        return report;
    }
    const std::uint64_t total = count_families(b);  // also validates b
    if (b > LaminarFamily::kMaxCommodities)
        throw Error("instance exceeds the enumeration cap of " +
                    std::to_string(LaminarFamily::kMaxCommodities + 1) + " terminals");

    const BidirectedView view(g);
    const DistanceOracle oracle(view);

    const int want = std::clamp(options.threads, 1, 64);
    const int workers = static_cast<int>(
        std::min<std::uint64_t>(static_cast<std::uint64_t>(want), total));

    if (options.keep_all)
        report.family_objectives.assign(static_cast<size_t>(total), 0.0);

    std::atomic<std::uint64_t> next{0};
    std::vector<FamilyOutcome> best(static_cast<size_t>(workers));
    std::vector<double> time_sum(static_cast<size_t>(workers), 0.0);
    std::vector<double> time_max(static_cast<size_t>(workers), 0.0);
    std::atomic<bool> failed{false};
    std::string failure;
    std::mutex failure_mutex;

    auto work = [&](int wid) {
        try {
            while (true) {
                const std::uint64_t rank = next.fetch_add(1, std::memory_order_relaxed);
                if (rank >= total || failed.load(std::memory_order_relaxed)) break;
                const auto t0 = std::chrono::steady_clock::now();
                const LaminarFamily family = LaminarFamily::from_rank(b, rank);

                FamilyOutcome outcome;
                outcome.valid = true;
                outcome.family = rank;
                if (options.backend == Backend::dp) {
                    const SubproblemSolution sol = solve_family(view, oracle, root, family);
                    outcome.objective = sol.objective;
                    outcome.tree = extract_steiner_tree(edge_support(sol, g), g);
                } else {
                    const LpModel model = build_lp(view, root, family);
                    const LpSolution sol = solve(model, options.simplex);
                    if (sol.status != SolveStatus::optimal)
                        throw Error("family subproblem did not solve to optimality");
                    outcome.objective = sol.objective;
                    outcome.tree = extract_steiner_tree(edge_support(sol.x, model, view), g);
                }
                if (options.keep_all)
                    report.family_objectives[static_cast<size_t>(rank)] = outcome.objective;

                const double seconds =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                time_sum[static_cast<size_t>(wid)] += seconds;
                time_max[static_cast<size_t>(wid)] = std::max(time_max[static_cast<size_t>(wid)], seconds);
                best[static_cast<size_t>(wid)].fold(std::move(outcome));
            }
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            failed.store(true, std::memory_order_relaxed);
            if (failure.empty()) failure = e.what();
        }
    };

    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int wid = 0; wid < workers; ++wid) pool.emplace_back(work, wid);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) throw Error(failure);

    FamilyOutcome overall;
    for (auto& candidate : best) overall.fold(std::move(candidate));

    report.families_solved = total;
    report.best_family = overall.family;
    report.best_objective = overall.objective;
    report.tree = std::move(overall.tree);
    report.optimal_cost = report.tree.cost;
    double sum = 0.0, peak = 0.0;
    for (int wid = 0; wid < workers; ++wid) {
        sum += time_sum[static_cast<size_t>(wid)];
        peak = std::max(peak, time_max[static_cast<size_t>(wid)]);
    }
    report.mean_family_seconds = sum / static_cast<double>(total);
    report.max_family_seconds = peak;
    report.total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return report;
}

}  // namespace stlam
