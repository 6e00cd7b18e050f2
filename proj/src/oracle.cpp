#include "stlam/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>

#include "stlam/error.hpp"

namespace stlam {

namespace {

constexpr std::int64_t kIntInf = std::numeric_limits<std::int64_t>::max() / 4;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct IntGraph {
    int n = 0;
    std::vector<std::vector<std::pair<int, std::int64_t>>> adj;  // (neighbor, cost)

    explicit IntGraph(const Instance& g) : n(g.node_count()), adj(static_cast<size_t>(g.node_count())) {
        if (!g.integral_costs()) throw Error("oracle requires integer edge costs");
        for (const Edge& e : g.edges()) {
            const auto c = static_cast<std::int64_t>(e.cost);
            adj[static_cast<size_t>(e.u)].emplace_back(e.v, c);
            adj[static_cast<size_t>(e.v)].emplace_back(e.u, c);
        }
    }
};

std::vector<std::int64_t> int_dijkstra(const IntGraph& g, int source) {
    std::vector<std::int64_t> dist(static_cast<size_t>(g.n), kIntInf);
    dist[static_cast<size_t>(source)] = 0;
    using Entry = std::pair<std::int64_t, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    heap.emplace(0, source);
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[static_cast<size_t>(u)]) continue;
        for (const auto& [v, c] : g.adj[static_cast<size_t>(u)]) {
            if (d + c < dist[static_cast<size_t>(v)]) {
                dist[static_cast<size_t>(v)] = d + c;
                heap.emplace(d + c, v);
            }
        }
    }
    return dist;
}

// Relax labels through the graph until stable: label[v] <- min over u of
// label[u] + dist(u, v), computed as one multi-source Dijkstra sweep.
void relax_labels(const IntGraph& g, std::vector<std::int64_t>& label) {
    using Entry = std::pair<std::int64_t, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    for (int v = 0; v < g.n; ++v)
        if (label[static_cast<size_t>(v)] < kIntInf) heap.emplace(label[static_cast<size_t>(v)], v);
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > label[static_cast<size_t>(u)]) continue;
        for (const auto& [v, c] : g.adj[static_cast<size_t>(u)]) {
            if (d + c < label[static_cast<size_t>(v)]) {
                label[static_cast<size_t>(v)] = d + c;
                heap.emplace(d + c, v);
            }
        }
    }
}

}  // namespace

OracleResult dreyfus_wagner(const Instance& g) {
    const auto& terminals = g.terminals();
    const int t = static_cast<int>(terminals.size());
    if (t > 12) throw Error("terminal-subset oracle is capped at 12 terminals");
    if (t == 1) return {0.0, {}};

    const IntGraph ig(g);
    const int q = terminals[static_cast<size_t>(t) - 1];  // queried from the last terminal
    const int b = t - 1;
    const std::uint32_t full = (1u << b) - 1u;

    std::vector<std::vector<std::int64_t>> table(static_cast<size_t>(full) + 1);
    for (int k = 0; k < b; ++k) {
        table[static_cast<size_t>(1u << k)] = int_dijkstra(ig, terminals[static_cast<size_t>(k)]);
    }
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        if ((mask & (mask - 1)) == 0) continue;  // singleton, already done
        auto& row = table[static_cast<size_t>(mask)];
        row.assign(static_cast<size_t>(ig.n), kIntInf);
        const std::uint32_t low = mask & (~mask + 1u);
        // Merge two subtrees at a common node; fixing the low bit halves the
        // subset enumeration without losing any split.
        for (std::uint32_t sub = (mask - 1u) & mask; sub > 0; sub = (sub - 1u) & mask) {
            if (!(sub & low)) continue;
            const auto& a = table[static_cast<size_t>(sub)];
            const auto& bb = table[static_cast<size_t>(mask ^ sub)];
            for (int v = 0; v < ig.n; ++v) {
                if (a[static_cast<size_t>(v)] >= kIntInf || bb[static_cast<size_t>(v)] >= kIntInf)
                    continue;
                row[static_cast<size_t>(v)] =
                    std::min(row[static_cast<size_t>(v)], a[static_cast<size_t>(v)] + bb[static_cast<size_t>(v)]);
            }
        }
        relax_labels(ig, row);
    }
    const std::int64_t best = table[static_cast<size_t>(full)][static_cast<size_t>(q)];
    if (best >= kIntInf) throw Error("terminals are not connected");
    return {static_cast<double>(best), {}};
}

namespace {

struct AllPairs {
    int n;
    std::vector<double> dist;
    std::vector<int> mid;         // intermediate node on the path, -1 if direct
    std::vector<int> direct_edge;  // cheapest direct edge index, -1 if none

    explicit AllPairs(const Instance& g) : n(g.node_count()) {
        dist.assign(static_cast<size_t>(n) * static_cast<size_t>(n), kInf);
        mid.assign(dist.size(), -1);
        direct_edge.assign(dist.size(), -1);
        for (int v = 0; v < n; ++v) at(v, v) = 0.0;
        for (int e = 0; e < g.edge_count(); ++e) {
            const Edge& ed = g.edges()[static_cast<size_t>(e)];
            if (ed.cost < at(ed.u, ed.v)) {
                at(ed.u, ed.v) = at(ed.v, ed.u) = ed.cost;
                direct_edge[idx(ed.u, ed.v)] = direct_edge[idx(ed.v, ed.u)] = e;
            }
        }
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i) {
                const double dik = at(i, k);
                if (dik == kInf) continue;
                for (int j = 0; j < n; ++j) {
                    const double v = dik + at(k, j);
                    if (v < at(i, j)) {
                        at(i, j) = v;
                        mid[idx(i, j)] = k;
                    }
                }
            }
    }

    size_t idx(int i, int j) const { return static_cast<size_t>(i) * static_cast<size_t>(n) + static_cast<size_t>(j); }
    double& at(int i, int j) { return dist[idx(i, j)]; }
    double at(int i, int j) const { return dist[idx(i, j)]; }

    void collect_path_edges(int u, int v, std::vector<int>& out) const {
        if (u == v) return;
        const int k = mid[idx(u, v)];
        if (k < 0) {
            out.push_back(direct_edge[idx(u, v)]);
            return;
        }
        collect_path_edges(u, k, out);
        collect_path_edges(k, v, out);
    }
};

double closure_mst(const AllPairs& ap, const std::vector<int>& nodes,
                   std::vector<std::pair<int, int>>* tree_edges) {
    const int k = static_cast<int>(nodes.size());
    if (k <= 1) return 0.0;
    std::vector<double> key(static_cast<size_t>(k), kInf);
    std::vector<int> into(static_cast<size_t>(k), -1);
    std::vector<char> used(static_cast<size_t>(k), 0);
    key[0] = 0.0;
    double total = 0.0;
    for (int step = 0; step < k; ++step) {
        int pick = -1;
        for (int i = 0; i < k; ++i)
            if (!used[static_cast<size_t>(i)] && (pick < 0 || key[static_cast<size_t>(i)] < key[static_cast<size_t>(pick)]))
                pick = i;
        if (key[static_cast<size_t>(pick)] == kInf) return kInf;  // closure disconnected
        used[static_cast<size_t>(pick)] = 1;
        total += key[static_cast<size_t>(pick)];
        if (into[static_cast<size_t>(pick)] >= 0 && tree_edges)
            tree_edges->emplace_back(nodes[static_cast<size_t>(into[static_cast<size_t>(pick)])],
                                     nodes[static_cast<size_t>(pick)]);
        for (int i = 0; i < k; ++i) {
            if (used[static_cast<size_t>(i)]) continue;
            const double d = ap.at(nodes[static_cast<size_t>(pick)], nodes[static_cast<size_t>(i)]);
            if (d < key[static_cast<size_t>(i)]) {
                key[static_cast<size_t>(i)] = d;
                into[static_cast<size_t>(i)] = pick;
            }
        }
    }
    return total;
}

}  // namespace

OracleResult brute_force_subset_mst(const Instance& g) {
    const int n = g.node_count();
    std::vector<int> steiner;
    for (int v = 0; v < n; ++v)
        if (!g.is_terminal(v)) steiner.push_back(v);
    if (steiner.size() > 16) throw Error("subset oracle is capped at 16 non-terminals");

    const AllPairs ap(g);
    const std::uint32_t subsets = 1u << steiner.size();
    double best = kInf;
    std::uint32_t best_mask = 0;
    for (std::uint32_t mask = 0; mask < subsets; ++mask) {
        std::vector<int> nodes = g.terminals();
        for (size_t i = 0; i < steiner.size(); ++i)
            if (mask & (1u << i)) nodes.push_back(steiner[i]);
        const double cost = closure_mst(ap, nodes, nullptr);
        if (cost < best) {
            best = cost;
            best_mask = mask;
        }
    }
    if (best == kInf) throw Error("terminals are not connected");

    // Witness: expand the winning closure MST into real edges and prune.
    std::vector<int> nodes = g.terminals();
    for (size_t i = 0; i < steiner.size(); ++i)
        if (best_mask & (1u << i)) nodes.push_back(steiner[i]);
    std::vector<std::pair<int, int>> closure_edges;
    closure_mst(ap, nodes, &closure_edges);
    std::vector<char> picked(static_cast<size_t>(g.edge_count()), 0);
    std::vector<int> path;
    for (const auto& [u, v] : closure_edges) {
        path.clear();
        ap.collect_path_edges(u, v, path);
        for (int e : path) picked[static_cast<size_t>(e)] = 1;
    }

    // Spanning tree of the expanded support, then drop non-terminal leaves.
    std::vector<std::vector<std::pair<int, int>>> adj(static_cast<size_t>(n));  // (nbr, edge)
    for (int e = 0; e < g.edge_count(); ++e) {
        if (!picked[static_cast<size_t>(e)]) continue;
        const Edge& ed = g.edges()[static_cast<size_t>(e)];
        adj[static_cast<size_t>(ed.u)].emplace_back(ed.v, e);
        adj[static_cast<size_t>(ed.v)].emplace_back(ed.u, e);
    }
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
    std::vector<int> degree(static_cast<size_t>(n), 0);
    std::vector<char> in_tree(static_cast<size_t>(g.edge_count()), 0);
    for (int v = 0; v < n; ++v) {
        const int e = parent_edge[static_cast<size_t>(v)];
        if (e < 0) continue;
        in_tree[static_cast<size_t>(e)] = 1;
        ++degree[static_cast<size_t>(g.edges()[static_cast<size_t>(e)].u)];
        ++degree[static_cast<size_t>(g.edges()[static_cast<size_t>(e)].v)];
    }
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
    OracleResult out;
    for (int e = 0; e < g.edge_count(); ++e)
        if (in_tree[static_cast<size_t>(e)]) {
            out.edges.push_back(e);
            out.cost += g.edges()[static_cast<size_t>(e)].cost;
        }
    if (g.terminals().size() == 1) out.cost = 0.0;
    return out;
}

}  // namespace stlam
