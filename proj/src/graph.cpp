#include "stlam/graph.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <string>

#include "stlam/error.hpp"

namespace stlam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest double that still represents every smaller integer exactly.
constexpr double kExactIntLimit = 9007199254740992.0;  // 2^53

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<size_t>(n)) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) { parent[static_cast<size_t>(find(a))] = find(b); }
};

}  // namespace

Instance::Instance(int node_count, std::vector<Edge> edges, std::vector<int> terminals)
    : node_count_(node_count), edges_(std::move(edges)), terminals_(std::move(terminals)) {
    if (node_count_ < 1) throw Error("instance must have at least one node");
    for (const Edge& e : edges_) {
        if (e.u < 0 || e.u >= node_count_ || e.v < 0 || e.v >= node_count_)
            throw Error("edge endpoint out of range");
        if (e.u == e.v) throw Error("self-loop at node " + std::to_string(e.u + 1));
        if (!std::isfinite(e.cost) || e.cost < 0.0)
            throw Error("edge cost must be finite and non-negative");
    }
    if (terminals_.empty()) throw Error("terminal set is empty");
    terminal_mask_.assign(static_cast<size_t>(node_count_), 0);
    for (int t : terminals_) {
        if (t < 0 || t >= node_count_) throw Error("terminal id out of range");
        if (terminal_mask_[static_cast<size_t>(t)])
            throw Error("duplicate terminal " + std::to_string(t + 1));
        terminal_mask_[static_cast<size_t>(t)] = 1;
    }
    UnionFind uf(node_count_);
    for (const Edge& e : edges_) uf.unite(e.u, e.v);
    const int rep = uf.find(terminals_.front());
    for (int t : terminals_)
        if (uf.find(t) != rep) throw Error("terminals are not connected by the edge set");

    integral_costs_ = true;
    for (const Edge& e : edges_) {
        if (e.cost != std::floor(e.cost) || e.cost > kExactIntLimit) {
            integral_costs_ = false;
            break;
        }
    }
}

BidirectedView::BidirectedView(const Instance& g) : instance_(&g) {
    const int n = g.node_count();
    arcs_.reserve(static_cast<size_t>(g.edge_count()) * 2);
    for (int e = 0; e < g.edge_count(); ++e) {
        const Edge& ed = g.edges()[static_cast<size_t>(e)];
        arcs_.push_back(Arc{ed.u, ed.v, ed.cost, e});
        arcs_.push_back(Arc{ed.v, ed.u, ed.cost, e});
    }
    // CSR adjacency in arc-id order, which keeps neighbor iteration stable.
    out_start_.assign(static_cast<size_t>(n) + 1, 0);
    in_start_.assign(static_cast<size_t>(n) + 1, 0);
    for (const Arc& a : arcs_) {
        ++out_start_[static_cast<size_t>(a.tail) + 1];
        ++in_start_[static_cast<size_t>(a.head) + 1];
    }
    for (int v = 0; v < n; ++v) {
        out_start_[static_cast<size_t>(v) + 1] += out_start_[static_cast<size_t>(v)];
        in_start_[static_cast<size_t>(v) + 1] += in_start_[static_cast<size_t>(v)];
    }
    out_arcs_.resize(arcs_.size());
    in_arcs_.resize(arcs_.size());
    std::vector<int> ofill(out_start_.begin(), out_start_.end() - 1);
    std::vector<int> ifill(in_start_.begin(), in_start_.end() - 1);
    for (int a = 0; a < arc_count(); ++a) {
        out_arcs_[static_cast<size_t>(ofill[static_cast<size_t>(arcs_[static_cast<size_t>(a)].tail)]++)] = a;
        in_arcs_[static_cast<size_t>(ifill[static_cast<size_t>(arcs_[static_cast<size_t>(a)].head)]++)] = a;
    }
}

std::span<const int> BidirectedView::out_arcs(int v) const {
    const auto b = static_cast<size_t>(out_start_[static_cast<size_t>(v)]);
    const auto e = static_cast<size_t>(out_start_[static_cast<size_t>(v) + 1]);
    return {out_arcs_.data() + b, e - b};
}

std::span<const int> BidirectedView::in_arcs(int v) const {
    const auto b = static_cast<size_t>(in_start_[static_cast<size_t>(v)]);
    const auto e = static_cast<size_t>(in_start_[static_cast<size_t>(v) + 1]);
    return {in_arcs_.data() + b, e - b};
}

namespace {

ShortestPathTree run_dijkstra(const BidirectedView& view, int source) {
    const int n = view.node_count();
    ShortestPathTree t;
    t.dist.assign(static_cast<size_t>(n), kInf);
    t.pred_arc.assign(static_cast<size_t>(n), -1);
    t.dist[static_cast<size_t>(source)] = 0.0;

    using Entry = std::pair<double, int>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
        const auto [d, u] = heap.top();
        heap.pop();
        if (d > t.dist[static_cast<size_t>(u)]) continue;
        for (int a : view.out_arcs(u)) {
            const Arc& arc = view.arc(a);
            const double nd = d + arc.cost;
            if (nd < t.dist[static_cast<size_t>(arc.head)]) {
                t.dist[static_cast<size_t>(arc.head)] = nd;
                t.pred_arc[static_cast<size_t>(arc.head)] = a;
                heap.emplace(nd, arc.head);
            }
        }
    }
    return t;
}

}  // namespace

DistanceOracle::DistanceOracle(const BidirectedView& view)
    : view_(&view),
      trees_(static_cast<size_t>(view.node_count())),
      published_(static_cast<size_t>(view.node_count())) {}

const ShortestPathTree& DistanceOracle::from(int source) const {
    if (source < 0 || source >= view_->node_count()) throw Error("source node out of range");
    const ShortestPathTree* t = published_[static_cast<size_t>(source)].load(std::memory_order_acquire);
    if (t) return *t;
    std::lock_guard<std::mutex> lock(fill_mutex_);
    t = published_[static_cast<size_t>(source)].load(std::memory_order_relaxed);
    if (t) return *t;
    trees_[static_cast<size_t>(source)] =
        std::make_unique<ShortestPathTree>(run_dijkstra(*view_, source));
    t = trees_[static_cast<size_t>(source)].get();
    published_[static_cast<size_t>(source)].store(t, std::memory_order_release);
    return *t;
}

std::pair<double, std::vector<int>> DistanceOracle::shortest_path(int u, int v) const {
    const ShortestPathTree& t = from(u);
    if (u == v) return {0.0, {}};
    if (t.dist[static_cast<size_t>(v)] == kInf)
        throw Error("no path between requested nodes");
    std::vector<int> arcs;
    int cur = v;
    while (cur != u) {
        const int a = t.pred_arc[static_cast<size_t>(cur)];
        arcs.push_back(a);
        cur = view_->arc(a).tail;
    }
    std::reverse(arcs.begin(), arcs.end());
    return {t.dist[static_cast<size_t>(v)], std::move(arcs)};
}

int DistanceOracle::source_count() const {
    int c = 0;
    for (const auto& slot : published_)
        if (slot.load(std::memory_order_relaxed)) ++c;
    return c;
}

}  // namespace stlam
