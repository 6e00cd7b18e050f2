#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

namespace stlam {

struct Edge {
    int u = 0;
    int v = 0;
    double cost = 0.0;
};

// Undirected weighted graph with a distinguished terminal set.
// Node ids are 0-based internally; the STP reader/writer shifts the 1-based
// external ids. Immutable after construction, safe to share across threads.
class Instance {
public:
    // Validates: ids in range, no self-loops, costs finite and >= 0,
    // terminals distinct and mutually connected by the edge set.
    Instance(int node_count, std::vector<Edge> edges, std::vector<int> terminals);

    int node_count() const { return node_count_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<int>& terminals() const { return terminals_; }
    bool is_terminal(int v) const { return terminal_mask_[static_cast<size_t>(v)] != 0; }

    // True when every cost is an exactly representable integer; path and tree
    // costs are then exact in double arithmetic.
    bool integral_costs() const { return integral_costs_; }

private:
    int node_count_;
    std::vector<Edge> edges_;
    std::vector<int> terminals_;
    std::vector<char> terminal_mask_;
    bool integral_costs_;
};

struct Arc {
    int tail;
    int head;
    double cost;
    int edge;  // index into Instance::edges()
};

// Directed double cover of the instance: arcs 2e and 2e+1 are the two
// orientations of edge e, so arc_count() == 2 * edge_count().
class BidirectedView {
public:
    explicit BidirectedView(const Instance& g);

    const Instance& instance() const { return *instance_; }
    int node_count() const { return instance_->node_count(); }
    int arc_count() const { return static_cast<int>(arcs_.size()); }
    const Arc& arc(int a) const { return arcs_[static_cast<size_t>(a)]; }
    static int opposite(int a) { return a ^ 1; }

    std::span<const int> out_arcs(int v) const;
    std::span<const int> in_arcs(int v) const;

private:
    const Instance* instance_;
    std::vector<Arc> arcs_;
    std::vector<int> out_start_, out_arcs_;
    std::vector<int> in_start_, in_arcs_;
};

struct ShortestPathTree {
    std::vector<double> dist;   // +infinity where unreachable
    std::vector<int> pred_arc;  // -1 at the source and at unreachable nodes
};

// Lazily filled single-source shortest-path cache over a BidirectedView.
// Concurrent readers are safe: fills are serialized by a mutex and each tree
// is immutable once published through the atomic slot.
class DistanceOracle {
public:
    explicit DistanceOracle(const BidirectedView& view);

    const ShortestPathTree& from(int source) const;
    double dist(int u, int v) const { return from(u).dist[static_cast<size_t>(v)]; }

    // Arc ids of a shortest u -> v path, oriented u to v, together with its
    // length. Throws Error when v is unreachable from u.
    std::pair<double, std::vector<int>> shortest_path(int u, int v) const;

    int source_count() const;  // number of trees computed so far

private:
    const BidirectedView* view_;
    mutable std::vector<std::unique_ptr<ShortestPathTree>> trees_;
    mutable std::vector<std::atomic<const ShortestPathTree*>> published_;
    mutable std::mutex fill_mutex_;
};

}  // namespace stlam
