#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stlam {

// Commodities are indexed 0..b-1 and a set of them is a bitmask.
using CommoditySet = std::uint64_t;

struct FamilyNode {
    CommoditySet set = 0;
    int parent = -1;            // -1 at the root
    std::vector<int> children;  // empty for leaves; size 2 in enumerated families
};

// A laminar family over b commodities, stored as its forest representation:
// one node per member set, singletons at the leaves, the full set at the
// root. Enumerated families are full binary; the star() constructor builds
// the one deliberately non-binary shape used by the dominance tests.
class LaminarFamily {
public:
    static constexpr int kMaxCommodities = 12;

    // Builds the rank-th family (0-based) in enumeration order by leaf
    // insertion: commodity j joins by subdividing one of the 2j-1 parent
    // edges (virtual root edge included) of the tree over commodities 0..j-1.
    static LaminarFamily from_rank(int commodity_count, std::uint64_t rank);

    // Root split directly into all b singletons (b >= 2). The b = 3 case is
    // the canonical non-binary family; it never beats the best binary one.
    static LaminarFamily star(int commodity_count);

    std::uint64_t id() const { return id_; }
    int commodity_count() const { return commodity_count_; }
    int node_count() const { return static_cast<int>(nodes_.size()); }
    int root() const { return root_; }
    const FamilyNode& node(int i) const { return nodes_[static_cast<size_t>(i)]; }
    bool is_leaf(int i) const { return nodes_[static_cast<size_t>(i)].children.empty(); }
    int leaf_count() const;
    bool full_binary() const;

    // Internal node indices in ascending order; position in this list is the
    // partition index used by the LP layout and the DP split table.
    const std::vector<int>& partitions() const { return partitions_; }
    int partition_of(int set_node) const;  // Error when set_node is a leaf
    int parent_of(int set_node) const { return nodes_[static_cast<size_t>(set_node)].parent; }
    std::span<const int> children_of(int partition) const;
    int find_set(CommoditySet s) const;  // node index, -1 when absent

    std::string to_string() const;           // e.g. ((k1,k2),k3)
    std::string canonical_encoding() const;  // injective over set systems

private:
    LaminarFamily() = default;
    void finalize(std::uint64_t id);

    std::vector<FamilyNode> nodes_;
    std::vector<int> partitions_;
    int root_ = 0;
    int commodity_count_ = 0;
    std::uint64_t id_ = 0;
};

// Number of full binary laminar families over b commodities: the odd double
// factorial (2b-3)!!, with the empty product 1 at b = 1. Error on b < 1 or
// 64-bit overflow.
std::uint64_t count_families(int commodity_count);

// Streams all families in rank order with constant memory per step.
class FamilyEnumerator {
public:
    explicit FamilyEnumerator(int commodity_count);
    std::optional<LaminarFamily> next();
    std::uint64_t total() const { return total_; }

private:
    int commodity_count_;
    std::uint64_t next_rank_ = 0;
    std::uint64_t total_;
};

}  // namespace stlam
