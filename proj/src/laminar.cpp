#include "stlam/laminar.hpp"

#include <algorithm>
#include <bit>

#include "stlam/error.hpp"

namespace stlam {

std::uint64_t count_families(int commodity_count) {
    if (commodity_count < 1) throw Error("commodity count must be at least 1");
    std::uint64_t total = 1;
    for (int j = 2; j <= commodity_count; ++j) {
        const std::uint64_t factor = static_cast<std::uint64_t>(2 * j - 3);
        if (__builtin_mul_overflow(total, factor, &total))
            throw Error("family count overflows 64 bits");
    }
    return total;
}

LaminarFamily LaminarFamily::from_rank(int commodity_count, std::uint64_t rank) {
    if (commodity_count < 1) throw Error("commodity count must be at least 1");
    if (commodity_count > kMaxCommodities)
        throw Error("family enumeration is capped at " + std::to_string(kMaxCommodities) +
                    " commodities");
    if (rank >= count_families(commodity_count)) throw Error("family rank out of range");

    // Mixed-radix digits, commodity j's insertion choice in [0, 2j-3).
    std::vector<int> choice(static_cast<size_t>(commodity_count) + 1, 0);
    std::uint64_t r = rank;
    for (int j = commodity_count; j >= 2; --j) {
        const std::uint64_t radix = static_cast<std::uint64_t>(2 * j - 3);
        choice[static_cast<size_t>(j)] = static_cast<int>(r % radix);
        r /= radix;
    }

    LaminarFamily fam;
    fam.commodity_count_ = commodity_count;
    fam.nodes_.push_back(FamilyNode{CommoditySet{1}, -1, {}});
    fam.root_ = 0;
    for (int j = 2; j <= commodity_count; ++j) {
        const int at = choice[static_cast<size_t>(j)];  // subdivide parent edge of node `at`
        const int leaf = static_cast<int>(fam.nodes_.size());
        fam.nodes_.push_back(FamilyNode{CommoditySet{1} << (j - 1), -1, {}});
        const int inner = static_cast<int>(fam.nodes_.size());
        fam.nodes_.push_back(FamilyNode{0, -1, {}});

        const int up = fam.nodes_[static_cast<size_t>(at)].parent;
        fam.nodes_[static_cast<size_t>(inner)].parent = up;
        if (up < 0) {
            fam.root_ = inner;
        } else {
            for (int& c : fam.nodes_[static_cast<size_t>(up)].children)
                if (c == at) c = inner;
        }
        fam.nodes_[static_cast<size_t>(inner)].children = {at, leaf};
        fam.nodes_[static_cast<size_t>(at)].parent = inner;
        fam.nodes_[static_cast<size_t>(leaf)].parent = inner;
    }
    fam.finalize(rank);
    return fam;
}

LaminarFamily LaminarFamily::star(int commodity_count) {
    if (commodity_count < 2) throw Error("star family needs at least 2 commodities");
    if (commodity_count > kMaxCommodities) throw Error("too many commodities");
    LaminarFamily fam;
    fam.commodity_count_ = commodity_count;
    const int root = commodity_count;
    for (int k = 0; k < commodity_count; ++k)
        fam.nodes_.push_back(FamilyNode{CommoditySet{1} << k, root, {}});
    FamilyNode rn;
    rn.parent = -1;
    for (int k = 0; k < commodity_count; ++k) rn.children.push_back(k);
    fam.nodes_.push_back(std::move(rn));
    fam.root_ = root;
    fam.finalize(~std::uint64_t{0});  // sentinel: not part of the ranked enumeration
    return fam;
}

void LaminarFamily::finalize(std::uint64_t id) {
    id_ = id;
    // Sets bottom-up; children always precede their parent in no particular
    // index order, so accumulate by repeated passes over a post-order stack.
    std::vector<int> order;
    order.reserve(nodes_.size());
    std::vector<int> stack{root_};
    while (!stack.empty()) {
        const int v = stack.back();
        stack.pop_back();
        order.push_back(v);
        for (int c : nodes_[static_cast<size_t>(v)].children) stack.push_back(c);
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        FamilyNode& nd = nodes_[static_cast<size_t>(*it)];
        if (nd.children.empty()) continue;
        nd.set = 0;
        for (int c : nd.children) nd.set |= nodes_[static_cast<size_t>(c)].set;
    }
    partitions_.clear();
    for (int i = 0; i < node_count(); ++i)
        if (!is_leaf(i)) partitions_.push_back(i);
}

int LaminarFamily::leaf_count() const {
    int c = 0;
    for (int i = 0; i < node_count(); ++i)
        if (is_leaf(i)) ++c;
    return c;
}

bool LaminarFamily::full_binary() const {
    for (const FamilyNode& nd : nodes_)
        if (!nd.children.empty() && nd.children.size() != 2) return false;
    return true;
}

int LaminarFamily::partition_of(int set_node) const {
    if (is_leaf(set_node)) throw Error("singleton sets are not partitioned");
    const auto it = std::lower_bound(partitions_.begin(), partitions_.end(), set_node);
    return static_cast<int>(it - partitions_.begin());
}

std::span<const int> LaminarFamily::children_of(int partition) const {
    if (partition < 0 || partition >= static_cast<int>(partitions_.size()))
        throw Error("partition index out of range");
    const FamilyNode& nd = nodes_[static_cast<size_t>(partitions_[static_cast<size_t>(partition)])];
    return {nd.children.data(), nd.children.size()};
}

int LaminarFamily::find_set(CommoditySet s) const {
    for (int i = 0; i < node_count(); ++i)
        if (nodes_[static_cast<size_t>(i)].set == s) return i;
    return -1;
}

namespace {

int min_commodity(CommoditySet s) { return std::countr_zero(s); }

void render(const LaminarFamily& fam, int node, std::string& out, bool canonical) {
    const FamilyNode& nd = fam.node(node);
    if (nd.children.empty()) {
        if (canonical)
            out += std::to_string(nd.set);
        else
            out += "k" + std::to_string(min_commodity(nd.set) + 1);
        return;
    }
    std::vector<int> kids(nd.children.begin(), nd.children.end());
    std::sort(kids.begin(), kids.end(), [&](int a, int b) {
        return min_commodity(fam.node(a).set) < min_commodity(fam.node(b).set);
    });
    out += "(";
    for (size_t i = 0; i < kids.size(); ++i) {
        if (i) out += ",";
        render(fam, kids[i], out, canonical);
    }
    out += ")";
}

}  // namespace

std::string LaminarFamily::to_string() const {
    std::string out;
    render(*this, root_, out, false);
    return out;
}

std::string LaminarFamily::canonical_encoding() const {
    std::string out;
    render(*this, root_, out, true);
    return out;
}

FamilyEnumerator::FamilyEnumerator(int commodity_count)
    : commodity_count_(commodity_count), total_(count_families(commodity_count)) {
    if (commodity_count > LaminarFamily::kMaxCommodities)
        throw Error("family enumeration is capped at " +
                    std::to_string(LaminarFamily::kMaxCommodities) + " commodities");
}

std::optional<LaminarFamily> FamilyEnumerator::next() {
    if (next_rank_ >= total_) return std::nullopt;
    return LaminarFamily::from_rank(commodity_count_, next_rank_++);
}

}  // namespace stlam
