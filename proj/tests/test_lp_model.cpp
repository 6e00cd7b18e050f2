#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <set>
#include <string>

#include "stlam/error.hpp"
#include "stlam/laminar.hpp"
#include "stlam/lp_model.hpp"
#include "support/test_instances.hpp"

using namespace stlam;

namespace {

// Closed forms for the subproblem dimensions of a full binary family:
// every count is linear in n, m and b alone.
int expected_columns(int n, int m, int b) {
    return m * (2 * b - 1) + 2 * n * (2 * b - 1) + n * (b - 1);
}
int expected_rows(int n, int m, int b) {
    (void)m;
    return n * (2 * b - 1) + n * (b - 1) + 2 * n * (b - 1) + (b - 1);
}
int expected_fixings(int n, int b) { return n * (1 + b); }

}  // namespace

TEST_CASE("model dimensions on the four-node example") {
    // 4 nodes, 4 undirected edges (8 arcs), 3 terminals -> b = 2.
    Instance g(4,
               {{0, 1, 1.0}, {1, 2, 1.0}, {1, 3, 1.0}, {0, 2, 2.0}},
               {0, 2, 3});
    BidirectedView view(g);
    LaminarFamily fam = LaminarFamily::from_rank(2, 0);
    LpModel model = build_lp(view, 0, fam);

    CHECK(model.column_count() == 52);
    CHECK(model.row_count() == 25);
    CHECK(model.fixing_count() == 12);
    CHECK(model.row_count() + model.fixing_count() == 37);
    CHECK(model.column_count() == expected_columns(4, 8, 2));
    CHECK(model.set_count() == 3);
    CHECK(model.partition_count() == 1);
}

TEST_CASE("model dimensions follow the closed forms on random instances") {
    std::mt19937_64 rng(23);
    for (int it = 0; it < 40; ++it) {
        Instance g = testsup::random_instance(rng, {4, 30, 25, 2, 6, 10});
        const int b = static_cast<int>(g.terminals().size()) - 1;
        if (b < 1) continue;
        BidirectedView view(g);
        const std::uint64_t pick = count_families(b) == 1 ? 0 : rng() % count_families(b);
        LaminarFamily fam = LaminarFamily::from_rank(b, pick);
        LpModel model = build_lp(view, g.terminals()[0], fam);

        const int n = g.node_count();
        const int m = view.arc_count();
        CHECK(model.column_count() == expected_columns(n, m, b));
        CHECK(model.row_count() == expected_rows(n, m, b));
        CHECK(model.fixing_count() == expected_fixings(n, b));
    }
}

TEST_CASE("a 53-node 160-arc three-commodity model has 1436 columns") {
    CHECK(expected_columns(53, 160, 3) == 1436);
}

TEST_CASE("two-terminal model has no split variables and no coupling rows") {
    Instance g = testsup::path3();
    BidirectedView view(g);
    LaminarFamily fam = LaminarFamily::from_rank(1, 0);
    LpModel model = build_lp(view, 0, fam);
    CHECK(model.set_count() == 1);
    CHECK(model.partition_count() == 0);
    // only flow conservation rows remain
    CHECK(model.row_count() == g.node_count());
    CHECK(model.column_count() == expected_columns(3, 4, 1));
    CHECK(model.fixing_count() == expected_fixings(3, 1));
}

TEST_CASE("build_lp validates its arguments") {
    Instance g = testsup::star4();  // terminals {0,2,3}, b = 2
    BidirectedView view(g);
    CHECK_THROWS_AS(build_lp(view, 1, LaminarFamily::from_rank(2, 0)), Error);  // not a terminal
    CHECK_THROWS_AS(build_lp(view, 0, LaminarFamily::from_rank(3, 0)), Error);  // b mismatch
}

TEST_CASE("objective covers exactly the flow columns at arc costs") {
    Instance g = testsup::star4();
    BidirectedView view(g);
    LpModel model = build_lp(view, 0, LaminarFamily::from_rank(2, 0));
    for (int c = 0; c < model.column_count(); ++c) {
        const VariableKey k = model.key(c);
        if (k.kind == VarKind::flow) {
            CHECK(model.objective(c) == view.arc(k.item).cost);
        } else {
            CHECK(model.objective(c) == 0.0);
        }
    }
}

TEST_CASE("pinned bounds realize the source and the sinks") {
    Instance g = testsup::star4();  // root 0, sinks 2 and 3
    BidirectedView view(g);
    LaminarFamily fam = LaminarFamily::from_rank(2, 0);
    LpModel model = build_lp(view, 0, fam);

    const int root_set = fam.root();
    for (int i = 0; i < g.node_count(); ++i) {
        const int c = model.start_col(root_set, i);
        CHECK(model.lower_bound(c) == model.upper_bound(c));
        CHECK(model.lower_bound(c) == (i == 0 ? 1.0 : 0.0));
    }
    for (int k = 0; k < model.commodity_count(); ++k) {
        const int leaf = fam.find_set(1ull << k);
        REQUIRE(leaf >= 0);
        for (int i = 0; i < g.node_count(); ++i) {
            const int c = model.end_col(leaf, i);
            CHECK(model.lower_bound(c) == model.upper_bound(c));
            CHECK(model.lower_bound(c) == (i == model.sink(k) ? 1.0 : 0.0));
        }
    }
}

TEST_CASE("row structure: conservation, coupling and cardinality") {
    Instance g = testsup::star4();
    BidirectedView view(g);
    LaminarFamily fam = LaminarFamily::from_rank(2, 0);
    LpModel model = build_lp(view, 0, fam);
    const int n = g.node_count();

    // flow conservation block: per set s and node i,
    // out-flow - in-flow - start + end = 0
    for (int s = 0; s < model.set_count(); ++s)
        for (int i = 0; i < n; ++i) {
            const LpRow& row = model.rows()[static_cast<size_t>(s * n + i)];
            CHECK(row.rhs == 0.0);
            double start_coef = 0.0, end_coef = 0.0;
            for (auto [col, coef] : row.coef) {
                const VariableKey k = model.key(col);
                if (k.kind == VarKind::start) start_coef = coef;
                if (k.kind == VarKind::end) end_coef = coef;
            }
            CHECK(start_coef == -1.0);
            CHECK(end_coef == 1.0);
        }

    // each cardinality row sums one partition's split markers to one
    int ones = 0;
    for (int r = 0; r < model.row_count(); ++r) {
        const LpRow& row = model.rows()[static_cast<size_t>(r)];
        if (row.rhs == 1.0) {
            ++ones;
            CHECK(static_cast<int>(row.coef.size()) == n);
            for (auto [col, coef] : row.coef) {
                CHECK(coef == 1.0);
                CHECK(model.key(col).kind == VarKind::split);
            }
        }
    }
    CHECK(ones == model.partition_count());
}

TEST_CASE("column and row names are unique and well-formed") {
    Instance g = testsup::star4();
    BidirectedView view(g);
    LpModel model = build_lp(view, 0, LaminarFamily::from_rank(2, 0));
    std::set<std::string> names;
    for (int c = 0; c < model.column_count(); ++c) names.insert(model.column_name(c));
    CHECK(static_cast<int>(names.size()) == model.column_count());
    names.clear();
    for (int r = 0; r < model.row_count(); ++r) names.insert(model.row_name(r));
    CHECK(static_cast<int>(names.size()) == model.row_count());
}

TEST_CASE("lp text export round-trips through the reader") {
    Instance g = testsup::fig_share7();
    BidirectedView view(g);
    LaminarFamily fam = LaminarFamily::from_rank(3, 1);
    LpModel model = build_lp(view, 0, fam);

    const std::string text = export_lp(model);
    ParsedLp parsed = parse_lp_text(text);

    CHECK(parsed.minimize);
    REQUIRE(static_cast<int>(parsed.columns.size()) == model.column_count());
    REQUIRE(static_cast<int>(parsed.rows.size()) == model.row_count());
    REQUIRE(static_cast<int>(parsed.bounds.size()) == model.column_count());
    for (int c = 0; c < model.column_count(); ++c) {
        CHECK(parsed.columns[static_cast<size_t>(c)] == model.column_name(c));
        CHECK(parsed.bounds[static_cast<size_t>(c)].first == model.lower_bound(c));
        CHECK(parsed.bounds[static_cast<size_t>(c)].second == model.upper_bound(c));
    }
    for (int r = 0; r < model.row_count(); ++r) {
        CHECK(parsed.rows[static_cast<size_t>(r)].name == model.row_name(r));
        CHECK(parsed.rows[static_cast<size_t>(r)].term_count ==
              static_cast<int>(model.rows()[static_cast<size_t>(r)].coef.size()));
        CHECK(parsed.rows[static_cast<size_t>(r)].rhs == model.rows()[static_cast<size_t>(r)].rhs);
    }
    // integral costs keep integer formatting: no stray ".000000"
    CHECK(text.find(".000000") == std::string::npos);
}

TEST_CASE("scale_rhs multiplies rhs and bounds, and rejects bad lambda") {
    Instance g = testsup::star4();
    BidirectedView view(g);
    LpModel model = build_lp(view, 0, LaminarFamily::from_rank(2, 0));

    LpModel half = scale_rhs(model, 0.5);
    CHECK(half.column_count() == model.column_count());
    CHECK(half.row_count() == model.row_count());
    for (int r = 0; r < model.row_count(); ++r)
        CHECK(half.rows()[static_cast<size_t>(r)].rhs ==
              0.5 * model.rows()[static_cast<size_t>(r)].rhs);
    for (int c = 0; c < model.column_count(); ++c) {
        CHECK(half.lower_bound(c) == 0.5 * model.lower_bound(c));
        CHECK(half.upper_bound(c) == 0.5 * model.upper_bound(c));
        CHECK(half.objective(c) == model.objective(c));
    }

    CHECK_THROWS_AS(scale_rhs(model, 0.0), Error);
    CHECK_THROWS_AS(scale_rhs(model, -0.5), Error);
    CHECK_THROWS_AS(scale_rhs(model, 1.5), Error);
}

TEST_CASE("max_row_residual on hand-built points") {
    LpModel m = make_lp({{0.0, 1.0, 1.0}, {0.0, 1.0, 1.0}},
                        {LpRow{{{0, 1.0}, {1, 1.0}}, 1.0}});
    std::vector<double> feas{0.25, 0.75};
    CHECK(max_row_residual(m, feas) == 0.0);
    std::vector<double> infeas{0.25, 0.25};
    CHECK(max_row_residual(m, infeas) == doctest::Approx(0.5));
}
