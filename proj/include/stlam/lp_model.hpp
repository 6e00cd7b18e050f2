#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stlam/graph.hpp"
#include "stlam/laminar.hpp"

namespace stlam {

enum class VarKind : std::uint8_t { flow, start, end, split };

struct VariableKey {
    VarKind kind;
    int group;  // family node index (flow/start/end) or partition index (split)
    int item;   // arc index (flow) or graph node (start/end/split)
};

struct LpRow {
    std::vector<std::pair<int, double>> coef;  // (column, coefficient), column-sorted
    double rhs = 0.0;
};

// Equality-form LP over box-bounded columns. Column layout, in order:
//   flow  f[s][a]   set-major, one block per family node
//   start y+[s][i]  set-major over graph nodes
//   end   y-[s][i]  set-major over graph nodes
//   split w[p][i]   partition-major over graph nodes
// Rows, in order: per-(set, node) flow conservation; per-(partition, node)
// end coupling; per-(partition, child, node) start coupling; per-partition
// cardinality. Source/sink pinning is realized as bound fixings and counted
// in fixing_count() rather than as rows.
class LpModel {
public:
    int column_count() const { return static_cast<int>(lb_.size()); }
    int row_count() const { return static_cast<int>(rows_.size()); }
    int fixing_count() const { return fixing_count_; }

    double lower_bound(int col) const { return lb_[static_cast<size_t>(col)]; }
    double upper_bound(int col) const { return ub_[static_cast<size_t>(col)]; }
    double objective(int col) const { return obj_[static_cast<size_t>(col)]; }
    const std::vector<LpRow>& rows() const { return rows_; }

    int node_count() const { return n_; }
    int arc_count() const { return m_; }
    int set_count() const { return set_count_; }
    int partition_count() const { return partition_count_; }
    int root() const { return root_; }
    // Terminal of commodity k (K = terminals minus root, input order kept).
    int sink(int commodity) const { return sinks_[static_cast<size_t>(commodity)]; }
    int commodity_count() const { return static_cast<int>(sinks_.size()); }

    int flow_col(int set_node, int arc) const { return set_node * m_ + arc; }
    int start_col(int set_node, int node) const { return start0_ + set_node * n_ + node; }
    int end_col(int set_node, int node) const { return end0_ + set_node * n_ + node; }
    int split_col(int partition, int node) const { return split0_ + partition * n_ + node; }

    VariableKey key(int col) const;
    std::string column_name(int col) const;
    std::string row_name(int row) const;

    friend LpModel build_lp(const BidirectedView& view, int root, const LaminarFamily& family);
    friend LpModel scale_rhs(const LpModel& model, double lambda);
    friend LpModel make_lp(std::vector<std::array<double, 3>> columns, std::vector<LpRow> rows);

private:
    std::vector<double> lb_, ub_, obj_;
    std::vector<LpRow> rows_;
    int fixing_count_ = 0;
    int n_ = 0, m_ = 0, set_count_ = 0, partition_count_ = 0;
    int start0_ = 0, end0_ = 0, split0_ = 0;
    int root_ = -1;
    std::vector<int> sinks_;
    // Row block offsets: [flow, end-coupling, start-coupling, cardinality].
    int row_end_coupling0_ = 0, row_start_coupling0_ = 0, row_cardinality0_ = 0;
    std::vector<int> child_row_offset_;  // per partition, prefix of child counts
    std::vector<int> partition_child_count_;
};

// Bare equality-form model from explicit columns (lb, ub, objective) and
// rows; carries none of the family structure, columns are named x<i>.
LpModel make_lp(std::vector<std::array<double, 3>> columns, std::vector<LpRow> rows);

// Polynomial-size subproblem for one laminar family: one flow system per
// member set, coupled through the per-partition sharing variables. The root
// set starts at `root`, each singleton ends at its terminal; both are pinned
// via bounds. Throws Error when root is not a terminal or the family's
// commodity count does not match the instance.
LpModel build_lp(const BidirectedView& view, int root, const LaminarFamily& family);

// Replaces every unit right-hand side and unit bound by lambda (0 < lambda
// <= 1): cardinality rows, pinned bounds and box upper bounds all scale, so
// the optimum scales linearly with lambda.
LpModel scale_rhs(const LpModel& model, double lambda);

// CPLEX LP text format; deterministic row and column order, integer
// coefficients written without decimal points.
std::string export_lp(const LpModel& model);

// Minimal reader for the exporter's output, used to round-trip checks.
struct ParsedLp {
    struct Row {
        std::string name;
        int term_count = 0;
        double rhs = 0.0;
    };
    bool minimize = true;
    std::vector<std::string> columns;  // declaration order from Bounds
    std::vector<Row> rows;
    std::vector<std::pair<double, double>> bounds;  // aligned with columns
};
ParsedLp parse_lp_text(const std::string& text);

// Largest |row residual| of x over the model's equality rows.
double max_row_residual(const LpModel& model, std::span<const double> x);

}  // namespace stlam
