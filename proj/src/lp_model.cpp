#include "stlam/lp_model.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "stlam/error.hpp"
#include "text_util.hpp"

namespace stlam {

VariableKey LpModel::key(int col) const {
    if (n_ == 0 || m_ == 0) throw Error("model carries no family structure");
    if (col < start0_) return {VarKind::flow, col / m_, col % m_};
    if (col < end0_) return {VarKind::start, (col - start0_) / n_, (col - start0_) % n_};
    if (col < split0_) return {VarKind::end, (col - end0_) / n_, (col - end0_) % n_};
    return {VarKind::split, (col - split0_) / n_, (col - split0_) % n_};
}

std::string LpModel::column_name(int col) const {
    if (n_ == 0 || m_ == 0) return "x" + std::to_string(col);
    const VariableKey k = key(col);
    switch (k.kind) {
        case VarKind::flow:
            return "f_a" + std::to_string(k.item) + "_s" + std::to_string(k.group);
        case VarKind::start:
            return "yh_n" + std::to_string(k.item) + "_s" + std::to_string(k.group);
        case VarKind::end:
            return "yb_n" + std::to_string(k.item) + "_s" + std::to_string(k.group);
        case VarKind::split:
            return "w_n" + std::to_string(k.item) + "_p" + std::to_string(k.group);
    }
    return {};
}

std::string LpModel::row_name(int row) const {
    if (n_ == 0 || m_ == 0) return "r" + std::to_string(row);
    if (row < row_end_coupling0_)
        return "flow_s" + std::to_string(row / n_) + "_n" + std::to_string(row % n_);
    if (row < row_start_coupling0_) {
        const int r = row - row_end_coupling0_;
        return "stop_p" + std::to_string(r / n_) + "_n" + std::to_string(r % n_);
    }
    if (row < row_cardinality0_) {
        int r = row - row_start_coupling0_;
        int p = 0;
        while (p + 1 < partition_count_ && child_row_offset_[static_cast<size_t>(p) + 1] <= r) ++p;
        r -= child_row_offset_[static_cast<size_t>(p)];
        return "begin_p" + std::to_string(p) + "_c" + std::to_string(r / n_) + "_n" +
               std::to_string(r % n_);
    }
    return "one_p" + std::to_string(row - row_cardinality0_);
}

LpModel build_lp(const BidirectedView& view, int root, const LaminarFamily& family) {
    const Instance& g = view.instance();
    if (root < 0 || root >= g.node_count() || !g.is_terminal(root))
        throw Error("root must be a terminal node");

    std::vector<int> sinks;
    for (int t : g.terminals())
        if (t != root) sinks.push_back(t);
    if (static_cast<int>(sinks.size()) != family.commodity_count())
        throw Error("family commodity count does not match the instance");

    LpModel md;
    md.n_ = g.node_count();
    md.m_ = view.arc_count();
    md.set_count_ = family.node_count();
    md.partition_count_ = static_cast<int>(family.partitions().size());
    md.root_ = root;
    md.sinks_ = std::move(sinks);

    const int n = md.n_, m = md.m_, S = md.set_count_, P = md.partition_count_;
    md.start0_ = S * m;
    md.end0_ = md.start0_ + S * n;
    md.split0_ = md.end0_ + S * n;
    const int cols = md.split0_ + P * n;

    md.lb_.assign(static_cast<size_t>(cols), 0.0);
    md.ub_.assign(static_cast<size_t>(cols), 1.0);
    md.obj_.assign(static_cast<size_t>(cols), 0.0);
    for (int s = 0; s < S; ++s)
        for (int a = 0; a < m; ++a)
            md.obj_[static_cast<size_t>(md.flow_col(s, a))] = view.arc(a).cost;

    // Pinned variables: the full set starts at the root, singletons end at
    // their terminal. Counted as constraints but realized as fixings.
    const int root_set = family.root();
    for (int i = 0; i < n; ++i) {
        const int c = md.start_col(root_set, i);
        md.lb_[static_cast<size_t>(c)] = md.ub_[static_cast<size_t>(c)] = (i == root) ? 1.0 : 0.0;
    }
    md.fixing_count_ = n;
    for (int s = 0; s < S; ++s) {
        if (!family.is_leaf(s)) continue;
        const int k = std::countr_zero(family.node(s).set);
        const int sink = md.sinks_[static_cast<size_t>(k)];
        for (int i = 0; i < n; ++i) {
            const int c = md.end_col(s, i);
            md.lb_[static_cast<size_t>(c)] = md.ub_[static_cast<size_t>(c)] = (i == sink) ? 1.0 : 0.0;
        }
        md.fixing_count_ += n;
    }

    // Flow conservation per (set, node): out - in - start + end = 0.
    for (int s = 0; s < S; ++s) {
        for (int i = 0; i < n; ++i) {
            LpRow row;
            for (int a : view.out_arcs(i)) row.coef.emplace_back(md.flow_col(s, a), 1.0);
            for (int a : view.in_arcs(i)) row.coef.emplace_back(md.flow_col(s, a), -1.0);
            row.coef.emplace_back(md.start_col(s, i), -1.0);
            row.coef.emplace_back(md.end_col(s, i), 1.0);
            std::sort(row.coef.begin(), row.coef.end());
            md.rows_.push_back(std::move(row));
        }
    }
    md.row_end_coupling0_ = static_cast<int>(md.rows_.size());

    // A split set stops where its partition sits: w[p][i] - end[s][i] = 0.
    for (int p = 0; p < P; ++p) {
        const int s = family.partitions()[static_cast<size_t>(p)];
        for (int i = 0; i < n; ++i) {
            LpRow row;
            row.coef.emplace_back(md.end_col(s, i), -1.0);
            row.coef.emplace_back(md.split_col(p, i), 1.0);
            std::sort(row.coef.begin(), row.coef.end());
            md.rows_.push_back(std::move(row));
        }
    }
    md.row_start_coupling0_ = static_cast<int>(md.rows_.size());

    // Each child takes over at the same node: w[p][i] - start[c][i] = 0.
    md.child_row_offset_.assign(static_cast<size_t>(P), 0);
    md.partition_child_count_.assign(static_cast<size_t>(P), 0);
    int child_rows = 0;
    for (int p = 0; p < P; ++p) {
        md.child_row_offset_[static_cast<size_t>(p)] = child_rows;
        const auto kids = family.children_of(p);
        md.partition_child_count_[static_cast<size_t>(p)] = static_cast<int>(kids.size());
        for (int c : kids) {
            for (int i = 0; i < n; ++i) {
                LpRow row;
                row.coef.emplace_back(md.start_col(c, i), -1.0);
                row.coef.emplace_back(md.split_col(p, i), 1.0);
                std::sort(row.coef.begin(), row.coef.end());
                md.rows_.push_back(std::move(row));
            }
            child_rows += n;
        }
    }
    md.row_cardinality0_ = static_cast<int>(md.rows_.size());

    // Every partition happens exactly once.
    for (int p = 0; p < P; ++p) {
        LpRow row;
        for (int i = 0; i < n; ++i) row.coef.emplace_back(md.split_col(p, i), 1.0);
        row.rhs = 1.0;
        md.rows_.push_back(std::move(row));
    }
    return md;
}

LpModel make_lp(std::vector<std::array<double, 3>> columns, std::vector<LpRow> rows) {
    LpModel md;
    for (const auto& [lo, hi, obj] : columns) {
        md.lb_.push_back(lo);
        md.ub_.push_back(hi);
        md.obj_.push_back(obj);
    }
    for (LpRow& row : rows) {
        for (const auto& [col, coef] : row.coef) {
            (void)coef;
            if (col < 0 || col >= md.column_count()) throw Error("row references unknown column");
        }
        std::sort(row.coef.begin(), row.coef.end());
    }
    md.rows_ = std::move(rows);
    return md;
}

LpModel scale_rhs(const LpModel& model, double lambda) {
    if (!(lambda > 0.0) || lambda > 1.0) throw Error("scale factor must be in (0, 1]");
    LpModel md = model;
    for (double& v : md.lb_) v *= lambda;
    for (double& v : md.ub_) v *= lambda;
    for (LpRow& row : md.rows_) row.rhs *= lambda;
    return md;
}

namespace {

void append_term(std::string& line, std::string& out, double coef, const std::string& name,
                 bool first) {
    std::string term;
    if (first) {
        if (coef < 0) term += "- ";
    } else {
        term += (coef < 0) ? " - " : " + ";
    }
    const double mag = std::fabs(coef);
    if (mag != 1.0) term += detail::format_number(mag) + " ";
    term += name;
    if (line.size() + term.size() > 200) {
        out += line;
        out += "\n";
        line = "   ";
    }
    line += term;
}

}  // namespace

std::string export_lp(const LpModel& model) {
    std::string out;
    out += "\\ laminar decomposition subproblem\n";
    out += "Minimize\n";
    std::string line = " obj: ";
    bool first = true;
    for (int c = 0; c < model.column_count(); ++c) {
        const double v = model.objective(c);
        if (v == 0.0) continue;
        append_term(line, out, v, model.column_name(c), first);
        first = false;
    }
    if (first) line += "0 " + model.column_name(0);
    out += line;
    out += "\nSubject To\n";
    for (int r = 0; r < model.row_count(); ++r) {
        const LpRow& row = model.rows()[static_cast<size_t>(r)];
        line = " " + model.row_name(r) + ": ";
        first = true;
        for (const auto& [col, coef] : row.coef) {
            append_term(line, out, coef, model.column_name(col), first);
            first = false;
        }
        line += " = " + detail::format_number(row.rhs);
        out += line;
        out += "\n";
    }
    out += "Bounds\n";
    for (int c = 0; c < model.column_count(); ++c) {
        const double lo = model.lower_bound(c), hi = model.upper_bound(c);
        if (lo == hi) {
            out += " " + model.column_name(c) + " = " + detail::format_number(lo) + "\n";
        } else {
            out += " " + detail::format_number(lo) + " <= " + model.column_name(c) +
                   " <= " + detail::format_number(hi) + "\n";
        }
    }
    out += "End\n";
    return out;
}

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool looks_numeric(const std::string& t) {
    return !t.empty() && (std::isdigit(static_cast<unsigned char>(t[0])) || t[0] == '.' ||
                          ((t[0] == '-' || t[0] == '+') && t.size() > 1));
}

}  // namespace

ParsedLp parse_lp_text(const std::string& text) {
    ParsedLp lp;
    std::istringstream in(text);
    std::string raw;
    enum class Section { preamble, objective, rows, bounds, done };
    Section section = Section::preamble;
    std::map<std::string, size_t> col_index;
    auto touch_column = [&](const std::string& name) {
        if (col_index.emplace(name, lp.columns.size()).second) {
            lp.columns.push_back(name);
            lp.bounds.emplace_back(0.0, std::numeric_limits<double>::infinity());
        }
    };

    ParsedLp::Row* open_row = nullptr;
    while (std::getline(in, raw)) {
        if (!raw.empty() && raw[0] == '\\') continue;
        std::istringstream ss(raw);
        std::vector<std::string> toks;
        std::string t;
        while (ss >> t) toks.push_back(t);
        if (toks.empty()) continue;
        const std::string head = lower(toks[0]);
        if (head == "minimize" || head == "min") {
            section = Section::objective;
            lp.minimize = true;
            continue;
        }
        if (head == "maximize" || head == "max") {
            section = Section::objective;
            lp.minimize = false;
            continue;
        }
        if (head == "subject" || head == "st" || head == "s.t.") {
            section = Section::rows;
            open_row = nullptr;
            continue;
        }
        if (head == "bounds") {
            section = Section::bounds;
            continue;
        }
        if (head == "end") {
            section = Section::done;
            break;
        }

        if (section == Section::objective) continue;  // names counted via rows/bounds

        if (section == Section::rows) {
            size_t i = 0;
            if (!toks[0].empty() && toks[0].back() == ':') {
                lp.rows.push_back({toks[0].substr(0, toks[0].size() - 1), 0, 0.0});
                open_row = &lp.rows.back();
                i = 1;
            } else if (!open_row) {
                throw Error("lp text: constraint without a label");
            }
            double sign = 1.0;
            bool have_coef = false;
            bool rhs_next = false;
            for (; i < toks.size(); ++i) {
                const std::string& tok = toks[i];
                if (tok == "+") continue;
                if (tok == "-") {
                    sign = -sign;
                    continue;
                }
                if (tok == "=" || tok == "<=" || tok == ">=") {
                    rhs_next = true;
                    continue;
                }
                double num;
                if (detail::parse_double(tok, num)) {
                    if (rhs_next) {
                        open_row->rhs = num;
                        rhs_next = false;
                    } else {
                        have_coef = true;
                    }
                    continue;
                }
                ++open_row->term_count;
                sign = 1.0;
                have_coef = false;
            }
            (void)have_coef;
            continue;
        }

        if (section == Section::bounds) {
            // Forms: "lo <= name <= hi" or "name = v".
            if (toks.size() == 5 && toks[1] == "<=" && toks[3] == "<=") {
                double lo, hi;
                if (!detail::parse_double(toks[0], lo) || !detail::parse_double(toks[4], hi))
                    throw Error("lp text: bad bounds line");
                touch_column(toks[2]);
                lp.bounds[col_index[toks[2]]] = {lo, hi};
            } else if (toks.size() == 3 && toks[1] == "=") {
                double v;
                if (!detail::parse_double(toks[2], v)) throw Error("lp text: bad bounds line");
                touch_column(toks[0]);
                lp.bounds[col_index[toks[0]]] = {v, v};
            } else if (looks_numeric(toks[0]) || toks.size() != 3) {
                throw Error("lp text: unsupported bounds form");
            } else {
                double v;
                if (!detail::parse_double(toks[2], v)) throw Error("lp text: bad bounds line");
                touch_column(toks[0]);
                if (toks[1] == "<=")
                    lp.bounds[col_index[toks[0]]].second = v;
                else if (toks[1] == ">=")
                    lp.bounds[col_index[toks[0]]].first = v;
                else
                    throw Error("lp text: unsupported bounds form");
            }
            continue;
        }
        throw Error("lp text: content outside any section");
    }
    if (section != Section::done) throw Error("lp text: missing End marker");
    return lp;
}

double max_row_residual(const LpModel& model, std::span<const double> x) {
    if (static_cast<int>(x.size()) != model.column_count())
        throw Error("point dimension does not match the model");
    double worst = 0.0;
    for (const LpRow& row : model.rows()) {
        double lhs = 0.0;
        for (const auto& [col, coef] : row.coef) lhs += coef * x[static_cast<size_t>(col)];
        worst = std::max(worst, std::fabs(lhs - row.rhs));
    }
    return worst;
}

}  // namespace stlam
