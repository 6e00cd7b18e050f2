#include "stlam/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stlam/error.hpp"

namespace stlam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Dense LU with partial pivoting, row-major.
class DenseLu {
public:
    void factor(std::vector<double> a, int n) {
        n_ = n;
        lu_ = std::move(a);
        piv_.resize(static_cast<size_t>(n));
        for (int k = 0; k < n; ++k) {
            int p = k;
            double best = std::fabs(at(k, k));
            for (int i = k + 1; i < n; ++i) {
                const double v = std::fabs(at(i, k));
                if (v > best) {
                    best = v;
                    p = i;
                }
            }
            piv_[static_cast<size_t>(k)] = p;
            if (p != k)
                for (int j = 0; j < n; ++j) std::swap(at(k, j), at(p, j));
            if (best < 1e-13) throw Error("singular basis matrix");
            const double inv = 1.0 / at(k, k);
            for (int i = k + 1; i < n; ++i) {
                const double l = at(i, k) * inv;
                at(i, k) = l;
                if (l == 0.0) continue;
                for (int j = k + 1; j < n; ++j) at(i, j) -= l * at(k, j);
            }
        }
    }

    // B x = v, in place.
    void solve(std::vector<double>& v) const {
        for (int k = 0; k < n_; ++k)
            if (piv_[static_cast<size_t>(k)] != k)
                std::swap(v[static_cast<size_t>(k)], v[static_cast<size_t>(piv_[static_cast<size_t>(k)])]);
        for (int k = 0; k < n_; ++k) {
            const double vk = v[static_cast<size_t>(k)];
            if (vk == 0.0) continue;
            for (int i = k + 1; i < n_; ++i) v[static_cast<size_t>(i)] -= at(i, k) * vk;
        }
        for (int k = n_ - 1; k >= 0; --k) {
            double s = v[static_cast<size_t>(k)];
            for (int j = k + 1; j < n_; ++j) s -= at(k, j) * v[static_cast<size_t>(j)];
            v[static_cast<size_t>(k)] = s / at(k, k);
        }
    }

    // B^T y = v, in place.
    void solve_transposed(std::vector<double>& v) const {
        for (int k = 0; k < n_; ++k) {
            double s = v[static_cast<size_t>(k)];
            for (int j = 0; j < k; ++j) s -= at(j, k) * v[static_cast<size_t>(j)];
            v[static_cast<size_t>(k)] = s / at(k, k);
        }
        for (int k = n_ - 1; k >= 0; --k) {
            double s = v[static_cast<size_t>(k)];
            for (int i = k + 1; i < n_; ++i) s -= at(i, k) * v[static_cast<size_t>(i)];
            v[static_cast<size_t>(k)] = s;
        }
        for (int k = n_ - 1; k >= 0; --k)
            if (piv_[static_cast<size_t>(k)] != k)
                std::swap(v[static_cast<size_t>(k)], v[static_cast<size_t>(piv_[static_cast<size_t>(k)])]);
    }

private:
    double& at(int i, int j) { return lu_[static_cast<size_t>(i) * static_cast<size_t>(n_) + static_cast<size_t>(j)]; }
    double at(int i, int j) const { return lu_[static_cast<size_t>(i) * static_cast<size_t>(n_) + static_cast<size_t>(j)]; }
    int n_ = 0;
    std::vector<double> lu_;
    std::vector<int> piv_;
};

struct Eta {
    int row;
    std::vector<double> w;  // B^{-1} a_entering captured at pivot time
};

enum class ColStatus : char { basic, at_lower, at_upper };

class BoundedSimplex {
public:
    BoundedSimplex(const LpModel& model, const SimplexConfig& config)
        : cfg_(config), rows_(model.row_count()), structural_(model.column_count()) {
        const int q = structural_;
        cols_ = q + rows_;
        col_rows_.resize(static_cast<size_t>(cols_));
        col_vals_.resize(static_cast<size_t>(cols_));
        lb_.resize(static_cast<size_t>(cols_));
        ub_.resize(static_cast<size_t>(cols_));
        obj_.assign(static_cast<size_t>(cols_), 0.0);
        rhs_.resize(static_cast<size_t>(rows_));
        for (int c = 0; c < q; ++c) {
            lb_[static_cast<size_t>(c)] = model.lower_bound(c);
            ub_[static_cast<size_t>(c)] = model.upper_bound(c);
            obj_[static_cast<size_t>(c)] = model.objective(c);
        }
        for (int r = 0; r < rows_; ++r) {
            rhs_[static_cast<size_t>(r)] = model.rows()[static_cast<size_t>(r)].rhs;
            for (const auto& [col, coef] : model.rows()[static_cast<size_t>(r)].coef) {
                col_rows_[static_cast<size_t>(col)].push_back(r);
                col_vals_[static_cast<size_t>(col)].push_back(coef);
            }
        }
        max_iter_ = cfg_.max_iterations > 0
                        ? cfg_.max_iterations
                        : 200L * (rows_ + cols_) + 10000L;
    }

    LpSolution run() {
        start_basis();

        // Phase 1: drive the artificial activity to zero.
        for (int c = 0; c < cols_; ++c)
            phase_obj_.push_back(c >= structural_ ? 1.0 : 0.0);
        optimize(phase_obj_);
        double infeas = 0.0;
        for (int c = structural_; c < cols_; ++c) infeas += x_[static_cast<size_t>(c)];
        double rhs_scale = 1.0;
        for (double b : rhs_) rhs_scale += std::fabs(b);
        if (infeas > cfg_.feasibility_tol * rhs_scale) {
            LpSolution sol;
            sol.status = SolveStatus::infeasible;
            sol.iterations = iterations_;
            return sol;
        }

        // Phase 2: artificials are frozen at zero and the true costs apply.
        for (int c = structural_; c < cols_; ++c) {
            lb_[static_cast<size_t>(c)] = 0.0;
            ub_[static_cast<size_t>(c)] = 0.0;
            if (status_[static_cast<size_t>(c)] != ColStatus::basic)
                x_[static_cast<size_t>(c)] = 0.0;
        }
        const bool bounded = optimize(obj_);
        LpSolution sol;
        if (!bounded) {
            sol.status = SolveStatus::unbounded;
            sol.iterations = iterations_;
            return sol;
        }
        refactor();  // clean snap of the basic values before reporting
        sol.status = SolveStatus::optimal;
        sol.iterations = iterations_;
        sol.x.assign(x_.begin(), x_.begin() + structural_);
        double z = 0.0;
        for (int c = 0; c < structural_; ++c) z += obj_[static_cast<size_t>(c)] * x_[static_cast<size_t>(c)];
        sol.objective = z;
        return sol;
    }

private:
    void start_basis() {
        x_.assign(static_cast<size_t>(cols_), 0.0);
        status_.assign(static_cast<size_t>(cols_), ColStatus::at_lower);
        for (int c = 0; c < structural_; ++c) x_[static_cast<size_t>(c)] = lb_[static_cast<size_t>(c)];

        std::vector<double> residual = rhs_;
        for (int c = 0; c < structural_; ++c) {
            const double v = x_[static_cast<size_t>(c)];
            if (v == 0.0) continue;
            const auto& rws = col_rows_[static_cast<size_t>(c)];
            const auto& vls = col_vals_[static_cast<size_t>(c)];
            for (size_t k = 0; k < rws.size(); ++k)
                residual[static_cast<size_t>(rws[k])] -= vls[k] * v;
        }
        basis_.resize(static_cast<size_t>(rows_));
        art_sign_.resize(static_cast<size_t>(rows_));
        for (int r = 0; r < rows_; ++r) {
            const int c = structural_ + r;
            const double sign = residual[static_cast<size_t>(r)] >= 0.0 ? 1.0 : -1.0;
            art_sign_[static_cast<size_t>(r)] = sign;
            col_rows_[static_cast<size_t>(c)] = {r};
            col_vals_[static_cast<size_t>(c)] = {sign};
            lb_[static_cast<size_t>(c)] = 0.0;
            ub_[static_cast<size_t>(c)] = kInf;
            basis_[static_cast<size_t>(r)] = c;
            status_[static_cast<size_t>(c)] = ColStatus::basic;
            x_[static_cast<size_t>(c)] = std::fabs(residual[static_cast<size_t>(r)]);
        }
        refactor();
    }

    void refactor() {
        std::vector<double> dense(static_cast<size_t>(rows_) * static_cast<size_t>(rows_), 0.0);
        for (int r = 0; r < rows_; ++r) {
            const int c = basis_[static_cast<size_t>(r)];
            const auto& rws = col_rows_[static_cast<size_t>(c)];
            const auto& vls = col_vals_[static_cast<size_t>(c)];
            for (size_t k = 0; k < rws.size(); ++k)
                dense[static_cast<size_t>(rws[k]) * static_cast<size_t>(rows_) + static_cast<size_t>(r)] = vls[k];
        }
        lu_.factor(std::move(dense), rows_);
        etas_.clear();

        // Recompute basic values from scratch; kills accumulated drift.
        std::vector<double> r = rhs_;
        for (int c = 0; c < cols_; ++c) {
            if (status_[static_cast<size_t>(c)] == ColStatus::basic) continue;
            const double v = x_[static_cast<size_t>(c)];
            if (v == 0.0) continue;
            const auto& rws = col_rows_[static_cast<size_t>(c)];
            const auto& vls = col_vals_[static_cast<size_t>(c)];
            for (size_t k = 0; k < rws.size(); ++k)
                r[static_cast<size_t>(rws[k])] -= vls[k] * v;
        }
        lu_.solve(r);
        for (int i = 0; i < rows_; ++i) x_[static_cast<size_t>(basis_[static_cast<size_t>(i)])] = r[static_cast<size_t>(i)];
    }

    void ftran(std::vector<double>& v) const {
        lu_.solve(v);
        for (const Eta& e : etas_) {
            const double t = v[static_cast<size_t>(e.row)] / e.w[static_cast<size_t>(e.row)];
            if (t == 0.0) {
                v[static_cast<size_t>(e.row)] = 0.0;
                continue;
            }
            for (int i = 0; i < rows_; ++i) v[static_cast<size_t>(i)] -= e.w[static_cast<size_t>(i)] * t;
            v[static_cast<size_t>(e.row)] = t;
        }
    }

    void btran(std::vector<double>& v) const {
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            double num = v[static_cast<size_t>(it->row)];
            for (int i = 0; i < rows_; ++i)
                if (i != it->row) num -= it->w[static_cast<size_t>(i)] * v[static_cast<size_t>(i)];
            v[static_cast<size_t>(it->row)] = num / it->w[static_cast<size_t>(it->row)];
        }
        lu_.solve_transposed(v);
    }

    double reduced_cost(const std::vector<double>& c, const std::vector<double>& y, int col) const {
        double d = c[static_cast<size_t>(col)];
        const auto& rws = col_rows_[static_cast<size_t>(col)];
        const auto& vls = col_vals_[static_cast<size_t>(col)];
        for (size_t k = 0; k < rws.size(); ++k) d -= y[static_cast<size_t>(rws[k])] * vls[k];
        return d;
    }

    // Returns false on unboundedness.
    bool optimize(const std::vector<double>& c) {
        long degenerate_streak = 0;
        bool bland = false;
        std::vector<double> y(static_cast<size_t>(rows_));
        std::vector<double> w(static_cast<size_t>(rows_));
        while (true) {
            if (static_cast<int>(etas_.size()) >= cfg_.refactor_interval) refactor();
            if (iterations_ > max_iter_) throw Error("simplex iteration limit exceeded");

            for (int i = 0; i < rows_; ++i) y[static_cast<size_t>(i)] = c[static_cast<size_t>(basis_[static_cast<size_t>(i)])];
            btran(y);

            int entering = -1;
            double entering_dir = 1.0;
            double best_score = cfg_.optimality_tol;
            for (int col = 0; col < cols_; ++col) {
                const ColStatus st = status_[static_cast<size_t>(col)];
                if (st == ColStatus::basic) continue;
                if (lb_[static_cast<size_t>(col)] == ub_[static_cast<size_t>(col)]) continue;
                const double d = reduced_cost(c, y, col);
                double score = 0.0, dir = 0.0;
                if (st == ColStatus::at_lower && d < -cfg_.optimality_tol) {
                    score = -d;
                    dir = 1.0;
                } else if (st == ColStatus::at_upper && d > cfg_.optimality_tol) {
                    score = d;
                    dir = -1.0;
                } else {
                    continue;
                }
                if (bland) {
                    entering = col;
                    entering_dir = dir;
                    break;
                }
                if (score > best_score) {
                    best_score = score;
                    entering = col;
                    entering_dir = dir;
                }
            }
            if (entering < 0) return true;

            w.assign(static_cast<size_t>(rows_), 0.0);
            {
                const auto& rws = col_rows_[static_cast<size_t>(entering)];
                const auto& vls = col_vals_[static_cast<size_t>(entering)];
                for (size_t k = 0; k < rws.size(); ++k) w[static_cast<size_t>(rws[k])] = vls[k];
            }
            ftran(w);

            // Ratio test: the entering column moves by t >= 0 in direction
            // entering_dir; basic variable i moves by -entering_dir * w_i * t.
            double t_limit = ub_[static_cast<size_t>(entering)] - lb_[static_cast<size_t>(entering)];
            int leaving_pos = -1;
            bool leaving_to_lower = true;
            for (int i = 0; i < rows_; ++i) {
                const double wi = entering_dir * w[static_cast<size_t>(i)];
                if (std::fabs(wi) <= cfg_.pivot_tol) continue;
                const int bc = basis_[static_cast<size_t>(i)];
                const double xv = x_[static_cast<size_t>(bc)];
                double t;
                bool to_lower;
                if (wi > 0.0) {
                    t = (xv - lb_[static_cast<size_t>(bc)]) / wi;
                    to_lower = true;
                } else {
                    if (ub_[static_cast<size_t>(bc)] == kInf) continue;
                    t = (xv - ub_[static_cast<size_t>(bc)]) / wi;
                    to_lower = false;
                }
                if (t < 0.0) t = 0.0;
                bool better = t < t_limit - 1e-12;
                if (!better && t <= t_limit + 1e-12 && leaving_pos >= 0) {
                    // Tie: Bland keeps the smallest variable index, otherwise
                    // prefer the larger pivot magnitude for stability.
                    if (bland)
                        better = bc < basis_[static_cast<size_t>(leaving_pos)];
                    else
                        better = std::fabs(wi) >
                                 std::fabs(entering_dir * w[static_cast<size_t>(leaving_pos)]);
                }
                if (better || (leaving_pos < 0 && t < t_limit - 1e-12)) {
                    t_limit = std::min(t_limit, t);
                    leaving_pos = i;
                    leaving_to_lower = to_lower;
                }
            }
            if (t_limit == kInf) return false;

            if (t_limit <= 1e-11) {
                if (++degenerate_streak > 5L * rows_) bland = true;
            } else {
                degenerate_streak = 0;
                bland = false;
            }

            // Apply the step.
            if (t_limit != 0.0) {
                for (int i = 0; i < rows_; ++i) {
                    const double wi = w[static_cast<size_t>(i)];
                    if (wi != 0.0)
                        x_[static_cast<size_t>(basis_[static_cast<size_t>(i)])] -= entering_dir * wi * t_limit;
                }
            }
            ++iterations_;
            if (leaving_pos < 0) {
                // Bound flip: the entering column crosses its box.
                status_[static_cast<size_t>(entering)] =
                    entering_dir > 0 ? ColStatus::at_upper : ColStatus::at_lower;
                x_[static_cast<size_t>(entering)] =
                    entering_dir > 0 ? ub_[static_cast<size_t>(entering)] : lb_[static_cast<size_t>(entering)];
                continue;
            }
            const int leaving_col = basis_[static_cast<size_t>(leaving_pos)];
            status_[static_cast<size_t>(leaving_col)] =
                leaving_to_lower ? ColStatus::at_lower : ColStatus::at_upper;
            x_[static_cast<size_t>(leaving_col)] =
                leaving_to_lower ? lb_[static_cast<size_t>(leaving_col)] : ub_[static_cast<size_t>(leaving_col)];
            const double start_bound = status_[static_cast<size_t>(entering)] == ColStatus::at_lower
                                           ? lb_[static_cast<size_t>(entering)]
                                           : ub_[static_cast<size_t>(entering)];
            x_[static_cast<size_t>(entering)] = start_bound + entering_dir * t_limit;
            basis_[static_cast<size_t>(leaving_pos)] = entering;
            status_[static_cast<size_t>(entering)] = ColStatus::basic;
            etas_.push_back(Eta{leaving_pos, w});
        }
    }

    SimplexConfig cfg_;
    int rows_;
    int structural_;
    int cols_ = 0;
    std::vector<std::vector<int>> col_rows_;
    std::vector<std::vector<double>> col_vals_;
    std::vector<double> lb_, ub_, obj_, rhs_, phase_obj_;
    std::vector<double> x_;
    std::vector<ColStatus> status_;
    std::vector<int> basis_;
    std::vector<double> art_sign_;
    DenseLu lu_;
    std::vector<Eta> etas_;
    long iterations_ = 0;
    long max_iter_ = 0;
};

}  // namespace

LpSolution solve(const LpModel& model, const SimplexConfig& config) {
    if (model.row_count() == 0) {
        // Pure box problem: every column sits at its cheapest bound.
        LpSolution sol;
        for (int c = 0; c < model.column_count(); ++c) {
            const double v = model.objective(c) >= 0 ? model.lower_bound(c) : model.upper_bound(c);
            if (!std::isfinite(v) && model.objective(c) != 0.0) {
                sol.status = SolveStatus::unbounded;
                return sol;
            }
            sol.x.push_back(std::isfinite(v) ? v : 0.0);
            sol.objective += model.objective(c) * sol.x.back();
        }
        return sol;
    }
    BoundedSimplex s(model, config);
    return s.run();
}

}  // namespace stlam
