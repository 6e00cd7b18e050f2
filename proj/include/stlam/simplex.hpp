#pragma once

#include <cstdint>
#include <vector>

#include "stlam/lp_model.hpp"

namespace stlam {

// All solver tolerances live here; the CLI exposes the first and third.
struct SimplexConfig {
    double feasibility_tol = 1e-8;   // phase-1 residual acceptance
    double optimality_tol = 1e-9;    // reduced-cost threshold
    double integrality_tol = 1e-6;   // used by callers judging 0/1-ness
    double pivot_tol = 1e-10;        // smallest admissible pivot element
    int refactor_interval = 100;     // basis refactorization cadence
    long max_iterations = 0;         // 0: derived from the model size
};

enum class SolveStatus { optimal, infeasible, unbounded };

struct LpSolution {
    SolveStatus status = SolveStatus::optimal;
    double objective = 0.0;
    std::vector<double> x;  // structural columns only
    long iterations = 0;    // pivots across both phases
};

// Bounded-variable primal simplex: phase 1 on artificials, Dantzig pricing
// with a Bland fallback once pivots degenerate for too long, dense LU of the
// basis with product-form updates in between refactorizations.
LpSolution solve(const LpModel& model, const SimplexConfig& config = {});

}  // namespace stlam
