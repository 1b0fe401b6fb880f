#pragma once

#include <vector>

#include "psh/milp.hpp"

namespace psh {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    std::vector<double> primal;         // per structural variable
    std::vector<double> duals;          // per row, d(objective)/d(rhs)
    std::vector<double> reduced_costs;  // per structural variable (0 if basic)
    double objective = 0.0;
    double dual_objective = 0.0;
    bool degenerate = false;  // some basic variable sits on one of its bounds
    int iterations = 0;
};

struct SimplexOptions {
    double feas_tol = 1e-7;
    double pivot_tol = 1e-9;
    double dual_tol = 1e-9;
    int max_iterations = 0;  // 0 = automatic (scales with problem size)
    int refactor_every = 100;
};

// Column status over structural variables followed by one slack per row.
// Values: 0 = at lower, 1 = at upper, 2 = basic, 3 = nonbasic free at zero.
struct Basis {
    std::vector<unsigned char> col_status;
};

// Integrality is relaxed: binaries are treated as continuous within bounds.
// Throws Error("NumericalBreakdown") if the pivot tolerance is exhausted.
LpSolution solve_lp_relaxation(const Milp& model, const SimplexOptions& options = {});

// Variant with per-variable bound overrides and optional warm start, used by
// branch and bound. `lower`/`upper` must have one entry per model variable.
LpSolution solve_lp_relaxation(const Milp& model, const std::vector<double>& lower,
                               const std::vector<double>& upper, const SimplexOptions& options,
                               const Basis* warm_start, Basis* final_basis);

}  // namespace psh
