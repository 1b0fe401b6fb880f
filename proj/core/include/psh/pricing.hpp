#pragma once

#include <string>
#include <vector>

#include "psh/formulation.hpp"
#include "psh/solver.hpp"

namespace psh {

// System-wide interval prices: duals of the energy balance rows of the LP
// obtained by fixing every binary at the MIP incumbent. `degenerate` is set
// when the fixed LP has a degenerate optimal basis, in which case the dual is
// basis-dependent.
struct PriceSeries {
    std::vector<double> lmp;  // $/MWh, length T
    bool degenerate = false;
};

struct ProfitStatement {
    std::string psh_id;
    double energy_revenue = 0.0;  // $
    double pumping_cost = 0.0;    // $
    double profit = 0.0;          // $ = revenue - cost
};

// Fixes all binaries at the incumbent and re-solves the LP; throws
// FixedLpInfeasible if the incumbent is inconsistent with the model.
PriceSeries compute_lmp(const Milp& model, const MipSolution& mip, const VariableMap& map,
                        double dt_hours, const SimplexOptions& options = {});

ProfitStatement psh_profit(const Schedule& schedule, const PriceSeries& prices,
                           const std::string& psh_id);

}  // namespace psh
