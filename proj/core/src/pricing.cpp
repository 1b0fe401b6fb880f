#include "psh/pricing.hpp"

#include <cmath>

namespace psh {

PriceSeries compute_lmp(const Milp& model, const MipSolution& mip, const VariableMap& map,
                        double dt_hours, const SimplexOptions& options) {
    if (mip.incumbent.empty())
        throw make_error("FixedLpInfeasible", "MIP solution has no incumbent");
    Milp fixed = model;
    for (size_t j = 0; j < fixed.variables.size(); ++j) {
        if (fixed.variables[j].integrality != Integrality::Binary) continue;
        double v = std::round(mip.incumbent[j]);
        fixed.variables[j].lower = v;
        fixed.variables[j].upper = v;
    }
    LpSolution lp = solve_lp(fixed, options);
    if (lp.status != LpStatus::Optimal)
        throw make_error("FixedLpInfeasible",
                         "LP with binaries fixed at the incumbent is not optimal");
    PriceSeries prices;
    prices.degenerate = lp.degenerate;
    prices.lmp.reserve(map.balance_rows.size());
    for (int row : map.balance_rows) prices.lmp.push_back(lp.duals[row] / dt_hours);
    return prices;
}

ProfitStatement psh_profit(const Schedule& schedule, const PriceSeries& prices,
                           const std::string& psh_id) {
    if ((int)prices.lmp.size() != schedule.n_intervals)
        throw make_error("HorizonMismatch",
                         "price series length does not match the schedule horizon");
    const UnitSchedule* unit = nullptr;
    for (const auto& us : schedule.units)
        if (us.id == psh_id) unit = &us;
    if (!unit) throw make_error("DanglingReference", "no schedule for PSH unit " + psh_id);

    ProfitStatement ps;
    ps.psh_id = psh_id;
    for (int t = 0; t < schedule.n_intervals; ++t) {
        ps.energy_revenue += prices.lmp[t] * unit->q_gen[t] * schedule.dt_hours;
        ps.pumping_cost += prices.lmp[t] * unit->q_pump[t] * schedule.dt_hours;
    }
    ps.profit = ps.energy_revenue - ps.pumping_cost;
    return ps;
}

}  // namespace psh
