#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psh/formulation.hpp"
#include "psh/pricing.hpp"

namespace psh {

struct ProfitComparison {
    ProfitStatement legacy;
    ProfitStatement proposed;
    double profit_improvement_pct = 0.0;  // vs legacy profit, when nonzero
};

struct MatchedEndpoints {
    std::string reservoir_id;
    double e_final = 0.0;
    double e_min = 0.0;
    double e_max = 0.0;
};

struct BenefitReport {
    double legacy_objective = 0.0;    // thermal production cost, $
    double proposed_objective = 0.0;  // thermal production cost, $
    double objective_improvement_pct = 0.0;
    std::vector<ProfitComparison> unit_profits;
    std::vector<MatchedEndpoints> matched_soc_endpoints;
    std::vector<std::string> warnings;
    Schedule legacy_schedule;
    Schedule proposed_schedule;
    PriceSeries legacy_prices;
    PriceSeries proposed_prices;
};

struct DerivedCase {
    Case matched;  // copy of the input with matched SOC endpoints per reservoir
    std::vector<std::string> warnings;
};

// Matched-endpoint benefit protocol inputs: the proposed model inherits the
// legacy run's realized end-of-day SOC and SOC bounds derived from the total
// cleared generation and pumping through the efficiencies. The derived bounds
// are used literally even when they cross physical reservoir limits; that is
// only flagged, never clamped.
DerivedCase derive_matched_bounds(const ValidatedCase& vc, const Schedule& legacy_schedule);

// Runs: legacy clearing -> matched bounds -> proposed clearing (thermal-only
// objective) -> objectives on the common thermal-cost basis and profits at
// each run's own prices.
BenefitReport compare_models(const ValidatedCase& vc, const MipOptions& options = {});

// Enumeration oracle: every transition-feasible mode sequence combination,
// each dispatched by LP; returns the minimum objective. The count of sequence
// combinations must not exceed max_dimension (TooLarge otherwise).
double brute_force_uc(const ValidatedCase& vc, long max_dimension = 200000,
                      const FormulationOptions& options = {},
                      const SimplexOptions& lp_options = {});

struct CompactnessReport {
    ModelStats proposed;
    ModelStats baseline;
    int added_soc_variables = 0;          // expected R * (T + 1)
    int added_plant_variables = 0;        // expected 2 * R * T over exclusive reservoirs
    int added_constraints = 0;
    long added_nonzeros = 0;
    std::vector<int> soc_row_nonzeros;    // per reservoir: 2 + 2 * |units sharing it|
};

// Size accounting of the storage machinery relative to a baseline built from
// the same case without it.
CompactnessReport compactness_report(const Milp& proposed, const Milp& baseline);

// Seeded piecewise-smooth daily net-load generator (base sinusoidal day shape
// with a morning valley plus noise). Reproducible per seed.
std::vector<double> random_net_load(int n_intervals, std::uint64_t seed, double base_mw,
                                    double swing_mw, double valley_depth_mw, int peak_count = 2);

}  // namespace psh
