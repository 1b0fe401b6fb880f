#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "psh/milp.hpp"
#include "psh/solver.hpp"
#include "psh/types.hpp"

namespace psh {

// Objective variant: WithPshBids keeps the PSH offer/bid terms (legacy
// discussion form); ThermalOnly drops them and prices only thermal production.
enum class ObjectiveMode { WithPshBids, ThermalOnly };

// Semantic-key lookup into the Milp variable vector. Indices are positions in
// the validated case (units, reservoirs, thermals), t is the interval.
struct VariableMap {
    std::map<std::tuple<int, int, Mode>, int> u;             // (psh, t, mode)
    std::map<std::tuple<int, int, Mode, Mode>, int> v;       // (psh, t, from, to)
    std::map<std::pair<int, int>, int> q_gen;                // (psh, t)
    std::map<std::pair<int, int>, int> q_pump;               // (psh, t)
    std::map<std::tuple<int, int, int>, int> q_thermal;      // (thermal, t, segment)
    std::map<std::pair<int, int>, int> soc;                  // (reservoir, t), t in 0..T
    std::map<std::tuple<int, int, Mode>, int> ur;            // (reservoir, t, mode)
    std::vector<int> balance_rows;                           // row index per t
    bool legacy = false;
};

struct FormulationOptions {
    ObjectiveMode objective = ObjectiveMode::ThermalOnly;
    // When false, the storage machinery (SOC variables/rows, pump start
    // limits, plant exclusivity) is omitted; used as the compactness baseline.
    bool storage_constraints = true;
    // Throw InfeasibleBoundsDetected instead of collecting a warning when a
    // mode's minimum output exceeds its effective (reservoir-limited) maximum.
    bool strict_bounds = false;
};

struct BuiltModel {
    Milp model;
    VariableMap map;
    std::vector<std::string> warnings;
};

// Configuration-based PSH unit commitment: mode exclusivity, transition flow
// logic, box constraints tightened by reservoir headroom, SOC recursion with
// fixed endpoints, optional pump start limits and plant-level exclusivity.
BuiltModel build_proposed(const ValidatedCase& vc, const FormulationOptions& options = {});

// Current-practice clearing: owner windows and bid/offer prices, daily max
// generation energy, no operator-side SOC.
BuiltModel build_legacy(const ValidatedCase& vc);

struct UnitSchedule {
    std::string id;
    std::vector<Mode> mode;      // per interval
    std::vector<double> q_gen;   // MW
    std::vector<double> q_pump;  // MW
};

struct Schedule {
    int n_intervals = 0;
    double dt_hours = 1.0;
    std::vector<UnitSchedule> units;                   // per PSH unit
    std::vector<std::vector<double>> soc;              // per reservoir, length T+1
    std::vector<std::vector<double>> thermal_output;   // per thermal unit, per interval
};

// Reads modes and power levels from a feasible solution. SOC comes from the e
// variables for the proposed model and is reconstructed by the storage
// recursion for the legacy model.
Schedule decode_schedule(const ValidatedCase& vc, const VariableMap& map,
                         const std::vector<double>& solution);

// Residual checks used across the test corpus: exclusivity, single transition,
// flow balance, SOC recursion/bounds/endpoints, system energy balance, plant
// exclusivity and pump start limits where enabled. Empty result means clean.
std::vector<std::string> check_schedule_invariants(const ValidatedCase& vc,
                                                   const Schedule& schedule,
                                                   bool proposed_model, double tol = 1e-6);

}  // namespace psh
