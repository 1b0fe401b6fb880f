#pragma once

#include <optional>
#include <string>
#include <vector>

#include "psh/analysis.hpp"
#include "psh/formulation.hpp"
#include "psh/pricing.hpp"

namespace psh {

// One cleared model run, as written to a results file.
struct RunResult {
    std::string model_tag;  // "proposed" or "legacy"
    std::vector<double> net_load;
    Schedule schedule;
    PriceSeries prices;
    std::string status;
    double objective = 0.0;      // model objective, $
    double thermal_cost = 0.0;   // thermal-only cost basis, $
    double best_bound = 0.0;
    double gap = 0.0;
    long nodes = 0;
};

struct BenefitSummary {
    double legacy_objective = 0.0;
    double proposed_objective = 0.0;
    double objective_improvement_pct = 0.0;
    std::vector<ProfitComparison> unit_profits;
    std::vector<MatchedEndpoints> matched_soc_endpoints;
    std::vector<std::string> warnings;
};

struct ScenarioSummary {
    std::uint64_t seed = 0;
    double legacy_objective = 0.0;
    double proposed_objective = 0.0;
    double improvement_pct = 0.0;
};

struct ResultsFile {
    std::vector<RunResult> runs;
    std::optional<BenefitSummary> benefit;
    std::vector<ScenarioSummary> scenarios;  // batch protocol runs, if any
};

// Versioned JSON case documents. Unknown keys are rejected (SchemaViolation),
// wrong types name the offending field. Units: MW, MWh, $/MWh, hours.
Case load_case(const std::string& path);
void save_case(const Case& c, const std::string& path);
Case case_from_json_text(const std::string& text);
std::string case_to_json_text(const Case& c);

void save_results(const ResultsFile& results, const std::string& path);
ResultsFile load_results(const std::string& path);

// Tidy CSV (t, net_load_mw, psh_net_mw, lmp, soc_mwh, model_tag) for external
// plotting; one block of rows per run.
void emit_plot_data(const ResultsFile& results, const std::string& path);

}  // namespace psh
