// Command-line front end: solve a case, run the two-model comparison
// protocol, print model size statistics, or export prices and plot data.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "psh/analysis.hpp"
#include "psh/io.hpp"

namespace {

using nlohmann::json;

// Exit codes: 0 success, 2 usage, 3 parse/schema, 4 validation, 5 infeasible
// or solve failure, 6 backend problems, 1 anything else.
int exit_code_for(const std::string& category) {
    if (category == "ParseError" || category == "SchemaViolation" || category == "IoError")
        return 3;
    if (category == "ValidationFailed" || category == "MissingLegacyBid" ||
        category == "InfeasibleBoundsDetected" || category == "DuplicateId" ||
        category == "DanglingReference" || category == "BoundViolation" ||
        category == "EfficiencyOutOfRange")
        return 4;
    if (category == "Infeasible" || category == "NodeLimit") return 5;
    if (category == "BackendUnavailable") return 6;
    return 1;
}

void check_backend_env() {
    const char* env = std::getenv("PSH_SOLVER_BACKEND");
    if (!env || std::string(env).empty() || std::string(env) == "builtin") return;
    if (!psh::active_backend())
        throw psh::make_error("BackendUnavailable",
                              std::string("no registered backend named '") + env + "'");
}

std::string status_name(psh::MipStatus s) {
    switch (s) {
        case psh::MipStatus::Optimal: return "optimal";
        case psh::MipStatus::GapReached: return "gap_reached";
        case psh::MipStatus::Infeasible: return "infeasible";
        case psh::MipStatus::NodeLimit: return "node_limit";
    }
    return "unknown";
}

double thermal_cost_of(const psh::ValidatedCase& vc, const psh::Schedule& s) {
    double cost = 0.0;
    for (size_t i = 0; i < vc.data().thermal_units.size(); ++i) {
        const psh::ThermalUnit& tu = vc.data().thermal_units[i];
        for (int t = 0; t < s.n_intervals; ++t)
            cost += tu.cost_at(s.thermal_output[i][t]) * s.dt_hours;
    }
    return cost;
}

psh::RunResult run_model(const psh::ValidatedCase& vc, const std::string& model_tag,
                         const psh::MipOptions& options) {
    psh::BuiltModel built = model_tag == "legacy"
                                ? psh::build_legacy(vc)
                                : psh::build_proposed(vc, {psh::ObjectiveMode::ThermalOnly});
    psh::MipSolution mip = psh::solve_mip(built.model, options);
    if (mip.status == psh::MipStatus::Infeasible)
        throw psh::make_error("Infeasible", model_tag + " model has no feasible commitment");
    if (mip.status == psh::MipStatus::NodeLimit)
        throw psh::make_error("NodeLimit", "node limit reached before gap target");

    psh::RunResult r;
    r.model_tag = model_tag;
    r.net_load = vc.data().horizon.net_load;
    r.schedule = psh::decode_schedule(vc, built.map, mip.incumbent);
    r.prices = psh::compute_lmp(built.model, mip, built.map, vc.data().horizon.dt_hours,
                                options.lp);
    r.status = status_name(mip.status);
    r.objective = mip.objective;
    r.thermal_cost = thermal_cost_of(vc, r.schedule);
    r.best_bound = mip.best_bound;
    r.gap = mip.gap;
    r.nodes = mip.nodes_explored;
    return r;
}

int cmd_solve(const std::string& case_path, const std::string& model, double gap,
              long node_limit, const std::string& out_path) {
    psh::ValidatedCase vc = psh::validate_case(psh::load_case(case_path));
    psh::MipOptions options;
    options.rel_gap = gap;
    options.node_limit = node_limit;
    psh::ResultsFile rf;
    rf.runs.push_back(run_model(vc, model, options));
    psh::save_results(rf, out_path);
    const psh::RunResult& r = rf.runs.back();
    std::cout << model << ": status=" << r.status << " objective=" << r.objective
              << " bound=" << r.best_bound << " gap=" << r.gap << " nodes=" << r.nodes
              << "\n";
    return 0;
}

psh::RunResult to_run(const std::string& tag, const psh::Case& c, const psh::Schedule& s,
                      const psh::PriceSeries& p, double objective) {
    psh::RunResult r;
    r.model_tag = tag;
    r.net_load = c.horizon.net_load;
    r.schedule = s;
    r.prices = p;
    r.status = "optimal";
    r.objective = objective;
    r.thermal_cost = objective;
    return r;
}

int cmd_compare(const std::string& case_path, const std::string& scenarios,
                std::uint64_t seed, double gap, const std::string& out_path) {
    psh::Case base = psh::load_case(case_path);
    psh::MipOptions options;
    options.rel_gap = gap;

    std::vector<std::pair<std::uint64_t, std::vector<double>>> loads;
    loads.emplace_back(seed, base.horizon.net_load);  // scenario 0 is the case itself
    int n = 0;
    try {
        size_t pos = 0;
        n = std::stoi(scenarios, &pos);
        if (pos != scenarios.size()) n = -1;
    } catch (const std::exception&) {
        n = -1;
    }
    if (n < 0) {
        // Not a count: a JSON file holding an array of net-load arrays.
        std::ifstream in(scenarios);
        if (!in) throw psh::make_error("IoError", "cannot open " + scenarios);
        json doc;
        try {
            in >> doc;
        } catch (const json::exception& e) {
            throw psh::make_error("ParseError", e.what());
        }
        if (!doc.is_array())
            throw psh::make_error("SchemaViolation", "scenario file must be an array of arrays");
        for (const auto& row : doc)
            loads.emplace_back(0, row.get<std::vector<double>>());
    } else {
        double base_mw = 0.0, lo = 1e300, hi = -1e300;
        for (double d : base.horizon.net_load) {
            base_mw += d;
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        base_mw /= std::max<size_t>(1, base.horizon.net_load.size());
        for (int k = 1; k < n; ++k)
            loads.emplace_back(seed + k,
                               psh::random_net_load(base.horizon.n_intervals, seed + k, base_mw,
                                                    (hi - lo) / 2.0, (base_mw - lo) / 2.0));
    }

    psh::ResultsFile rf;
    for (size_t k = 0; k < loads.size(); ++k) {
        psh::Case c = base;
        c.horizon.net_load = loads[k].second;
        psh::ValidatedCase vc = psh::validate_case(c);
        psh::BenefitReport report = psh::compare_models(vc, options);
        double impr = report.objective_improvement_pct;
        std::cout << "scenario " << k << ": legacy=" << report.legacy_objective
                  << " proposed=" << report.proposed_objective << " improvement=" << impr
                  << "%\n";
        if (k == 0) {
            rf.runs.push_back(to_run("legacy", c, report.legacy_schedule, report.legacy_prices,
                                     report.legacy_objective));
            rf.runs.push_back(to_run("proposed", c, report.proposed_schedule,
                                     report.proposed_prices, report.proposed_objective));
            psh::BenefitSummary bs;
            bs.legacy_objective = report.legacy_objective;
            bs.proposed_objective = report.proposed_objective;
            bs.objective_improvement_pct = impr;
            bs.unit_profits = report.unit_profits;
            bs.matched_soc_endpoints = report.matched_soc_endpoints;
            bs.warnings = report.warnings;
            rf.benefit = std::move(bs);
        }
        rf.scenarios.push_back({loads[k].first, report.legacy_objective,
                                report.proposed_objective, impr});
    }
    psh::save_results(rf, out_path);
    return 0;
}

int cmd_stats(const std::string& case_path, const std::string& model) {
    psh::ValidatedCase vc = psh::validate_case(psh::load_case(case_path));
    if (model == "legacy") {
        psh::ModelStats st = psh::model_stats(psh::build_legacy(vc).model);
        std::cout << "variables=" << st.n_variables << " binaries=" << st.n_binaries
                  << " constraints=" << st.n_constraints << " nonzeros=" << st.n_nonzeros
                  << "\n";
        return 0;
    }
    psh::FormulationOptions full, bare;
    bare.storage_constraints = false;
    psh::Milp proposed = psh::build_proposed(vc, full).model;
    psh::Milp baseline = psh::build_proposed(vc, bare).model;
    psh::CompactnessReport rep = psh::compactness_report(proposed, baseline);
    std::cout << "proposed: variables=" << rep.proposed.n_variables
              << " binaries=" << rep.proposed.n_binaries
              << " constraints=" << rep.proposed.n_constraints
              << " nonzeros=" << rep.proposed.n_nonzeros << "\n";
    std::cout << "without storage rows: variables=" << rep.baseline.n_variables
              << " binaries=" << rep.baseline.n_binaries
              << " constraints=" << rep.baseline.n_constraints
              << " nonzeros=" << rep.baseline.n_nonzeros << "\n";
    std::cout << "storage adds: soc_variables=" << rep.added_soc_variables
              << " plant_variables=" << rep.added_plant_variables
              << " constraints=" << rep.added_constraints
              << " nonzeros=" << rep.added_nonzeros << "\n";
    std::cout << "soc row nonzeros per reservoir:";
    for (int nz : rep.soc_row_nonzeros) std::cout << " " << nz;
    std::cout << "\n";
    return 0;
}

int cmd_lmp(const std::string& case_path, const std::string& model, double gap,
            const std::string& out_path) {
    psh::ValidatedCase vc = psh::validate_case(psh::load_case(case_path));
    psh::MipOptions options;
    options.rel_gap = gap;
    psh::RunResult r = run_model(vc, model, options);
    std::ofstream out(out_path);
    if (!out) throw psh::make_error("IoError", "cannot write " + out_path);
    out.precision(17);
    out << "t,lmp\n";
    for (size_t t = 0; t < r.prices.lmp.size(); ++t) out << t << "," << r.prices.lmp[t] << "\n";
    if (r.prices.degenerate)
        std::cerr << "warning: fixed LP is degenerate; prices are basis-dependent\n";
    return 0;
}

int cmd_plot_data(const std::string& results_path, const std::string& out_path) {
    psh::emit_plot_data(psh::load_results(results_path), out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Day-ahead unit commitment with configuration-based pumped storage"};
    app.require_subcommand(1);

    std::string case_path, model = "proposed", out_path, results_path, scenarios = "1";
    double gap = 1e-6;
    long node_limit = 1000000;
    std::uint64_t seed = 1;

    auto add_model = [&](CLI::App* sub) {
        sub->add_option("--model", model, "proposed or legacy")
            ->check(CLI::IsMember({"proposed", "legacy"}));
    };

    CLI::App* solve = app.add_subcommand("solve", "Clear one model and write results JSON");
    solve->add_option("--case", case_path, "case JSON file")->required();
    add_model(solve);
    solve->add_option("--gap", gap, "relative MIP gap target");
    solve->add_option("--node-limit", node_limit, "branch and bound node limit");
    solve->add_option("--out", out_path, "results JSON path")->required();

    CLI::App* compare = app.add_subcommand(
        "compare", "Legacy vs proposed benefit protocol with matched SOC endpoints");
    compare->add_option("--case", case_path, "case JSON file")->required();
    compare->add_option("--scenarios", scenarios,
                        "scenario count (seeded net loads) or JSON file of net-load arrays");
    compare->add_option("--seed", seed, "base seed for generated scenarios");
    compare->add_option("--gap", gap, "relative MIP gap target");
    compare->add_option("--out", out_path, "results JSON path")->required();

    CLI::App* stats = app.add_subcommand("stats", "Model size and storage-row accounting");
    stats->add_option("--case", case_path, "case JSON file")->required();
    add_model(stats);

    CLI::App* lmp = app.add_subcommand("lmp", "Clear one model and write interval prices CSV");
    lmp->add_option("--case", case_path, "case JSON file")->required();
    add_model(lmp);
    lmp->add_option("--gap", gap, "relative MIP gap target");
    lmp->add_option("--out", out_path, "CSV path")->required();

    CLI::App* plot = app.add_subcommand("plot-data", "Convert results JSON to tidy plot CSV");
    plot->add_option("--results", results_path, "results JSON file")->required();
    plot->add_option("--out", out_path, "CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        check_backend_env();
        if (solve->parsed()) return cmd_solve(case_path, model, gap, node_limit, out_path);
        if (compare->parsed()) return cmd_compare(case_path, scenarios, seed, gap, out_path);
        if (stats->parsed()) return cmd_stats(case_path, model);
        if (lmp->parsed()) return cmd_lmp(case_path, model, gap, out_path);
        if (plot->parsed()) return cmd_plot_data(results_path, out_path);
    } catch (const psh::Error& e) {
        json err = {{"error", e.category()}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return exit_code_for(e.category());
    } catch (const std::exception& e) {
        json err = {{"error", "Internal"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
    return 2;
}
