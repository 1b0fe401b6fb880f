#include "psh/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace psh {

namespace {

double thermal_cost_of(const ValidatedCase& vc, const Schedule& s) {
    double cost = 0.0;
    for (int i = 0; i < (int)vc.thermal_units().size(); ++i)
        for (int t = 0; t < s.n_intervals; ++t)
            cost += vc.thermal_units()[i].cost_at(s.thermal_output[i][t]) * s.dt_hours;
    return cost;
}

double pct_improvement(double legacy, double proposed) {
    if (legacy == 0.0) return 0.0;
    return (legacy - proposed) / std::abs(legacy) * 100.0;
}

}  // namespace

DerivedCase derive_matched_bounds(const ValidatedCase& vc, const Schedule& legacy_schedule) {
    DerivedCase out;
    out.matched = vc.data();
    const double dt = legacy_schedule.dt_hours;
    for (int r = 0; r < (int)out.matched.reservoirs.size(); ++r) {
        Reservoir& res = out.matched.reservoirs[r];
        double gen_draw = 0.0;   // MWh removed from storage by cleared generation
        double pump_fill = 0.0;  // MWh added to storage by cleared pumping
        for (int g : vc.units_of_reservoir(r)) {
            const PshUnit& unit = vc.psh_units()[g];
            for (int t = 0; t < legacy_schedule.n_intervals; ++t) {
                gen_draw += dt * legacy_schedule.units[g].q_gen[t] / unit.eta_gen;
                pump_fill += dt * unit.eta_pump * legacy_schedule.units[g].q_pump[t];
            }
        }
        double e_final = legacy_schedule.soc[r].back();
        double e_min = res.e_initial - gen_draw;
        double e_max = res.e_initial + pump_fill;
        if (e_min < res.e_min - 1e-9)
            out.warnings.push_back("reservoir " + res.id + ": derived e_min " +
                                   std::to_string(e_min) + " below physical floor " +
                                   std::to_string(res.e_min));
        if (e_max > res.e_max + 1e-9)
            out.warnings.push_back("reservoir " + res.id + ": derived e_max " +
                                   std::to_string(e_max) + " above physical ceiling " +
                                   std::to_string(res.e_max));
        res.e_final = e_final;
        res.e_min = e_min;
        res.e_max = e_max;
    }
    return out;
}

BenefitReport compare_models(const ValidatedCase& vc, const MipOptions& options) {
    BenefitReport report;

    BuiltModel legacy = build_legacy(vc);
    MipSolution legacy_mip = solve_mip(legacy.model, options);
    if (legacy_mip.incumbent.empty())
        throw make_error("Infeasible", "legacy model has no feasible clearing");
    report.legacy_schedule = decode_schedule(vc, legacy.map, legacy_mip.incumbent);
    report.legacy_objective = thermal_cost_of(vc, report.legacy_schedule);
    report.legacy_prices =
        compute_lmp(legacy.model, legacy_mip, legacy.map, vc.horizon().dt_hours, options.lp);

    DerivedCase derived = derive_matched_bounds(vc, report.legacy_schedule);
    report.warnings = derived.warnings;
    for (const auto& res : derived.matched.reservoirs)
        report.matched_soc_endpoints.push_back({res.id, res.e_final, res.e_min, res.e_max});

    ValidatedCase matched = validate_case(derived.matched);
    FormulationOptions fopts;
    fopts.objective = ObjectiveMode::ThermalOnly;
    BuiltModel proposed = build_proposed(matched, fopts);
    for (const auto& w : proposed.warnings) report.warnings.push_back(w);
    MipSolution proposed_mip = solve_mip(proposed.model, options);
    if (proposed_mip.incumbent.empty())
        throw make_error("Infeasible", "proposed model infeasible under matched endpoints");
    report.proposed_schedule = decode_schedule(matched, proposed.map, proposed_mip.incumbent);
    report.proposed_objective = thermal_cost_of(matched, report.proposed_schedule);
    report.proposed_prices = compute_lmp(proposed.model, proposed_mip, proposed.map,
                                         vc.horizon().dt_hours, options.lp);

    report.objective_improvement_pct =
        pct_improvement(report.legacy_objective, report.proposed_objective);

    for (const auto& unit : vc.psh_units()) {
        ProfitComparison pc;
        pc.legacy = psh_profit(report.legacy_schedule, report.legacy_prices, unit.id);
        pc.proposed = psh_profit(report.proposed_schedule, report.proposed_prices, unit.id);
        if (pc.legacy.profit != 0.0)
            pc.profit_improvement_pct =
                (pc.proposed.profit - pc.legacy.profit) / std::abs(pc.legacy.profit) * 100.0;
        else
            pc.profit_improvement_pct = 0.0;
        report.unit_profits.push_back(std::move(pc));
    }
    return report;
}

namespace {

// Depth-first over mode sequences; bails out as soon as the count passes the
// cap so oversized requests fail before they eat memory.
void enumerate_sequences(const PshUnit& unit, int T, long cap,
                         std::vector<std::vector<Mode>>& out) {
    std::vector<Mode> seq(T);
    std::function<void(int, Mode)> rec = [&](int t, Mode prev) {
        if ((long)out.size() > cap)
            throw make_error("TooLarge", "mode sequence enumeration exceeds max_dimension");
        if (t == T) {
            out.push_back(seq);
            return;
        }
        for (Mode next : kAllModes) {
            if (next != prev && !unit.transition_feasible(prev, next)) continue;
            seq[t] = next;
            rec(t + 1, next);
        }
    };
    rec(0, unit.initial_mode);
}

}  // namespace

double brute_force_uc(const ValidatedCase& vc, long max_dimension,
                      const FormulationOptions& options, const SimplexOptions& lp_options) {
    const int T = vc.horizon().n_intervals;
    std::vector<std::vector<std::vector<Mode>>> sequences(vc.psh_units().size());
    long combos = 1;
    for (int g = 0; g < (int)vc.psh_units().size(); ++g) {
        enumerate_sequences(vc.psh_units()[g], T, max_dimension, sequences[g]);
        if (sequences[g].empty()) throw make_error("Infeasible", "no feasible mode sequence");
        if (combos > max_dimension / (long)sequences[g].size() + 1)
            throw make_error("TooLarge", "mode sequence enumeration exceeds max_dimension");
        combos *= (long)sequences[g].size();
    }
    if (combos > max_dimension)
        throw make_error("TooLarge", "mode sequence enumeration exceeds max_dimension");

    BuiltModel built = build_proposed(vc, options);
    const Milp& model = built.model;
    std::vector<double> lo(model.variables.size()), hi(model.variables.size());
    for (size_t j = 0; j < model.variables.size(); ++j) {
        lo[j] = model.variables[j].lower;
        hi[j] = model.variables[j].upper;
    }

    double best = kInf;
    std::vector<int> pick(vc.psh_units().size(), 0);
    for (long n = 0; n < combos; ++n) {
        long rem = n;
        for (int g = 0; g < (int)pick.size(); ++g) {
            pick[g] = (int)(rem % (long)sequences[g].size());
            rem /= (long)sequences[g].size();
        }
        std::vector<double> l = lo, u = hi;
        for (int g = 0; g < (int)pick.size(); ++g) {
            const PshUnit& unit = vc.psh_units()[g];
            const std::vector<Mode>& seq = sequences[g][pick[g]];
            for (int t = 0; t < T; ++t) {
                for (Mode mode : kAllModes) {
                    int idx = built.map.u.at({g, t, mode});
                    double val = seq[t] == mode ? 1.0 : 0.0;
                    l[idx] = u[idx] = val;
                }
                Mode prev = t == 0 ? unit.initial_mode : seq[t - 1];
                for (const auto& [from, to] : unit.feasible_transitions) {
                    int idx = built.map.v.at({g, t, from, to});
                    double val = (prev != seq[t] && from == prev && to == seq[t]) ? 1.0 : 0.0;
                    l[idx] = u[idx] = val;
                }
            }
        }
        LpSolution lp = solve_lp_relaxation(model, l, u, lp_options, nullptr, nullptr);
        if (lp.status == LpStatus::Optimal) best = std::min(best, lp.objective);
    }
    if (!std::isfinite(best))
        throw make_error("Infeasible", "no mode sequence admits a feasible dispatch");
    return best;
}

CompactnessReport compactness_report(const Milp& proposed, const Milp& baseline) {
    CompactnessReport rep;
    rep.proposed = model_stats(proposed);
    rep.baseline = model_stats(baseline);
    for (const auto& v : proposed.variables) {
        if (v.name.rfind("e[", 0) == 0) ++rep.added_soc_variables;
        if (v.name.rfind("ur[", 0) == 0) ++rep.added_plant_variables;
    }
    rep.added_constraints = rep.proposed.n_constraints - rep.baseline.n_constraints;
    rep.added_nonzeros = rep.proposed.n_nonzeros - rep.baseline.n_nonzeros;
    std::vector<std::string> seen;
    for (const auto& row : proposed.rows) {
        if (row.name.rfind("soc[", 0) != 0) continue;
        std::string res_id = row.name.substr(4, row.name.find(',') - 4);
        if (std::find(seen.begin(), seen.end(), res_id) == seen.end()) {
            seen.push_back(res_id);
            rep.soc_row_nonzeros.push_back((int)row.terms.size());
        }
    }
    return rep;
}

std::vector<double> random_net_load(int n_intervals, std::uint64_t seed, double base_mw,
                                    double swing_mw, double valley_depth_mw, int peak_count) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.03, 0.03);
    std::uniform_real_distribution<double> shift(-1.5, 1.5);
    std::vector<double> load(n_intervals);
    const double T = (double)n_intervals;
    double valley_center = 0.22 * T + shift(rng);
    std::vector<double> peak_centers;
    for (int k = 0; k < peak_count; ++k) {
        double frac = peak_count == 1 ? 0.6 : 0.45 + 0.4 * k / (peak_count - 1);
        peak_centers.push_back(frac * T + shift(rng));
    }
    auto bump = [](double t, double c, double w) {
        double z = (t - c) / w;
        return std::exp(-z * z);
    };
    for (int t = 0; t < n_intervals; ++t) {
        double v = base_mw;
        v -= valley_depth_mw * bump(t, valley_center, 0.09 * T);
        for (double c : peak_centers) v += swing_mw * bump(t, c, 0.10 * T);
        v *= 1.0 + jitter(rng);
        load[t] = std::max(10.0, v);
    }
    return load;
}

}  // namespace psh
