#include "psh/formulation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace psh {

namespace {

std::string key(const std::string& family, std::initializer_list<std::string> parts) {
    std::string out = family + "[";
    bool first = true;
    for (const auto& p : parts) {
        if (!first) out += ",";
        out += p;
        first = false;
    }
    return out + "]";
}

std::string itos(int v) { return std::to_string(v); }

struct EffectiveBounds {
    double pump_ub = 0.0;
    double gen_ub = 0.0;
};

// Box-constraint upper bounds per the static reservoir headroom: the pump may
// not exceed what would overfill an empty-to-full swing in one interval, the
// generator what an full-to-empty swing could supply.
EffectiveBounds effective_bounds(const PshUnit& g, const Reservoir& r, double dt) {
    double headroom = r.e_max - r.e_min;  // MWh
    EffectiveBounds eb;
    eb.pump_ub = std::min(headroom / (g.eta_pump * dt), g.q_pump_max);
    eb.gen_ub = std::min(headroom * g.eta_gen / dt, g.q_gen_max);
    return eb;
}

void add_thermal_and_balance(const ValidatedCase& vc, Milp& m, VariableMap& map) {
    const Horizon& h = vc.horizon();
    for (int t = 0; t < h.n_intervals; ++t) {
        for (int i = 0; i < (int)vc.thermal_units().size(); ++i) {
            const ThermalUnit& tu = vc.thermal_units()[i];
            for (int s = 0; s < (int)tu.cost_segments.size(); ++s) {
                const CostSegment& seg = tu.cost_segments[s];
                int idx = m.add_variable(key("q", {tu.id, itos(t), itos(s)}), 0.0, seg.width,
                                         Integrality::Continuous,
                                         seg.marginal_price * h.dt_hours);
                map.q_thermal[{i, t, s}] = idx;
            }
        }
    }
    // balance rows are appended later, once PSH power variables exist
}

void add_balance_rows(const ValidatedCase& vc, Milp& m, VariableMap& map) {
    const Horizon& h = vc.horizon();
    double q_min_total = 0.0;
    for (const auto& tu : vc.thermal_units()) q_min_total += tu.q_min;
    map.balance_rows.resize(h.n_intervals);
    for (int t = 0; t < h.n_intervals; ++t) {
        std::vector<std::pair<int, double>> terms;
        for (int i = 0; i < (int)vc.thermal_units().size(); ++i)
            for (int s = 0; s < (int)vc.thermal_units()[i].cost_segments.size(); ++s)
                terms.emplace_back(map.q_thermal.at({i, t, s}), 1.0);
        for (int g = 0; g < (int)vc.psh_units().size(); ++g) {
            auto it = map.q_gen.find({g, t});
            if (it != map.q_gen.end()) terms.emplace_back(it->second, 1.0);
            auto ip = map.q_pump.find({g, t});
            if (ip != map.q_pump.end()) terms.emplace_back(ip->second, -1.0);
        }
        map.balance_rows[t] = m.add_row(key("balance", {itos(t)}), std::move(terms),
                                        RowSense::Equal, h.net_load[t] - q_min_total);
    }
}

}  // namespace

BuiltModel build_proposed(const ValidatedCase& vc, const FormulationOptions& options) {
    BuiltModel out;
    Milp& m = out.model;
    VariableMap& map = out.map;
    const Horizon& h = vc.horizon();
    const int T = h.n_intervals;
    const double dt = h.dt_hours;

    if (options.objective == ObjectiveMode::WithPshBids) {
        for (const auto& g : vc.psh_units())
            if (!vc.legacy_bid_for(g.id))
                throw make_error("MissingLegacyBid",
                                 "objective WithPshBids needs a bid for unit " + g.id);
    }

    for (int g = 0; g < (int)vc.psh_units().size(); ++g) {
        const PshUnit& unit = vc.psh_units()[g];
        const Reservoir& res = vc.reservoirs()[vc.reservoir_index(unit.reservoir_id)];
        EffectiveBounds eb = effective_bounds(unit, res, dt);
        if (unit.q_pump_min > eb.pump_ub + 1e-9) {
            std::string w = "unit " + unit.id + ": q_pump_min exceeds effective pump bound (" +
                            std::to_string(eb.pump_ub) + " MW); pump mode unusable";
            if (options.strict_bounds) throw make_error("InfeasibleBoundsDetected", w);
            out.warnings.push_back(w);
        }
        if (unit.q_gen_min > eb.gen_ub + 1e-9) {
            std::string w = "unit " + unit.id + ": q_gen_min exceeds effective gen bound (" +
                            std::to_string(eb.gen_ub) + " MW); gen mode unusable";
            if (options.strict_bounds) throw make_error("InfeasibleBoundsDetected", w);
            out.warnings.push_back(w);
        }

        const LegacyBid* bid =
            options.objective == ObjectiveMode::WithPshBids ? vc.legacy_bid_for(unit.id) : nullptr;

        for (int t = 0; t < T; ++t) {
            for (Mode mode : kAllModes)
                map.u[{g, t, mode}] = m.add_variable(
                    key("u", {unit.id, itos(t), to_string(mode)}), 0.0, 1.0, Integrality::Binary,
                    0.0);
            for (const auto& [from, to] : unit.feasible_transitions)
                map.v[{g, t, from, to}] = m.add_variable(
                    key("v", {unit.id, itos(t), to_string(from), to_string(to)}), 0.0, 1.0,
                    Integrality::Binary, 0.0);
            map.q_gen[{g, t}] = m.add_variable(
                key("qgen", {unit.id, itos(t)}), 0.0, std::max(eb.gen_ub, 0.0),
                Integrality::Continuous, bid ? bid->gen_offer_price[t] * dt : 0.0);
            map.q_pump[{g, t}] = m.add_variable(
                key("qpump", {unit.id, itos(t)}), 0.0, std::max(eb.pump_ub, 0.0),
                Integrality::Continuous, bid ? -bid->pump_bid_price[t] * dt : 0.0);
        }

        for (int t = 0; t < T; ++t) {
            // configuration exclusivity
            std::vector<std::pair<int, double>> excl;
            for (Mode mode : kAllModes) excl.emplace_back(map.u.at({g, t, mode}), 1.0);
            m.add_row(key("excl", {unit.id, itos(t)}), std::move(excl), RowSense::Equal, 1.0);

            // transition flow logic; u at t-1 is the given initial mode at t=0
            for (Mode mode : kAllModes) {
                std::vector<std::pair<int, double>> flow;
                flow.emplace_back(map.u.at({g, t, mode}), 1.0);
                double rhs = 0.0;
                if (t == 0) rhs = unit.initial_mode == mode ? 1.0 : 0.0;
                else flow.emplace_back(map.u.at({g, t - 1, mode}), -1.0);
                for (const auto& [from, to] : unit.feasible_transitions) {
                    if (to == mode) flow.emplace_back(map.v.at({g, t, from, to}), -1.0);
                    if (from == mode) flow.emplace_back(map.v.at({g, t, from, to}), 1.0);
                }
                m.add_row(key("flow", {unit.id, itos(t), to_string(mode)}), std::move(flow),
                          RowSense::Equal, rhs);
            }

            // at most one transition per interval
            if (!unit.feasible_transitions.empty()) {
                std::vector<std::pair<int, double>> tr;
                for (const auto& [from, to] : unit.feasible_transitions)
                    tr.emplace_back(map.v.at({g, t, from, to}), 1.0);
                m.add_row(key("trans1", {unit.id, itos(t)}), std::move(tr), RowSense::LessEqual,
                          1.0);
            }

            // box constraints tied to commitment; a zero effective bound is
            // already enforced by the q variable's own [0,0] bounds
            if (eb.pump_ub > 0.0)
                m.add_row(key("pumpub", {unit.id, itos(t)}),
                          {{map.q_pump.at({g, t}), 1.0},
                           {map.u.at({g, t, Mode::Pump}), -eb.pump_ub}},
                          RowSense::LessEqual, 0.0);
            if (unit.q_pump_min > 0.0)
                m.add_row(key("pumplb", {unit.id, itos(t)}),
                          {{map.q_pump.at({g, t}), 1.0},
                           {map.u.at({g, t, Mode::Pump}), -unit.q_pump_min}},
                          RowSense::GreaterEqual, 0.0);
            if (eb.gen_ub > 0.0)
                m.add_row(key("genub", {unit.id, itos(t)}),
                          {{map.q_gen.at({g, t}), 1.0},
                           {map.u.at({g, t, Mode::Gen}), -eb.gen_ub}},
                          RowSense::LessEqual, 0.0);
            if (unit.q_gen_min > 0.0)
                m.add_row(key("genlb", {unit.id, itos(t)}),
                          {{map.q_gen.at({g, t}), 1.0},
                           {map.u.at({g, t, Mode::Gen}), -unit.q_gen_min}},
                          RowSense::GreaterEqual, 0.0);
        }

        // minimum up time per mode, aggregated over entering transitions
        for (const auto& [mode, hours] : unit.min_up_hours) {
            int periods = (int)std::ceil(hours / dt - 1e-9);
            if (periods <= 1) continue;
            for (int t = 0; t < T; ++t) {
                std::vector<std::pair<int, double>> terms;
                for (int tau = std::max(0, t - periods + 1); tau <= t; ++tau)
                    for (const auto& [from, to] : unit.feasible_transitions)
                        if (to == mode) terms.emplace_back(map.v.at({g, tau, from, to}), 1.0);
                if (terms.empty()) continue;
                terms.emplace_back(map.u.at({g, t, mode}), -1.0);
                m.add_row(key("minup", {unit.id, itos(t), to_string(mode)}), std::move(terms),
                          RowSense::LessEqual, 0.0);
            }
        }
    }

    add_thermal_and_balance(vc, m, map);
    add_balance_rows(vc, m, map);

    if (options.storage_constraints) {
        for (int r = 0; r < (int)vc.reservoirs().size(); ++r) {
            const Reservoir& res = vc.reservoirs()[r];
            for (int t = 0; t <= T; ++t) {
                double lo = res.e_min, hi = res.e_max;
                if (t == 0) lo = hi = res.e_initial;
                if (t == T) lo = hi = res.e_final;
                map.soc[{r, t}] = m.add_variable(key("e", {res.id, itos(t)}), lo, hi,
                                                 Integrality::Continuous, 0.0);
            }
            for (int t = 0; t < T; ++t) {
                std::vector<std::pair<int, double>> terms;
                terms.emplace_back(map.soc.at({r, t + 1}), 1.0);
                terms.emplace_back(map.soc.at({r, t}), -1.0);
                for (int g : vc.units_of_reservoir(r)) {
                    const PshUnit& unit = vc.psh_units()[g];
                    terms.emplace_back(map.q_pump.at({g, t}), -unit.eta_pump * dt);
                    terms.emplace_back(map.q_gen.at({g, t}), dt / unit.eta_gen);
                }
                m.add_row(key("soc", {res.id, itos(t)}), std::move(terms), RowSense::Equal, 0.0);
            }

            if (res.pump_start_limit) {
                for (int t = 0; t < T; ++t) {
                    std::vector<std::pair<int, double>> terms;
                    for (int g : vc.units_of_reservoir(r))
                        for (const auto& [from, to] : vc.psh_units()[g].feasible_transitions)
                            if (to == Mode::Pump)
                                terms.emplace_back(map.v.at({g, t, from, to}), 1.0);
                    if (terms.empty()) continue;
                    m.add_row(key("pumpstart", {res.id, itos(t)}), std::move(terms),
                              RowSense::LessEqual, (double)*res.pump_start_limit);
                }
            }

            if (res.plant_exclusive) {
                for (int t = 0; t < T; ++t) {
                    for (Mode mode : {Mode::Gen, Mode::Pump})
                        map.ur[{r, t, mode}] =
                            m.add_variable(key("ur", {res.id, itos(t), to_string(mode)}), 0.0,
                                           1.0, Integrality::Continuous, 0.0);
                    m.add_row(key("plantex", {res.id, itos(t)}),
                              {{map.ur.at({r, t, Mode::Pump}), 1.0},
                               {map.ur.at({r, t, Mode::Gen}), 1.0}},
                              RowSense::LessEqual, 1.0);
                    for (int g : vc.units_of_reservoir(r))
                        for (Mode mode : {Mode::Gen, Mode::Pump})
                            m.add_row(
                                key("plantlink", {vc.psh_units()[g].id, itos(t), to_string(mode)}),
                                {{map.u.at({g, t, mode}), 1.0}, {map.ur.at({r, t, mode}), -1.0}},
                                RowSense::LessEqual, 0.0);
                }
            }
        }
    }

    return out;
}

BuiltModel build_legacy(const ValidatedCase& vc) {
    BuiltModel out;
    Milp& m = out.model;
    VariableMap& map = out.map;
    map.legacy = true;
    const Horizon& h = vc.horizon();
    const int T = h.n_intervals;
    const double dt = h.dt_hours;

    for (int g = 0; g < (int)vc.psh_units().size(); ++g) {
        const PshUnit& unit = vc.psh_units()[g];
        const LegacyBid* bid = vc.legacy_bid_for(unit.id);
        if (!bid)
            throw make_error("MissingLegacyBid", "no legacy bid for PSH unit " + unit.id);

        for (int t : bid->pump_window) {
            int u = m.add_variable(key("u", {unit.id, itos(t), "pump"}), 0.0, 1.0,
                                   Integrality::Binary, 0.0);
            map.u[{g, t, Mode::Pump}] = u;
            int q = m.add_variable(key("qpump", {unit.id, itos(t)}), 0.0, unit.q_pump_max,
                                   Integrality::Continuous, -bid->pump_bid_price[t] * dt);
            map.q_pump[{g, t}] = q;
            m.add_row(key("pumpub", {unit.id, itos(t)}), {{q, 1.0}, {u, -unit.q_pump_max}},
                      RowSense::LessEqual, 0.0);
            if (unit.q_pump_min > 0.0)
                m.add_row(key("pumplb", {unit.id, itos(t)}), {{q, 1.0}, {u, -unit.q_pump_min}},
                          RowSense::GreaterEqual, 0.0);
        }
        std::vector<std::pair<int, double>> daily;
        for (int t : bid->gen_window) {
            int u = m.add_variable(key("u", {unit.id, itos(t), "gen"}), 0.0, 1.0,
                                   Integrality::Binary, 0.0);
            map.u[{g, t, Mode::Gen}] = u;
            int q = m.add_variable(key("qgen", {unit.id, itos(t)}), 0.0, unit.q_gen_max,
                                   Integrality::Continuous, bid->gen_offer_price[t] * dt);
            map.q_gen[{g, t}] = q;
            m.add_row(key("genub", {unit.id, itos(t)}), {{q, 1.0}, {u, -unit.q_gen_max}},
                      RowSense::LessEqual, 0.0);
            if (unit.q_gen_min > 0.0)
                m.add_row(key("genlb", {unit.id, itos(t)}), {{q, 1.0}, {u, -unit.q_gen_min}},
                          RowSense::GreaterEqual, 0.0);
            daily.emplace_back(q, dt);
        }
        if (!daily.empty())
            m.add_row(key("dailymax", {unit.id}), std::move(daily), RowSense::LessEqual,
                      bid->daily_max_gen);
    }

    add_thermal_and_balance(vc, m, map);
    add_balance_rows(vc, m, map);
    return out;
}

namespace {

double binary_value(const std::vector<double>& x, int idx, const std::string& what) {
    double v = x[idx];
    if (std::abs(v - std::round(v)) > 1e-6)
        throw make_error("NonIntegralCommitment",
                         what + " has non-integral value " + std::to_string(v));
    return std::round(v);
}

}  // namespace

Schedule decode_schedule(const ValidatedCase& vc, const VariableMap& map,
                         const std::vector<double>& solution) {
    Schedule s;
    const Horizon& h = vc.horizon();
    s.n_intervals = h.n_intervals;
    s.dt_hours = h.dt_hours;

    for (int g = 0; g < (int)vc.psh_units().size(); ++g) {
        const PshUnit& unit = vc.psh_units()[g];
        UnitSchedule us;
        us.id = unit.id;
        us.mode.assign(h.n_intervals, Mode::AllOff);
        us.q_gen.assign(h.n_intervals, 0.0);
        us.q_pump.assign(h.n_intervals, 0.0);
        for (int t = 0; t < h.n_intervals; ++t) {
            for (Mode mode : kAllModes) {
                auto it = map.u.find({g, t, mode});
                if (it == map.u.end()) continue;
                if (binary_value(solution, it->second, "u[" + unit.id + "]") > 0.5)
                    us.mode[t] = mode;
            }
            auto ig = map.q_gen.find({g, t});
            if (ig != map.q_gen.end()) us.q_gen[t] = solution[ig->second];
            auto ip = map.q_pump.find({g, t});
            if (ip != map.q_pump.end()) us.q_pump[t] = solution[ip->second];
        }
        s.units.push_back(std::move(us));
    }

    for (int r = 0; r < (int)vc.reservoirs().size(); ++r) {
        std::vector<double> soc(h.n_intervals + 1, 0.0);
        if (!map.legacy && map.soc.count({r, 0})) {
            for (int t = 0; t <= h.n_intervals; ++t) soc[t] = solution[map.soc.at({r, t})];
        } else {
            soc[0] = vc.reservoirs()[r].e_initial;
            for (int t = 0; t < h.n_intervals; ++t) {
                double delta = 0.0;
                for (int g : vc.units_of_reservoir(r)) {
                    const PshUnit& unit = vc.psh_units()[g];
                    delta += unit.eta_pump * s.units[g].q_pump[t];
                    delta -= s.units[g].q_gen[t] / unit.eta_gen;
                }
                soc[t + 1] = soc[t] + h.dt_hours * delta;
            }
        }
        s.soc.push_back(std::move(soc));
    }

    for (int i = 0; i < (int)vc.thermal_units().size(); ++i) {
        const ThermalUnit& tu = vc.thermal_units()[i];
        std::vector<double> outp(h.n_intervals, 0.0);
        for (int t = 0; t < h.n_intervals; ++t) {
            double q = tu.q_min;
            for (int seg = 0; seg < (int)tu.cost_segments.size(); ++seg)
                q += solution[map.q_thermal.at({i, t, seg})];
            outp[t] = q;
        }
        s.thermal_output.push_back(std::move(outp));
    }
    return s;
}

std::vector<std::string> check_schedule_invariants(const ValidatedCase& vc,
                                                   const Schedule& schedule, bool proposed_model,
                                                   double tol) {
    std::vector<std::string> bad;
    const Horizon& h = vc.horizon();
    const double dt = h.dt_hours;
    auto complain = [&](const std::string& msg) { bad.push_back(msg); };

    for (int g = 0; g < (int)vc.psh_units().size(); ++g) {
        const PshUnit& unit = vc.psh_units()[g];
        const UnitSchedule& us = schedule.units[g];
        Mode prev = unit.initial_mode;
        for (int t = 0; t < h.n_intervals; ++t) {
            Mode cur = us.mode[t];
            if (proposed_model && cur != prev && !unit.transition_feasible(prev, cur))
                complain("unit " + unit.id + " t=" + std::to_string(t) +
                         ": infeasible transition");
            prev = cur;
            if (cur == Mode::Gen) {
                if (us.q_gen[t] < unit.q_gen_min - tol || us.q_gen[t] > unit.q_gen_max + tol)
                    complain("unit " + unit.id + " t=" + std::to_string(t) +
                             ": gen output outside box");
            } else if (us.q_gen[t] > tol) {
                complain("unit " + unit.id + " t=" + std::to_string(t) +
                         ": generating while not in gen mode");
            }
            if (cur == Mode::Pump) {
                if (us.q_pump[t] < unit.q_pump_min - tol || us.q_pump[t] > unit.q_pump_max + tol)
                    complain("unit " + unit.id + " t=" + std::to_string(t) +
                             ": pump load outside box");
            } else if (us.q_pump[t] > tol) {
                complain("unit " + unit.id + " t=" + std::to_string(t) +
                         ": pumping while not in pump mode");
            }
        }
    }

    for (int r = 0; r < (int)vc.reservoirs().size(); ++r) {
        const Reservoir& res = vc.reservoirs()[r];
        const std::vector<double>& soc = schedule.soc[r];
        for (int t = 0; t < h.n_intervals; ++t) {
            double delta = 0.0;
            for (int g : vc.units_of_reservoir(r)) {
                const PshUnit& unit = vc.psh_units()[g];
                delta += unit.eta_pump * schedule.units[g].q_pump[t];
                delta -= schedule.units[g].q_gen[t] / unit.eta_gen;
            }
            if (std::abs(soc[t + 1] - soc[t] - dt * delta) > tol)
                complain("reservoir " + res.id + " t=" + std::to_string(t) +
                         ": SOC recursion residual");
        }
        if (proposed_model) {
            for (int t = 0; t <= h.n_intervals; ++t)
                if (soc[t] < res.e_min - tol || soc[t] > res.e_max + tol)
                    complain("reservoir " + res.id + " t=" + std::to_string(t) +
                             ": SOC outside bounds");
            if (std::abs(soc.front() - res.e_initial) > tol)
                complain("reservoir " + res.id + ": initial SOC mismatch");
            if (std::abs(soc.back() - res.e_final) > tol)
                complain("reservoir " + res.id + ": final SOC mismatch");
            // telescoped identity
            double net = 0.0;
            for (int t = 0; t < h.n_intervals; ++t)
                for (int g : vc.units_of_reservoir(r)) {
                    const PshUnit& unit = vc.psh_units()[g];
                    net += dt * (unit.eta_pump * schedule.units[g].q_pump[t] -
                                 schedule.units[g].q_gen[t] / unit.eta_gen);
                }
            if (std::abs((res.e_final - res.e_initial) - net) > tol * (h.n_intervals + 1))
                complain("reservoir " + res.id + ": telescoped SOC identity violated");

            if (res.plant_exclusive) {
                for (int t = 0; t < h.n_intervals; ++t) {
                    bool pumping = false, generating = false;
                    for (int g : vc.units_of_reservoir(r)) {
                        if (schedule.units[g].mode[t] == Mode::Pump) pumping = true;
                        if (schedule.units[g].mode[t] == Mode::Gen) generating = true;
                    }
                    if (pumping && generating)
                        complain("reservoir " + res.id + " t=" + std::to_string(t) +
                                 ": plant exclusivity violated");
                }
            }
            if (res.pump_start_limit) {
                for (int t = 0; t < h.n_intervals; ++t) {
                    int starts = 0;
                    for (int g : vc.units_of_reservoir(r)) {
                        Mode prev = t == 0 ? vc.psh_units()[g].initial_mode
                                           : schedule.units[g].mode[t - 1];
                        if (schedule.units[g].mode[t] == Mode::Pump && prev != Mode::Pump)
                            ++starts;
                    }
                    if (starts > *res.pump_start_limit)
                        complain("reservoir " + res.id + " t=" + std::to_string(t) +
                                 ": pump start limit exceeded");
                }
            }
        }
    }

    for (int t = 0; t < h.n_intervals; ++t) {
        double supply = 0.0;
        for (const auto& th : schedule.thermal_output) supply += th[t];
        for (const auto& us : schedule.units) supply += us.q_gen[t] - us.q_pump[t];
        if (std::abs(supply - h.net_load[t]) > tol)
            complain("t=" + std::to_string(t) + ": energy balance residual " +
                     std::to_string(supply - h.net_load[t]));
    }

    return bad;
}

}  // namespace psh
