#include "psh/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace psh {

using nlohmann::json;

namespace {

constexpr int kCaseVersion = 1;

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
    throw make_error("SchemaViolation", path + ": " + what);
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& path) {
    for (const auto& [k, v] : obj.items())
        if (!allowed.count(k)) schema_error(path + "." + k, "unknown key");
}

double get_number(const json& obj, const std::string& field, const std::string& path) {
    if (!obj.contains(field)) schema_error(path + "." + field, "missing");
    if (!obj.at(field).is_number()) schema_error(path + "." + field, "expected a number");
    return obj.at(field).get<double>();
}

double get_number_or(const json& obj, const std::string& field, const std::string& path,
                     double fallback) {
    if (!obj.contains(field)) return fallback;
    if (!obj.at(field).is_number()) schema_error(path + "." + field, "expected a number");
    return obj.at(field).get<double>();
}

std::string get_string(const json& obj, const std::string& field, const std::string& path) {
    if (!obj.contains(field)) schema_error(path + "." + field, "missing");
    if (!obj.at(field).is_string()) schema_error(path + "." + field, "expected a string");
    return obj.at(field).get<std::string>();
}

Mode mode_from_string(const std::string& s, const std::string& path) {
    if (s == "alloff") return Mode::AllOff;
    if (s == "gen") return Mode::Gen;
    if (s == "pump") return Mode::Pump;
    schema_error(path, "unknown mode '" + s + "'");
}

// A per-interval price may be written as a scalar (constant) or a length-T array.
std::vector<double> get_price_series(const json& obj, const std::string& field,
                                     const std::string& path, int T) {
    if (!obj.contains(field)) schema_error(path + "." + field, "missing");
    const json& v = obj.at(field);
    if (v.is_number()) return std::vector<double>(T, v.get<double>());
    if (!v.is_array()) schema_error(path + "." + field, "expected number or array");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) schema_error(path + "." + field, "expected numeric entries");
        out.push_back(x.get<double>());
    }
    return out;
}

}  // namespace

Case case_from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw make_error("ParseError", e.what());
    }
    if (!doc.is_object()) schema_error("$", "top level must be an object");
    reject_unknown_keys(
        doc, {"version", "horizon", "psh_units", "reservoirs", "thermal_units", "legacy_bids"},
        "$");
    if (!doc.contains("version") || !doc.at("version").is_number_integer())
        schema_error("$.version", "missing or not an integer");
    if (doc.at("version").get<int>() != kCaseVersion)
        schema_error("$.version", "unsupported version " + doc.at("version").dump());

    Case c;
    if (!doc.contains("horizon")) schema_error("$.horizon", "missing");
    const json& jh = doc.at("horizon");
    reject_unknown_keys(jh, {"n_intervals", "dt_hours", "net_load"}, "$.horizon");
    c.horizon.n_intervals = (int)get_number(jh, "n_intervals", "$.horizon");
    c.horizon.dt_hours = get_number_or(jh, "dt_hours", "$.horizon", 1.0);
    if (!jh.contains("net_load") || !jh.at("net_load").is_array())
        schema_error("$.horizon.net_load", "expected an array");
    for (const auto& x : jh.at("net_load")) {
        if (!x.is_number()) schema_error("$.horizon.net_load", "expected numeric entries");
        c.horizon.net_load.push_back(x.get<double>());
    }

    for (const json& ju : doc.value("psh_units", json::array())) {
        std::string path = "$.psh_units[" + std::to_string(c.psh_units.size()) + "]";
        reject_unknown_keys(ju,
                            {"id", "reservoir_id", "q_gen_min", "q_gen_max", "q_pump_min",
                             "q_pump_max", "eta_gen", "eta_pump", "feasible_transitions",
                             "min_up_hours", "initial_mode"},
                            path);
        PshUnit u;
        u.id = get_string(ju, "id", path);
        u.reservoir_id = get_string(ju, "reservoir_id", path);
        u.q_gen_min = get_number(ju, "q_gen_min", path);
        u.q_gen_max = get_number(ju, "q_gen_max", path);
        u.q_pump_min = get_number(ju, "q_pump_min", path);
        u.q_pump_max = get_number(ju, "q_pump_max", path);
        u.eta_gen = get_number(ju, "eta_gen", path);
        u.eta_pump = get_number(ju, "eta_pump", path);
        if (ju.contains("feasible_transitions")) {
            u.feasible_transitions.clear();
            for (const auto& pair : ju.at("feasible_transitions")) {
                if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() ||
                    !pair[1].is_string())
                    schema_error(path + ".feasible_transitions", "expected [from, to] pairs");
                u.feasible_transitions.emplace_back(
                    mode_from_string(pair[0].get<std::string>(), path),
                    mode_from_string(pair[1].get<std::string>(), path));
            }
        }
        if (ju.contains("min_up_hours")) {
            for (const auto& [k, v] : ju.at("min_up_hours").items()) {
                if (!v.is_number_integer())
                    schema_error(path + ".min_up_hours." + k, "expected an integer");
                u.min_up_hours[mode_from_string(k, path)] = v.get<int>();
            }
        }
        if (ju.contains("initial_mode"))
            u.initial_mode = mode_from_string(get_string(ju, "initial_mode", path), path);
        c.psh_units.push_back(std::move(u));
    }

    for (const json& jr : doc.value("reservoirs", json::array())) {
        std::string path = "$.reservoirs[" + std::to_string(c.reservoirs.size()) + "]";
        reject_unknown_keys(jr,
                            {"id", "e_min", "e_max", "e_initial", "e_final", "pump_start_limit",
                             "plant_exclusive"},
                            path);
        Reservoir r;
        r.id = get_string(jr, "id", path);
        r.e_min = get_number(jr, "e_min", path);
        r.e_max = get_number(jr, "e_max", path);
        r.e_initial = get_number(jr, "e_initial", path);
        r.e_final = get_number(jr, "e_final", path);
        if (jr.contains("pump_start_limit")) {
            if (!jr.at("pump_start_limit").is_number_integer())
                schema_error(path + ".pump_start_limit", "expected an integer");
            r.pump_start_limit = jr.at("pump_start_limit").get<int>();
        }
        if (jr.contains("plant_exclusive")) {
            if (!jr.at("plant_exclusive").is_boolean())
                schema_error(path + ".plant_exclusive", "expected a boolean");
            r.plant_exclusive = jr.at("plant_exclusive").get<bool>();
        }
        c.reservoirs.push_back(std::move(r));
    }

    for (const json& jt : doc.value("thermal_units", json::array())) {
        std::string path = "$.thermal_units[" + std::to_string(c.thermal_units.size()) + "]";
        reject_unknown_keys(jt, {"id", "q_min", "q_max", "cost_segments"}, path);
        ThermalUnit t;
        t.id = get_string(jt, "id", path);
        t.q_min = get_number(jt, "q_min", path);
        t.q_max = get_number(jt, "q_max", path);
        if (!jt.contains("cost_segments") || !jt.at("cost_segments").is_array())
            schema_error(path + ".cost_segments", "expected an array");
        for (const auto& js : jt.at("cost_segments")) {
            reject_unknown_keys(js, {"marginal_price", "width"}, path + ".cost_segments[]");
            t.cost_segments.push_back({get_number(js, "marginal_price", path),
                                       get_number(js, "width", path)});
        }
        c.thermal_units.push_back(std::move(t));
    }

    if (doc.contains("legacy_bids")) {
        c.legacy_bids.emplace();
        for (const json& jb : doc.at("legacy_bids")) {
            std::string path = "$.legacy_bids[" + std::to_string(c.legacy_bids->size()) + "]";
            reject_unknown_keys(jb,
                                {"psh_id", "gen_offer_price", "pump_bid_price", "pump_window",
                                 "gen_window", "daily_max_gen"},
                                path);
            LegacyBid b;
            b.psh_id = get_string(jb, "psh_id", path);
            b.gen_offer_price =
                get_price_series(jb, "gen_offer_price", path, c.horizon.n_intervals);
            b.pump_bid_price =
                get_price_series(jb, "pump_bid_price", path, c.horizon.n_intervals);
            for (const auto& field : {"pump_window", "gen_window"}) {
                if (!jb.contains(field) || !jb.at(field).is_array())
                    schema_error(path + "." + field, "expected an array of interval indices");
                for (const auto& x : jb.at(field)) {
                    if (!x.is_number_integer())
                        schema_error(path + "." + field, "expected integer entries");
                    (std::string(field) == "pump_window" ? b.pump_window : b.gen_window)
                        .insert(x.get<int>());
                }
            }
            b.daily_max_gen = get_number(jb, "daily_max_gen", path);
            c.legacy_bids->push_back(std::move(b));
        }
    }
    return c;
}

Case load_case(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw make_error("IoError", "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return case_from_json_text(buf.str());
}

namespace {

json mode_json(Mode m) { return json(to_string(m)); }

}  // namespace

std::string case_to_json_text(const Case& c) {
    json doc;
    doc["version"] = kCaseVersion;
    doc["horizon"] = {{"n_intervals", c.horizon.n_intervals},
                      {"dt_hours", c.horizon.dt_hours},
                      {"net_load", c.horizon.net_load}};
    doc["psh_units"] = json::array();
    for (const auto& u : c.psh_units) {
        json ju = {{"id", u.id},
                   {"reservoir_id", u.reservoir_id},
                   {"q_gen_min", u.q_gen_min},
                   {"q_gen_max", u.q_gen_max},
                   {"q_pump_min", u.q_pump_min},
                   {"q_pump_max", u.q_pump_max},
                   {"eta_gen", u.eta_gen},
                   {"eta_pump", u.eta_pump},
                   {"initial_mode", mode_json(u.initial_mode)}};
        json trans = json::array();
        for (const auto& [a, b] : u.feasible_transitions)
            trans.push_back(json::array({mode_json(a), mode_json(b)}));
        ju["feasible_transitions"] = trans;
        if (!u.min_up_hours.empty()) {
            json mu = json::object();
            for (const auto& [m, h] : u.min_up_hours) mu[to_string(m)] = h;
            ju["min_up_hours"] = mu;
        }
        doc["psh_units"].push_back(std::move(ju));
    }
    doc["reservoirs"] = json::array();
    for (const auto& r : c.reservoirs) {
        json jr = {{"id", r.id},       {"e_min", r.e_min},
                   {"e_max", r.e_max}, {"e_initial", r.e_initial},
                   {"e_final", r.e_final}};
        if (r.pump_start_limit) jr["pump_start_limit"] = *r.pump_start_limit;
        if (r.plant_exclusive) jr["plant_exclusive"] = true;
        doc["reservoirs"].push_back(std::move(jr));
    }
    doc["thermal_units"] = json::array();
    for (const auto& t : c.thermal_units) {
        json segs = json::array();
        for (const auto& s : t.cost_segments)
            segs.push_back({{"marginal_price", s.marginal_price}, {"width", s.width}});
        doc["thermal_units"].push_back(
            {{"id", t.id}, {"q_min", t.q_min}, {"q_max", t.q_max}, {"cost_segments", segs}});
    }
    if (c.legacy_bids) {
        doc["legacy_bids"] = json::array();
        for (const auto& b : *c.legacy_bids) {
            doc["legacy_bids"].push_back(
                {{"psh_id", b.psh_id},
                 {"gen_offer_price", b.gen_offer_price},
                 {"pump_bid_price", b.pump_bid_price},
                 {"pump_window", std::vector<int>(b.pump_window.begin(), b.pump_window.end())},
                 {"gen_window", std::vector<int>(b.gen_window.begin(), b.gen_window.end())},
                 {"daily_max_gen", b.daily_max_gen}});
        }
    }
    return doc.dump(2);
}

void save_case(const Case& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw make_error("IoError", "cannot write " + path);
    out << case_to_json_text(c) << "\n";
}

namespace {

json schedule_to_json(const Schedule& s) {
    json out;
    out["n_intervals"] = s.n_intervals;
    out["dt_hours"] = s.dt_hours;
    out["units"] = json::array();
    for (const auto& us : s.units) {
        json modes = json::array();
        for (Mode m : us.mode) modes.push_back(to_string(m));
        out["units"].push_back({{"id", us.id},
                                {"mode", modes},
                                {"q_gen_mw", us.q_gen},
                                {"q_pump_mw", us.q_pump}});
    }
    out["soc_mwh"] = s.soc;
    out["thermal_output_mw"] = s.thermal_output;
    return out;
}

Schedule schedule_from_json(const json& j) {
    Schedule s;
    s.n_intervals = j.at("n_intervals").get<int>();
    s.dt_hours = j.at("dt_hours").get<double>();
    for (const auto& ju : j.at("units")) {
        UnitSchedule us;
        us.id = ju.at("id").get<std::string>();
        for (const auto& m : ju.at("mode"))
            us.mode.push_back(mode_from_string(m.get<std::string>(), "$.schedule.mode"));
        us.q_gen = ju.at("q_gen_mw").get<std::vector<double>>();
        us.q_pump = ju.at("q_pump_mw").get<std::vector<double>>();
        s.units.push_back(std::move(us));
    }
    s.soc = j.at("soc_mwh").get<std::vector<std::vector<double>>>();
    s.thermal_output = j.at("thermal_output_mw").get<std::vector<std::vector<double>>>();
    return s;
}

json run_to_json(const RunResult& r) {
    return {{"model", r.model_tag},
            {"net_load_mw", r.net_load},
            {"schedule", schedule_to_json(r.schedule)},
            {"lmp", r.prices.lmp},
            {"lmp_degenerate", r.prices.degenerate},
            {"status", r.status},
            {"objective", r.objective},
            {"thermal_cost", r.thermal_cost},
            {"best_bound", r.best_bound},
            {"gap", r.gap},
            {"nodes", r.nodes}};
}

RunResult run_from_json(const json& j) {
    RunResult r;
    r.model_tag = j.at("model").get<std::string>();
    r.net_load = j.at("net_load_mw").get<std::vector<double>>();
    r.schedule = schedule_from_json(j.at("schedule"));
    r.prices.lmp = j.at("lmp").get<std::vector<double>>();
    r.prices.degenerate = j.at("lmp_degenerate").get<bool>();
    r.status = j.at("status").get<std::string>();
    r.objective = j.at("objective").get<double>();
    r.thermal_cost = j.at("thermal_cost").get<double>();
    r.best_bound = j.at("best_bound").get<double>();
    r.gap = j.at("gap").get<double>();
    r.nodes = j.at("nodes").get<long>();
    return r;
}

}  // namespace

void save_results(const ResultsFile& results, const std::string& path) {
    json doc;
    doc["version"] = 1;
    doc["runs"] = json::array();
    for (const auto& r : results.runs) doc["runs"].push_back(run_to_json(r));
    if (results.benefit) {
        const BenefitSummary& b = *results.benefit;
        json profits = json::array();
        for (const auto& pc : b.unit_profits) {
            profits.push_back({{"psh_id", pc.legacy.psh_id},
                               {"legacy",
                                {{"energy_revenue", pc.legacy.energy_revenue},
                                 {"pumping_cost", pc.legacy.pumping_cost},
                                 {"profit", pc.legacy.profit}}},
                               {"proposed",
                                {{"energy_revenue", pc.proposed.energy_revenue},
                                 {"pumping_cost", pc.proposed.pumping_cost},
                                 {"profit", pc.proposed.profit}}},
                               {"profit_improvement_pct", pc.profit_improvement_pct}});
        }
        json endpoints = json::array();
        for (const auto& me : b.matched_soc_endpoints)
            endpoints.push_back({{"reservoir_id", me.reservoir_id},
                                 {"e_final", me.e_final},
                                 {"e_min", me.e_min},
                                 {"e_max", me.e_max}});
        doc["benefit"] = {{"legacy_objective", b.legacy_objective},
                          {"proposed_objective", b.proposed_objective},
                          {"objective_improvement_pct", b.objective_improvement_pct},
                          {"unit_profits", profits},
                          {"matched_soc_endpoints", endpoints},
                          {"warnings", b.warnings}};
    }
    if (!results.scenarios.empty()) {
        doc["scenarios"] = json::array();
        for (const auto& s : results.scenarios)
            doc["scenarios"].push_back({{"seed", s.seed},
                                        {"legacy_objective", s.legacy_objective},
                                        {"proposed_objective", s.proposed_objective},
                                        {"improvement_pct", s.improvement_pct}});
    }
    std::ofstream out(path);
    if (!out) throw make_error("IoError", "cannot write " + path);
    out << doc.dump(2) << "\n";
}

ResultsFile load_results(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw make_error("IoError", "cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw make_error("ParseError", e.what());
    }
    ResultsFile rf;
    try {
        for (const auto& jr : doc.at("runs")) rf.runs.push_back(run_from_json(jr));
        if (doc.contains("benefit")) {
            const json& jb = doc.at("benefit");
            BenefitSummary b;
            b.legacy_objective = jb.at("legacy_objective").get<double>();
            b.proposed_objective = jb.at("proposed_objective").get<double>();
            b.objective_improvement_pct = jb.at("objective_improvement_pct").get<double>();
            for (const auto& jp : jb.at("unit_profits")) {
                ProfitComparison pc;
                pc.legacy.psh_id = jp.at("psh_id").get<std::string>();
                pc.proposed.psh_id = pc.legacy.psh_id;
                pc.legacy.energy_revenue = jp.at("legacy").at("energy_revenue").get<double>();
                pc.legacy.pumping_cost = jp.at("legacy").at("pumping_cost").get<double>();
                pc.legacy.profit = jp.at("legacy").at("profit").get<double>();
                pc.proposed.energy_revenue = jp.at("proposed").at("energy_revenue").get<double>();
                pc.proposed.pumping_cost = jp.at("proposed").at("pumping_cost").get<double>();
                pc.proposed.profit = jp.at("proposed").at("profit").get<double>();
                pc.profit_improvement_pct = jp.at("profit_improvement_pct").get<double>();
                b.unit_profits.push_back(std::move(pc));
            }
            for (const auto& je : jb.at("matched_soc_endpoints"))
                b.matched_soc_endpoints.push_back({je.at("reservoir_id").get<std::string>(),
                                                   je.at("e_final").get<double>(),
                                                   je.at("e_min").get<double>(),
                                                   je.at("e_max").get<double>()});
            b.warnings = jb.at("warnings").get<std::vector<std::string>>();
            rf.benefit = std::move(b);
        }
        if (doc.contains("scenarios")) {
            for (const auto& js : doc.at("scenarios"))
                rf.scenarios.push_back({js.at("seed").get<std::uint64_t>(),
                                        js.at("legacy_objective").get<double>(),
                                        js.at("proposed_objective").get<double>(),
                                        js.at("improvement_pct").get<double>()});
        }
    } catch (const json::exception& e) {
        throw make_error("SchemaViolation", e.what());
    }
    return rf;
}

void emit_plot_data(const ResultsFile& results, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw make_error("IoError", "cannot write " + path);
    out.precision(17);
    out << "t,net_load_mw,psh_net_mw,lmp,soc_mwh,model_tag\n";
    for (const auto& run : results.runs) {
        for (int t = 0; t < run.schedule.n_intervals; ++t) {
            double psh_net = 0.0;
            for (const auto& us : run.schedule.units) psh_net += us.q_gen[t] - us.q_pump[t];
            double soc = 0.0;
            for (const auto& series : run.schedule.soc) soc += series[t + 1];
            double lmp = t < (int)run.prices.lmp.size() ? run.prices.lmp[t] : 0.0;
            out << t << "," << run.net_load[t] << "," << psh_net << "," << lmp << "," << soc
                << "," << run.model_tag << "\n";
        }
    }
    if (!out) throw make_error("IoError", "failed writing " + path);
}

}  // namespace psh
