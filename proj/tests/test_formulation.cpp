#include <doctest.h>

#include <cmath>

#include "cases.hpp"
#include "psh/formulation.hpp"
#include "psh/solver.hpp"

using namespace psh;

namespace {

int rows_with_prefix(const Milp& m, const std::string& prefix) {
    int n = 0;
    for (const auto& r : m.rows)
        if (r.name.rfind(prefix, 0) == 0) ++n;
    return n;
}

}  // namespace

TEST_CASE("row families for one unit over four intervals") {
    Case c = cases::one_unit({100, 100, 100, 100});
    ValidatedCase vc = validate_case(c);
    BuiltModel built = build_proposed(vc);
    const Milp& m = built.model;

    CHECK(rows_with_prefix(m, "excl[") == 4);
    CHECK(rows_with_prefix(m, "flow[") == 12);  // 3 modes x 4 intervals
    CHECK(rows_with_prefix(m, "trans1[") == 4);
    CHECK(rows_with_prefix(m, "soc[") == 4);
    CHECK(rows_with_prefix(m, "balance[") == 4);

    // storage endpoints pinned through variable bounds
    const Variable& e0 = m.variables[built.map.soc.at({0, 0})];
    const Variable& e4 = m.variables[built.map.soc.at({0, 4})];
    CHECK(e0.lower == 2600.0);
    CHECK(e0.upper == 2600.0);
    CHECK(e4.lower == 2600.0);
    CHECK(e4.upper == 2600.0);
    const Variable& e2 = m.variables[built.map.soc.at({0, 2})];
    CHECK(e2.lower == 1000.0);
    CHECK(e2.upper == 3500.0);
}

TEST_CASE("box bounds are the tighter of machine limit and reservoir swing") {
    Case c = cases::one_unit({100});
    ValidatedCase vc = validate_case(c);
    BuiltModel built = build_proposed(vc);
    // swing 2500 MWh dominates neither side for the reference unit
    CHECK(built.model.variables[built.map.q_pump.at({0, 0})].upper == doctest::Approx(200.0));
    CHECK(built.model.variables[built.map.q_gen.at({0, 0})].upper == doctest::Approx(200.0));

    // a shallow reservoir takes over
    c.reservoirs[0] = {"upper", 1000.0, 1090.0, 1050.0, 1050.0, {}, false};
    BuiltModel shallow = build_proposed(validate_case(c));
    CHECK(shallow.model.variables[shallow.map.q_pump.at({0, 0})].upper ==
          doctest::Approx(90.0 / 0.9));
    CHECK(shallow.model.variables[shallow.map.q_gen.at({0, 0})].upper ==
          doctest::Approx(90.0 * 0.9));
    // gen minimum 100 MW now exceeds the 81 MW effective bound
    CHECK(!shallow.warnings.empty());

    FormulationOptions strict;
    strict.strict_bounds = true;
    CHECK_THROWS_AS(build_proposed(validate_case(c), strict), Error);
}

TEST_CASE("bid-term objective requires legacy bids") {
    Case c = cases::one_unit({100});
    FormulationOptions opts;
    opts.objective = ObjectiveMode::WithPshBids;
    CHECK_THROWS_AS(build_proposed(validate_case(c), opts), Error);

    c.legacy_bids.emplace();
    c.legacy_bids->push_back(cases::flat_bid("psh1", 1, {0}, {}, 0.0));
    BuiltModel built = build_proposed(validate_case(c), opts);
    CHECK(built.model.variables[built.map.q_pump.at({0, 0})].objective_coeff ==
          doctest::Approx(-24.0));
    CHECK(built.model.variables[built.map.q_gen.at({0, 0})].objective_coeff ==
          doctest::Approx(26.0));
}

TEST_CASE("thermal-only objective leaves storage variables free of cost") {
    Case c = cases::one_unit({100});
    BuiltModel built = build_proposed(validate_case(c));
    CHECK(built.model.variables[built.map.q_pump.at({0, 0})].objective_coeff == 0.0);
    CHECK(built.model.variables[built.map.q_gen.at({0, 0})].objective_coeff == 0.0);
    // thermal segment cost is price times interval length
    CHECK(built.model.variables[built.map.q_thermal.at({0, 0, 0})].objective_coeff ==
          doctest::Approx(15.0));
}

TEST_CASE("plant exclusivity and pump start machinery appear only when asked") {
    Case c = cases::one_unit({100, 100, 100});
    c.psh_units.push_back(cases::default_unit("psh2"));
    BuiltModel plain = build_proposed(validate_case(c));
    CHECK(rows_with_prefix(plain.model, "plantex[") == 0);
    CHECK(rows_with_prefix(plain.model, "pumpstart[") == 0);
    CHECK(plain.map.ur.empty());

    c.reservoirs[0].plant_exclusive = true;
    c.reservoirs[0].pump_start_limit = 1;
    BuiltModel full = build_proposed(validate_case(c));
    CHECK(rows_with_prefix(full.model, "plantex[") == 3);
    CHECK(rows_with_prefix(full.model, "plantlink[") == 2 * 2 * 3);  // unit x {gen,pump} x t
    CHECK(rows_with_prefix(full.model, "pumpstart[") == 3);
    CHECK(full.map.ur.size() == 2 * 3);
    for (const auto& [k, idx] : full.map.ur)
        CHECK(full.model.variables[idx].integrality == Integrality::Continuous);
}

TEST_CASE("compactness baseline omits storage rows") {
    Case c = cases::one_unit({100, 100, 100});
    FormulationOptions bare;
    bare.storage_constraints = false;
    BuiltModel base = build_proposed(validate_case(c), bare);
    CHECK(rows_with_prefix(base.model, "soc[") == 0);
    CHECK(base.map.soc.empty());
}

TEST_CASE("legacy windows restrict where commitment exists") {
    Case c = cases::one_unit({640, 600, 580, 560, 420, 350, 380});
    const int T = 7;
    c.legacy_bids.emplace();
    c.legacy_bids->push_back(cases::flat_bid("psh1", T, {0, 1, 2, 3, 4}, {6}, 405.0));
    BuiltModel built = build_legacy(validate_case(c));
    for (int t = 0; t < T; ++t) {
        CHECK(built.map.q_pump.count({0, t}) == (t <= 4 ? 1 : 0));
        CHECK(built.map.q_gen.count({0, t}) == (t == 6 ? 1 : 0));
    }
    CHECK(rows_with_prefix(built.model, "dailymax[") == 1);
    CHECK(rows_with_prefix(built.model, "soc[") == 0);
}

TEST_CASE("zero daily limit forbids generation") {
    Case c = cases::one_unit({640, 350, 900});
    c.legacy_bids.emplace();
    c.legacy_bids->push_back(cases::flat_bid("psh1", 3, {0}, {2}, 0.0));
    ValidatedCase vc = validate_case(c);
    BuiltModel built = build_legacy(vc);
    MipSolution s = builtin_solve_mip(built.model);
    REQUIRE(s.status == MipStatus::Optimal);
    Schedule sched = decode_schedule(vc, built.map, s.incumbent);
    for (int t = 0; t < 3; ++t) CHECK(sched.units[0].q_gen[t] == doctest::Approx(0.0));
}

TEST_CASE("a unit without a bid cannot be cleared in the legacy model") {
    Case c = cases::one_unit({100});
    c.psh_units.push_back(cases::default_unit("psh2"));
    c.legacy_bids.emplace();
    c.legacy_bids->push_back(cases::flat_bid("psh1", 1, {0}, {}, 0.0));
    try {
        build_legacy(validate_case(c));
        FAIL("expected MissingLegacyBid");
    } catch (const Error& e) {
        CHECK(e.category() == "MissingLegacyBid");
    }
}

TEST_CASE("decode reconstructs legacy storage by the recursion") {
    Case c = cases::one_unit({100});
    c.legacy_bids.emplace();
    c.legacy_bids->push_back(cases::flat_bid("psh1", 1, {0}, {}, 0.0));
    ValidatedCase vc = validate_case(c);
    BuiltModel built = build_legacy(vc);
    // variable order: u, qpump, then one segment per thermal unit
    std::vector<double> x(built.model.variables.size(), 0.0);
    x[built.map.u.at({0, 0, Mode::Pump})] = 1.0;
    x[built.map.q_pump.at({0, 0})] = 200.0;
    x[built.map.q_thermal.at({0, 0, 0})] = 300.0;  // 100 load + 200 pump
    Schedule s = decode_schedule(vc, built.map, x);
    CHECK(s.units[0].mode[0] == Mode::Pump);
    CHECK(s.soc[0][1] == doctest::Approx(2780.0));  // 2600 + 0.9 * 200
    CHECK(s.thermal_output[0][0] == doctest::Approx(300.0));
    CHECK(check_schedule_invariants(vc, s, false).empty());

    x[built.map.u.at({0, 0, Mode::Pump})] = 0.5;
    try {
        decode_schedule(vc, built.map, x);
        FAIL("expected NonIntegralCommitment");
    } catch (const Error& e) {
        CHECK(e.category() == "NonIntegralCommitment");
    }
}

TEST_CASE("all-off decode") {
    Case c = cases::one_unit({100, 100});
    ValidatedCase vc = validate_case(c);
    BuiltModel built = build_proposed(vc);
    std::vector<double> x(built.model.variables.size(), 0.0);
    for (int t = 0; t < 2; ++t) x[built.map.u.at({0, t, Mode::AllOff})] = 1.0;
    for (int t = 0; t <= 2; ++t) x[built.map.soc.at({0, t})] = 2600.0;
    for (int t = 0; t < 2; ++t) x[built.map.q_thermal.at({0, t, 0})] = 100.0;
    Schedule s = decode_schedule(vc, built.map, x);
    for (int t = 0; t < 2; ++t) {
        CHECK(s.units[0].mode[t] == Mode::AllOff);
        CHECK(s.units[0].q_gen[t] == 0.0);
        CHECK(s.units[0].q_pump[t] == 0.0);
    }
    CHECK(s.soc[0] == std::vector<double>{2600.0, 2600.0, 2600.0});
}

TEST_CASE("invariant checker flags a tampered schedule") {
    Case c = cases::one_unit({640, 350, 900});
    ValidatedCase vc = validate_case(c);
    BuiltModel built = build_proposed(vc);
    MipSolution s = builtin_solve_mip(built.model);
    REQUIRE(s.status == MipStatus::Optimal);
    Schedule sched = decode_schedule(vc, built.map, s.incumbent);
    REQUIRE(check_schedule_invariants(vc, sched, true).empty());

    Schedule bad = sched;
    bad.units[0].q_gen[1] += 5.0;
    CHECK(!check_schedule_invariants(vc, bad, true).empty());

    Schedule bad2 = sched;
    bad2.soc[0][1] += 1.0;
    CHECK(!check_schedule_invariants(vc, bad2, true).empty());
}

TEST_CASE("minimum up time rows aggregate entering transitions") {
    Case c = cases::one_unit({640, 350, 380, 700, 820, 900});
    c.psh_units[0].min_up_hours[Mode::Gen] = 3;
    ValidatedCase vc = validate_case(c);
    BuiltModel built = build_proposed(vc);
    int minup = 0;
    for (const auto& r : built.model.rows)
        if (r.name.rfind("minup[", 0) == 0) ++minup;
    CHECK(minup == 6);

    MipSolution s = builtin_solve_mip(built.model);
    REQUIRE(s.incumbent.size() > 0);
    Schedule sched = decode_schedule(vc, built.map, s.incumbent);
    // any gen run must last at least 3 intervals
    int run = 0;
    for (int t = 0; t < 6; ++t) {
        if (sched.units[0].mode[t] == Mode::Gen) {
            ++run;
        } else {
            if (run > 0) CHECK(run >= 3);
            run = 0;
        }
    }
    if (run > 0) CHECK(run >= 3);
}

TEST_CASE("initial mode feeds the first transition") {
    Case c = cases::one_unit({640, 350});
    c.psh_units[0].initial_mode = Mode::Pump;
    ValidatedCase vc = validate_case(c);
    BuiltModel built = build_proposed(vc);
    MipSolution s = builtin_solve_mip(built.model);
    REQUIRE(s.status == MipStatus::Optimal);
    Schedule sched = decode_schedule(vc, built.map, s.incumbent);
    CHECK(check_schedule_invariants(vc, sched, true).empty());
}
