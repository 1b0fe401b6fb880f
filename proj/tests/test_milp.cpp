#include <doctest.h>

#include <cmath>
#include <sstream>

#include "cases.hpp"
#include "psh/formulation.hpp"
#include "psh/milp.hpp"
#include "psh/solver.hpp"

using namespace psh;

TEST_CASE("model_stats counts exactly") {
    Milp m;
    CHECK(model_stats(m) == ModelStats{0, 0, 0, 0});

    int x = m.add_variable("x", 0, 1, Integrality::Continuous, 1.0);
    int y = m.add_variable("y", 0, 1, Integrality::Continuous, 1.0);
    m.add_row("cap", {{x, 1.0}, {y, 1.0}}, RowSense::LessEqual, 1.0);
    CHECK(model_stats(m) == ModelStats{2, 0, 1, 2});
}

TEST_CASE("proposed model for one unit over four intervals has the documented shape") {
    // 3 commitment binaries and 6 transition binaries per interval, one
    // storage level per interval boundary.
    Case c = cases::one_unit({100, 100, 100, 100});
    BuiltModel built = build_proposed(validate_case(c));
    ModelStats st = model_stats(built.model);
    CHECK(st.n_binaries == 12 + 24);
    CHECK(built.map.u.size() == 12);
    CHECK(built.map.v.size() == 24);
    CHECK(built.map.soc.size() == 5);

    int soc_vars = 0;
    for (const auto& v : built.model.variables)
        if (v.name.rfind("e[", 0) == 0) ++soc_vars;
    CHECK(soc_vars == 5);
}

TEST_CASE("add_row rejects malformed terms") {
    Milp m;
    int x = m.add_variable("x", 0, 1, Integrality::Continuous, 0.0);
    CHECK_THROWS_AS(m.add_row("r", {{x, 1.0}, {x, 2.0}}, RowSense::Equal, 0.0), Error);
    CHECK_THROWS_AS(m.add_row("r", {{x, 0.0}}, RowSense::Equal, 0.0), Error);
    CHECK_THROWS_AS(m.add_row("r", {{7, 1.0}}, RowSense::Equal, 0.0), Error);
}

TEST_CASE("binary bounds are confined to the unit interval") {
    Milp m;
    CHECK_THROWS_AS(m.add_variable("b", 0.0, 2.0, Integrality::Binary, 0.0), Error);
    CHECK_THROWS_AS(m.add_variable("x", 1.0, 0.0, Integrality::Continuous, 0.0), Error);
}

TEST_CASE("fix_variable pins bounds without touching the original") {
    Milp m;
    int b = m.add_variable("b", 0, 1, Integrality::Binary, -1.0);
    Milp fixed = fix_variable(m, b, 1.0);
    CHECK(fixed.variables[b].lower == 1.0);
    CHECK(fixed.variables[b].upper == 1.0);
    CHECK(m.variables[b].lower == 0.0);
    CHECK(model_stats(fixed) == model_stats(m));

    CHECK_THROWS_AS(fix_variable(m, b, 0.5), Error);  // non-integral for a binary
    Milp m2;
    int x = m2.add_variable("x", 0, 10, Integrality::Continuous, 0.0);
    CHECK_THROWS_AS(fix_variable(m2, x, 11.0), Error);
    CHECK_THROWS_AS(fix_variable(m2, 5, 0.0), Error);
}

TEST_CASE("fixing all binaries of a solved MIP reproduces the incumbent objective") {
    Case c = cases::one_unit({640, 350, 380, 700, 820, 900});
    BuiltModel built = build_proposed(validate_case(c));
    MipSolution mip = builtin_solve_mip(built.model);
    REQUIRE(mip.status == MipStatus::Optimal);

    Milp fixed = built.model;
    for (size_t j = 0; j < fixed.variables.size(); ++j)
        if (fixed.variables[j].integrality == Integrality::Binary)
            fixed = fix_variable(fixed, (int)j, std::round(mip.incumbent[j]));
    LpSolution lp = builtin_solve_lp(fixed);
    REQUIRE(lp.status == LpStatus::Optimal);
    CHECK(lp.objective ==
          doctest::Approx(mip.objective).epsilon(1e-6));
}

TEST_CASE("LP text round-trips the model shape") {
    Case c = cases::one_unit({640, 350, 700});
    c.reservoirs[0].plant_exclusive = true;
    c.reservoirs[0].pump_start_limit = 1;
    Milp m = build_proposed(validate_case(c)).model;

    std::stringstream ss;
    write_lp_file(m, ss);
    Milp back = read_lp_file(ss);
    CHECK(model_stats(back) == model_stats(m));

    // objective value survives the round trip on the relaxation
    LpSolution a = builtin_solve_lp(m);
    LpSolution b = builtin_solve_lp(back);
    REQUIRE(a.status == LpStatus::Optimal);
    REQUIRE(b.status == LpStatus::Optimal);
    CHECK(a.objective == doctest::Approx(b.objective).epsilon(1e-9));
}

TEST_CASE("disjoint model union adds stats component-wise") {
    Case c1 = cases::one_unit({100, 200});
    Milp a = build_proposed(validate_case(c1)).model;
    ModelStats sa = model_stats(a);

    Milp merged = a;
    int offset = (int)merged.variables.size();
    for (const auto& v : a.variables)
        merged.add_variable(v.name + "'", v.lower, v.upper, v.integrality, v.objective_coeff);
    for (const auto& r : a.rows) {
        auto terms = r.terms;
        for (auto& [idx, coeff] : terms) idx += offset;
        merged.add_row(r.name + "'", std::move(terms), r.sense, r.rhs);
    }
    ModelStats sm = model_stats(merged);
    CHECK(sm.n_variables == 2 * sa.n_variables);
    CHECK(sm.n_binaries == 2 * sa.n_binaries);
    CHECK(sm.n_constraints == 2 * sa.n_constraints);
    CHECK(sm.n_nonzeros == 2 * sa.n_nonzeros);
}
