#include <doctest.h>

#include <cmath>
#include <random>

#include "cases.hpp"
#include "psh/formulation.hpp"
#include "psh/io.hpp"
#include "psh/simplex.hpp"
#include "psh/solver.hpp"

using namespace psh;

TEST_CASE("one variable, one covering row") {
    Milp m;
    int x = m.add_variable("x", 0.0, 10.0, Integrality::Continuous, 1.0);
    m.add_row("cover", {{x, 1.0}}, RowSense::GreaterEqual, 1.0);
    LpSolution s = solve_lp_relaxation(m);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.primal[x] == doctest::Approx(1.0));
    CHECK(s.objective == doctest::Approx(1.0));
    CHECK(s.duals[0] == doctest::Approx(1.0));
}

TEST_CASE("contradictory rows are infeasible") {
    Milp m;
    int x = m.add_variable("x", 0.0, 10.0, Integrality::Continuous, 0.0);
    m.add_row("le", {{x, 1.0}}, RowSense::LessEqual, 1.0);
    m.add_row("ge", {{x, 1.0}}, RowSense::GreaterEqual, 2.0);
    CHECK(solve_lp_relaxation(m).status == LpStatus::Infeasible);
}

TEST_CASE("missing upper bound with negative cost is unbounded") {
    Milp m;
    m.add_variable("x", 0.0, kInf, Integrality::Continuous, -1.0);
    CHECK(solve_lp_relaxation(m).status == LpStatus::Unbounded);
}

TEST_CASE("two-variable dispatch with binding capacity") {
    // min 15a + 20b, a+b = 600, a <= 500, b <= 400
    Milp m;
    int a = m.add_variable("a", 0.0, 500.0, Integrality::Continuous, 15.0);
    int b = m.add_variable("b", 0.0, 400.0, Integrality::Continuous, 20.0);
    m.add_row("bal", {{a, 1.0}, {b, 1.0}}, RowSense::Equal, 600.0);
    LpSolution s = solve_lp_relaxation(m);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.primal[a] == doctest::Approx(500.0));
    CHECK(s.primal[b] == doctest::Approx(100.0));
    CHECK(s.objective == doctest::Approx(9500.0));
    CHECK(s.duals[0] == doctest::Approx(20.0));       // marginal unit's price
    CHECK(s.reduced_costs[a] == doctest::Approx(-5.0));
}

TEST_CASE("free variables are handled") {
    Milp m;
    int x = m.add_variable("x", -kInf, kInf, Integrality::Continuous, 1.0);
    m.add_row("lo", {{x, 1.0}}, RowSense::GreaterEqual, -7.0);
    LpSolution s = solve_lp_relaxation(m);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.primal[x] == doctest::Approx(-7.0));
}

TEST_CASE("equality row with negative dual") {
    // pushing rhs up raises cost through the expensive side
    Milp m;
    int x = m.add_variable("x", 0.0, 10.0, Integrality::Continuous, -3.0);
    m.add_row("eq", {{x, 1.0}}, RowSense::Equal, 4.0);
    LpSolution s = solve_lp_relaxation(m);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(-12.0));
    CHECK(s.duals[0] == doctest::Approx(-3.0));
}

namespace {

Milp random_lp(std::mt19937_64& rng, int n, int mrows) {
    std::uniform_real_distribution<double> coeff(-3.0, 3.0);
    std::uniform_real_distribution<double> ub(0.5, 10.0);
    std::uniform_int_distribution<int> sense(0, 2);
    Milp m;
    for (int j = 0; j < n; ++j)
        m.add_variable("x" + std::to_string(j), 0.0, ub(rng), Integrality::Continuous,
                       coeff(rng));
    for (int i = 0; i < mrows; ++i) {
        std::vector<std::pair<int, double>> terms;
        for (int j = 0; j < n; ++j) {
            double a = coeff(rng);
            if (std::abs(a) > 0.8) terms.emplace_back(j, a);
        }
        if (terms.empty()) terms.emplace_back(i % n, 1.0);
        // keep rows satisfiable at the origin-ish region
        m.add_row("r" + std::to_string(i), std::move(terms),
                  sense(rng) == 0 ? RowSense::LessEqual : RowSense::GreaterEqual,
                  sense(rng) == 0 ? std::abs(coeff(rng)) : -std::abs(coeff(rng)));
    }
    return m;
}

}  // namespace

TEST_CASE("random LPs: strong duality and primal feasibility at the optimum") {
    std::mt19937_64 rng(20240817);
    int optimal = 0;
    for (int k = 0; k < 60; ++k) {
        Milp m = random_lp(rng, 4 + (int)(k % 7), 3 + (int)(k % 5));
        LpSolution s = solve_lp_relaxation(m);
        if (s.status != LpStatus::Optimal) continue;
        ++optimal;
        CHECK(std::abs(s.objective - s.dual_objective) <= 1e-6 * (1.0 + std::abs(s.objective)));
        CHECK(solution_violation(m, s.primal) <= 1e-7);
    }
    CHECK(optimal > 20);  // the generator must actually produce solvable LPs
}

TEST_CASE("warm start from the optimal basis converges immediately") {
    Case c = cases::one_unit({640, 350, 380, 700, 820, 900});
    Milp m = build_proposed(validate_case(c)).model;
    std::vector<double> lo(m.variables.size()), hi(m.variables.size());
    for (size_t j = 0; j < m.variables.size(); ++j) {
        lo[j] = m.variables[j].lower;
        hi[j] = m.variables[j].upper;
    }
    Basis basis;
    LpSolution cold = solve_lp_relaxation(m, lo, hi, {}, nullptr, &basis);
    REQUIRE(cold.status == LpStatus::Optimal);
    LpSolution warm = solve_lp_relaxation(m, lo, hi, {}, &basis, nullptr);
    REQUIRE(warm.status == LpStatus::Optimal);
    CHECK(warm.objective == doctest::Approx(cold.objective).epsilon(1e-9));
    CHECK(warm.iterations <= 2);
}

TEST_CASE("warm start across a bound change matches a cold solve") {
    Case c = cases::one_unit({640, 350, 380, 700, 820, 900});
    BuiltModel built = build_proposed(validate_case(c));
    Milp& m = built.model;
    std::vector<double> lo(m.variables.size()), hi(m.variables.size());
    for (size_t j = 0; j < m.variables.size(); ++j) {
        lo[j] = m.variables[j].lower;
        hi[j] = m.variables[j].upper;
    }
    Basis basis;
    REQUIRE(solve_lp_relaxation(m, lo, hi, {}, nullptr, &basis).status == LpStatus::Optimal);

    int some_u = built.map.u.at({0, 2, Mode::Pump});
    hi[some_u] = 0.0;  // branch-style restriction
    LpSolution warm = solve_lp_relaxation(m, lo, hi, {}, &basis, nullptr);
    LpSolution cold = solve_lp_relaxation(m, lo, hi, {}, nullptr, nullptr);
    REQUIRE(warm.status == cold.status);
    if (cold.status == LpStatus::Optimal)
        CHECK(warm.objective == doctest::Approx(cold.objective).epsilon(1e-8));
}

TEST_CASE("degeneracy is flagged when a basic variable sits on a bound") {
    // x + y = 1 with both capped at 1; one of them ends basic at a bound
    Milp m;
    int x = m.add_variable("x", 0.0, 1.0, Integrality::Continuous, 1.0);
    int y = m.add_variable("y", 0.0, 1.0, Integrality::Continuous, 2.0);
    m.add_row("bal", {{x, 1.0}, {y, 1.0}}, RowSense::Equal, 1.0);
    LpSolution s = solve_lp_relaxation(m);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.primal[x] == doctest::Approx(1.0));
    CHECK(s.degenerate);  // x is basic exactly at its upper bound
}

TEST_CASE("reference day relaxations match an independent LP solver") {
    // Values cross-checked externally (HiGHS) on the exported models.
    Case c = load_case(std::string(PSH_DATA_DIR) + "/two_unit.json");
    ValidatedCase vc = validate_case(c);
    LpSolution prop = solve_lp_relaxation(build_proposed(vc, {ObjectiveMode::ThermalOnly}).model);
    REQUIRE(prop.status == LpStatus::Optimal);
    CHECK(prop.objective == doctest::Approx(358300.0).epsilon(1e-6));

    LpSolution leg = solve_lp_relaxation(build_legacy(vc).model);
    REQUIRE(leg.status == LpStatus::Optimal);
    CHECK(leg.objective == doctest::Approx(356710.0).epsilon(1e-6));
}
