// Microbenchmarks for the LP/MIP path on a small storage day.

#include <benchmark/benchmark.h>

#include "psh/analysis.hpp"
#include "psh/formulation.hpp"
#include "psh/solver.hpp"

namespace {

psh::Case small_case(int T) {
    psh::Case c;
    c.horizon.n_intervals = T;
    c.horizon.dt_hours = 1.0;
    c.horizon.net_load = psh::random_net_load(T, 7, 800.0, 250.0, 150.0);

    psh::PshUnit u;
    u.id = "psh1";
    u.reservoir_id = "res";
    u.q_gen_min = 100.0;
    u.q_gen_max = 200.0;
    u.q_pump_min = 200.0;
    u.q_pump_max = 200.0;
    u.eta_gen = 0.9;
    u.eta_pump = 0.9;
    c.psh_units.push_back(u);

    psh::Reservoir r;
    r.id = "res";
    r.e_min = 1000.0;
    r.e_max = 3500.0;
    r.e_initial = 2600.0;
    r.e_final = 2600.0;
    c.reservoirs.push_back(r);

    c.thermal_units.push_back({"base", 0.0, 500.0, {{15.0, 500.0}}});
    c.thermal_units.push_back({"mid", 0.0, 400.0, {{20.0, 400.0}}});
    c.thermal_units.push_back({"peak", 0.0, 600.0, {{30.0, 600.0}}});
    return c;
}

void bm_build(benchmark::State& state) {
    psh::ValidatedCase vc = psh::validate_case(small_case((int)state.range(0)));
    for (auto _ : state) {
        psh::BuiltModel m = psh::build_proposed(vc);
        benchmark::DoNotOptimize(m.model.rows.size());
    }
}
BENCHMARK(bm_build)->Arg(24)->Arg(96);

void bm_lp_relaxation(benchmark::State& state) {
    psh::ValidatedCase vc = psh::validate_case(small_case((int)state.range(0)));
    psh::Milp model = psh::build_proposed(vc).model;
    for (auto _ : state) {
        psh::LpSolution lp = psh::builtin_solve_lp(model);
        benchmark::DoNotOptimize(lp.objective);
    }
}
BENCHMARK(bm_lp_relaxation)->Arg(24)->Arg(96);

void bm_mip(benchmark::State& state) {
    psh::ValidatedCase vc = psh::validate_case(small_case((int)state.range(0)));
    psh::Milp model = psh::build_proposed(vc).model;
    psh::MipOptions opt;
    opt.rel_gap = 1e-4;
    for (auto _ : state) {
        psh::MipSolution s = psh::builtin_solve_mip(model, opt);
        benchmark::DoNotOptimize(s.objective);
    }
}
BENCHMARK(bm_mip)->Arg(24);

}  // namespace

BENCHMARK_MAIN();
