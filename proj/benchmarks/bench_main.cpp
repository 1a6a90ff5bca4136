#include <benchmark/benchmark.h>

#include <cmath>

#include "levyfilter/filter_zakai.hpp"
#include "levyfilter/fp_solver.hpp"
#include "levyfilter/levy.hpp"
#include "levyfilter/nonlocal_operator.hpp"
#include "levyfilter/rng.hpp"

using namespace levyfilter;

namespace {

const StableParams kExample{1.5, std::sqrt(0.24)};

Grid1D grid_for(benchmark::State& state) {
    return Grid1D::from_spacing(-2.5, 2.5, 5.0 / static_cast<double>(state.range(0)));
}

}  // namespace

static void BM_AssembleAdjoint(benchmark::State& state) {
    const Grid1D g = grid_for(state);
    for (auto _ : state) {
        benchmark::DoNotOptimize(assemble_adjoint(g, kExample, double_well_drift(), 0.0));
    }
    state.counters["nodes"] = static_cast<double>(g.size());
}
BENCHMARK(BM_AssembleAdjoint)->Arg(100)->Arg(400)->Arg(1000)->Unit(benchmark::kMicrosecond);

static void BM_FpStep(benchmark::State& state) {
    const Grid1D g = grid_for(state);
    const auto op = assemble_adjoint(g, kExample, double_well_drift(), 0.0);
    DensityField p = init_density(g, GaussianInit{-1.0, 0.1});
    const double dt = 0.5 * op.stability_limit();
    for (auto _ : state) {
        p = step_fp(p, op, dt);
        benchmark::DoNotOptimize(p.values().data());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_FpStep)->Arg(100)->Arg(400)->Arg(1000)->Unit(benchmark::kMicrosecond);

static void BM_ZakaiStep(benchmark::State& state) {
    const Grid1D g = grid_for(state);
    const auto op = assemble_adjoint(g, kExample, double_well_drift(), 0.0);
    DensityField p = init_density(g, GaussianInit{-1.0, 0.1});
    const auto h = identity_observation();
    const double dt = 0.5 * op.stability_limit();
    double t = 0.0;
    for (auto _ : state) {
        p = step_zakai(p, op, h, t, -1.0 * dt, dt, 20.0);
        p.normalize();
        t += dt;
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ZakaiStep)->Arg(100)->Arg(400)->Unit(benchmark::kMicrosecond);

static void BM_CmsDraw(benchmark::State& state) {
    StableIncrementSampler s({static_cast<double>(state.range(0)) / 100.0, 1.0}, 1e-3, SplitMix64(1));
    for (auto _ : state) benchmark::DoNotOptimize(s.next());
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CmsDraw)->Arg(75)->Arg(100)->Arg(150);
BENCHMARK_MAIN();
