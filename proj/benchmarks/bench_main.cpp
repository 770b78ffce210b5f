#include <benchmark/benchmark.h>
#include <cmath>

#include "halfflow/experiments.hpp"
#include "halfflow/fracgrad.hpp"
#include "halfflow/norms.hpp"
#include "halfflow/solver.hpp"
#include "halfflow/spectral.hpp"

using namespace halfflow;

namespace {

Field wave(const Grid& g) {
    return sample_function(g, 2, [](const Point& x) {
        return std::vector<double>{std::cos(x[0] + 0.5 * x[1]), std::sin(x[0] + 0.5 * x[1])};
    });
}

}  // namespace

static void BM_Dft(benchmark::State& state) {
    const Grid g = Grid::make(static_cast<int>(state.range(0)), 16.0, static_cast<int>(state.range(1)));
    const Field u = wave(g);
    for (auto _ : state) benchmark::DoNotOptimize(dft(u));
}
BENCHMARK(BM_Dft)->Args({1, 4096})->Args({2, 256});

static void BM_FgModulus(benchmark::State& state) {
    const Grid g = Grid::make(static_cast<int>(state.range(0)), 16.0, static_cast<int>(state.range(1)));
    const Field u = wave(g);
    for (auto _ : state) benchmark::DoNotOptimize(fg_modulus_sq(u));
}
BENCHMARK(BM_FgModulus)->Args({1, 1024})->Args({2, 32});

static void BM_SpectralDensity(benchmark::State& state) {
    const Grid g = Grid::make(2, 16.0, static_cast<int>(state.range(0)));
    const Field u = wave(g);
    for (auto _ : state) benchmark::DoNotOptimize(energy_density_spectral(u));
}
BENCHMARK(BM_SpectralDensity)->Arg(128)->Arg(256);

static void BM_PicardSolve(benchmark::State& state) {
    const Grid g = Grid::make(1, 32.0, static_cast<int>(state.range(0)));
    DataSpec spec;
    spec.kind = DataKind::PerturbedConstant;
    const Field a = make_data(spec, g);
    SolverConfig cfg;
    cfg.check_smallness = false;
    for (auto _ : state) benchmark::DoNotOptimize(picard_solve(a, cfg));
}
BENCHMARK(BM_PicardSolve)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_CarlesonA(benchmark::State& state) {
    const Grid g = Grid::make(1, 64.0, static_cast<int>(state.range(0)));
    DataSpec spec;
    spec.kind = DataKind::Jump1D;
    const Field a = make_data(spec, g);
    const SupSampling s = SupSampling::make(g);
    for (auto _ : state) benchmark::DoNotOptimize(carleson_A_seminorm(a, 8.0, s));
}
BENCHMARK(BM_CarlesonA)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
