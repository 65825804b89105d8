// Parallel kernels against their serial references.

#include "stosym/ansatz.hpp"
#include "stosym/catalog.hpp"
#include "stosym/montecarlo.hpp"

#include <benchmark/benchmark.h>

using namespace stosym;

namespace {

McConfig config(const CatalogEntry& e, std::size_t paths) {
    McConfig cfg = e.file.mc.value_or(McConfig{});
    cfg.n_paths = paths;
    cfg.dt = 1e-3;
    if (cfg.x0.empty()) cfg.x0.assign(e.sde().dim(), 0.0);
    return cfg;
}

void BM_Simulate(benchmark::State& state) {
    const auto e = load("ou");
    const auto cfg = config(e, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(simulate(e.sde(), cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SimulateSerial(benchmark::State& state) {
    const auto e = load("ou");
    const auto cfg = config(e, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(simulate_serial(e.sde(), cfg));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_TransformPaths(benchmark::State& state) {
    const auto e = load("bm1d");
    const auto base = simulate(e.sde(), config(e, static_cast<std::size_t>(state.range(0))));
    const auto& t = e.file.transform("shear_a1").T;
    for (auto _ : state) benchmark::DoNotOptimize(transform_paths(base, t));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_TransformPathsSerial(benchmark::State& state) {
    const auto e = load("bm1d");
    const auto base = simulate(e.sde(), config(e, static_cast<std::size_t>(state.range(0))));
    const auto& t = e.file.transform("shear_a1").T;
    for (auto _ : state) benchmark::DoNotOptimize(transform_paths_serial(base, t));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_AnsatzSolve(benchmark::State& state) {
    const auto e = load("bm2d");
    const auto mode = state.range(0) ? SolveMode::Doob : SolveMode::General;
    for (auto _ : state) benchmark::DoNotOptimize(solve(e.sde(), *e.file.ansatz, mode));
}

}  // namespace

BENCHMARK(BM_Simulate)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateSerial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TransformPaths)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TransformPathsSerial)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AnsatzSolve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
