#include <benchmark/benchmark.h>

#include <fuvar/solver.hpp>
#include <fuvar/synth.hpp>

using namespace fuvar;

namespace {

Scene bench_scene(int size) {
    SceneSpec spec;
    spec.rows = size;
    spec.cols = size;
    spec.bands = 64;
    spec.msi_bands = 8;
    spec.decimation = 4;
    spec.rng_seed = 1;
    return build_scene(spec);
}

} // namespace

static void BM_AbundanceSweep(benchmark::State& state) {
    const Scene scene = bench_scene(static_cast<int>(state.range(0)));
    const Matrix m_m = scene.scaling.data().cwiseProduct(scene.endmembers.data());
    admm::AbundanceSolver solver(scene.y_h.band_matrix(), scene.y_m.band_matrix(),
                                 scene.endmembers.data(), m_m, scene.model,
                                 scene.y_m.rows(), scene.y_m.cols(), 1e-4, 1.0);
    admm::AbundanceState s = solver.initial_state(scene.abundances.data());
    for (auto _ : state) benchmark::DoNotOptimize(solver.iterate(s));
}
BENCHMARK(BM_AbundanceSweep)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);

static void BM_ScalingSweep(benchmark::State& state) {
    const Scene scene = bench_scene(static_cast<int>(state.range(0)));
    admm::ScalingSolver solver(scene.y_m.band_matrix(), scene.endmembers.data(),
                               scene.abundances.data(), scene.model.srf, 0.01, 1e4, 1.0);
    admm::ScalingState s = solver.initial_state(scene.scaling.data());
    for (auto _ : state) benchmark::DoNotOptimize(solver.iterate(s));
}
BENCHMARK(BM_ScalingSweep)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);

static void BM_Objective(benchmark::State& state) {
    const Scene scene = bench_scene(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(objective_value(
            scene.abundances.data(), scene.scaling.data(), scene.endmembers.data(),
            scene.y_h.band_matrix(), scene.y_m.band_matrix(), scene.model,
            scene.y_m.rows(), scene.y_m.cols(), 1e-4, 0.01, 1e4));
}
BENCHMARK(BM_Objective)->Arg(24)->Arg(48)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
