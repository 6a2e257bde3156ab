#include <benchmark/benchmark.h>

#include <fuvar/operators.hpp>
#include <fuvar/rng.hpp>

using namespace fuvar;

namespace {

Matrix random_grid(int n, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = rng.normal();
    return m;
}

} // namespace

static void BM_BlurApply(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const BlurOperator blur(gaussian_blur_kernel(1.0, 4), n, n);
    const Matrix x = random_grid(n, 1);
    for (auto _ : state) benchmark::DoNotOptimize(blur.apply(x));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BlurApply)->Arg(25)->Arg(50)->Arg(100)->Complexity();

static void BM_Gradients(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Matrix x = random_grid(n, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(grad_h(x));
        benchmark::DoNotOptimize(grad_v(x));
    }
}
BENCHMARK(BM_Gradients)->Arg(50)->Arg(100);

static void BM_DecimateUpsample(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Matrix x = random_grid(n, 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(upsample_zero_fill(decimate(x, 4, 0), 4, 0));
}
BENCHMARK(BM_DecimateUpsample)->Arg(100);

static void BM_NoiseInjection(benchmark::State& state) {
    const Matrix x = random_grid(static_cast<int>(state.range(0)), 4);
    for (auto _ : state) {
        Rng rng(7);
        benchmark::DoNotOptimize(add_noise_snr(x, 30.0, rng));
    }
}
BENCHMARK(BM_NoiseInjection)->Arg(100);
