#include <benchmark/benchmark.h>

#include <random>

#include "qmr/fft.hpp"
#include "qmr/kernel.hpp"
#include "qmr/quantization.hpp"
#include "qmr/quasimodes.hpp"
#include "qmr/restriction.hpp"

using namespace qmr;

namespace {

Eigen::VectorXcd noise(std::size_t n) {
    std::mt19937 rng(1);
    std::normal_distribution<double> g;
    Eigen::VectorXcd v(static_cast<Eigen::Index>(n));
    for (auto& z : v) z = cplx(g(rng), g(rng));
    return v;
}

void BM_fft_2d(benchmark::State& state) {
    const PeriodicGrid grid(2, static_cast<int>(state.range(0)));
    Eigen::VectorXcd data = noise(grid.size());
    for (auto _ : state) {
        fft::forward(grid, data);
        fft::backward(grid, data);
        data /= static_cast<double>(grid.size());
        benchmark::DoNotOptimize(data.data());
    }
}
BENCHMARK(BM_fft_2d)->Arg(64)->Arg(256)->Arg(1024);

void BM_weyl_matrix(benchmark::State& state) {
    const PeriodicGrid grid(1, static_cast<int>(state.range(0)));
    const auto sym = symbols::pendulum();
    for (auto _ : state) benchmark::DoNotOptimize(quant::weyl_matrix(sym, 1.0 / 16, grid));
}
BENCHMARK(BM_weyl_matrix)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_free_kernel_row(benchmark::State& state) {
    const kernel::KernelConfig cfg;
    const double h = std::exp2(-static_cast<double>(state.range(0)));
    const auto a = symbols::free_particle(1);
    for (auto _ : state) benchmark::DoNotOptimize(kernel::restricted_kernel_decay(a, cfg, {h}, {{0.25, 0.0}}));
}
BENCHMARK(BM_free_kernel_row)->DenseRange(5, 9, 2);

void BM_pendulum_kernel_row(benchmark::State& state) {
    const kernel::KernelConfig cfg;
    const auto a = symbols::pendulum();
    for (auto _ : state) benchmark::DoNotOptimize(kernel::restricted_kernel_decay(a, cfg, {1.0 / 32}, {{0.25, 0.0}}));
}
BENCHMARK(BM_pendulum_kernel_row)->Unit(benchmark::kMillisecond);

void BM_harmonic_restriction(benchmark::State& state) {
    const int l = static_cast<int>(state.range(0));
    const modes::SphereHarmonic u(modes::HarmonicKind::zonal, l, 2);
    const auto y = restriction::Submanifold::great_circle(1.5707963267948966, 16 * l);
    for (auto _ : state) benchmark::DoNotOptimize(restriction::restrict_to(u, y).lp_norm(4.0));
}
BENCHMARK(BM_harmonic_restriction)->Arg(128)->Arg(1024)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
