// Serial reference kernels against their OpenMP versions on Brownian-like data.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "rdde/kernels.hpp"

using namespace rdde::kernels;

namespace {

std::vector<double> walk(std::size_t n, std::size_t dim) {
    std::mt19937_64 gen(42);
    std::normal_distribution<double> n01;
    std::vector<double> x(n * dim, 0.0);
    for (std::size_t i = dim; i < x.size(); ++i) x[i] = x[i - dim] + n01(gen) / std::sqrt(static_cast<double>(n));
    return x;
}

template <bool Parallel>
void BM_PathHoelder(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto x = walk(n, 2);
    const double h = 1.0 / static_cast<double>(n);
    for (auto _ : state) {
        const double v = Parallel ? path_hoelder_parallel(x.data(), n, 2, h, 0.45)
                                  : path_hoelder_serial(x.data(), n, 2, h, 0.45);
        benchmark::DoNotOptimize(v);
    }
    state.SetComplexityN(state.range(0));
}

template <bool Parallel>
void BM_PairSup(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto x = walk(n, 1);
    const double h = 1.0 / static_cast<double>(n);
    auto f = [&](std::size_t s, std::size_t t) { return std::abs(x[t] - x[s]); };
    for (auto _ : state) {
        const double v = pair_sup(n, h, 0.9, f, Parallel ? Exec::parallel : Exec::serial);
        benchmark::DoNotOptimize(v);
    }
}

template <bool Parallel>
void BM_Convolve(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto x = walk(n, 2);
    const std::vector<double> w(257, 1.0 / 257.0);
    for (auto _ : state) {
        auto out = Parallel ? convolve_parallel(x.data(), n, 2, w) : convolve_serial(x.data(), n, 2, w);
        benchmark::DoNotOptimize(out.data());
    }
}

}  // namespace

BENCHMARK(BM_PathHoelder<false>)->RangeMultiplier(4)->Range(256, 4096)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PathHoelder<true>)->RangeMultiplier(4)->Range(256, 4096)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PairSup<false>)->RangeMultiplier(4)->Range(256, 4096)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PairSup<true>)->RangeMultiplier(4)->Range(256, 4096)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Convolve<false>)->RangeMultiplier(8)->Range(4096, 262144)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Convolve<true>)->RangeMultiplier(8)->Range(4096, 262144)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
