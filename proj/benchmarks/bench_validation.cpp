#include <benchmark/benchmark.h>

#include "haxc/rng.hpp"
#include "haxc/validation.hpp"

using namespace haxc;

namespace {

void BM_KendallTau(benchmark::State& state) {
    const auto n = state.range(0);
    Rng rng(21);
    std::vector<double> x(static_cast<std::size_t>(n)), y(static_cast<std::size_t>(n));
    for (long long i = 0; i < n; ++i) {
        const double s = rng.uniform();
        x[static_cast<std::size_t>(i)] = s + 0.3 * rng.uniform();
        y[static_cast<std::size_t>(i)] = s + 0.3 * rng.uniform();
    }
    for (auto _ : state) benchmark::DoNotOptimize(kendall_tau(x, y));
    state.SetComplexityN(n);
}
BENCHMARK(BM_KendallTau)->RangeMultiplier(4)->Range(1024, 262144)->Complexity();

void BM_KsUniform(benchmark::State& state) {
    const auto n = state.range(0);
    Rng rng(22);
    std::vector<double> u(static_cast<std::size_t>(n));
    for (auto& v : u) v = rng.uniform();
    for (auto _ : state) benchmark::DoNotOptimize(ks_uniform(u));
}
BENCHMARK(BM_KsUniform)->Arg(10000)->Arg(100000);

} // namespace

BENCHMARK_MAIN();
