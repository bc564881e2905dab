#include <benchmark/benchmark.h>

#include "haxc/density.hpp"
#include "haxc/rng.hpp"

using namespace haxc;

namespace {

void BM_AxcLogDensityGeneric(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const auto psi = Generator::clayton(1.0);
    const Stdf l(stdf::Gumbel{d, 0.5});
    Rng rng(11);
    std::vector<double> u(static_cast<std::size_t>(d));
    for (auto& v : u) v = rng.uniform(0.1, 0.9);
    for (auto _ : state) benchmark::DoNotOptimize(axc_log_density(psi, l, u));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AxcLogDensityGeneric)->DenseRange(2, 10, 2)->Complexity();

void BM_GumbelFastPath(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    const auto psi = Generator::clayton(1.0);
    Rng rng(12);
    std::vector<double> u(static_cast<std::size_t>(d));
    for (auto& v : u) v = rng.uniform(0.1, 0.9);
    for (auto _ : state) benchmark::DoNotOptimize(gumbel_stdf_log_density(psi, 0.5, u));
}
BENCHMARK(BM_GumbelFastPath)->DenseRange(2, 12, 2);

void BM_PartitionScan(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    for (auto _ : state) {
        long long count = 0;
        partitions::for_each(d, [&](std::span<const std::uint64_t>, int) { ++count; });
        benchmark::DoNotOptimize(count);
    }
}
BENCHMARK(BM_PartitionScan)->DenseRange(6, 12, 2);

} // namespace
