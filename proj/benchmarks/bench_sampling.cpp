#include <benchmark/benchmark.h>

#include "haxc/archimax.hpp"

using namespace haxc;

namespace {

FrailtyTree clayton_two_level(double t0, double t1, double t2, int d1, int d2) {
    std::vector<TreeNode> nodes;
    nodes.push_back({"root", -1, {{"theta", t0}}, {}});
    nodes.push_back({"s1", 0, {{"theta", t1}}, {}});
    nodes.push_back({"s2", 0, {{"theta", t2}}, {}});
    std::vector<std::string> leaves;
    for (int j = 0; j < d1 + d2; ++j) {
        nodes.push_back({"x" + std::to_string(j + 1), j < d1 ? 1 : 2, {}, {}});
        leaves.push_back("x" + std::to_string(j + 1));
    }
    return FrailtyTree(HierarchyTree(nodes, leaves), GenFamily::Clayton);
}

void BM_PositiveStable(benchmark::State& state) {
    Rng rng(1);
    for (auto _ : state) benchmark::DoNotOptimize(sample_positive_stable(0.5, rng));
}
BENCHMARK(BM_PositiveStable);

void BM_TiltedStable(benchmark::State& state) {
    Rng rng(2);
    const double h = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(sample_tilted_stable(0.375, h, rng));
}
BENCHMARK(BM_TiltedStable)->Arg(1)->Arg(4)->Arg(16);

void BM_AxcRow(benchmark::State& state) {
    const auto psi = Generator::clayton(4.0 / 3.0);
    const EvcModel evc_m(evc::GumbelExact{5, 0.5});
    std::uint64_t row = 0;
    for (auto _ : state) {
        auto rngs = RowRngs::for_row(3, row++);
        benchmark::DoNotOptimize(sample_axc_row(psi, evc_m, rngs));
    }
}
BENCHMARK(BM_AxcRow);

void BM_HaxcRow(benchmark::State& state) {
    const auto ft = clayton_two_level(0.5, 4.0 / 3.0, 3.0, 2, 3);
    const EvcModel evc_m(evc::GumbelExact{5, 0.5});
    std::uint64_t row = 0;
    for (auto _ : state) {
        auto rngs = RowRngs::for_row(4, row++);
        benchmark::DoNotOptimize(sample_haxc_row(ft, evc_m, rngs));
    }
}
BENCHMARK(BM_HaxcRow);

void BM_SpectralMaxStable(benchmark::State& state) {
    const EvcModel m(evc::Spectral{DnormGenerator(dnorm::GumbelFrechet{5, 0.5}),
                                   {evc::Truncation::Mode::Fixed, state.range(0)}});
    Rng rng(5);
    std::vector<double> out(5);
    for (auto _ : state) {
        m.draw_row(rng, out);
        benchmark::DoNotOptimize(out.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SpectralMaxStable)->Arg(100)->Arg(1000)->Complexity();

} // namespace
