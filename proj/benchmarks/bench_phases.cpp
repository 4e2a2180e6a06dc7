#include <benchmark/benchmark.h>

#include <gqsvt/phase.hpp>

using namespace gqsvt;

namespace {

UnitCirclePoly random_poly(int degree, std::uint64_t seed) {
    CounterRng rng(seed);
    std::vector<cplx> c(static_cast<std::size_t>(degree) + 1);
    for (auto& x : c) x = {rng.next_normal(), rng.next_normal()};
    UnitCirclePoly p(c);
    const double mx = max_on_circle(p);
    for (auto& x : p.coeffs) x *= 0.99 / mx;
    return p;
}

void BM_ComplementaryPoly(benchmark::State& state) {
    const auto p = random_poly(static_cast<int>(state.range(0)), 1);
    for (auto _ : state) benchmark::DoNotOptimize(complementary_poly(p));
}
BENCHMARK(BM_ComplementaryPoly)->RangeMultiplier(2)->Range(8, 128)->Unit(benchmark::kMicrosecond);

void BM_SolvePhases(benchmark::State& state) {
    const auto p = random_poly(static_cast<int>(state.range(0)), 2);
    for (auto _ : state) benchmark::DoNotOptimize(solve_phases(p));
}
BENCHMARK(BM_SolvePhases)->RangeMultiplier(2)->Range(8, 128)->Unit(benchmark::kMicrosecond);

void BM_RefinePhases(benchmark::State& state) {
    const auto p = random_poly(static_cast<int>(state.range(0)), 3);
    SolveOptions opt;
    opt.force_fallback = true;
    for (auto _ : state) benchmark::DoNotOptimize(solve_phases(p, opt));
}
BENCHMARK(BM_RefinePhases)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
