#include <benchmark/benchmark.h>

#include <gqsvt/engine.hpp>

using namespace gqsvt;

namespace {

MatrixXd random_matrix(long n) {
    CounterRng rng(7);
    MatrixXd a(n, n);
    for (long i = 0; i < a.size(); ++i) a.data()[i] = rng.next_normal();
    return a / (a.norm() * 1.01);
}

MonomialPoly random_target(int degree) {
    CounterRng rng(11);
    std::vector<double> c(static_cast<std::size_t>(degree) + 1);
    for (auto& x : c) x = rng.next_normal();
    return MonomialPoly(c);
}

// args: n, polynomial degree
void BM_ExtractBlock(benchmark::State& state) {
    const auto enc = build_standard_encoding(random_matrix(state.range(0)), 1.0);
    const ProgramExecutor exec(enc);
    const auto prog = make_program(random_target(static_cast<int>(state.range(1))), false);
    for (auto _ : state) benchmark::DoNotOptimize(exec.extract_block(prog));
}
BENCHMARK(BM_ExtractBlock)->ArgsProduct({{4, 16, 64}, {4, 16}})->Unit(benchmark::kMicrosecond);

void BM_ApplyToState(benchmark::State& state) {
    const long n = state.range(0);
    const auto enc = build_standard_encoding(random_matrix(n), 1.0);
    const ProgramExecutor exec(enc);
    const auto prog = make_program(random_target(static_cast<int>(state.range(1))), false);
    const VectorXc phi = VectorXc::Ones(n) / std::sqrt(static_cast<double>(n));
    for (auto _ : state) {
        MatrixXc s = exec.prepare(phi);
        exec.run(prog, s);
        benchmark::DoNotOptimize(s.data());
    }
}
BENCHMARK(BM_ApplyToState)->ArgsProduct({{4, 16, 64}, {4, 16}})->Unit(benchmark::kMicrosecond);

void BM_ComposeDense(benchmark::State& state) {
    const auto enc = build_standard_encoding(random_matrix(state.range(0)), 1.0);
    const auto prog = make_program(random_target(4), false);
    for (auto _ : state) benchmark::DoNotOptimize(compose_program(prog, enc));
}
BENCHMARK(BM_ComposeDense)->Arg(4)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_MakeProgram(benchmark::State& state) {
    const auto f = random_target(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(make_program(f, false));
}
BENCHMARK(BM_MakeProgram)->Arg(4)->Arg(16)->Arg(32)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
