#include <benchmark/benchmark.h>

#include <gqsvt/bicg.hpp>

using namespace gqsvt;

namespace {

MatrixXd spd(long n) {
    CounterRng rng(3);
    MatrixXd g(n, n);
    for (long i = 0; i < g.size(); ++i) g.data()[i] = rng.next_normal();
    const MatrixXd q = Eigen::HouseholderQR<MatrixXd>(g).householderQ();
    VectorXd eig = VectorXd::LinSpaced(n, 0.2, 1.0);
    return q * eig.asDiagonal() * q.transpose();
}

void BM_ClassicalBicg(benchmark::State& state) {
    const long n = state.range(0);
    const MatrixXd a = spd(n);
    const VectorXd b = VectorXd::Ones(n);
    for (auto _ : state) benchmark::DoNotOptimize(classical_bicg(a, b, 1e-10, static_cast<int>(n)));
}
BENCHMARK(BM_ClassicalBicg)->Arg(8)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

// A fixed number of quantum iterations; the range is the iteration count.
void BM_QuantumBicg(benchmark::State& state) {
    const MatrixXd a = spd(8);
    const VectorXd b = VectorXd::Ones(8);
    QuantumOptions opt;
    opt.diagnostics = false;
    opt.mode = state.range(1) ? InnerProductMode::Oracle : InnerProductMode::Exact;
    for (auto _ : state) benchmark::DoNotOptimize(quantum_bicg(a, b, 0.0, static_cast<int>(state.range(0)), opt));
    state.SetLabel(state.range(1) ? "oracle" : "exact");
}
BENCHMARK(BM_QuantumBicg)->ArgsProduct({{2, 4, 6}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_LanczosBound(benchmark::State& state) {
    const long n = state.range(0);
    const MatrixXd a = spd(n);
    const VectorXd b = VectorXd::Ones(n);
    for (auto _ : state) {
        const auto lz = lanczos_tridiagonalize(a, b, static_cast<int>(n));
        benchmark::DoNotOptimize(convergence_bound(lz));
    }
}
BENCHMARK(BM_LanczosBound)->Arg(8)->Arg(32)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
