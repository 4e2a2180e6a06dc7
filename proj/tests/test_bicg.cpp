#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include <gqsvt/bicg.hpp>

using namespace gqsvt;

namespace {

MatrixXd orthogonal(long n, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    MatrixXd g(n, n);
    for (long i = 0; i < n * n; ++i) g.data()[i] = nd(gen);
    return Eigen::HouseholderQR<MatrixXd>(g).householderQ();
}

MatrixXd spd_with_spectrum(const VectorXd& eig, unsigned seed) {
    const MatrixXd q = orthogonal(eig.size(), seed);
    MatrixXd a = q * eig.asDiagonal() * q.transpose();
    return 0.5 * (a + a.transpose());
}

// Well-conditioned nonsymmetric: identity plus a small random part.
MatrixXd nonsymmetric(long n, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    MatrixXd a = MatrixXd::Identity(n, n);
    for (long i = 0; i < n * n; ++i) a.data()[i] += 0.3 * nd(gen) / std::sqrt(static_cast<double>(n));
    return a;
}

VectorXd random_vector(long n, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    VectorXd v(n);
    for (long i = 0; i < n; ++i) v(i) = nd(gen);
    return v;
}

VectorXd apply_powers(const MatrixXd& a, const std::vector<double>& c, const VectorXd& b) {
    VectorXd out = VectorXd::Zero(b.size()), pw = b;
    for (double x : c) {
        out += x * pw;
        pw = a * pw;
    }
    return out;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST(ClassicalBicg, IdentityConvergesInOneStep) {
    const VectorXd b = random_vector(5, 1);
    const auto res = classical_bicg(MatrixXd::Identity(5, 5), b, 1e-12, 10);
    EXPECT_TRUE(res.converged);
    ASSERT_EQ(res.trace.size(), 1u);
    EXPECT_EQ(res.trace[0].j, 0);
    EXPECT_NEAR(res.trace[0].alpha, 1.0, 1e-15);
    EXPECT_LT((res.x - b).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(ClassicalBicg, DiagonalTwoByTwo) {
    MatrixXd a = MatrixXd::Zero(2, 2);
    a(0, 0) = 1.0;
    a(1, 1) = 2.0;
    const auto res = classical_bicg(a, VectorXd::Ones(2), 1e-12, 2);
    EXPECT_TRUE(res.converged);
    EXPECT_LE(res.iterations, 2);
    EXPECT_NEAR(res.x(0), 1.0, 1e-12);
    EXPECT_NEAR(res.x(1), 0.5, 1e-12);
}

TEST(ClassicalBicg, NonsymmetricResidualBelowTolerance) {
    const MatrixXd a = nonsymmetric(16, 2);
    const VectorXd b = random_vector(16, 3);
    const auto res = classical_bicg(a, b, 1e-10, 100);
    EXPECT_TRUE(res.converged);
    EXPECT_LE((b - a * res.x).norm(), 1e-10 * 1.01);
    EXPECT_LT((res.x - a.partialPivLu().solve(b)).norm(), 1e-8);
}

TEST(ClassicalBicg, RecurrenceHoldsAsComputed) {
    const MatrixXd a = nonsymmetric(8, 4);
    const VectorXd b = random_vector(8, 5);
    const auto res = classical_bicg(a, b, 1e-12, 30);
    for (std::size_t j = 0; j + 1 < res.residuals.size(); ++j) {
        const VectorXd dx = res.solutions[j + 1] - res.solutions[j];
        const VectorXd want = res.residuals[j] - a * dx;
        EXPECT_LE((res.residuals[j + 1] - want).norm(), 1e-12 * std::max(1.0, res.residuals[j].norm()));
    }
}

TEST(ClassicalBicg, BreakdownReportsIteration) {
    MatrixXd a(2, 2);
    a << 0.0, 1.0, 1.0, 0.0;
    VectorXd b = VectorXd::Zero(2);
    b(0) = 1.0;
    try {
        classical_bicg(a, b, 1e-12, 10);
        FAIL();
    } catch (const BreakdownError& e) {
        EXPECT_EQ(e.iteration(), 0);
    }
    const auto partial = classical_bicg(a, b, 1e-12, 10, false);
    EXPECT_EQ(partial.breakdown_iteration, 0);
    EXPECT_FALSE(partial.converged);
}

TEST(Coefficients, FirstStep) {
    BicgCoefficients c;
    coefficient_update(c, 0.7, 0.3);
    EXPECT_EQ(c.j, 1);
    ASSERT_EQ(c.gamma.size(), 2u);
    EXPECT_EQ(c.gamma[0], 1.0);
    EXPECT_EQ(c.gamma[1], -0.7);
    ASSERT_EQ(c.rho.size(), 2u);
    EXPECT_DOUBLE_EQ(c.rho[0], 1.3);
    EXPECT_EQ(c.rho[1], -0.7);
    ASSERT_EQ(c.chi.size(), 1u);
    EXPECT_EQ(c.chi[0], 0.7);
}

TEST(Coefficients, OrderIsEnforced) {
    BicgCoefficients c;
    advance_residual(c, 0.5);
    EXPECT_THROW(advance_residual(c, 0.5), Error);
}

TEST(Coefficients, PolynomialsReproduceIterates) {
    VectorXd eig(8);
    for (long i = 0; i < 8; ++i) eig(i) = 0.2 + 0.1 * static_cast<double>(i);
    const MatrixXd spd = spd_with_spectrum(eig, 6);
    for (const MatrixXd& a : {spd, nonsymmetric(16, 7)}) {
        const VectorXd b = random_vector(a.rows(), 8);
        const auto res = classical_bicg(a, b, 0.0, 6, false);
        for (std::size_t j = 0; j < res.tables.size(); ++j) {
            const auto& t = res.tables[j];
            const VectorXd r = apply_powers(a, t.gamma, b);
            EXPECT_LE((r - res.residuals[j]).norm(), 1e-10 * res.residuals[j].norm()) << "j = " << j;
            if (j > 0) {
                const VectorXd x = apply_powers(a, t.chi, b);
                EXPECT_LE((x - res.solutions[j]).norm(), 1e-10 * res.solutions[j].norm()) << "j = " << j;
            }
            EXPECT_EQ(t.gamma[0], 1.0);
            for (std::size_t l = 1; l < t.gamma.size(); ++l) EXPECT_EQ(t.gamma[l], -t.chi[l - 1]);
        }
    }
}

TEST(ClassicalBicg, Biorthogonality) {
    for (unsigned seed = 0; seed < 5; ++seed) {
        const MatrixXd a = nonsymmetric(8, 20 + seed);
        const VectorXd b = random_vector(8, 30 + seed);
        const auto res = classical_bicg(a, b, 0.0, 5, false);
        // shadow residuals are the same polynomials in A^T
        const MatrixXd at = a.transpose();
        for (std::size_t i = 0; i < res.tables.size(); ++i) {
            const VectorXd rs = apply_powers(at, res.tables[i].gamma, b);
            for (std::size_t j = 0; j < res.residuals.size(); ++j) {
                if (i == j) continue;
                EXPECT_LE(std::abs(rs.dot(res.residuals[j])), 1e-6 * rs.norm() * res.residuals[j].norm());
            }
        }
    }
}

TEST(QuantumBicg, IdentityStopsImmediately) {
    const VectorXd b = random_vector(4, 9);
    const auto res = quantum_bicg(MatrixXd::Identity(4, 4), b, 1e-8, 10);
    EXPECT_TRUE(res.converged);
    EXPECT_EQ(res.iterations, 1);
    EXPECT_LT((res.x - b).norm(), 1e-8 * b.norm());
    EXPECT_EQ(res.depth.k, 0);
    EXPECT_EQ(res.depth.max_degree, 1);
    EXPECT_EQ(res.depth.max_controlled, 2);
    EXPECT_EQ(res.depth.max_rotations, 3);
    EXPECT_TRUE(res.depth.consistent);
}

TEST(QuantumBicg, ExactAgreesWithOracle) {
    VectorXd eig(8);
    for (long i = 0; i < 8; ++i) eig(i) = 0.2 + 0.8 * static_cast<double>(i) / 7.0;
    const MatrixXd a = spd_with_spectrum(eig, 10);
    const VectorXd b = random_vector(8, 11);
    QuantumOptions exact, oracle;
    oracle.mode = InnerProductMode::Oracle;
    exact.diagnostics = oracle.diagnostics = false;
    const auto e = quantum_bicg(a, b, 1e-6, 6, exact);
    const auto o = quantum_bicg(a, b, 1e-6, 6, oracle);
    ASSERT_EQ(e.trace.size(), o.trace.size());
    for (std::size_t j = 0; j < e.trace.size(); ++j) {
        EXPECT_NEAR(e.trace[j].alpha, o.trace[j].alpha, 1e-10 * std::abs(o.trace[j].alpha));
        if (!std::isnan(o.trace[j].beta)) EXPECT_NEAR(e.trace[j].beta, o.trace[j].beta, 1e-10 * std::abs(o.trace[j].beta));
    }
}

TEST(QuantumBicg, SpdScalarsFollowClassical) {
    VectorXd eig(8);
    for (long i = 0; i < 8; ++i) eig(i) = 0.2 + 0.8 * static_cast<double>(i) / 7.0;
    const MatrixXd a = spd_with_spectrum(eig, 12);
    const VectorXd b = random_vector(8, 13);
    const auto q = quantum_bicg(a, b, 0.0, 4);
    const auto c = classical_bicg(a / q.scale, b / b.norm(), 0.0, 4, false);
    ASSERT_EQ(q.trace.size(), 4u);
    for (std::size_t j = 0; j < 4; ++j) {
        EXPECT_LE(rel(q.trace[j].alpha, c.trace[j].alpha), 1e-6);
        EXPECT_LE(rel(q.trace[j].rnorm_est, c.trace[j].rnorm_est), 1e-6);
        if (j < 3) EXPECT_LE(rel(q.trace[j].beta, c.trace[j].beta), 1e-6);
        EXPECT_LT(q.trace[j].gap_circuit, 1e-8);
    }
}

TEST(QuantumBicg, SolutionMatchesDirectSolve) {
    VectorXd eig(8);
    for (long i = 0; i < 8; ++i) eig(i) = 1.0 + static_cast<double>(i);
    const MatrixXd a = spd_with_spectrum(eig, 14);
    const VectorXd b = random_vector(8, 15);
    const auto q = quantum_bicg(a, b, 1e-7, 20);
    ASSERT_TRUE(q.converged);
    EXPECT_LT((a * q.x - b).norm(), 1e-5 * b.norm());
    EXPECT_TRUE(q.depth.consistent);
    // reported counts equal the tallies of the programs actually built
    for (const auto& it : q.trace) {
        EXPECT_EQ(it.controlled, 2 * it.degree);
        EXPECT_EQ(it.rotations, 2 * it.degree + 1);
    }
}

TEST(QuantumBicg, SampledIsDeterministic) {
    VectorXd eig(4);
    eig << 0.3, 0.5, 0.8, 1.0;
    const MatrixXd a = spd_with_spectrum(eig, 16);
    const VectorXd b = random_vector(4, 17);
    QuantumOptions opt;
    opt.mode = InnerProductMode::Sampled;
    opt.shots = 20000;
    opt.seed = 5;
    const auto r1 = quantum_bicg(a, b, 1e-3, 3, opt);
    const auto r2 = quantum_bicg(a, b, 1e-3, 3, opt);
    ASSERT_EQ(r1.trace.size(), r2.trace.size());
    for (std::size_t j = 0; j < r1.trace.size(); ++j) EXPECT_EQ(r1.trace[j].alpha, r2.trace[j].alpha);
    EXPECT_GT(r1.total_shots, 0);
    opt.shots = 0;
    EXPECT_THROW(quantum_bicg(a, b, 1e-3, 3, opt), Error);
}

TEST(DepthReport, Formula) {
    std::vector<BicgIteration> trace(5);
    for (int j = 0; j < 5; ++j) {
        trace[j].j = j;
        trace[j].degree = j + 1;
        trace[j].controlled = 2 * (j + 1);
        trace[j].rotations = 2 * (j + 1) + 1;
    }
    const auto d = depth_report(trace);
    EXPECT_EQ(d.k, 4);
    EXPECT_EQ(d.max_degree, 5);
    EXPECT_EQ(d.max_controlled, 10);
    EXPECT_EQ(d.max_rotations, 11);
    EXPECT_TRUE(d.consistent);
    trace[4].controlled = 9;
    EXPECT_FALSE(depth_report(trace).consistent);
}

TEST(Lanczos, SymmetricGivesSymmetricT) {
    VectorXd eig(8);
    for (long i = 0; i < 8; ++i) eig(i) = 1.0 + static_cast<double>(i);
    const MatrixXd a = spd_with_spectrum(eig, 18);
    const auto lz = lanczos_tridiagonalize(a, random_vector(8, 19), 6);
    const MatrixXd t = lz.t();
    EXPECT_LT((t - t.transpose()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Lanczos, IdentityStopsAtOne) {
    const auto lz = lanczos_tridiagonalize(MatrixXd::Identity(6, 6), random_vector(6, 20), 6);
    EXPECT_EQ(lz.k, 1);
    EXPECT_TRUE(lz.invariant);
    EXPECT_NEAR(lz.mu(0), 1.0, 1e-15);
}

TEST(Lanczos, RelationsOnRandomMatrix) {
    const MatrixXd a = nonsymmetric(16, 21);
    const auto lz = lanczos_tridiagonalize(a, random_vector(16, 22), 8);
    const auto chk = check_lanczos(a, lz);
    EXPECT_LE(chk.forward, 1e-8);
    EXPECT_LE(chk.transpose, 1e-8);
    EXPECT_LE(chk.biorthogonality, 1e-10);
    for (int j = 0; j < lz.k; ++j) {
        EXPECT_NEAR(lz.v.col(j).norm(), 1.0, 1e-12);
        EXPECT_NEAR(lz.w.col(j).norm(), 1.0, 1e-12);
    }
}

TEST(Lanczos, RejectsBadDimension) {
    EXPECT_THROW(lanczos_tridiagonalize(MatrixXd::Identity(4, 4), VectorXd::Ones(4), 5), Error);
    EXPECT_THROW(lanczos_tridiagonalize(MatrixXd::Identity(4, 4), VectorXd::Zero(4), 2), Error);
}

TEST(Bound, IdentityGivesZero) {
    const auto lz = lanczos_tridiagonalize(MatrixXd::Identity(4, 4), VectorXd::Ones(4), 4);
    const auto bound = convergence_bound(lz);
    EXPECT_EQ(bound.ratio, 0.0);
    EXPECT_EQ(bound.factor(1), 0.0);
}

TEST(Bound, RealIntervalClosedForm) {
    VectorXd eig(8);
    for (long i = 0; i < 8; ++i) eig(i) = 1.0 + static_cast<double>(i) / 7.0;
    const MatrixXd a = spd_with_spectrum(eig, 23);
    const auto lz = lanczos_tridiagonalize(a, random_vector(8, 24), 8);
    const auto bound = convergence_bound(lz);
    // Chebyshev rate on [1, 2]: (sqrt(k) - 1) / (sqrt(k) + 1) with k = 2
    const double expect = (std::sqrt(2.0) - 1.0) / (std::sqrt(2.0) + 1.0);
    EXPECT_NEAR(bound.ratio, expect, 1e-8);
    EXPECT_NEAR(bound.ellipse.center, 1.5, 1e-8);
    EXPECT_NEAR(bound.ellipse.focal.real(), 0.5, 1e-8);
}

TEST(Bound, ComplexEllipseRatio) {
    Ellipse e;
    e.center = 2.0;
    e.focal = cplx{0.0, 1.0};
    // |(d - l) + sqrt((d - l)^2 - c^2)| / |d + sqrt(d^2 - c^2)| with l = 1
    const double expect = (1.0 + std::sqrt(2.0)) / (2.0 + std::sqrt(5.0));
    EXPECT_NEAR(ellipse_ratio(e, cplx{1.0, 0.0}), expect, 1e-12);
}

TEST(Bound, HoldsOnSpdSystem) {
    VectorXd eig(8);
    for (long i = 0; i < 8; ++i) eig(i) = 1.0 + 9.0 * static_cast<double>(i) / 7.0;
    const MatrixXd a = spd_with_spectrum(eig, 25);
    const VectorXd b = random_vector(8, 26);
    const auto lz = lanczos_tridiagonalize(a, b, 8);
    const auto bound = convergence_bound(lz);
    const VectorXd xs = a.ldlt().solve(b);
    const auto res = classical_bicg(a, b, 0.0, 8, false);
    const double e0 = error_r_norm(bound, lz, xs);
    ASSERT_GT(e0, 0.0);
    for (std::size_t k = 1; k < res.solutions.size(); ++k) {
        const double ek = error_r_norm(bound, lz, xs - res.solutions[k]);
        EXPECT_LE(ek, bound.factor(static_cast<int>(k)) * e0 * (1 + 1e-8) + 1e-12) << "k = " << k;
    }
}

TEST(Bound, LeftHalfPlaneIsInapplicable) {
    VectorXd eig(4);
    eig << -1.0, 1.0, 2.0, 3.0;
    const MatrixXd a = spd_with_spectrum(eig, 27);
    const auto lz = lanczos_tridiagonalize(a, random_vector(4, 28), 4);
    try {
        convergence_bound(lz);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InapplicableBound);
    }
}

TEST(Divergence, SpdIsTight) {
    VectorXd eig(8);
    for (long i = 0; i < 8; ++i) eig(i) = 0.2 + 0.1 * static_cast<double>(i);
    const MatrixXd a = spd_with_spectrum(eig, 29);
    for (const auto& s : divergence_along_iterates(a, random_vector(8, 30), 4)) {
        EXPECT_LT(s.generalized, 1e-12);
        EXPECT_LT(s.circuit, 1e-8);
    }
}
