#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <gqsvt/block_encoding.hpp>

using namespace gqsvt;

namespace {

MatrixXd random_matrix(long n, unsigned seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    MatrixXd a(n, n);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) a(i, j) = nd(gen);
    return a;
}

double unitarity(const MatrixXc& u) {
    return (u.adjoint() * u - MatrixXc::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

double largest_singular_value(const MatrixXd& a) {
    // power iteration on A^T A, independent of the library SVD
    VectorXd v = VectorXd::Ones(a.cols()).normalized();
    for (int i = 0; i < 2000; ++i) v = (a.transpose() * (a * v)).normalized();
    return (a * v).norm();
}

}  // namespace

TEST(Encoding, OneByOne) {
    MatrixXd a(1, 1);
    a << 0.5;
    const auto enc = build_standard_encoding(a, 1.0);
    const double s = std::sqrt(0.75);
    EXPECT_NEAR(enc.unitary(0, 0).real(), 0.5, 1e-15);
    EXPECT_NEAR(enc.unitary(0, 1).real(), s, 1e-15);
    EXPECT_NEAR(enc.unitary(1, 0).real(), s, 1e-15);
    EXPECT_NEAR(enc.unitary(1, 1).real(), -0.5, 1e-15);
}

TEST(Encoding, Identity) {
    const auto enc = build_standard_encoding(MatrixXd::Identity(2, 2), 1.0);
    MatrixXc expect = MatrixXc::Zero(4, 4);
    expect.diagonal() << 1.0, 1.0, -1.0, -1.0;
    EXPECT_LT((enc.unitary - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Encoding, BlockReadBack) {
    const MatrixXd a = random_matrix(8, 1);
    const double alpha = 2.0 * largest_singular_value(a);
    const auto enc = build_standard_encoding(a, alpha);
    const MatrixXc block = enc.unitary.topLeftCorner(8, 8);
    EXPECT_LT((block - (a / alpha).cast<cplx>()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(unitarity(enc.unitary), 1e-12);
    const auto chk = verify_block_encoding(enc);
    EXPECT_LT(std::max(chk.block_residual, chk.unitarity_residual), 1e-12);
    for (long k = 0; k < enc.svd.sigma.size(); ++k) {
        EXPECT_GE(enc.svd.sigma(k), 0.0);
        EXPECT_LE(enc.svd.sigma(k), 1.0);
    }
}

TEST(Encoding, PerturbationIsDetected) {
    const MatrixXd a = random_matrix(4, 2);
    auto enc = build_standard_encoding(a, largest_singular_value(a) * 1.1);
    enc.unitary(1, 2) += 1e-3;
    const auto chk = verify_block_encoding(enc);
    EXPECT_GE(std::max(chk.block_residual, chk.unitarity_residual), 5e-4);
}

TEST(Encoding, ScaleCovariance) {
    const MatrixXd a = random_matrix(4, 3);
    const double alpha = 3.0 * largest_singular_value(a);
    const auto e1 = build_standard_encoding(a, alpha);
    const auto e2 = build_standard_encoding(a / alpha, 1.0);
    EXPECT_LT((e1.unitary - e2.unitary).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Encoding, Errors) {
    try {
        build_standard_encoding(random_matrix(3, 1), 100.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Shape);
    }
    const MatrixXd a = random_matrix(4, 4);
    try {
        build_standard_encoding(a, 0.5 * largest_singular_value(a));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Scale);
    }
}

TEST(Encoding, RankDeficientStaysUnitary) {
    MatrixXd a = random_matrix(4, 5);
    a.col(3) = a.col(0) + a.col(1);
    const auto enc = build_standard_encoding(a, 1.01 * largest_singular_value(a));
    EXPECT_LT(unitarity(enc.unitary), 1e-12);
}

TEST(Encoding, SvdSignConvention) {
    const auto svd = sorted_svd(random_matrix(8, 6));
    for (long k = 0; k < svd.right.cols(); ++k) {
        if (k > 0) EXPECT_GE(svd.sigma(k - 1), svd.sigma(k));
        for (long i = 0; i < svd.right.rows(); ++i) {
            if (std::abs(svd.right(i, k)) > 1e-12) {
                EXPECT_GT(svd.right(i, k), 0.0);
                break;
            }
        }
    }
}

TEST(Embedding, MultiAncillaBlock) {
    const MatrixXd a = random_matrix(4, 7);
    const auto base = build_standard_encoding(a, 1.2 * largest_singular_value(a));
    for (int anc : {2, 3}) {
        const auto enc = embed_encoding(base, anc, 11);
        EXPECT_EQ(enc.dim(), (1L << anc) * 4);
        EXPECT_LT(unitarity(enc.unitary), 1e-12);
        EXPECT_LT((enc.unitary.topLeftCorner(4, 4) - base.scaled().cast<cplx>()).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Qubitize, OneByOneWalk) {
    MatrixXd a(1, 1);
    a << 0.5;
    const auto pair = qubitize(build_standard_encoding(a, 1.0));
    const double s = std::sqrt(0.75);
    EXPECT_NEAR(pair.w(0, 0).real(), 0.5, 1e-15);
    EXPECT_NEAR(pair.w(0, 1).real(), s, 1e-15);
    EXPECT_NEAR(pair.w(1, 0).real(), -s, 1e-15);
    EXPECT_NEAR(pair.w(1, 1).real(), 0.5, 1e-15);
    Eigen::ComplexEigenSolver<MatrixXc> es(pair.w);
    for (long i = 0; i < 2; ++i) EXPECT_NEAR(std::abs(std::arg(es.eigenvalues()(i))), kPi / 3, 1e-12);
}

TEST(Qubitize, DefinitionAndUnitarity) {
    const MatrixXd a = random_matrix(8, 8);
    const auto enc = build_standard_encoding(a, 1.05 * largest_singular_value(a));
    const auto pair = qubitize(enc);
    VectorXc refl = VectorXc::Constant(16, -1.0);
    refl.head(8).setOnes();
    EXPECT_LT((pair.w - refl.asDiagonal() * enc.unitary).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LT((pair.wt - refl.asDiagonal() * enc.unitary.adjoint()).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LT(unitarity(pair.w), 1e-12);
    EXPECT_LT(unitarity(pair.wt), 1e-12);
    EXPECT_LT(pair.structure_residual, 1e-10);
}

TEST(Qubitize, PlaneRotationsMatchSingularValues) {
    const MatrixXd a = random_matrix(4, 9);
    const auto enc = build_standard_encoding(a, 1.1 * largest_singular_value(a));
    const auto pair = qubitize(enc);
    const Eigen::JacobiSVD<MatrixXd> svd(enc.scaled(), Eigen::ComputeFullU | Eigen::ComputeFullV);
    for (long k = 0; k < 4; ++k) {
        const VectorXd v = svd.matrixV().col(k), w = svd.matrixU().col(k);
        // the 2x2 action of W from the v-plane to the w-plane
        Eigen::Matrix2cd block;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) {
                VectorXc in = VectorXc::Zero(8), out = VectorXc::Zero(8);
                in.segment(c * 4, 4) = v.cast<cplx>();
                out.segment(r * 4, 4) = w.cast<cplx>();
                block(r, c) = out.dot(pair.w * in);
            }
        Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(block);
        const double eta = std::acos(svd.singularValues()(k));
        std::vector<double> args{std::arg(es.eigenvalues()(0)), std::arg(es.eigenvalues()(1))};
        std::sort(args.begin(), args.end());
        EXPECT_NEAR(args[0], -eta, 1e-10);
        EXPECT_NEAR(args[1], eta, 1e-10);
    }
}

TEST(Controlled, StructureAndUnitarity) {
    const MatrixXd a = random_matrix(4, 10);
    const auto enc = build_standard_encoding(a, 1.1 * largest_singular_value(a));
    const auto pair = qubitize(enc);
    const auto ops = build_controlled_ops(enc, pair);
    const long d = enc.dim();
    const MatrixXc id = MatrixXc::Identity(d, d);
    auto diag2 = [&](const MatrixXc& top, const MatrixXc& bottom) {
        MatrixXc m = MatrixXc::Zero(2 * d, 2 * d);
        m.topLeftCorner(d, d) = top;
        m.bottomRightCorner(d, d) = bottom;
        return m;
    };
    EXPECT_LT((ops.m - diag2(pair.w, id)).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LT((ops.mt - diag2(pair.wt, id)).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LT((ops.n - diag2(id, pair.w.adjoint())).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LT((ops.nt - diag2(id, pair.wt.adjoint())).cwiseAbs().maxCoeff(), 1e-13);
    for (const MatrixXc* m : {&ops.m, &ops.mt, &ops.n, &ops.nt}) EXPECT_LT(unitarity(*m), 1e-12);
    EXPECT_LT(ops.eigen_residual, 1e-10);
}

TEST(Controlled, PhaseOnOmegaPlus) {
    MatrixXd a(1, 1);
    a << 0.5;
    const auto enc = build_standard_encoding(a, 1.0);
    const auto ops = build_controlled_ops(enc, qubitize(enc));
    // |0>_c |omega_+>, omega_+ = (|0> + i|1>)/sqrt 2
    VectorXc in = VectorXc::Zero(4);
    in(0) = 1.0 / std::sqrt(2.0);
    in(1) = cplx{0.0, 1.0} / std::sqrt(2.0);
    const VectorXc out = ops.m * in;
    const cplx ratio = in.dot(out);
    EXPECT_NEAR(std::abs(ratio), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(std::arg(ratio)), kPi / 3, 1e-12);
}

TEST(Controlled, FullIdentityForUnitSingularValues) {
    const auto enc = build_standard_encoding(MatrixXd::Identity(2, 2), 1.0);
    const auto ops = build_controlled_ops(enc, qubitize(enc));
    // on the ancilla-0 subspace W acts as identity since eta = 0
    for (const MatrixXc* m : {&ops.m, &ops.mt, &ops.n, &ops.nt}) {
        for (long i : {0L, 1L, 4L, 5L}) EXPECT_LT(std::abs((*m)(i, i) - 1.0), 1e-15);
    }
}

TEST(PiZ, TrivialAndRandomEncodings) {
    MatrixXd a(1, 1);
    a << 0.3;
    EXPECT_LE(pi_z_identity_check(build_standard_encoding(a, 1.0)).residual(), 1e-13);
    const MatrixXd r = random_matrix(4, 12);
    const auto base = build_standard_encoding(r, 1.1 * largest_singular_value(r));
    for (int anc : {1, 2, 3}) {
        const auto enc = anc == 1 ? base : embed_encoding(base, anc, 5);
        EXPECT_LE(pi_z_identity_check(enc).residual(), 1e-12) << "ancillas " << anc;
    }
}

TEST(PiZ, SwappedProjectorFails) {
    const MatrixXd r = random_matrix(4, 13);
    const auto enc = build_standard_encoding(r, 1.1 * largest_singular_value(r));
    const VectorXd swapped = VectorXd::Ones(enc.dim()) - enc.left_projector;
    EXPECT_GE(pi_z_identity_check(enc, swapped).residual(), 1.0);
}

TEST(PiZ, TooManyAncillas) {
    const MatrixXd r = random_matrix(2, 14);
    const auto enc = embed_encoding(build_standard_encoding(r, 1.1 * largest_singular_value(r)), 4, 1);
    EXPECT_THROW(pi_z_identity_check(enc), Error);
}
