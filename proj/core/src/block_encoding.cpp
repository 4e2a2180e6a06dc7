#include "gqsvt/block_encoding.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

namespace gqsvt {

namespace {

constexpr double kStructureTolerance = 1e-10;

double max_abs(const MatrixXc& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

MatrixXc random_unitary(long size, CounterRng& rng) {
    MatrixXc g(size, size);
    for (long i = 0; i < size; ++i)
        for (long j = 0; j < size; ++j) g(i, j) = cplx{rng.next_normal(), rng.next_normal()};
    Eigen::HouseholderQR<MatrixXc> qr(g);
    MatrixXc q = qr.householderQ();
    // fix column phases so the draw is Haar distributed
    const MatrixXc r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (long j = 0; j < size; ++j) {
        const cplx d = r(j, j);
        if (std::abs(d) > 0.0) q.col(j) *= d / std::abs(d);
    }
    return q;
}

// |0><0| x top + |1><1| x bottom
MatrixXc block_diag(const MatrixXc& top, const MatrixXc& bottom) {
    const long d = top.rows();
    MatrixXc out = MatrixXc::Zero(2 * d, 2 * d);
    out.topLeftCorner(d, d) = top;
    out.bottomRightCorner(d, d) = bottom;
    return out;
}

VectorXc kron(const VectorXc& a, const VectorXc& b) {
    VectorXc out(a.size() * b.size());
    for (long i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

VectorXc stack(const VectorXc& top, const VectorXc& bottom) {
    VectorXc out(top.size() + bottom.size());
    out << top, bottom;
    return out;
}

}  // namespace

Svd sorted_svd(const MatrixXd& a) {
    Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Svd out{svd.singularValues(), svd.matrixV(), svd.matrixU()};
    for (long k = 0; k < out.right.cols(); ++k) {
        for (long i = 0; i < out.right.rows(); ++i) {
            const double v = out.right(i, k);
            if (std::abs(v) > 1e-12) {
                if (v < 0.0) {
                    out.right.col(k) *= -1.0;
                    out.left.col(k) *= -1.0;
                }
                break;
            }
        }
    }
    return out;
}

BlockEncoding build_standard_encoding(const MatrixXd& a, double alpha) {
    if (a.rows() != a.cols() || !is_power_of_two(a.rows()))
        throw Error(ErrorKind::Shape, "matrix must be square with a power-of-two dimension");
    if (!(alpha > 0.0)) throw Error(ErrorKind::Scale, "scale must be positive");
    const long n = a.rows();
    BlockEncoding enc;
    enc.matrix = a;
    enc.alpha = alpha;
    enc.ancillas = 1;
    const MatrixXd as = a / alpha;
    enc.svd = sorted_svd(as);
    if (enc.svd.sigma(0) > 1.0 + 1e-12)
        throw Error(ErrorKind::Scale, "spectral norm exceeds the scale: " + std::to_string(enc.svd.sigma(0) * alpha));
    const VectorXd comp = (1.0 - enc.svd.sigma.array().min(1.0).square()).sqrt();
    const MatrixXd s = enc.svd.left * comp.asDiagonal() * enc.svd.right.transpose();

    MatrixXd u(2 * n, 2 * n);
    u << as, s, s, -as;
    enc.unitary = u.cast<cplx>();
    enc.right_projector = VectorXd::Zero(2 * n);
    enc.right_projector.head(n).setOnes();
    enc.left_projector = enc.right_projector;
    return enc;
}

BlockEncoding embed_encoding(const BlockEncoding& base, int ancillas, std::uint64_t seed) {
    if (base.ancillas != 1) throw Error(ErrorKind::Shape, "can only embed a one-ancilla encoding");
    if (ancillas < 1 || ancillas > 8) throw Error(ErrorKind::Shape, "ancilla count out of range");
    const long n = base.n();
    const long na = 1L << ancillas;
    const long dim = na * n;
    CounterRng rng(seed);
    MatrixXc y = MatrixXc::Identity(na, na), z = MatrixXc::Identity(na, na);
    y.bottomRightCorner(na - 1, na - 1) = random_unitary(na - 1, rng);
    z.bottomRightCorner(na - 1, na - 1) = random_unitary(na - 1, rng);

    auto on_ancilla = [n, na, dim](const MatrixXc& g) {
        MatrixXc out = MatrixXc::Zero(dim, dim);
        for (long i = 0; i < na; ++i)
            for (long j = 0; j < na; ++j)
                if (g(i, j) != cplx{0.0}) out.block(i * n, j * n, n, n) = g(i, j) * MatrixXc::Identity(n, n);
        return out;
    };
    MatrixXc inner = MatrixXc::Zero(dim, dim);
    for (long b = 0; b < na / 2; ++b) inner.block(2 * b * n, 2 * b * n, 2 * n, 2 * n) = base.unitary;

    BlockEncoding enc = base;
    enc.ancillas = ancillas;
    enc.unitary = on_ancilla(y) * inner * on_ancilla(z);
    enc.right_projector = VectorXd::Zero(dim);
    enc.right_projector.head(n).setOnes();
    enc.left_projector = enc.right_projector;
    return enc;
}

EncodingCheck verify_block_encoding(const BlockEncoding& enc) {
    const long n = enc.n();
    EncodingCheck out;
    out.block_residual = max_abs(enc.unitary.topLeftCorner(n, n) - enc.scaled().cast<cplx>());
    out.unitarity_residual = max_abs(enc.unitary.adjoint() * enc.unitary - MatrixXc::Identity(enc.dim(), enc.dim()));
    return out;
}

QubitizedPair qubitize(const BlockEncoding& enc) {
    const long n = enc.n();
    const long dim = enc.dim();
    const VectorXc left_sign = (2.0 * enc.left_projector.array() - 1.0).cast<cplx>();
    const VectorXc right_sign = (2.0 * enc.right_projector.array() - 1.0).cast<cplx>();
    QubitizedPair pair;
    pair.w = left_sign.asDiagonal() * enc.unitary;
    pair.wt = right_sign.asDiagonal() * enc.unitary.adjoint();

    const MatrixXc id = MatrixXc::Identity(dim, dim);
    double res = std::max(max_abs(pair.w.adjoint() * pair.w - id), max_abs(pair.wt.adjoint() * pair.wt - id));
    const MatrixXd as = enc.scaled();
    if (enc.ancillas == 1) {
        // direct sum of 2x2 rotations [[s, c], [-c, s]] over the singular triples
        const auto& svd = enc.svd;
        const VectorXd comp = (1.0 - svd.sigma.array().min(1.0).square()).sqrt();
        const MatrixXd diag_part = svd.left * svd.sigma.asDiagonal() * svd.right.transpose();
        const MatrixXd off_part = svd.left * comp.asDiagonal() * svd.right.transpose();
        MatrixXd expect_w(2 * n, 2 * n), expect_wt(2 * n, 2 * n);
        expect_w << diag_part, off_part, -off_part, diag_part;
        expect_wt << diag_part.transpose(), off_part.transpose(), -off_part.transpose(), diag_part.transpose();
        res = std::max({res, max_abs(pair.w - expect_w.cast<cplx>()), max_abs(pair.wt - expect_wt.cast<cplx>())});
    } else {
        res = std::max({res, max_abs(pair.w.topLeftCorner(n, n) - as.cast<cplx>()),
                        max_abs(pair.wt.topLeftCorner(n, n) - as.transpose().cast<cplx>())});
    }
    pair.structure_residual = res;
    if (res > kStructureTolerance)
        throw Error(ErrorKind::Qubitization, "qubitized operator residual " + std::to_string(res));
    return pair;
}

ControlledOperatorSet build_controlled_ops(const BlockEncoding& enc, const QubitizedPair& pair) {
    const long dim = enc.dim();
    const MatrixXc id = MatrixXc::Identity(dim, dim);
    ControlledOperatorSet ops;
    ops.m = block_diag(pair.w, id);
    ops.mt = block_diag(pair.wt, id);
    ops.n = block_diag(id, pair.w.adjoint());
    ops.nt = block_diag(id, pair.wt.adjoint());

    double res = 0.0;
    if (enc.ancillas == 1) {
        const VectorXc zero = VectorXc::Zero(dim);
        const auto& svd = enc.svd;
        for (long k = 0; k < svd.sigma.size(); ++k) {
            const double eta = std::acos(std::clamp(svd.sigma(k), -1.0, 1.0));
            const VectorXc v = svd.right.col(k).cast<cplx>();
            const VectorXc w = svd.left.col(k).cast<cplx>();
            for (double s : {1.0, -1.0}) {
                VectorXc omega(2);
                omega << 1.0 / std::sqrt(2.0), cplx{0.0, s / std::sqrt(2.0)};
                const VectorXc ov = kron(omega, v), ow = kron(omega, w);
                const cplx fwd = std::polar(1.0, s * eta), bwd = std::conj(fwd);
                res = std::max(res, (ops.m * stack(ov, zero) - fwd * stack(ow, zero)).cwiseAbs().maxCoeff());
                res = std::max(res, (ops.mt * stack(ow, zero) - fwd * stack(ov, zero)).cwiseAbs().maxCoeff());
                res = std::max(res, (ops.n * stack(zero, ow) - bwd * stack(zero, ov)).cwiseAbs().maxCoeff());
                res = std::max(res, (ops.nt * stack(zero, ov) - bwd * stack(zero, ow)).cwiseAbs().maxCoeff());
                // the idle branch is untouched
                res = std::max(res, (ops.m * stack(zero, ov) - stack(zero, ov)).cwiseAbs().maxCoeff());
                res = std::max(res, (ops.n * stack(ow, zero) - stack(ow, zero)).cwiseAbs().maxCoeff());
            }
        }
    }
    ops.eigen_residual = res;
    if (res > kStructureTolerance)
        throw Error(ErrorKind::Construction, "controlled operator residual " + std::to_string(res));
    return ops;
}

double PiZCheck::residual() const { return std::max({pi_z_residual, cnot_gate_residual, control0_residual}); }

PiZCheck pi_z_identity_check(const BlockEncoding& enc) { return pi_z_identity_check(enc, enc.left_projector); }

PiZCheck pi_z_identity_check(const BlockEncoding& enc, const VectorXd& projector) {
    if (enc.ancillas > 3) throw Error(ErrorKind::Capacity, "identity check supports at most 3 ancillas");
    const long n = enc.n();
    const long dim = enc.dim();
    const long na = dim / n;

    // X on the control when the register is outside the projector.
    MatrixXc cnot = MatrixXc::Zero(2 * dim, 2 * dim);
    for (long i = 0; i < dim; ++i) {
        if (projector(i) > 0.5) {
            cnot(i, i) = 1.0;
            cnot(dim + i, dim + i) = 1.0;
        } else {
            cnot(dim + i, i) = 1.0;
            cnot(i, dim + i) = 1.0;
        }
    }
    // Gate-level version: one NOT per nonzero ancilla pattern.
    MatrixXc cascade = MatrixXc::Identity(2 * dim, 2 * dim);
    for (long b = 1; b < na; ++b) {
        MatrixXc gate = MatrixXc::Identity(2 * dim, 2 * dim);
        for (long s = 0; s < n; ++s) {
            const long i = b * n + s;
            gate(i, i) = 0.0;
            gate(dim + i, dim + i) = 0.0;
            gate(dim + i, i) = 1.0;
            gate(i, dim + i) = 1.0;
        }
        cascade = gate * cascade;
    }
    VectorXc zdiag(2 * dim);
    zdiag.head(dim).setOnes();
    zdiag.tail(dim).setConstant(-1.0);
    const MatrixXc pi_z = cnot * zdiag.asDiagonal() * cnot;

    const VectorXc sign = (2.0 * enc.left_projector.array() - 1.0).cast<cplx>();
    VectorXc expect_diag(2 * dim);
    expect_diag << sign, -sign;
    PiZCheck out;
    out.pi_z_residual = max_abs(pi_z - MatrixXc(expect_diag.asDiagonal()));
    out.cnot_gate_residual = max_abs(cascade - cnot);

    const MatrixXc id = MatrixXc::Identity(dim, dim);
    const MatrixXc w = sign.asDiagonal() * enc.unitary;
    const MatrixXc lhs = pi_z * block_diag(enc.unitary, id);
    const MatrixXc m = block_diag(w, id);
    out.control0_residual = max_abs(lhs.leftCols(dim) - m.leftCols(dim));
    out.full_operator_residual = max_abs(lhs - m);
    return out;
}

}  // namespace gqsvt
