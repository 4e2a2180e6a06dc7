#include "gqsvt/engine.hpp"

#include <algorithm>

namespace gqsvt {

int GqsvtProgram::rotation_count() const {
    return static_cast<int>(std::count_if(ops.begin(), ops.end(), [](const ProgramOp& op) { return op.kind == OpKind::Rotation; }));
}

int GqsvtProgram::controlled_count() const { return static_cast<int>(ops.size()) - rotation_count(); }

GqsvtProgram assemble_program(const PhaseFactorSet& phases, const MonomialPoly& target, bool transpose,
                              double subnormalization) {
    const int d = target.degree();
    if (phases.degree != 2 * d)
        throw Error(ErrorKind::Arity, "phase set of degree " + std::to_string(phases.degree) +
                                          " does not match target degree " + std::to_string(d));
    GqsvtProgram prog;
    prog.phases = phases;
    prog.target = target;
    prog.subnormalization = subnormalization;
    prog.degree = d;
    prog.parity = d % 2 == 0 ? Parity::Even : Parity::Odd;
    prog.transpose = transpose;

    const OpKind fwd_a = transpose ? OpKind::Mt : OpKind::M;
    const OpKind fwd_b = transpose ? OpKind::M : OpKind::Mt;
    const OpKind bwd_n = transpose ? OpKind::Nt : OpKind::N;
    const OpKind bwd_nt = transpose ? OpKind::N : OpKind::Nt;
    // Even degree returns through Nt first, odd degree through N first.
    const OpKind bwd_a = prog.parity == Parity::Even ? bwd_nt : bwd_n;
    const OpKind bwd_b = prog.parity == Parity::Even ? bwd_n : bwd_nt;

    prog.ops.push_back({OpKind::Rotation, 0});
    for (int i = 1; i <= d; ++i) {
        prog.ops.push_back({i % 2 == 1 ? fwd_a : fwd_b, -1});
        prog.ops.push_back({OpKind::Rotation, i});
    }
    for (int i = d + 1; i <= 2 * d; ++i) {
        prog.ops.push_back({(i - d) % 2 == 1 ? bwd_a : bwd_b, -1});
        prog.ops.push_back({OpKind::Rotation, i});
    }
    return prog;
}

GqsvtProgram make_program(const MonomialPoly& target, bool transpose) {
    const double peak = poly_max_on_interval(target);
    const double scale = peak > 0.0 ? peak * (1.0 + 1e-10) : 1.0;
    const PhaseSolution sol = solve_phases(embed_on_circle(target.scaled(1.0 / scale)));
    GqsvtProgram prog = assemble_program(sol.phases, target, transpose, scale);
    prog.phase_error = sol.error;
    return prog;
}

ProgramExecutor::ProgramExecutor(const BlockEncoding& enc) : n_(enc.n()), d_(enc.dim()) {
    const QubitizedPair pair = qubitize(enc);
    w_ = pair.w;
    wt_ = pair.wt;
    w_adj_ = pair.w.adjoint();
    wt_adj_ = pair.wt.adjoint();
}

void ProgramExecutor::run(const GqsvtProgram& program, MatrixXc& states) const {
    if (states.rows() != dim()) throw Error(ErrorKind::Shape, "state has the wrong dimension");
    for (const ProgramOp& op : program.ops) {
        auto top = states.topRows(d_);
        auto bottom = states.bottomRows(d_);
        switch (op.kind) {
            case OpKind::Rotation: {
                const Eigen::Matrix2cd u = layer_matrix(program.phases, op.rotation);
                const MatrixXc t = top;
                top = u(0, 0) * t + u(0, 1) * bottom;
                bottom = u(1, 0) * t + u(1, 1) * bottom;
                break;
            }
            case OpKind::M: top = w_ * top; break;
            case OpKind::Mt: top = wt_ * top; break;
            case OpKind::N: bottom = w_adj_ * bottom; break;
            case OpKind::Nt: bottom = wt_adj_ * bottom; break;
        }
    }
}

MatrixXc ProgramExecutor::compose(const GqsvtProgram& program) const {
    MatrixXc states = MatrixXc::Identity(dim(), dim());
    run(program, states);
    return states;
}

MatrixXc ProgramExecutor::extract_block(const GqsvtProgram& program) const {
    MatrixXc states = MatrixXc::Identity(dim(), n_);
    run(program, states);
    return states.topRows(n_);
}

VectorXc ProgramExecutor::prepare(const VectorXc& phi) const {
    if (phi.size() != n_) throw Error(ErrorKind::Shape, "input state has the wrong dimension");
    VectorXc state = VectorXc::Zero(dim());
    state.head(n_) = phi;
    return state;
}

MatrixXc compose_program(const GqsvtProgram& program, const BlockEncoding& enc) {
    return ProgramExecutor(enc).compose(program);
}

MatrixXc extract_block(const GqsvtProgram& program, const BlockEncoding& enc) {
    return ProgramExecutor(enc).extract_block(program);
}

StateResult apply_to_state(const GqsvtProgram& program, const BlockEncoding& enc, const VectorXc& phi) {
    const ProgramExecutor exec(enc);
    MatrixXc state = exec.prepare(phi);
    exec.run(program, state);
    StateResult out;
    out.full = state.col(0);
    out.projected = out.full.head(enc.n());
    const double in = phi.squaredNorm();
    out.success_probability = in > 0.0 ? out.projected.squaredNorm() / in : 0.0;
    return out;
}

double success_probability(const GqsvtProgram& program, const BlockEncoding& enc, const VectorXc& phi) {
    return apply_to_state(program, enc, phi).success_probability;
}

MatrixXd oracle_generalized_function(const MatrixXd& a, const MonomialPoly& f, FunctionKind kind) {
    const Svd svd = sorted_svd(a);
    MatrixXd out = MatrixXd::Zero(a.cols(), a.cols());
    for (long k = 0; k < svd.sigma.size(); ++k) {
        const auto& out_vec = kind == FunctionKind::Right ? svd.right.col(k) : svd.left.col(k);
        out += f(svd.sigma(k)) * out_vec * svd.right.col(k).transpose();
    }
    return out;
}

MatrixXd matrix_polynomial(const MatrixXd& a, const MonomialPoly& f) {
    const long n = a.rows();
    MatrixXd acc = MatrixXd::Zero(n, n);
    for (int k = f.degree(); k >= 0; --k) {
        acc = acc * a;
        acc.diagonal().array() += f.coeffs[static_cast<std::size_t>(k)];
    }
    return acc;
}

VectorXd matrix_polynomial_apply(const MatrixXd& a, const MonomialPoly& f, const VectorXd& b) {
    VectorXd acc = VectorXd::Zero(b.size());
    for (int k = f.degree(); k >= 0; --k) acc = a * acc + f.coeffs[static_cast<std::size_t>(k)] * b;
    return acc;
}

}  // namespace gqsvt
