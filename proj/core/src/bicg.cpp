#include "gqsvt/bicg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gqsvt {

namespace {

constexpr double kBreakdown = 1e-14;

}  // namespace

void advance_residual(BicgCoefficients& c, double alpha) {
    const auto j = static_cast<std::size_t>(c.j);
    if (c.rho.size() != j + 1) throw Error(ErrorKind::Shape, "direction coefficients are not at step j");
    std::vector<double> step(j + 1);
    for (std::size_t l = 0; l <= j; ++l) step[l] = alpha * c.rho[l];
    // Both tables use the same products, so gamma_l = -chi_{l-1} survives rounding.
    std::vector<double> chi(j + 1), gamma(j + 2);
    for (std::size_t l = 0; l <= j; ++l) chi[l] = (l < c.chi.size() ? c.chi[l] : 0.0) + step[l];
    gamma[0] = c.gamma[0] - 0.0;
    for (std::size_t l = 1; l <= j + 1; ++l) gamma[l] = (l <= j ? c.gamma[l] : 0.0) - step[l - 1];
    c.chi = std::move(chi);
    c.gamma = std::move(gamma);
    c.j += 1;
}

void advance_direction(BicgCoefficients& c, double beta) {
    const auto j = static_cast<std::size_t>(c.j);
    if (c.gamma.size() != j + 1 || c.rho.size() != j) throw Error(ErrorKind::Shape, "residual coefficients are not one step ahead");
    std::vector<double> rho(j + 1);
    for (std::size_t l = 0; l <= j; ++l) rho[l] = c.gamma[l] + beta * (l < c.rho.size() ? c.rho[l] : 0.0);
    c.rho = std::move(rho);
}

void coefficient_update(BicgCoefficients& c, double alpha, double beta) {
    advance_residual(c, alpha);
    advance_direction(c, beta);
}

ClassicalResult classical_bicg(const MatrixXd& a, const VectorXd& b, double tol, int maxit, bool throw_on_breakdown) {
    if (a.rows() != a.cols() || a.rows() != b.size()) throw Error(ErrorKind::Shape, "system dimensions disagree");
    ClassicalResult out;
    VectorXd x = VectorXd::Zero(b.size());
    VectorXd r = b, rs = b, p = b, ps = b;
    double rr = rs.dot(r);
    BicgCoefficients coeffs;
    out.residuals.push_back(r);
    out.solutions.push_back(x);
    out.tables.push_back(coeffs);
    out.converged = r.norm() <= tol;

    auto fail = [&](int j, const std::string& what) {
        out.breakdown_iteration = j;
        if (throw_on_breakdown) throw BreakdownError(j, what);
    };

    for (int j = 0; j < maxit && !out.converged; ++j) {
        const VectorXd ap = a * p;
        const double pap = ps.dot(ap);
        if (std::abs(pap) <= kBreakdown * ap.norm() * ps.norm()) {
            fail(j, "breakdown: <p~, A p> vanished at iteration " + std::to_string(j));
            break;
        }
        const double alpha = rr / pap;
        x += alpha * p;
        r -= alpha * ap;
        rs -= alpha * (a.transpose() * ps);
        advance_residual(coeffs, alpha);

        BicgIteration it;
        it.j = j;
        it.alpha = alpha;
        it.rnorm_est = it.rnorm_true = r.norm();
        it.degree = j + 1;
        out.iterations = j + 1;
        out.residuals.push_back(r);
        out.solutions.push_back(x);

        if (it.rnorm_est <= tol) {
            out.converged = true;
            out.trace.push_back(it);
            out.tables.push_back(coeffs);
            break;
        }
        const double rr_next = rs.dot(r);
        if (std::abs(rr_next) <= kBreakdown * rs.norm() * r.norm()) {
            out.trace.push_back(it);
            out.tables.push_back(coeffs);
            fail(j, "breakdown: <r~, r> vanished at iteration " + std::to_string(j));
            break;
        }
        const double beta = rr_next / rr;
        it.beta = beta;
        p = r + beta * p;
        ps = rs + beta * ps;
        rr = rr_next;
        advance_direction(coeffs, beta);
        out.trace.push_back(it);
        out.tables.push_back(coeffs);
    }
    out.x = x;
    return out;
}

namespace {

// Inner products <F(A^T) b, G(A) b> recovered from swap tests on normalised programs.
class InnerProductEngine {
public:
    InnerProductEngine(const BlockEncoding& enc, const VectorXd& b, const QuantumOptions& opt)
        : exec_(enc), b_(b.cast<cplx>()), opt_(opt), svd_(sorted_svd(enc.scaled())),
          svd_t_(sorted_svd(enc.scaled().transpose())) {}

    struct Estimate {
        double value = 0.0;
        long shots = 0;
    };

    // Re <U b, V b> for the normalised programs.
    Estimate overlap(const GqsvtProgram& u, const GqsvtProgram& v) {
        Estimate e;
        switch (opt_.mode) {
            case InnerProductMode::Oracle:
                e.value = generalized(u).dot(generalized(v)).real();
                break;
            case InnerProductMode::Exact:
                e.value = exact_overlap(exec_, u, v, b_).estimate;
                break;
            case InnerProductMode::Sampled: {
                const OverlapOutcome exact = exact_overlap(exec_, u, v, b_);
                const OverlapOutcome s = sample_outcomes(exact.p0, exact.p1, opt_.shots, opt_.seed, stream_++);
                e.value = s.estimate;
                e.shots = s.shots;
                break;
            }
        }
        return e;
    }

    // Normalised output vector of a program: circuit state or oracle.
    VectorXc output(const GqsvtProgram& prog) {
        if (opt_.mode == InnerProductMode::Oracle) return generalized(prog);
        return circuit(prog);
    }

    VectorXc circuit(const GqsvtProgram& prog) const {
        MatrixXc state = exec_.prepare(b_);
        exec_.run(prog, state);
        return state.col(0).head(exec_.n());
    }

    VectorXc generalized(const GqsvtProgram& prog) const {
        const Svd& svd = prog.transpose ? svd_t_ : svd_;
        const MonomialPoly f = prog.target.scaled(1.0 / prog.subnormalization);
        const bool right = prog.parity == Parity::Even;
        VectorXc out = VectorXc::Zero(b_.size());
        for (long k = 0; k < svd.sigma.size(); ++k) {
            const cplx coeff = f(svd.sigma(k)) * svd.right.col(k).cast<cplx>().dot(b_);
            out += coeff * (right ? svd.right.col(k) : svd.left.col(k)).cast<cplx>();
        }
        return out;
    }

private:
    ProgramExecutor exec_;
    VectorXc b_;
    QuantumOptions opt_;
    Svd svd_, svd_t_;
    std::uint64_t stream_ = 0;
};

struct ProgramPair {
    GqsvtProgram normal, transposed;
};

ProgramPair programs_for(const MonomialPoly& f, long& synthesized) {
    ProgramPair out;
    out.normal = make_program(f, false);
    out.transposed = assemble_program(out.normal.phases, f, true, out.normal.subnormalization);
    out.transposed.phase_error = out.normal.phase_error;
    ++synthesized;
    return out;
}

void note_program(BicgIteration& it, const GqsvtProgram& prog) {
    it.degree = std::max(it.degree, prog.degree);
    it.rotations = std::max(it.rotations, prog.rotation_count());
    it.controlled = std::max(it.controlled, prog.controlled_count());
}

}  // namespace

QuantumResult quantum_bicg(const MatrixXd& a, const VectorXd& b, double tol, int maxit, const QuantumOptions& opt) {
    if (a.rows() != a.cols() || a.rows() != b.size()) throw Error(ErrorKind::Shape, "system dimensions disagree");
    if (opt.mode == InnerProductMode::Sampled && opt.shots <= 0) throw Error(ErrorKind::Domain, "sampled mode needs a positive shot count");
    QuantumResult out;
    out.b_norm = b.norm();
    if (out.b_norm == 0.0) throw Error(ErrorKind::Domain, "right-hand side is zero");
    out.scale = opt.scale ? *opt.scale : sorted_svd(a).sigma(0);
    const BlockEncoding enc = build_standard_encoding(a, out.scale);
    const MatrixXd as = enc.scaled();
    const VectorXd bh = b / out.b_norm;
    InnerProductEngine ip(enc, bh, opt);

    BicgCoefficients coeffs;
    double rr = 1.0;  // <b, b> for unit b
    // P'_0 = x, P_0 = 1
    ProgramPair p_pair = programs_for(coeffs.direction_poly(), out.synthesized);
    ProgramPair pp_pair = programs_for(coeffs.direction_poly().times_x(), out.synthesized);
    double pp = 0.0;
    long pending_shots = 0;  // shots spent on the pp estimate used by the next iteration
    {
        const auto e = ip.overlap(p_pair.transposed, pp_pair.normal);
        pp = e.value * p_pair.normal.subnormalization * pp_pair.normal.subnormalization;
        pending_shots = e.shots;
    }

    auto fail = [&](int j, const std::string& what) {
        out.breakdown_iteration = j;
        if (opt.throw_on_breakdown) throw BreakdownError(j, what);
    };

    GqsvtProgram x_prog;
    int current = 0;
    try {
        for (int j = 0; j < maxit; ++j) {
            current = j;
            BicgIteration it;
            it.j = j;
            it.shots = pending_shots;
            note_program(it, p_pair.transposed);
            note_program(it, pp_pair.normal);
            it.p_max = p_pair.normal.subnormalization;
            it.pp_max = pp_pair.normal.subnormalization;

            if (std::abs(pp) <= kBreakdown * std::abs(rr)) {
                fail(j, "breakdown: <p~, A p> vanished at iteration " + std::to_string(j));
                break;
            }
            const double alpha = rr / pp;
            it.alpha = alpha;
            advance_residual(coeffs, alpha);

            const MonomialPoly r_poly = coeffs.residual_poly();
            const ProgramPair r_pair = programs_for(r_poly, out.synthesized);
            note_program(it, r_pair.normal);
            const double r_max = r_pair.normal.subnormalization;
            it.r_max = r_max;
            const auto rr_est = ip.overlap(r_pair.transposed, r_pair.normal);
            const auto norm_est = ip.overlap(r_pair.normal, r_pair.normal);
            it.shots += rr_est.shots + norm_est.shots;
            const double rr_next = rr_est.value * r_max * r_max;
            it.rnorm_est = std::sqrt(std::max(norm_est.value, 0.0)) * r_max;

            if (opt.diagnostics) {
                const VectorXd truth = matrix_polynomial_apply(as, r_poly, bh);
                it.rnorm_true = truth.norm();
                const VectorXc truth_c = truth.cast<cplx>();
                it.gap_generalized = (ip.generalized(r_pair.normal) * r_max - truth_c).norm() / r_max;
                it.gap_circuit = (ip.circuit(r_pair.normal) * r_max - truth_c).norm() / r_max;
            }
            out.iterations = j + 1;

            const bool converged = out.b_norm * it.rnorm_est <= tol;
            const bool last = j + 1 == maxit;
            if (converged || last) {
                x_prog = make_program(coeffs.solution_poly(), false);
                ++out.synthesized;
                note_program(it, x_prog);
                out.converged = converged;
                out.trace.push_back(it);
                break;
            }
            if (std::abs(rr_next) <= kBreakdown * it.rnorm_est * it.rnorm_est) {
                out.trace.push_back(it);
                fail(j, "breakdown: <r~, r> vanished at iteration " + std::to_string(j));
                break;
            }
            const double beta = rr_next / rr;
            it.beta = beta;
            rr = rr_next;
            advance_direction(coeffs, beta);

            p_pair = programs_for(coeffs.direction_poly(), out.synthesized);
            pp_pair = programs_for(coeffs.direction_poly().times_x(), out.synthesized);
            const auto e = ip.overlap(p_pair.transposed, pp_pair.normal);
            pp = e.value * p_pair.normal.subnormalization * pp_pair.normal.subnormalization;
            pending_shots = e.shots;
            out.trace.push_back(it);
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Synthesis) throw;
        throw Error(ErrorKind::Synthesis, std::string(e.what()) + " (iteration " + std::to_string(current) + ")");
    }

    for (const auto& it : out.trace) out.total_shots += it.shots;
    out.coefficients = coeffs;
    if (x_prog.ops.empty()) x_prog = make_program(coeffs.solution_poly(), false);
    out.x_max = x_prog.subnormalization;
    const VectorXc xh = ip.output(x_prog) * out.x_max;
    out.x = xh.real() * (out.b_norm / out.scale);
    out.depth = depth_report(out.trace);
    return out;
}

DepthReport depth_report(const std::vector<BicgIteration>& trace) {
    DepthReport d;
    if (trace.empty()) return d;
    d.k = trace.back().j;
    for (const auto& it : trace) {
        d.max_degree = std::max(d.max_degree, it.degree);
        d.max_controlled = std::max(d.max_controlled, it.controlled);
        d.max_rotations = std::max(d.max_rotations, it.rotations);
    }
    d.consistent = d.max_degree == d.k + 1 && d.max_controlled == 2 * (d.k + 1) && d.max_rotations == 2 * (d.k + 1) + 1;
    return d;
}

}  // namespace gqsvt
