#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Eigenvalues>

#include "gqsvt/bicg.hpp"

namespace gqsvt {

MatrixXd LanczosResult::t() const {
    MatrixXd t = MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) t(i, i) = mu(i);
    for (int i = 0; i + 1 < k; ++i) {
        t(i + 1, i) = sub(i);
        t(i, i + 1) = super(i);
    }
    return t;
}

LanczosResult lanczos_tridiagonalize(const MatrixXd& a, const VectorXd& b, int k, bool rebiorthogonalize) {
    const long n = a.rows();
    if (a.cols() != n || b.size() != n) throw Error(ErrorKind::Shape, "system dimensions disagree");
    if (k < 1 || k > n) throw Error(ErrorKind::Domain, "Lanczos dimension must lie in [1, n]");
    const double bn = b.norm();
    if (bn == 0.0) throw Error(ErrorKind::Domain, "starting vector is zero");
    const double anorm = a.norm();

    MatrixXd v(n, k), w(n, k);
    VectorXd scales(k), mu(k);
    MatrixXd coef = MatrixXd::Zero(k, k);  // full projection coefficients, tridiagonal up to rounding
    v.col(0) = b / bn;
    w.col(0) = v.col(0);
    scales(0) = 1.0;

    LanczosResult out;
    int used = k;
    VectorXd vhat, what;
    for (int j = 0; j < k; ++j) {
        vhat = a * v.col(j);
        what = a.transpose() * w.col(j);
        const int lo = rebiorthogonalize ? 0 : std::max(0, j - 1);
        for (int pass = 0; pass < (rebiorthogonalize ? 2 : 1); ++pass) {
            for (int i = lo; i <= j; ++i) {
                const double cv = w.col(i).dot(vhat) / scales(i);
                const double cw = v.col(i).dot(what) / scales(i);
                vhat -= cv * v.col(i);
                what -= cw * w.col(i);
                coef(i, j) += cv;
            }
        }
        mu(j) = coef(j, j);
        const double vn = vhat.norm(), wn = what.norm();
        if (j + 1 == k) {
            out.v_residual = vn;
            out.w_residual = wn;
            out.v_next = vn > 0.0 ? VectorXd(vhat / vn) : VectorXd::Zero(n);
            out.w_next = wn > 0.0 ? VectorXd(what / wn) : VectorXd::Zero(n);
            break;
        }
        if (vn <= 1e-12 * anorm || wn <= 1e-12 * anorm) {
            // invariant subspace: the Krylov space is exhausted
            used = j + 1;
            out.invariant = true;
            out.v_next = VectorXd::Zero(n);
            out.w_next = VectorXd::Zero(n);
            break;
        }
        v.col(j + 1) = vhat / vn;
        w.col(j + 1) = what / wn;
        coef(j + 1, j) = vn;
        scales(j + 1) = w.col(j + 1).dot(v.col(j + 1));
        if (std::abs(scales(j + 1)) < 1e-12)
            throw BreakdownError(j, "Lanczos breakdown: w^T v vanished at step " + std::to_string(j + 1));
    }

    out.k = used;
    out.v = v.leftCols(used);
    out.w = w.leftCols(used);
    out.scales = scales.head(used);
    out.mu = mu.head(used);
    out.sub = VectorXd(std::max(used - 1, 0));
    out.super = VectorXd(std::max(used - 1, 0));
    for (int i = 0; i + 1 < used; ++i) {
        out.sub(i) = coef(i + 1, i);
        out.super(i) = coef(i, i + 1);
    }
    return out;
}

LanczosCheck check_lanczos(const MatrixXd& a, const LanczosResult& lz) {
    const MatrixXd t = lz.t();
    MatrixXd fwd = a * lz.v - lz.v * t;
    fwd.col(lz.k - 1) -= lz.v_residual * lz.v_next;
    const VectorXd s = lz.scales;
    const MatrixXd t_adj = s.cwiseInverse().asDiagonal() * t.transpose() * s.asDiagonal();
    MatrixXd tr = a.transpose() * lz.w - lz.w * t_adj;
    tr.col(lz.k - 1) -= lz.w_residual * lz.w_next;
    MatrixXd plain = a.transpose() * lz.w - lz.w * t.transpose();
    plain.col(lz.k - 1) -= lz.w_residual * lz.w_next;
    MatrixXd gram = lz.w.transpose() * lz.v;
    gram.diagonal().setZero();

    LanczosCheck out;
    out.forward = fwd.cwiseAbs().maxCoeff();
    out.transpose = tr.cwiseAbs().maxCoeff();
    out.transpose_plain = plain.cwiseAbs().maxCoeff();
    out.biorthogonality = gram.size() ? gram.cwiseAbs().maxCoeff() : 0.0;
    return out;
}

namespace {

struct Point {
    double x, y;
};

double cross(const Point& o, const Point& a, const Point& b) { return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x); }

// Andrew's monotone chain, counter-clockwise, collinear points dropped.
std::vector<Point> convex_hull(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
    pts.erase(std::unique(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
                  return std::abs(a.x - b.x) <= 1e-14 * std::max(1.0, std::abs(a.x)) && std::abs(a.y - b.y) <= 1e-14 * std::max(1.0, std::abs(a.y));
              }),
              pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Point> hull(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
        hull[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

Point centroid(const std::vector<Point>& hull) {
    if (hull.size() == 1) return hull[0];
    double area = 0.0, cx = 0.0, cy = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const Point& p = hull[i];
        const Point& q = hull[(i + 1) % hull.size()];
        const double c = p.x * q.y - q.x * p.y;
        area += c;
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    double span = 0.0;
    for (const auto& p : hull) span = std::max({span, std::abs(p.x), std::abs(p.y)});
    if (std::abs(area) <= 1e-12 * span * span) {
        // degenerate hull: midpoint of the extreme points
        const auto [lo, hi] = std::minmax_element(hull.begin(), hull.end(), [](const Point& a, const Point& b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });
        return {0.5 * (lo->x + hi->x), 0.5 * (lo->y + hi->y)};
    }
    return {cx / (3.0 * area), cy / (3.0 * area)};
}

cplx larger_branch(cplx a, cplx c) {
    const cplx s = std::sqrt(a * a - c * c);
    return std::abs(a + s) >= std::abs(a - s) ? a + s : a - s;
}

std::vector<Point> to_points(const std::vector<cplx>& eig) {
    std::vector<Point> pts;
    for (const auto& e : eig) pts.push_back({e.real(), e.imag()});
    return pts;
}

}  // namespace

Ellipse fit_ellipse(const std::vector<cplx>& eigenvalues) {
    if (eigenvalues.empty()) throw Error(ErrorKind::Domain, "no eigenvalues to enclose");
    const std::vector<Point> hull = convex_hull(to_points(eigenvalues));
    const Point cen = centroid(hull);
    Ellipse e;
    e.center = cen.x;
    double ymax = 0.0, xmax = 0.0;
    for (const auto& p : hull) {
        ymax = std::max(ymax, std::abs(p.y));
        xmax = std::max(xmax, std::abs(p.x - e.center));
    }
    if (ymax <= 1e-14 * std::max(1.0, xmax)) {
        e.semi_x = xmax;
        e.semi_y = 0.0;
        e.focal = xmax;
        return e;
    }
    // area ~ r a(r)^2 with r = b / a is a maximum of convex functions of r
    auto semi_x = [&](double r) {
        double a2 = 0.0;
        for (const auto& p : hull) a2 = std::max(a2, (p.x - e.center) * (p.x - e.center) + p.y * p.y / (r * r));
        return std::sqrt(a2);
    };
    auto area = [&](double t) {
        const double r = std::exp(t);
        const double a = semi_x(r);
        return r * a * a;
    };
    double lo = -30.0, hi = 30.0;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c1 = hi - g * (hi - lo), c2 = lo + g * (hi - lo);
    double f1 = area(c1), f2 = area(c2);
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        if (f1 <= f2) {
            hi = c2;
            c2 = c1;
            f2 = f1;
            c1 = hi - g * (hi - lo);
            f1 = area(c1);
        } else {
            lo = c1;
            c1 = c2;
            f1 = f2;
            c2 = lo + g * (hi - lo);
            f2 = area(c2);
        }
    }
    const double r = std::exp(0.5 * (lo + hi));
    e.semi_x = semi_x(r);
    e.semi_y = r * e.semi_x;
    const double diff = e.semi_x * e.semi_x - e.semi_y * e.semi_y;
    e.focal = diff >= 0.0 ? cplx{std::sqrt(diff), 0.0} : cplx{0.0, std::sqrt(-diff)};
    return e;
}

double ellipse_ratio(const Ellipse& e, cplx lambda) {
    const cplx d = e.center;
    const double num = std::abs(larger_branch(d - lambda, e.focal));
    const double den = std::abs(larger_branch(d, e.focal));
    return num / den;
}

double BoundReport::factor(int k) const { return 2.0 * kappa * std::pow(ratio, k); }

BoundReport convergence_bound(const LanczosResult& lz, const std::optional<Ellipse>& ellipse) {
    const MatrixXd t = lz.t();
    const int k = lz.k;
    BoundReport out;

    Eigen::EigenSolver<MatrixXd> es(t, false);
    for (long i = 0; i < k; ++i) out.eigenvalues.push_back(es.eigenvalues()(i));
    for (const auto& ev : out.eigenvalues)
        if (!(ev.real() > 0.0))
            throw Error(ErrorKind::InapplicableBound, "spectrum of T leaves the open right half-plane");

    // T = L D U without pivoting
    out.lower = MatrixXd::Identity(k, k);
    out.upper = MatrixXd::Identity(k, k);
    out.diag = MatrixXd::Zero(k, k);
    const double tmax = t.cwiseAbs().maxCoeff();
    double prev = t(0, 0);
    for (int i = 0; i < k; ++i) {
        double d = t(i, i);
        if (i > 0) {
            out.lower(i, i - 1) = t(i, i - 1) / prev;
            out.upper(i - 1, i) = t(i - 1, i) / prev;
            d -= out.lower(i, i - 1) * out.upper(i - 1, i) * prev;
        }
        if (std::abs(d) <= 1e-14 * tmax)
            throw Error(ErrorKind::InapplicableBound, "T has no LDU factorisation without pivoting");
        out.diag(i, i) = d;
        prev = d;
    }
    const MatrixXd scaled_u = out.diag.diagonal().cwiseAbs().cwiseSqrt().asDiagonal() * out.upper;
    Eigen::JacobiSVD<MatrixXd> svd(scaled_u);
    out.kappa = svd.singularValues()(0) / svd.singularValues()(k - 1);

    out.ellipse = ellipse ? *ellipse : fit_ellipse(out.eigenvalues);
    const auto hull = convex_hull(to_points(out.eigenvalues));
    out.ratio = -1.0;
    for (const auto& p : hull) {
        const cplx lam{p.x, p.y};
        const double r = ellipse_ratio(out.ellipse, lam);
        if (r > out.ratio) {
            out.ratio = r;
            out.lambda_star = lam;
        }
    }
    return out;
}

double error_r_norm(const BoundReport& bound, const LanczosResult& lz, const VectorXd& e) {
    const MatrixXd wp = lz.w * lz.scales.cwiseInverse().asDiagonal();
    const VectorXd y = bound.upper * (wp.transpose() * e);
    const double q = y.dot(bound.diag.diagonal().cwiseAbs().asDiagonal() * y);
    return std::sqrt(std::max(q, 0.0));
}

std::vector<GapSample> divergence_along_iterates(const MatrixXd& a_scaled, const VectorXd& b, int steps) {
    const VectorXd bh = b / b.norm();
    const ClassicalResult run = classical_bicg(a_scaled, bh, 0.0, steps, false);
    const BlockEncoding enc = build_standard_encoding(a_scaled, 1.0);
    const ProgramExecutor exec(enc);
    std::vector<GapSample> out;
    for (std::size_t j = 1; j < run.tables.size(); ++j) {
        const MonomialPoly r = run.tables[j].residual_poly();
        GapSample s;
        s.j = static_cast<int>(j);
        const GqsvtProgram prog = make_program(r, false);
        s.r_max = prog.subnormalization;
        const MonomialPoly f = r.scaled(1.0 / s.r_max);
        const FunctionKind kind = prog.parity == Parity::Even ? FunctionKind::Right : FunctionKind::Diamond;
        const VectorXd truth = matrix_polynomial_apply(a_scaled, f, bh);
        s.generalized = (oracle_generalized_function(a_scaled, f, kind) * bh - truth).norm();
        MatrixXc state = exec.prepare(bh.cast<cplx>());
        exec.run(prog, state);
        s.circuit = (state.col(0).head(bh.size()) - truth.cast<cplx>()).norm();
        out.push_back(s);
    }
    return out;
}

}  // namespace gqsvt
