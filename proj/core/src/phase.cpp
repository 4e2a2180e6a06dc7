#include "gqsvt/phase.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace gqsvt {

namespace {

constexpr double kPeelTolerance = 1e-9;
constexpr double kPairTolerance = 1e-6;
constexpr double kReconstructionTolerance = 1e-8;
constexpr double kInvariantTolerance = 1e-9;

int grid_size(int m) { return 4 * m + 64; }

std::vector<double> uniform_grid(int n) {
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) xs[static_cast<std::size_t>(k)] = 2.0 * kPi * k / n;
    return xs;
}

cplx horner(std::span<const cplx> c, cplx z) {
    cplx acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
    return acc;
}

// sum_j q_{j+k} conj(q_j) for k = 0..L
std::vector<cplx> autocorrelation(const std::vector<cplx>& q) {
    const std::size_t n = q.size();
    std::vector<cplx> out(n, cplx{0.0});
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j + k < n; ++j) out[k] += q[j + k] * std::conj(q[j]);
    return out;
}

// Stack Re r_0..r_L, Im r_1..r_L.
VectorXd stack_residual(const std::vector<cplx>& target, const std::vector<cplx>& q) {
    const auto ac = autocorrelation(q);
    const Eigen::Index n = static_cast<Eigen::Index>(q.size());
    VectorXd r(2 * n - 1);
    for (Eigen::Index k = 0; k < n; ++k) r(k) = (target[static_cast<std::size_t>(k)] - ac[static_cast<std::size_t>(k)]).real();
    for (Eigen::Index k = 1; k < n; ++k) r(n + k - 1) = (target[static_cast<std::size_t>(k)] - ac[static_cast<std::size_t>(k)]).imag();
    return r;
}

// Newton refinement of the spectral factor on the autocorrelation equations,
// damped and monotone so it can only improve the root-based estimate.
void polish_factor(const std::vector<cplx>& target, std::vector<cplx>& q) {
    const Eigen::Index n = static_cast<Eigen::Index>(q.size());
    const Eigen::Index rows = 2 * n - 1, cols = 2 * n;
    VectorXd res = stack_residual(target, q);
    double norm = res.norm();
    for (int it = 0; it < 12 && norm > 1e-17; ++it) {
        MatrixXd jac = MatrixXd::Zero(rows, cols);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index k = 0; k < n; ++k) {
                // derivative of sum_j q_{j+k} conj(q_j) along Re q_i and Im q_i
                cplx d_re = 0.0, d_im = 0.0;
                if (i >= k) {
                    const cplx t = std::conj(q[static_cast<std::size_t>(i - k)]);
                    d_re += t;
                    d_im += cplx{0.0, 1.0} * t;
                }
                if (i + k < n) {
                    const cplx t = q[static_cast<std::size_t>(i + k)];
                    d_re += t;
                    d_im -= cplx{0.0, 1.0} * t;
                }
                jac(k, i) = d_re.real();
                jac(k, n + i) = d_im.real();
                if (k > 0) {
                    jac(n + k - 1, i) = d_re.imag();
                    jac(n + k - 1, n + i) = d_im.imag();
                }
            }
        }
        const MatrixXd jtj = jac.transpose() * jac;
        const VectorXd jtr = jac.transpose() * res;
        const double trace = jtj.trace();
        bool improved = false;
        for (double mu : {0.0, 1e-14, 1e-12, 1e-10, 1e-8, 1e-6}) {
            VectorXd step;
            if (mu == 0.0) {
                Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(jac);
                cod.setThreshold(1e-13);
                step = cod.solve(res);
            } else {
                step = (jtj + mu * trace * MatrixXd::Identity(cols, cols)).ldlt().solve(jtr);
            }
            std::vector<cplx> trial = q;
            for (Eigen::Index i = 0; i < n; ++i) trial[static_cast<std::size_t>(i)] += cplx{step(i), step(n + i)};
            VectorXd trial_res = stack_residual(target, trial);
            if (trial_res.norm() < norm) {
                q = std::move(trial);
                res = std::move(trial_res);
                norm = res.norm();
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
}

// Parlett-Reinsch diagonal similarity with power-of-two factors, so row and
// column norms are comparable before the eigenvalue solve.
void balance(MatrixXc& a) {
    const Eigen::Index n = a.rows();
    constexpr double radix = 2.0;
    for (bool done = false; !done;) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double c = 0.0, r = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double f = 1.0;
            const double s = c + r;
            double g = r / radix;
            while (c < g) {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= radix * radix;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

struct PeelOutcome {
    PhaseFactorSet phases;
    double worst = 0.0;
};

PeelOutcome peel(const UnitCirclePoly& pin, const UnitCirclePoly& qin) {
    const int m = pin.degree();
    std::vector<cplx> p = pin.coeffs;
    std::vector<cplx> q = qin.coeffs;
    q.resize(p.size(), cplx{0.0});

    PeelOutcome out;
    out.phases.degree = m;
    out.phases.theta.assign(static_cast<std::size_t>(m) + 1, 0.0);
    out.phases.phi.assign(static_cast<std::size_t>(m) + 1, 0.0);
    const double scale = std::sqrt(std::accumulate(p.begin(), p.end(), 0.0, [](double s, cplx c) { return s + std::norm(c); }) +
                                   std::accumulate(q.begin(), q.end(), 0.0, [](double s, cplx c) { return s + std::norm(c); }));
    const double tiny = 1e-15 * std::max(scale, 1e-300);

    for (int j = m; j >= 1; --j) {
        const auto uj = static_cast<std::size_t>(j);
        const cplx pl = p[uj], ql = q[uj], p0 = p[0], q0 = q[0];
        double theta = 0.0, phi = 0.0;
        // Annihilate whichever end is better conditioned; both must vanish together.
        if (std::norm(pl) + std::norm(ql) >= std::norm(p0) + std::norm(q0)) {
            if (std::abs(ql) <= tiny) {
                theta = 0.0;
            } else if (std::abs(pl) <= tiny) {
                theta = kPi / 2;
            } else {
                theta = std::atan2(std::abs(ql), std::abs(pl));
                phi = std::arg(pl) - std::arg(ql);
            }
        } else {
            if (std::abs(p0) <= tiny) {
                theta = 0.0;
            } else if (std::abs(q0) <= tiny) {
                theta = kPi / 2;
            } else {
                theta = std::atan2(std::abs(p0), std::abs(q0));
                phi = std::arg(p0) - std::arg(q0) - kPi;
            }
        }
        phi = wrap_angle(phi);
        const double c = std::cos(theta), s = std::sin(theta);
        const cplx e = std::polar(1.0, -phi);
        std::vector<cplx> zp(uj + 1), qn(uj + 1);
        for (std::size_t k = 0; k <= uj; ++k) {
            zp[k] = e * c * p[k] + s * q[k];
            qn[k] = e * s * p[k] - c * q[k];
        }
        out.worst = std::max({out.worst, std::abs(zp[0]) / scale, std::abs(qn[uj]) / scale});
        p.assign(zp.begin() + 1, zp.end());
        q.assign(qn.begin(), qn.end() - 1);
        out.phases.theta[uj] = theta;
        out.phases.phi[uj] = phi;
    }
    const cplx p0 = p[0], q0 = q[0];
    const double lambda = std::abs(q0) <= tiny ? 0.0 : std::arg(q0);
    out.phases.lambda = wrap_angle(lambda);
    out.phases.phi[0] = std::abs(p0) <= tiny ? 0.0 : wrap_angle(std::arg(p0) - lambda);
    out.phases.theta[0] = std::atan2(std::abs(q0), std::abs(p0));
    return out;
}

// Derivatives of a layer matrix with respect to theta, phi and (layer 0 only) lambda.
struct LayerJet {
    Eigen::Matrix2cd value, d_theta, d_phi, d_lambda;
};

LayerJet layer_jet(const PhaseFactorSet& ph, int j) {
    const double t = ph.theta[static_cast<std::size_t>(j)];
    const double f = ph.phi[static_cast<std::size_t>(j)];
    const double lam = j == 0 ? ph.lambda : 0.0;
    const double c = std::cos(t), s = std::sin(t);
    const cplx i{0.0, 1.0};
    const cplx ef = std::polar(1.0, f), el = std::polar(1.0, lam), efl = ef * el;
    LayerJet jet;
    jet.value << efl * c, ef * s, el * s, -c;
    jet.d_theta << -efl * s, ef * c, el * c, s;
    jet.d_phi << i * efl * c, i * ef * s, 0.0, 0.0;
    jet.d_lambda << i * efl * c, 0.0, i * el * s, 0.0;
    return jet;
}

}  // namespace

Eigen::Matrix2cd layer_matrix(const PhaseFactorSet& phases, int j) { return layer_jet(phases, j).value; }

UnitCirclePoly complementary_poly(const UnitCirclePoly& pin) {
    const int m = pin.degree();
    if (m > kMaxPhaseDegree)
        throw Error(ErrorKind::Capacity, "unit-circle degree " + std::to_string(m) + " exceeds 128");
    if (max_on_circle(pin) > 1.0 + 1e-12)
        throw Error(ErrorKind::Domain, "|P| exceeds 1 on the unit circle");
    const auto& p = pin.coeffs;

    // g_k = delta_k0 - sum_j p_{j+k} conj(p_j), k >= 0; g_{-k} = conj(g_k)
    std::vector<cplx> g = autocorrelation(p);
    for (auto& v : g) v = -v;
    g[0] += 1.0;
    g[0] = g[0].real();

    double gmax = 0.0;
    for (const auto& v : g) gmax = std::max(gmax, std::abs(v));
    std::vector<cplx> qc(static_cast<std::size_t>(m) + 1, cplx{0.0});
    if (gmax <= 1e-14) return UnitCirclePoly(std::move(qc));

    // G has length hi - lo over the effective support of P. The end terms of G are
    // products of the end terms of P, so trimming G by its own size would drop
    // genuine roots; coefficients of P below the threshold are treated as noise.
    double pmax = 0.0;
    for (const auto& v : p) pmax = std::max(pmax, std::abs(v));
    int lo = 0, hi = m;
    while (lo < m && std::abs(p[static_cast<std::size_t>(lo)]) <= 1e-14 * pmax) ++lo;
    while (hi > lo && std::abs(p[static_cast<std::size_t>(hi)]) <= 1e-14 * pmax) --hi;
    int len = pmax > 0.0 ? hi - lo : 0;
    while (len > 0 && g[static_cast<std::size_t>(len)] == cplx{0.0}) --len;

    std::vector<cplx> q;
    if (len == 0) {
        q = {cplx{std::sqrt(std::max(g[0].real(), 0.0))}};
    } else {
        // z^L G(z), coefficients h_i = g_{i-L}
        const int deg = 2 * len;
        std::vector<cplx> h(static_cast<std::size_t>(deg) + 1);
        for (int i = 0; i <= deg; ++i) {
            const int k = i - len;
            h[static_cast<std::size_t>(i)] = k >= 0 ? g[static_cast<std::size_t>(k)] : std::conj(g[static_cast<std::size_t>(-k)]);
        }
        MatrixXc companion = MatrixXc::Zero(deg, deg);
        for (int i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
        for (int i = 0; i < deg; ++i) companion(i, deg - 1) = -h[static_cast<std::size_t>(i)] / h[static_cast<std::size_t>(deg)];
        balance(companion);
        Eigen::ComplexEigenSolver<MatrixXc> solver(companion, false);
        if (solver.info() != Eigen::Success) throw Error(ErrorKind::Factorization, "root finding failed");
        std::vector<cplx> roots(solver.eigenvalues().data(), solver.eigenvalues().data() + deg);

        // Newton polish in extended precision; clustered roots need the extra digits.
        // Roots outside the disk are polished as 1/r on the reversed polynomial so
        // huge roots do not overflow.
        using xcplx = std::complex<long double>;
        std::vector<xcplx> hx(h.begin(), h.end());
        const std::vector<xcplx> hx_rev(hx.rbegin(), hx.rend());
        auto eval = [](const std::vector<xcplx>& c, xcplx z, xcplx& dv) {
            xcplx v = 0.0L;
            dv = 0.0L;
            for (auto it = c.rbegin(); it != c.rend(); ++it) {
                dv = dv * z + v;
                v = v * z + *it;
            }
            return v;
        };
        for (auto& r : roots) {
            const bool outside = std::abs(r) > 1.0;
            const auto& coeffs = outside ? hx_rev : hx;
            xcplx z = outside ? 1.0 / r : r;
            xcplx dv;
            xcplx hv = eval(coeffs, z, dv);
            for (int it = 0; it < 40 && std::abs(dv) != 0.0L; ++it) {
                // halve the step until |h| drops; near a cluster the full step overshoots
                const xcplx step = hv / dv;
                bool moved = false;
                for (long double t = 1.0L; t > 1e-3L && !moved; t *= 0.5L) {
                    const xcplx cand = z - t * step;
                    xcplx dc;
                    const xcplx hc = eval(coeffs, cand, dc);
                    if (std::abs(hc) < std::abs(hv)) {
                        z = cand;
                        hv = hc;
                        dv = dc;
                        moved = true;
                    }
                }
                if (!moved) break;
            }
            const cplx zd(static_cast<double>(z.real()), static_cast<double>(z.imag()));
            r = outside ? 1.0 / zd : zd;
        }

        // Roots come in pairs (r, 1/conj r); map both into the closed disk, match,
        // and keep the average as the representative.
        auto into_disk = [](cplx r) { return std::abs(r) > 1.0 ? 1.0 / std::conj(r) : r; };
        std::vector<std::size_t> order(roots.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return std::abs(std::abs(roots[a]) - 1.0) > std::abs(std::abs(roots[b]) - 1.0);
        });
        std::vector<bool> used(roots.size(), false);
        std::vector<cplx> reps;
        for (std::size_t i : order) {
            if (used[i]) continue;
            used[i] = true;
            const cplx here = into_disk(roots[i]);
            const bool inside = std::abs(roots[i]) <= 1.0;
            std::size_t best = roots.size();
            double best_dist = 0.0;
            for (std::size_t k = 0; k < roots.size(); ++k) {
                if (used[k]) continue;
                // partner must sit on the other side unless both are on the circle
                const double dist = std::abs(into_disk(roots[k]) - here) +
                                    ((std::abs(roots[k]) <= 1.0) == inside ? std::abs(std::abs(here) - 1.0) : 0.0);
                if (best == roots.size() || dist < best_dist) {
                    best = k;
                    best_dist = dist;
                }
            }
            if (best == roots.size() || best_dist > kPairTolerance)
                throw Error(ErrorKind::Factorization, "roots of 1 - |P|^2 do not pair up");
            used[best] = true;
            reps.push_back(0.5 * (here + into_disk(roots[best])));
        }
        q = poly_from_roots(reps);

        // Fix the overall scale where G is largest.
        const auto xs = uniform_grid(grid_size(m));
        double best_g = -1.0, best_x = 0.0;
        for (double x : xs) {
            const double gv = 1.0 - std::norm(eval_unit_circle(pin, x));
            if (gv > best_g) {
                best_g = gv;
                best_x = x;
            }
        }
        const double alpha = std::sqrt(std::max(best_g, 0.0)) / std::abs(horner(q, std::polar(1.0, best_x)));
        for (auto& c : q) c *= alpha;

        // Fit the untrimmed autocorrelation so coefficients lost to the trim come back.
        q.resize(static_cast<std::size_t>(m) + 1, cplx{0.0});
        polish_factor(g, q);
    }
    std::copy(q.begin(), q.end(), qc.begin());
    UnitCirclePoly out(std::move(qc));

    double worst = 0.0;
    for (double x : uniform_grid(grid_size(m)))
        worst = std::max(worst, std::abs(std::norm(eval_unit_circle(pin, x)) + std::norm(eval_unit_circle(out, x)) - 1.0));
    if (worst > kInvariantTolerance)
        throw Error(ErrorKind::Factorization, "complementary polynomial misses |P|^2 + |Q|^2 = 1 by " + std::to_string(worst));
    return out;
}

PhaseFactorSet peel_angles(const UnitCirclePoly& p, const UnitCirclePoly& q) {
    if (q.degree() > p.degree()) throw Error(ErrorKind::PeelConsistency, "Q has higher degree than P");
    auto out = peel(p, q);
    if (out.worst > kPeelTolerance)
        throw Error(ErrorKind::PeelConsistency, "peel residual " + std::to_string(out.worst));
    return std::move(out.phases);
}

std::array<UnitCirclePoly, 4> reconstruct_matrix(const PhaseFactorSet& phases) {
    const int m = phases.degree;
    // columns of the running product, as polynomial pairs (top, bottom)
    std::array<std::vector<cplx>, 2> top, bot;
    const Eigen::Matrix2cd r0 = layer_matrix(phases, 0);
    for (int col = 0; col < 2; ++col) {
        top[static_cast<std::size_t>(col)] = {r0(0, col)};
        bot[static_cast<std::size_t>(col)] = {r0(1, col)};
    }
    for (int j = 1; j <= m; ++j) {
        const Eigen::Matrix2cd r = layer_matrix(phases, j);
        for (auto col : {0u, 1u}) {
            std::vector<cplx> zt(top[col].size() + 1, cplx{0.0});
            std::copy(top[col].begin(), top[col].end(), zt.begin() + 1);
            std::vector<cplx> b = bot[col];
            b.resize(zt.size(), cplx{0.0});
            std::vector<cplx> nt(zt.size()), nb(zt.size());
            for (std::size_t k = 0; k < zt.size(); ++k) {
                nt[k] = r(0, 0) * zt[k] + r(0, 1) * b[k];
                nb[k] = r(1, 0) * zt[k] + r(1, 1) * b[k];
            }
            top[col] = std::move(nt);
            bot[col] = std::move(nb);
        }
    }
    return {UnitCirclePoly(top[0]), UnitCirclePoly(top[1]), UnitCirclePoly(bot[0]), UnitCirclePoly(bot[1])};
}

UnitCirclePoly reconstruct_poly(const PhaseFactorSet& phases) { return reconstruct_matrix(phases)[0]; }

double reconstruction_error(const PhaseFactorSet& phases, const UnitCirclePoly& p) {
    const UnitCirclePoly rec = reconstruct_poly(phases);
    double worst = 0.0;
    for (double x : uniform_grid(grid_size(p.degree())))
        worst = std::max(worst, std::abs(eval_unit_circle(rec, x) - eval_unit_circle(p, x)));
    return worst;
}

PhaseFactorSet refine_phases(const UnitCirclePoly& p, PhaseFactorSet ph, int max_iterations) {
    const int m = p.degree();
    if (ph.degree != m) throw Error(ErrorKind::Synthesis, "initial phases have the wrong degree");
    const auto xs = uniform_grid(grid_size(m));
    const Eigen::Index npts = static_cast<Eigen::Index>(xs.size());
    const Eigen::Index nparam = 2 * (m + 1) + 1;  // theta_0..m, phi_0..m, lambda

    auto residual = [&](const PhaseFactorSet& cur, MatrixXd* jac) {
        VectorXd r(2 * npts);
        if (jac) jac->setZero(2 * npts, nparam);
        std::vector<LayerJet> jets;
        jets.reserve(static_cast<std::size_t>(m) + 1);
        for (int j = 0; j <= m; ++j) jets.push_back(layer_jet(cur, j));
        std::vector<Eigen::Vector2cd> right(static_cast<std::size_t>(m) + 1);
        std::vector<Eigen::RowVector2cd> left(static_cast<std::size_t>(m) + 1);
        for (Eigen::Index k = 0; k < npts; ++k) {
            const cplx z = std::polar(1.0, xs[static_cast<std::size_t>(k)]);
            // right[j]: state entering layer j; left[j]: row vector after it
            Eigen::Vector2cd v(1.0, 0.0);
            for (int j = 0; j <= m; ++j) {
                right[static_cast<std::size_t>(j)] = v;
                v = jets[static_cast<std::size_t>(j)].value * v;
                if (j < m) v(0) *= z;
            }
            Eigen::RowVector2cd u(1.0, 0.0);
            for (int j = m; j >= 0; --j) {
                left[static_cast<std::size_t>(j)] = u;
                u = u * jets[static_cast<std::size_t>(j)].value;
                if (j > 0) u(0) *= z;
            }
            const cplx diff = v(0) - p(z);
            r(2 * k) = diff.real();
            r(2 * k + 1) = diff.imag();
            if (!jac) continue;
            for (int j = 0; j <= m; ++j) {
                const auto& jet = jets[static_cast<std::size_t>(j)];
                const auto& l = left[static_cast<std::size_t>(j)];
                const auto& rv = right[static_cast<std::size_t>(j)];
                const cplx dt = (l * jet.d_theta * rv)(0, 0);
                const cplx dp = (l * jet.d_phi * rv)(0, 0);
                (*jac)(2 * k, j) = dt.real();
                (*jac)(2 * k + 1, j) = dt.imag();
                (*jac)(2 * k, m + 1 + j) = dp.real();
                (*jac)(2 * k + 1, m + 1 + j) = dp.imag();
                if (j == 0) {
                    const cplx dl = (l * jet.d_lambda * rv)(0, 0);
                    (*jac)(2 * k, nparam - 1) = dl.real();
                    (*jac)(2 * k + 1, nparam - 1) = dl.imag();
                }
            }
        }
        return r;
    };
    auto apply = [&](const PhaseFactorSet& base, const VectorXd& step) {
        PhaseFactorSet out = base;
        for (int j = 0; j <= m; ++j) {
            out.theta[static_cast<std::size_t>(j)] += step(j);
            out.phi[static_cast<std::size_t>(j)] += step(m + 1 + j);
        }
        out.lambda += step(nparam - 1);
        return out;
    };

    MatrixXd jac;
    VectorXd r = residual(ph, &jac);
    double cost = r.squaredNorm();
    double mu = -1.0;
    for (int it = 0; it < max_iterations && r.lpNorm<Eigen::Infinity>() > 1e-13; ++it) {
        const MatrixXd jtj = jac.transpose() * jac;
        const VectorXd g = jac.transpose() * r;
        if (mu < 0.0) mu = 1e-3 * jtj.diagonal().maxCoeff();
        bool accepted = false;
        for (int tries = 0; tries < 30 && !accepted; ++tries) {
            MatrixXd lhs = jtj;
            lhs.diagonal().array() += mu;
            const VectorXd step = lhs.ldlt().solve(-g);
            PhaseFactorSet trial = apply(ph, step);
            VectorXd tr = residual(trial, nullptr);
            if (tr.squaredNorm() < cost) {
                ph = std::move(trial);
                r = residual(ph, &jac);
                cost = r.squaredNorm();
                mu = std::max(mu / 3.0, 1e-15);
                accepted = true;
            } else {
                mu *= 4.0;
            }
        }
        if (!accepted) break;
    }
    for (int j = 0; j <= m; ++j) {
        ph.theta[static_cast<std::size_t>(j)] = wrap_angle(ph.theta[static_cast<std::size_t>(j)]);
        ph.phi[static_cast<std::size_t>(j)] = wrap_angle(ph.phi[static_cast<std::size_t>(j)]);
    }
    ph.lambda = wrap_angle(ph.lambda);
    return ph;
}

PhaseSolution solve_phases(const UnitCirclePoly& p, const SolveOptions& options) {
    PhaseSolution out;
    out.complement = complementary_poly(p);
    if (!options.force_fallback) {
        try {
            out.phases = peel_angles(p, out.complement);
            out.error = reconstruction_error(out.phases, p);
            if (out.error <= kReconstructionTolerance) return out;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::PeelConsistency) throw;
        }
    }
    out.used_fallback = true;
    PhaseFactorSet start = peel(p, out.complement).phases;
    if (options.force_fallback) {
        // start away from the exact answer so the optimiser has work to do
        CounterRng rng(0x5eed);
        for (auto& t : start.theta) t += 1e-3 * (rng.next_uniform() - 0.5);
        for (auto& f : start.phi) f += 1e-3 * (rng.next_uniform() - 0.5);
    }
    out.phases = refine_phases(p, std::move(start));
    out.error = reconstruction_error(out.phases, p);
    if (out.error > kReconstructionTolerance) {
        char msg[96];
        std::snprintf(msg, sizeof msg, "phase synthesis failed at degree %d, grid error %.3e", p.degree(), out.error);
        throw Error(ErrorKind::Synthesis, msg);
    }
    return out;
}

}  // namespace gqsvt
