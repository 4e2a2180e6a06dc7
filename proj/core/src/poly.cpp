#include "gqsvt/poly.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace gqsvt {

MonomialPoly::MonomialPoly(std::vector<double> c) : coeffs(std::move(c)) {
    if (coeffs.empty()) coeffs.push_back(0.0);
}

int MonomialPoly::degree() const {
    for (int k = static_cast<int>(coeffs.size()) - 1; k > 0; --k)
        if (coeffs[static_cast<std::size_t>(k)] != 0.0) return k;
    return 0;
}

double MonomialPoly::operator()(double x) const {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

MonomialPoly MonomialPoly::times_x() const {
    std::vector<double> c(coeffs.size() + 1, 0.0);
    std::copy(coeffs.begin(), coeffs.end(), c.begin() + 1);
    return MonomialPoly(std::move(c));
}

MonomialPoly MonomialPoly::scaled(double s) const {
    MonomialPoly out = *this;
    for (double& c : out.coeffs) c *= s;
    return out;
}

double ChebyshevPoly::operator()(double x) const {
    // Clenshaw
    double b1 = 0.0, b2 = 0.0;
    for (int j = degree(); j >= 1; --j) {
        const double b0 = coeffs[static_cast<std::size_t>(j)] + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return coeffs[0] + x * b1 - b2;
}

cplx LaurentPoly::operator()(cplx z) const {
    cplx acc = 0.0;
    for (int j = -d; j <= d; ++j) acc += at(j) * std::pow(z, j);
    return acc;
}

cplx UnitCirclePoly::operator()(cplx z) const {
    cplx acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
    return acc;
}

ChebyshevPoly monomial_to_chebyshev(const MonomialPoly& f) {
    const int d = f.degree();
    if (d > kMaxTargetDegree)
        throw Error(ErrorKind::Capacity, "polynomial degree " + std::to_string(d) + " exceeds 512");
    // Horner in the Chebyshev basis: r <- x r + a_k, using x T_j = (T_{j+1} + T_{j-1}) / 2.
    std::vector<double> r(static_cast<std::size_t>(d) + 1, 0.0);
    std::vector<double> next(r.size(), 0.0);
    int len = 0;  // current Chebyshev degree + 1
    for (int k = d; k >= 0; --k) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int j = 0; j < len; ++j) {
            const double v = r[static_cast<std::size_t>(j)];
            if (j == 0) {
                next[1] += v;
            } else {
                next[static_cast<std::size_t>(j) + 1] += 0.5 * v;
                next[static_cast<std::size_t>(j) - 1] += 0.5 * v;
            }
        }
        next[0] += f.coeffs[static_cast<std::size_t>(k)];
        std::swap(r, next);
        len = d - k + 1;
    }
    ChebyshevPoly out;
    out.coeffs = std::move(r);
    return out;
}

LaurentPoly laurent_from_chebyshev(const ChebyshevPoly& f) {
    LaurentPoly out;
    out.d = f.degree();
    out.coeffs.assign(2 * static_cast<std::size_t>(out.d) + 1, 0.0);
    out.coeffs[static_cast<std::size_t>(out.d)] = f.coeffs[0];
    for (int j = 1; j <= out.d; ++j) {
        const double half = 0.5 * f.coeffs[static_cast<std::size_t>(j)];
        out.coeffs[static_cast<std::size_t>(out.d + j)] = half;
        out.coeffs[static_cast<std::size_t>(out.d - j)] = half;
    }
    return out;
}

UnitCirclePoly shift_to_unit_circle(const LaurentPoly& f) {
    std::vector<cplx> p(f.coeffs.begin(), f.coeffs.end());
    return UnitCirclePoly(std::move(p));
}

UnitCirclePoly embed_on_circle(const MonomialPoly& f) {
    return shift_to_unit_circle(laurent_from_chebyshev(monomial_to_chebyshev(f)));
}

cplx eval_unit_circle(const UnitCirclePoly& p, double x) { return p(std::polar(1.0, x)); }

namespace {

// Maximise g on [lo, hi] assuming a single peak.
double golden_max(const std::function<double(double)>& g, double lo, double hi) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double gc = g(c), gd = g(d);
    double best = std::max({g(lo), g(hi), gc, gd});
    for (int it = 0; it < 80 && (b - a) > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
        if (gc >= gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
            best = std::max(best, gc);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
            best = std::max(best, gd);
        }
    }
    return best;
}

// Scan a grid, then refine each local peak inside its neighbouring bracket.
double refine_peaks(const std::vector<double>& xs, const std::function<double(double)>& g, bool periodic) {
    const std::size_t n = xs.size();
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = g(xs[i]);
    double best = *std::max_element(v.begin(), v.end());
    for (std::size_t i = 0; i < n; ++i) {
        const bool has_prev = periodic || i > 0;
        const bool has_next = periodic || i + 1 < n;
        const std::size_t ip = (i + n - 1) % n, in = (i + 1) % n;
        if (has_prev && v[ip] > v[i]) continue;
        if (has_next && v[in] > v[i]) continue;
        double lo = has_prev ? xs[ip] : xs[i];
        double hi = has_next ? xs[in] : xs[i];
        if (periodic) {
            // keep the bracket contiguous across the 0 / 2 pi seam
            if (lo > xs[i]) lo -= 2.0 * kPi;
            if (hi < xs[i]) hi += 2.0 * kPi;
        }
        if (lo > hi) std::swap(lo, hi);
        best = std::max(best, golden_max(g, lo, hi));
    }
    return best;
}

}  // namespace

double poly_max_on_interval(const MonomialPoly& f) {
    const int d = f.degree();
    if (d == 0) return std::abs(f.coeffs[0]);
    const int n = std::max(128, 16 * (d + 1));
    std::vector<double> xs(static_cast<std::size_t>(n) + 1);
    // ascending Chebyshev-Lobatto nodes, endpoints included
    for (int k = 0; k <= n; ++k) xs[static_cast<std::size_t>(k)] = -std::cos(kPi * k / n);
    return refine_peaks(xs, [&f](double x) { return std::abs(f(std::clamp(x, -1.0, 1.0))); }, false);
}

double max_on_circle(const UnitCirclePoly& p) {
    const int m = p.degree();
    const int n = 16 * (m + 1) + 64;
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) xs[static_cast<std::size_t>(k)] = 2.0 * kPi * k / n;
    return refine_peaks(xs, [&p](double x) { return std::abs(eval_unit_circle(p, x)); }, true);
}

std::vector<cplx> poly_multiply(std::span<const cplx> a, std::span<const cplx> b) {
    std::vector<cplx> out(a.size() + b.size() - 1, cplx{0.0});
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

std::vector<cplx> poly_from_roots(std::span<const cplx> roots) {
    std::vector<cplx> out{cplx{1.0}};
    for (const cplx& r : roots) {
        std::vector<cplx> next(out.size() + 1, cplx{0.0});
        for (std::size_t i = 0; i < out.size(); ++i) {
            next[i + 1] += out[i];
            next[i] -= r * out[i];
        }
        out = std::move(next);
    }
    return out;
}

}  // namespace gqsvt
