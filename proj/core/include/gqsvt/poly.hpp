#pragma once

#include <span>
#include <vector>

#include "gqsvt/types.hpp"

namespace gqsvt {

inline constexpr int kMaxTargetDegree = 512;

// f(x) = sum_k coeffs[k] x^k.
struct MonomialPoly {
    std::vector<double> coeffs{0.0};

    MonomialPoly() = default;
    explicit MonomialPoly(std::vector<double> c);

    int degree() const;  // index of the last nonzero coefficient, 0 for the zero polynomial
    double operator()(double x) const;
    MonomialPoly times_x() const;
    MonomialPoly scaled(double s) const;
};

// f(x) = sum_j coeffs[j] T_j(x).
struct ChebyshevPoly {
    std::vector<double> coeffs{0.0};

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    double operator()(double x) const;
};

// Symmetric Laurent polynomial sum_{j=-d}^{d} c_j z^j with c_{-j} = c_j.
struct LaurentPoly {
    int d = 0;
    std::vector<double> coeffs{0.0};  // coeffs[j + d] = c_j

    double at(int j) const { return coeffs.at(static_cast<std::size_t>(j + d)); }
    cplx operator()(cplx z) const;
};

// p(z) = sum_{k=0}^{m} coeffs[k] z^k, evaluated on |z| = 1.
struct UnitCirclePoly {
    std::vector<cplx> coeffs{cplx{0.0}};

    UnitCirclePoly() = default;
    explicit UnitCirclePoly(std::vector<cplx> c) : coeffs(std::move(c)) {}

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    cplx operator()(cplx z) const;
};

ChebyshevPoly monomial_to_chebyshev(const MonomialPoly& f);
LaurentPoly laurent_from_chebyshev(const ChebyshevPoly& f);
UnitCirclePoly shift_to_unit_circle(const LaurentPoly& f);

// The three conversions chained: z^d f((z + 1/z) / 2).
UnitCirclePoly embed_on_circle(const MonomialPoly& f);

// sum_k p_k e^{ikx}
cplx eval_unit_circle(const UnitCirclePoly& p, double x);

// max |f| on [-1, 1]: Chebyshev-node scan, then golden-section refinement
// of every local peak.
double poly_max_on_interval(const MonomialPoly& f);

// max |p(e^{ix})| over x, same strategy on a uniform grid.
double max_on_circle(const UnitCirclePoly& p);

// Coefficient-wise helpers shared by the phase solver.
std::vector<cplx> poly_multiply(std::span<const cplx> a, std::span<const cplx> b);
std::vector<cplx> poly_from_roots(std::span<const cplx> roots);

}  // namespace gqsvt
