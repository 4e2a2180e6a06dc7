#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "gqsvt/engine.hpp"
#include "gqsvt/swap_test.hpp"

namespace gqsvt {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Monomial coefficients of the iterate polynomials after j steps:
// x_j = X_j(A) b, r_j = R_j(A) b, p_j = P_j(A) b.
struct BicgCoefficients {
    int j = 0;
    std::vector<double> chi;          // degree j - 1 (empty at j = 0)
    std::vector<double> gamma{1.0};   // degree j
    std::vector<double> rho{1.0};     // degree j

    MonomialPoly solution_poly() const { return chi.empty() ? MonomialPoly() : MonomialPoly(chi); }
    MonomialPoly residual_poly() const { return MonomialPoly(gamma); }
    MonomialPoly direction_poly() const { return MonomialPoly(rho); }
};

// chi and gamma move to step j + 1 using alpha_j and the current rho.
void advance_residual(BicgCoefficients& c, double alpha);
// rho moves to step j + 1 using beta_j and the already advanced gamma.
void advance_direction(BicgCoefficients& c, double beta);
// Both updates, in order.
void coefficient_update(BicgCoefficients& c, double alpha, double beta);

struct BicgIteration {
    int j = 0;
    double alpha = kNaN;
    double beta = kNaN;             // NaN on the converging step
    double rnorm_est = kNaN;        // ||r_{j+1}|| as the solver sees it
    double rnorm_true = kNaN;       // ||R_{j+1}(A) b|| evaluated directly
    int degree = 0;                 // largest program degree used in this step
    int rotations = 0;
    int controlled = 0;
    double r_max = kNaN, p_max = kNaN, pp_max = kNaN;
    double gap_generalized = kNaN;  // ||generalized R(A) b - R(A) b|| / R_max
    double gap_circuit = kNaN;      // ||circuit output * R_max - R(A) b|| / R_max
    long shots = 0;
};

struct ClassicalResult {
    VectorXd x;
    bool converged = false;
    int iterations = 0;
    std::vector<BicgIteration> trace;
    std::vector<VectorXd> residuals;   // r_0, r_1, ...
    std::vector<VectorXd> solutions;   // x_0, x_1, ...
    std::vector<BicgCoefficients> tables;  // coefficients after each step, tables[j] at step j
    int breakdown_iteration = -1;
};

// Classical biconjugate gradient from x_0 = 0 with shadow residual b.
// Stops when ||r|| <= tol. Throws BreakdownError on a vanishing denominator
// unless `throw_on_breakdown` is false, in which case the partial run is returned.
ClassicalResult classical_bicg(const MatrixXd& a, const VectorXd& b, double tol, int maxit,
                               bool throw_on_breakdown = true);

enum class InnerProductMode { Exact, Oracle, Sampled };

struct QuantumOptions {
    InnerProductMode mode = InnerProductMode::Exact;
    long shots = 0;
    std::uint64_t seed = 0;
    std::optional<double> scale;  // defaults to the spectral norm of A
    bool diagnostics = true;      // compute rnorm_true and the gap columns
    bool throw_on_breakdown = true;
};

struct DepthReport {
    int k = 0;  // index of the final iteration
    int max_degree = 0;
    int max_controlled = 0;
    int max_rotations = 0;
    bool consistent = false;  // degree k + 1, 2(k + 1) controlled ops, 2(k + 1) + 1 rotations
};

struct QuantumResult {
    VectorXd x;  // solution of the original system
    bool converged = false;
    int iterations = 0;
    double scale = 1.0;   // A is encoded as A / scale
    double b_norm = 1.0;  // the loop runs on b / ||b||
    double x_max = kNaN;
    std::vector<BicgIteration> trace;  // all quantities refer to (A / scale, b / ||b||)
    BicgCoefficients coefficients;
    DepthReport depth;
    long total_shots = 0;
    long synthesized = 0;  // number of phase syntheses
    int breakdown_iteration = -1;
};

// Runs the iteration with every inner product taken from a swap test on
// polynomial programs of A / scale. Convergence is ||b|| rnorm_est <= tol.
QuantumResult quantum_bicg(const MatrixXd& a, const VectorXd& b, double tol, int maxit, const QuantumOptions& options = {});

DepthReport depth_report(const std::vector<BicgIteration>& trace);

// Two-sided Lanczos with unit-norm bases V, W starting from b / ||b||.
struct LanczosResult {
    int k = 0;
    VectorXd mu;     // diagonal of T
    VectorXd sub;    // T(i+1, i), size k - 1
    VectorXd super;  // T(i, i+1), size k - 1
    VectorXd scales; // w_i^T v_i
    MatrixXd v, w;   // n x k
    VectorXd v_next, w_next;
    double v_residual = 0.0;  // coefficient of v_{k+1}
    double w_residual = 0.0;  // coefficient of w_{k+1}
    bool invariant = false;   // stopped early on an invariant subspace

    MatrixXd t() const;
};

LanczosResult lanczos_tridiagonalize(const MatrixXd& a, const VectorXd& b, int k, bool rebiorthogonalize = true);

struct LanczosCheck {
    double forward = 0.0;     // A V - V T - v_res v_{k+1} e_k^T
    double transpose = 0.0;   // A^T W - W (S^-1 T^T S) - w_res w_{k+1} e_k^T, S = diag(scales)
    double transpose_plain = 0.0;  // same with T^T, exact only for symmetric A
    double biorthogonality = 0.0;  // off-diagonal part of W^T V
};

LanczosCheck check_lanczos(const MatrixXd& a, const LanczosResult& lz);

struct Ellipse {
    double center = 0.0;
    cplx focal{0.0};  // c, real for horizontal ellipses, imaginary for vertical ones
    double semi_x = 0.0, semi_y = 0.0;
};

// Smallest axis-aligned ellipse around the spectrum, centred on the hull centroid.
Ellipse fit_ellipse(const std::vector<cplx>& eigenvalues);
double ellipse_ratio(const Ellipse& e, cplx lambda);

struct BoundReport {
    double kappa = 0.0;   // condition number of |D|^{1/2} U
    Ellipse ellipse;
    cplx lambda_star{0.0};
    double ratio = 0.0;
    std::vector<cplx> eigenvalues;
    MatrixXd lower, diag, upper;  // T = L D U

    double factor(int k) const;  // 2 kappa ratio^k
};

BoundReport convergence_bound(const LanczosResult& lz, const std::optional<Ellipse>& ellipse = std::nullopt);

// ||e||_r = sqrt(e^T M e) with M = W' U^T |D| U W'^T and W' = W diag(scales)^-1.
double error_r_norm(const BoundReport& bound, const LanczosResult& lz, const VectorXd& e);

// Distance between the generalized function a quantum program realises and
// the ordinary matrix polynomial, along classical BiCG residual polynomials.
struct GapSample {
    int j = 0;
    double r_max = 0.0;
    double generalized = 0.0;  // parity-selected generalized function
    double circuit = 0.0;      // assembled program
};

std::vector<GapSample> divergence_along_iterates(const MatrixXd& a_scaled, const VectorXd& b, int steps);

}  // namespace gqsvt
