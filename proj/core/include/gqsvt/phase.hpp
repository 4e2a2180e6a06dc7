#pragma once

#include <array>
#include <vector>

#include "gqsvt/poly.hpp"

namespace gqsvt {

inline constexpr int kMaxPhaseDegree = 128;

// Angles of the single-qubit layers R_0..R_m. Only R_0 carries lambda.
struct PhaseFactorSet {
    int degree = 0;
    std::vector<double> theta{0.0};
    std::vector<double> phi{0.0};
    double lambda = 0.0;
};

// 2x2 matrix of layer j.
Eigen::Matrix2cd layer_matrix(const PhaseFactorSet& phases, int j);

// Q with |P|^2 + |Q|^2 = 1 on the unit circle.
UnitCirclePoly complementary_poly(const UnitCirclePoly& p);

// Invert the layer product one degree at a time. Throws PeelConsistency
// when a discarded coefficient exceeds 1e-9.
PhaseFactorSet peel_angles(const UnitCirclePoly& p, const UnitCirclePoly& q);

// Top-left entry of R_m A R_{m-1} ... A R_0 with A = diag(z, 1).
UnitCirclePoly reconstruct_poly(const PhaseFactorSet& phases);

// Full 2x2 polynomial matrix, row-major {00, 01, 10, 11}.
std::array<UnitCirclePoly, 4> reconstruct_matrix(const PhaseFactorSet& phases);

// Max |reconstruct(phases) - p| on a grid of 4m + 64 points.
double reconstruction_error(const PhaseFactorSet& phases, const UnitCirclePoly& p);

// Levenberg-Marquardt over all angles, minimising the grid mismatch.
PhaseFactorSet refine_phases(const UnitCirclePoly& p, PhaseFactorSet initial, int max_iterations = 500);

struct SolveOptions {
    bool force_fallback = false;
};

struct PhaseSolution {
    PhaseFactorSet phases;
    UnitCirclePoly complement;
    double error = 0.0;
    bool used_fallback = false;
};

PhaseSolution solve_phases(const UnitCirclePoly& p, const SolveOptions& options = {});

}  // namespace gqsvt
