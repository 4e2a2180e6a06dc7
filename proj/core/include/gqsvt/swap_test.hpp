#pragma once

#include <cstdint>

#include "gqsvt/engine.hpp"

namespace gqsvt {

// Outcome probabilities of the Hadamard-test circuit
// H . (|0><0| U + |1><1| V) . H on |0>_h |0>_c |0>_a |b>.
struct OverlapOutcome {
    double p0 = 0.0;  // h = 0 with the control and ancillas at 0
    double p1 = 0.0;  // h = 1 with the control and ancillas at 0
    double estimate = 0.0;  // Re <0 0 b| U^dag V |0 0 b>, i.e. p0 - p1
    double std_error = 0.0;
    long shots = 0;  // 0 in exact mode
};

OverlapOutcome exact_overlap(const GqsvtProgram& u, const GqsvtProgram& v, const BlockEncoding& enc,
                             const VectorXc& b);

// Draws `shots` outcomes from {p0, p1, other}; draw i of call `stream`
// depends only on (seed, stream, i).
OverlapOutcome sampled_overlap(const GqsvtProgram& u, const GqsvtProgram& v, const BlockEncoding& enc,
                               const VectorXc& b, long shots, std::uint64_t seed, std::uint64_t stream = 0);

// Same two routines on precomputed executor and state, used in solver loops.
OverlapOutcome exact_overlap(const ProgramExecutor& exec, const GqsvtProgram& u, const GqsvtProgram& v,
                             const VectorXc& b);
OverlapOutcome sample_outcomes(double p0, double p1, long shots, std::uint64_t seed, std::uint64_t stream);

}  // namespace gqsvt
