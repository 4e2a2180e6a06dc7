#pragma once

#include <vector>

#include "gqsvt/block_encoding.hpp"
#include "gqsvt/phase.hpp"

namespace gqsvt {

enum class OpKind { Rotation, M, Mt, N, Nt };

struct ProgramOp {
    OpKind kind = OpKind::Rotation;
    int rotation = -1;  // layer index for Rotation ops
};

enum class Parity { Even, Odd };

// Time-ordered circuit: ops[0] acts first.
struct GqsvtProgram {
    std::vector<ProgramOp> ops;
    PhaseFactorSet phases;
    MonomialPoly target;          // the polynomial before normalisation
    double subnormalization = 1.0;  // block ~ target(sigma) / subnormalization
    int degree = 0;
    Parity parity = Parity::Even;
    bool transpose = false;
    double phase_error = 0.0;

    int rotation_count() const;
    int controlled_count() const;
};

// Interleave layers with the controlled operators. Requires a phase set of
// degree 2 deg(target).
GqsvtProgram assemble_program(const PhaseFactorSet& phases, const MonomialPoly& target, bool transpose,
                              double subnormalization = 1.0);

// Normalise by the maximum on [-1, 1] (times 1 + 1e-10), synthesize phases, assemble.
GqsvtProgram make_program(const MonomialPoly& target, bool transpose);

// Applies programs to an encoding without materialising the controlled operators.
class ProgramExecutor {
public:
    explicit ProgramExecutor(const BlockEncoding& enc);

    long n() const { return n_; }
    long dim() const { return 2 * d_; }

    // states: dim() x k, updated in place
    void run(const GqsvtProgram& program, MatrixXc& states) const;
    MatrixXc compose(const GqsvtProgram& program) const;
    MatrixXc extract_block(const GqsvtProgram& program) const;
    // |0>_c |0>_a |phi>
    VectorXc prepare(const VectorXc& phi) const;

private:
    long n_, d_;
    MatrixXc w_, wt_, w_adj_, wt_adj_;
};

MatrixXc compose_program(const GqsvtProgram& program, const BlockEncoding& enc);
MatrixXc extract_block(const GqsvtProgram& program, const BlockEncoding& enc);

struct StateResult {
    VectorXc full;
    VectorXc projected;  // <0_c 0_a| on the output
    double success_probability = 0.0;
};

StateResult apply_to_state(const GqsvtProgram& program, const BlockEncoding& enc, const VectorXc& phi);
double success_probability(const GqsvtProgram& program, const BlockEncoding& enc, const VectorXc& phi);

enum class FunctionKind { Right, Diamond };

// sum_k f(sigma_k) v_k v_k^T (Right) or sum_k f(sigma_k) w_k v_k^T (Diamond).
MatrixXd oracle_generalized_function(const MatrixXd& a, const MonomialPoly& f, FunctionKind kind);

// The ordinary matrix polynomial sum_k c_k A^k.
MatrixXd matrix_polynomial(const MatrixXd& a, const MonomialPoly& f);
VectorXd matrix_polynomial_apply(const MatrixXd& a, const MonomialPoly& f, const VectorXd& b);

}  // namespace gqsvt
