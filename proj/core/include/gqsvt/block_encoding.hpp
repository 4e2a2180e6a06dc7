#pragma once

#include <vector>

#include "gqsvt/types.hpp"

namespace gqsvt {

// Singular value decomposition A = sum_k sigma_k left_k right_k^T,
// sigma descending, each right_k with its first nonzero entry positive.
struct Svd {
    VectorXd sigma;
    MatrixXd right;  // columns v_k
    MatrixXd left;   // columns w_k
};

Svd sorted_svd(const MatrixXd& a);

// Unitary U on (a ancilla qubits) x (system) with <0_a| U |0_a> = A / alpha.
// Basis index = ancilla * n + system.
struct BlockEncoding {
    MatrixXd matrix;      // the encoded operator A
    double alpha = 1.0;   // A / alpha is what the block holds
    int ancillas = 1;
    MatrixXc unitary;
    Svd svd;              // of A / alpha
    VectorXd right_projector;  // diagonal of the input projector (0/1)
    VectorXd left_projector;   // diagonal of the output projector (0/1)

    long n() const { return matrix.rows(); }
    long dim() const { return unitary.rows(); }
    MatrixXd scaled() const { return matrix / alpha; }
};

// [[A/alpha, S], [S, -A/alpha]] with S = sum sqrt(1 - sigma^2) w v^T.
BlockEncoding build_standard_encoding(const MatrixXd& a, double alpha);

// Embed a one-ancilla encoding into `ancillas` qubits as (Y x I)(I x U)(Z x I),
// with random unitaries Y, Z on the ancilla register that fix |0_a>.
BlockEncoding embed_encoding(const BlockEncoding& base, int ancillas, std::uint64_t seed);

struct EncodingCheck {
    double block_residual = 0.0;    // max | <0|U|0> - A/alpha |
    double unitarity_residual = 0.0;  // max | U^dag U - I |
};

EncodingCheck verify_block_encoding(const BlockEncoding& enc);

// W = (2 Pl - I) U and Wt = (2 Pr - I) U^dag.
struct QubitizedPair {
    MatrixXc w;
    MatrixXc wt;
    double structure_residual = 0.0;
};

QubitizedPair qubitize(const BlockEncoding& enc);

// Controlled operators on (control qubit) x (ancilla x system), control most significant.
struct ControlledOperatorSet {
    MatrixXc m;   // |0><0| W  + |1><1| I
    MatrixXc mt;  // |0><0| Wt + |1><1| I
    MatrixXc n;   // |0><0| I  + |1><1| W^dag
    MatrixXc nt;  // |0><0| I  + |1><1| Wt^dag
    double eigen_residual = 0.0;  // worst deviation from the expected action on the rotation planes
};

ControlledOperatorSet build_controlled_ops(const BlockEncoding& enc, const QubitizedPair& pair);

struct PiZCheck {
    double pi_z_residual = 0.0;         // CNOT (Z x I) CNOT against |0><0| (2P-I) + |1><1| (I-2P)
    double cnot_gate_residual = 0.0;    // multi-controlled NOT cascade against the projector-controlled NOT
    double control0_residual = 0.0;     // Pi_Z . C0-U against M on control-|0> inputs
    double full_operator_residual = 0.0;  // same comparison on the whole space (diagnostic)
    double residual() const;
};

// `projector` overrides the ancilla projector used to build the CNOT (diagonal 0/1).
PiZCheck pi_z_identity_check(const BlockEncoding& enc);
PiZCheck pi_z_identity_check(const BlockEncoding& enc, const VectorXd& projector);

}  // namespace gqsvt
