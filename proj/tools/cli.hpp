#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <gqsvt/bicg.hpp>

namespace gqsvt::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kNoConvergence = 2,
    kBreakdown = 3,
    kInputError = 4,
};

struct MatrixInput {
    MatrixXd a;
    long original_n = 0;
    std::string source;
};

// A file path (Matrix Market or dense CSV) or a generator:
//   identity N | spd N cond K seed S | nonsym N cond K seed S | tridiag N SUB DIAG SUPER
MatrixInput parse_matrix(const std::string& source);
MatrixInput parse_matrix_text(const std::string& text, const std::string& name);

// Block-diagonal identity padding up to the next power of two.
MatrixInput pad_to_power_of_two(MatrixInput in);

// ones | e1 | random SEED | file with one entry per line
VectorXd parse_vector(const std::string& source, long n);

// Real polynomial in x, e.g. "x^3 - 0.5x", "1/3x^2 + 2*x - 1".
MonomialPoly parse_polynomial(const std::string& text);

std::string format_number(double v);

// Full command line minus the program name. Writes the report to `out`
// unless a report path is given.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gqsvt::cli
