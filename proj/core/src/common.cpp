#include <cmath>

#include "gqsvt/types.hpp"

namespace gqsvt {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Capacity: return "capacity";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Factorization: return "factorization";
        case ErrorKind::PeelConsistency: return "peel-consistency";
        case ErrorKind::Synthesis: return "synthesis";
        case ErrorKind::Scale: return "scale";
        case ErrorKind::Shape: return "shape";
        case ErrorKind::Qubitization: return "qubitization";
        case ErrorKind::Construction: return "construction";
        case ErrorKind::Arity: return "arity";
        case ErrorKind::Breakdown: return "breakdown";
        case ErrorKind::InapplicableBound: return "inapplicable-bound";
        case ErrorKind::Input: return "input";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

double CounterRng::next_normal() {
    // Box-Muller; 1 - u keeps the log argument away from zero.
    const double u1 = 1.0 - next_uniform();
    const double u2 = next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

double wrap_angle(double a) {
    double r = std::remainder(a, 2.0 * kPi);
    if (r <= -kPi) r += 2.0 * kPi;
    return r;
}

bool is_power_of_two(long n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace gqsvt
