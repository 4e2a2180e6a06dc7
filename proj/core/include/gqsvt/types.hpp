#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace gqsvt {

using cplx = std::complex<double>;
using MatrixXd = Eigen::MatrixXd;
using MatrixXc = Eigen::MatrixXcd;
using VectorXd = Eigen::VectorXd;
using VectorXc = Eigen::VectorXcd;

enum class ErrorKind {
    Capacity,
    Domain,
    Factorization,
    PeelConsistency,
    Synthesis,
    Scale,
    Shape,
    Qubitization,
    Construction,
    Arity,
    Breakdown,
    InapplicableBound,
    Input,
    Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Thrown by the BiCG solvers when a denominator vanishes.
class BreakdownError : public Error {
public:
    BreakdownError(int iteration, const std::string& what)
        : Error(ErrorKind::Breakdown, what), iteration_(iteration) {}
    int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

// Thrown by the matrix and vector readers; line is 1-based, 0 when unknown.
class InputError : public Error {
public:
    InputError(int line, const std::string& what)
        : Error(ErrorKind::Input, what), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

// Stateless counter-based generator: draw i of stream `seed` is a pure
// function of (seed, i), so streams can be split without shared state.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

    std::uint64_t bits(std::uint64_t counter) const { return mix(key_ + counter * 0x9e3779b97f4a7c15ULL); }

    // Uniform on [0, 1) with 53 random bits.
    double uniform(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

    // Sequential helpers for callers that just want the next number.
    double next_uniform() { return uniform(counter_++); }
    double next_normal();

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

inline constexpr double kPi = 3.14159265358979323846;

// Reduce an angle to (-pi, pi].
double wrap_angle(double a);

bool is_power_of_two(long n);

}  // namespace gqsvt
