#include "cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

namespace gqsvt::cli {

namespace {

using json = nlohmann::ordered_json;

constexpr int kSchemaVersion = 1;

std::vector<std::string> split_words(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string w; in >> w;) out.push_back(w);
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

double to_double(const std::string& tok, int line, const std::string& what) {
    const std::string t = trim(tok);
    double v = 0.0;
    const auto* end = t.data() + t.size();
    const auto res = std::from_chars(t.data(), end, v);
    if (t.empty() || res.ec != std::errc() || res.ptr != end)
        throw InputError(line, what + ": cannot read '" + t + "' as a number");
    return v;
}

long to_long(const std::string& tok, int line, const std::string& what) {
    const std::string t = trim(tok);
    long v = 0;
    const auto* end = t.data() + t.size();
    const auto res = std::from_chars(t.data(), end, v);
    if (t.empty() || res.ec != std::errc() || res.ptr != end)
        throw InputError(line, what + ": cannot read '" + t + "' as an integer");
    return v;
}

std::uint64_t to_seed(const std::string& tok) {
    const long v = to_long(tok, 0, "seed");
    if (v < 0) throw InputError(0, "seed must be non-negative");
    return static_cast<std::uint64_t>(v);
}

MatrixXd random_orthogonal(long n, CounterRng& rng) {
    MatrixXd g(n, n);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) g(i, j) = rng.next_normal();
    Eigen::HouseholderQR<MatrixXd> qr(g);
    MatrixXd q = qr.householderQ();
    const MatrixXd r = qr.matrixQR();
    for (long j = 0; j < n; ++j)
        if (r(j, j) < 0.0) q.col(j) *= -1.0;
    return q;
}

VectorXd log_spaced(long n, double cond) {
    VectorXd s(n);
    for (long i = 0; i < n; ++i) s(i) = n == 1 ? 1.0 : std::pow(cond, -static_cast<double>(i) / static_cast<double>(n - 1));
    return s;
}

MatrixXd generate(const std::vector<std::string>& w) {
    const std::string kind = lower(w[0]);
    auto need = [&](std::size_t count, const char* usage) {
        if (w.size() != count) throw InputError(0, std::string("generator usage: ") + usage);
    };
    if (kind == "identity") {
        need(2, "identity N");
        const long n = to_long(w[1], 0, "identity size");
        if (n < 1) throw InputError(0, "identity size must be positive");
        return MatrixXd::Identity(n, n);
    }
    if (kind == "spd" || kind == "nonsym") {
        need(6, "spd|nonsym N cond K seed S");
        if (lower(w[2]) != "cond" || lower(w[4]) != "seed") throw InputError(0, "generator usage: spd|nonsym N cond K seed S");
        const long n = to_long(w[1], 0, "size");
        const double cond = to_double(w[3], 0, "condition number");
        if (n < 1) throw InputError(0, "size must be positive");
        if (!(cond >= 1.0)) throw InputError(0, "condition number must be at least 1");
        CounterRng rng(to_seed(w[5]));
        const VectorXd s = log_spaced(n, cond);
        const MatrixXd q1 = random_orthogonal(n, rng);
        if (kind == "spd") {
            MatrixXd a = q1 * s.asDiagonal() * q1.transpose();
            return 0.5 * (a + a.transpose());
        }
        const MatrixXd q2 = random_orthogonal(n, rng);
        return q1 * s.asDiagonal() * q2.transpose();
    }
    if (kind == "tridiag") {
        need(5, "tridiag N SUB DIAG SUPER");
        const long n = to_long(w[1], 0, "size");
        if (n < 1) throw InputError(0, "size must be positive");
        const double lo = to_double(w[2], 0, "sub-diagonal"), di = to_double(w[3], 0, "diagonal"),
                     up = to_double(w[4], 0, "super-diagonal");
        MatrixXd a = MatrixXd::Zero(n, n);
        for (long i = 0; i < n; ++i) {
            a(i, i) = di;
            if (i + 1 < n) {
                a(i + 1, i) = lo;
                a(i, i + 1) = up;
            }
        }
        return a;
    }
    throw InputError(0, "unknown matrix generator '" + w[0] + "'");
}

MatrixXd read_matrix_market(std::istream& in) {
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line)) throw InputError(1, "empty Matrix Market file");
    ++lineno;
    const auto header = split_words(lower(line));
    if (header.size() < 5 || header[0] != "%%matrixmarket" || header[1] != "matrix")
        throw InputError(lineno, "missing %%MatrixMarket matrix header");
    const std::string& format = header[2];
    const std::string& field = header[3];
    const std::string& symmetry = header[4];
    if (format != "coordinate" && format != "array") throw InputError(lineno, "unsupported format '" + format + "'");
    if (field != "real" && field != "integer" && field != "double")
        throw InputError(lineno, "unsupported field '" + field + "', expected real");
    if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric")
        throw InputError(lineno, "unsupported symmetry '" + symmetry + "'");

    auto next_data = [&](std::vector<std::string>& words) {
        while (std::getline(in, line)) {
            ++lineno;
            const std::string t = trim(line);
            if (t.empty() || t[0] == '%') continue;
            words = split_words(t);
            return true;
        }
        return false;
    };
    std::vector<std::string> words;
    if (!next_data(words)) throw InputError(lineno, "missing size line");
    const int size_line = lineno;
    if (words.size() != (format == "coordinate" ? 3u : 2u)) throw InputError(lineno, "malformed size line");
    const long rows = to_long(words[0], lineno, "row count");
    const long cols = to_long(words[1], lineno, "column count");
    if (rows < 1 || cols < 1) throw InputError(lineno, "matrix dimensions must be positive");
    if (rows != cols) throw InputError(lineno, "matrix must be square, got " + std::to_string(rows) + "x" + std::to_string(cols));
    MatrixXd a = MatrixXd::Zero(rows, cols);
    const double mirror = symmetry == "skew-symmetric" ? -1.0 : 1.0;
    if (format == "coordinate") {
        const long nnz = to_long(words[2], lineno, "entry count");
        for (long e = 0; e < nnz; ++e) {
            if (!next_data(words)) throw InputError(lineno, "expected " + std::to_string(nnz) + " entries, found " + std::to_string(e));
            if (words.size() != 3) throw InputError(lineno, "entry needs row, column and value");
            const long i = to_long(words[0], lineno, "row index"), j = to_long(words[1], lineno, "column index");
            if (i < 1 || i > rows || j < 1 || j > cols) throw InputError(lineno, "index out of range");
            const double v = to_double(words[2], lineno, "value");
            a(i - 1, j - 1) = v;
            if (symmetry != "general" && i != j) a(j - 1, i - 1) = mirror * v;
        }
    } else {
        // column-major, lower triangle only for symmetric storage
        for (long j = 0; j < cols; ++j) {
            for (long i = symmetry == "general" ? 0 : j; i < rows; ++i) {
                if (!next_data(words)) throw InputError(lineno, "array data ends early");
                if (words.size() != 1) throw InputError(lineno, "array entries must be one per line");
                a(i, j) = to_double(words[0], lineno, "value");
                if (symmetry != "general" && i != j) a(j, i) = mirror * a(i, j);
            }
        }
    }
    if (next_data(words)) throw InputError(lineno, "trailing data after the last entry");
    (void)size_line;
    return a;
}

MatrixXd read_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(t);
        for (std::string cell; std::getline(ss, cell, ',');) row.push_back(to_double(cell, lineno, "CSV cell"));
        if (!rows.empty() && row.size() != rows.front().size())
            throw InputError(lineno, "row has " + std::to_string(row.size()) + " columns, expected " + std::to_string(rows.front().size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InputError(lineno, "CSV file has no data");
    const long n = static_cast<long>(rows.size());
    if (static_cast<long>(rows.front().size()) != n)
        throw InputError(lineno, "matrix must be square, got " + std::to_string(n) + "x" + std::to_string(rows.front().size()));
    MatrixXd a(n, n);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) a(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return a;
}

bool is_generator(const std::string& source) {
    const auto w = split_words(source);
    if (w.empty()) return false;
    const std::string k = lower(w[0]);
    return k == "identity" || k == "spd" || k == "nonsym" || k == "tridiag";
}

json to_json(const VectorXd& v) {
    json out = json::array();
    for (long i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json to_json(const std::vector<double>& v) {
    json out = json::array();
    for (double x : v) out.push_back(x);
    return out;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json trace_json(const std::vector<BicgIteration>& trace) {
    json out = json::array();
    for (const auto& it : trace) {
        out.push_back({{"j", it.j},
                       {"alpha", number(it.alpha)},
                       {"beta", number(it.beta)},
                       {"rnorm_est", number(it.rnorm_est)},
                       {"rnorm_true", number(it.rnorm_true)},
                       {"degree", it.degree},
                       {"rotations", it.rotations},
                       {"controlled", it.controlled},
                       {"r_max", number(it.r_max)},
                       {"p_max", number(it.p_max)},
                       {"pp_max", number(it.pp_max)},
                       {"gap_generalized", number(it.gap_generalized)},
                       {"gap_circuit", number(it.gap_circuit)},
                       {"shots", it.shots}});
    }
    return out;
}

std::string trace_csv(const std::vector<BicgIteration>& trace) {
    std::ostringstream out;
    out << "j,alpha,beta,rnorm_est,rnorm_true_if_available,degree,depth\n";
    for (const auto& it : trace) {
        out << it.j << ',' << format_number(it.alpha) << ',' << format_number(it.beta) << ',' << format_number(it.rnorm_est) << ','
            << format_number(it.rnorm_true) << ',' << it.degree << ',' << it.controlled << '\n';
    }
    return out.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
    f << text;
    if (!f) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
    auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
    auto log = std::make_shared<spdlog::logger>("gqsvt", sink);
    log->set_pattern("[%l] %v");
    log->set_level(spdlog::level::warn);
    if (const char* env = std::getenv("GQSVT_LOG")) {
        const auto level = spdlog::level::from_str(lower(env));
        // from_str maps unknown names to off; only accept real level names
        if (level != spdlog::level::off || lower(env) == "off") log->set_level(level);
    }
    return log;
}

struct Common {
    std::string matrix;
    bool pad = false;
    std::string rhs = "ones";
    std::string report;
    std::string trace;
    std::optional<double> alpha;
};

json matrix_json(const MatrixInput& m) {
    return {{"source", m.source}, {"n", m.a.rows()}, {"original_n", m.original_n}};
}

MatrixInput load_matrix(const Common& c) {
    if (c.matrix.empty()) throw InputError(0, "--matrix is required");
    MatrixInput m = parse_matrix(c.matrix);
    if (c.pad) m = pad_to_power_of_two(std::move(m));
    else if (!is_power_of_two(m.a.rows()))
        throw Error(ErrorKind::Shape, "dimension " + std::to_string(m.a.rows()) + " is not a power of two; use --pad");
    return m;
}

double spectral_norm(const MatrixXd& a) { return sorted_svd(a).sigma(0); }

}  // namespace

std::string format_number(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "" : (v > 0 ? "inf" : "-inf");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

MatrixInput parse_matrix_text(const std::string& text, const std::string& name) {
    std::istringstream in(text);
    const std::string first = lower(trim(text.substr(0, text.find('\n'))));
    MatrixInput m;
    m.source = name;
    m.a = first.rfind("%%matrixmarket", 0) == 0 ? read_matrix_market(in) : read_csv(in);
    m.original_n = m.a.rows();
    if (!m.a.allFinite()) throw InputError(0, "matrix has non-finite entries");
    return m;
}

MatrixInput parse_matrix(const std::string& source) {
    if (is_generator(source)) {
        MatrixInput m;
        m.source = trim(source);
        m.a = generate(split_words(source));
        m.original_n = m.a.rows();
        return m;
    }
    std::ifstream f(source, std::ios::binary);
    if (!f) throw InputError(0, "cannot open matrix file '" + source + "'");
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_matrix_text(buf.str(), source);
}

MatrixInput pad_to_power_of_two(MatrixInput in) {
    long n = in.a.rows();
    long p = 1;
    while (p < n) p <<= 1;
    if (p == n) return in;
    MatrixXd a = MatrixXd::Identity(p, p);
    a.topLeftCorner(n, n) = in.a;
    in.a = std::move(a);
    return in;
}

VectorXd parse_vector(const std::string& source, long n) {
    const auto w = split_words(source);
    if (w.empty()) throw InputError(0, "empty right-hand side");
    const std::string k = lower(w[0]);
    if (k == "ones" && w.size() == 1) return VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
    if (k == "e1" && w.size() == 1) {
        VectorXd v = VectorXd::Zero(n);
        v(0) = 1.0;
        return v;
    }
    if (k == "random") {
        std::string seed;
        if (w.size() == 2) seed = w[1];
        else if (w.size() == 3 && lower(w[1]) == "seed") seed = w[2];
        else throw InputError(0, "usage: random SEED");
        CounterRng rng(to_seed(seed), 1);
        VectorXd v(n);
        for (long i = 0; i < n; ++i) v(i) = rng.next_normal();
        return v / v.norm();
    }
    std::ifstream f(source);
    if (!f) throw InputError(0, "cannot open vector file '" + source + "'");
    std::vector<double> vals;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == '%') continue;
        std::stringstream ss(t);
        for (std::string cell; std::getline(ss, cell, ',');) vals.push_back(to_double(cell, lineno, "vector entry"));
    }
    if (static_cast<long>(vals.size()) > n) throw InputError(lineno, "vector has " + std::to_string(vals.size()) + " entries, expected " + std::to_string(n));
    // a vector for the unpadded system is accepted; padding rows get zeros
    if (vals.empty()) throw InputError(lineno, "vector file has no entries");
    VectorXd v = VectorXd::Zero(n);
    for (std::size_t i = 0; i < vals.size(); ++i) v(static_cast<long>(i)) = vals[i];
    if (!v.allFinite() || v.norm() == 0.0) throw InputError(lineno, "vector must be finite and nonzero");
    return v / v.norm();
}

MonomialPoly parse_polynomial(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw InputError(0, "empty polynomial");
    std::vector<double> coeffs(1, 0.0);
    std::size_t i = 0;
    auto fail = [&](const std::string& why) {
        throw InputError(0, "polynomial '" + text + "': " + why + " at position " + std::to_string(i));
    };
    auto read_number = [&]() {
        const std::size_t start = i;
        while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) ++i;
        if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
            ++i;
            if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        }
        double v = 0.0;
        const auto res = std::from_chars(s.data() + start, s.data() + i, v);
        if (start == i || res.ec != std::errc() || res.ptr != s.data() + i) fail("bad number");
        return v;
    };
    bool first = true;
    while (i < s.size()) {
        double sign = 1.0;
        if (s[i] == '+' || s[i] == '-') {
            sign = s[i] == '-' ? -1.0 : 1.0;
            ++i;
        } else if (!first) {
            fail("expected + or -");
        }
        first = false;
        double coef = 1.0;
        bool has_coef = false;
        if (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) {
            coef = read_number();
            has_coef = true;
            if (i < s.size() && s[i] == '/') {
                ++i;
                const double den = read_number();
                if (den == 0.0) fail("division by zero");
                coef /= den;
            }
            if (i < s.size() && s[i] == '*') ++i;
        }
        int power = 0;
        if (i < s.size() && (s[i] == 'x' || s[i] == 'X')) {
            ++i;
            power = 1;
            if (i < s.size() && s[i] == '^') {
                ++i;
                const std::size_t start = i;
                while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
                if (start == i) fail("expected an exponent");
                power = std::stoi(s.substr(start, i - start));
            }
        } else if (!has_coef) {
            fail("expected a coefficient or x");
        }
        if (power > kMaxTargetDegree) fail("degree exceeds 512");
        if (static_cast<int>(coeffs.size()) <= power) coeffs.resize(static_cast<std::size_t>(power) + 1, 0.0);
        coeffs[static_cast<std::size_t>(power)] += sign * coef;
    }
    return MonomialPoly(std::move(coeffs));
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    auto log = make_logger(err);
    CLI::App app{"Quantum linear-system experiments built on generalized quantum singular value transforms", "gqsvt"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Expand all help");

    Common c;
    auto add_common = [&c](CLI::App* sub, bool needs_matrix) {
        if (needs_matrix) {
            sub->add_option("--matrix", c.matrix, "Matrix file (.mtx, .csv) or generator expression")->required();
            sub->add_flag("--pad", c.pad, "Pad to the next power of two with an identity block");
        }
        sub->add_option("--report", c.report, "Write the JSON report here instead of stdout");
    };

    // phases
    auto* phases = app.add_subcommand("phases", "Synthesize phase factors for a polynomial");
    add_common(phases, false);
    std::string poly_text;
    int random_degree = -1;
    bool random_poly = false;
    std::uint64_t seed = 0;
    double peak = 0.99;
    phases->add_option("--poly", poly_text, "Real polynomial on [-1, 1], e.g. 'x^3 - 0.5x'");
    phases->add_flag("--random", random_poly, "Random complex unit-circle polynomial");
    phases->add_option("--poly-degree", random_degree, "Degree of the random polynomial")->check(CLI::NonNegativeNumber);
    phases->add_option("--seed", seed, "Seed for random inputs");
    phases->add_option("--max", peak, "Peak modulus for random polynomials")->check(CLI::Range(0.0, 1.0));

    // encode
    auto* encode = app.add_subcommand("encode", "Build and verify a block encoding and its qubitized walk");
    add_common(encode, true);
    int ancillas = 1;
    encode->add_option("--alpha", c.alpha, "Scale (defaults to the spectral norm)")->check(CLI::PositiveNumber);
    encode->add_option("--ancillas", ancillas, "Ancilla qubits for the encoding")->check(CLI::Range(1, 3));
    encode->add_option("--seed", seed, "Seed for the ancilla embedding");

    // gqsvt
    auto* gq = app.add_subcommand("gqsvt", "Apply a polynomial to a matrix through a phase-factor program");
    add_common(gq, true);
    bool transpose = false;
    gq->add_option("--poly", poly_text, "Real polynomial")->required();
    gq->add_flag("--transpose", transpose, "Use the transposed program");
    gq->add_option("--alpha", c.alpha, "Scale (defaults to the spectral norm)")->check(CLI::PositiveNumber);
    gq->add_option("--b,--rhs", c.rhs, "Input state: ones, e1, 'random seed K' or a file");
    bool compare_oracle = false;
    gq->add_flag("--compare-oracle", compare_oracle, "Compare the block against the generalized function and f(A)");

    // solve / bicg
    double tol = 1e-6;
    int maxit = 0;
    std::string mode = "exact";
    long shots = 0;
    auto* solve = app.add_subcommand("solve", "Quantum BiCG with swap-test inner products");
    add_common(solve, true);
    solve->add_option("--b,--rhs", c.rhs, "Right-hand side: ones, e1, 'random seed K' or a file");
    solve->add_option("--tol", tol, "Residual tolerance on the original system")->check(CLI::PositiveNumber);
    solve->add_option("--maxit", maxit, "Iteration cap (default n)")->check(CLI::NonNegativeNumber);
    solve->add_option("--mode", mode, "exact, oracle or sampled")->check(CLI::IsMember({"exact", "oracle", "sampled"}));
    solve->add_option("--shots", shots, "Shots per swap test in sampled mode")->check(CLI::PositiveNumber);
    solve->add_option("--seed", seed, "Seed for sampled mode");
    solve->add_option("--alpha", c.alpha, "Scale (defaults to the spectral norm)")->check(CLI::PositiveNumber);
    solve->add_option("--trace", c.trace, "Write the per-iteration CSV trace here");

    auto* bicg = app.add_subcommand("bicg", "Classical BiCG reference run");
    add_common(bicg, true);
    bicg->add_option("--b,--rhs", c.rhs, "Right-hand side: ones, e1, 'random seed K' or a file");
    bicg->add_option("--tol", tol, "Residual tolerance")->check(CLI::PositiveNumber);
    bicg->add_option("--maxit", maxit, "Iteration cap (default n)")->check(CLI::NonNegativeNumber);
    bicg->add_option("--trace", c.trace, "Write the per-iteration CSV trace here");

    auto* bound = app.add_subcommand("bound", "Two-sided Lanczos and the error-norm convergence bound");
    add_common(bound, true);
    int lanczos_k = 0;
    bound->add_option("--b,--rhs", c.rhs, "Starting vector: ones, e1, 'random seed K' or a file");
    bound->add_option("-k,--steps", lanczos_k, "Lanczos dimension (default n)")->check(CLI::NonNegativeNumber);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }

    json report;
    report["schema_version"] = kSchemaVersion;
    int code = kOk;
    std::string csv;
    try {
        if (phases->parsed()) {
            report["command"] = "phases";
            UnitCirclePoly p;
            if (!poly_text.empty() == random_poly)
                throw InputError(0, "give exactly one of --poly or --random");
            if (random_poly && random_degree < 0) throw InputError(0, "--random needs --poly-degree");
            double sub = 1.0;
            if (!poly_text.empty()) {
                const MonomialPoly f = parse_polynomial(poly_text);
                const double mx = poly_max_on_interval(f);
                sub = mx > 0.0 ? mx * (1.0 + 1e-10) : 1.0;
                p = embed_on_circle(f.scaled(1.0 / sub));
                report["input"] = {{"poly", poly_text}, {"degree", f.degree()}};
            } else {
                if (random_degree > kMaxPhaseDegree) throw Error(ErrorKind::Capacity, "degree exceeds 128");
                CounterRng rng(seed);
                std::vector<cplx> cs(static_cast<std::size_t>(random_degree) + 1);
                for (auto& x : cs) x = {rng.next_normal(), rng.next_normal()};
                p = UnitCirclePoly(cs);
                const double mx = max_on_circle(p);
                for (auto& x : p.coeffs) x *= peak / mx;
                report["input"] = {{"random", true}, {"poly_degree", random_degree}, {"seed", seed}, {"max", peak}};
            }
            log->info("synthesizing phases for degree {}", p.degree());
            const PhaseSolution sol = solve_phases(p);
            report["result"] = {{"degree", sol.phases.degree},
                                {"subnormalization", sub},
                                {"theta", to_json(sol.phases.theta)},
                                {"phi", to_json(sol.phases.phi)},
                                {"lambda", sol.phases.lambda},
                                {"reconstruction_error", sol.error},
                                {"used_fallback", sol.used_fallback}};
        } else if (encode->parsed()) {
            report["command"] = "encode";
            const MatrixInput m = load_matrix(c);
            const double alpha = c.alpha ? *c.alpha : spectral_norm(m.a);
            BlockEncoding enc = build_standard_encoding(m.a, alpha);
            if (ancillas > 1) enc = embed_encoding(enc, ancillas, seed);
            const EncodingCheck chk = verify_block_encoding(enc);
            const QubitizedPair pair = qubitize(enc);
            json ctl = nullptr;
            if (ancillas == 1) ctl = build_controlled_ops(enc, pair).eigen_residual;
            const PiZCheck pz = pi_z_identity_check(enc);
            report["input"] = {{"matrix", matrix_json(m)}, {"alpha", alpha}, {"ancillas", ancillas}};
            report["result"] = {{"block_residual", chk.block_residual},
                                {"unitarity_residual", chk.unitarity_residual},
                                {"qubitization_residual", pair.structure_residual},
                                {"controlled_residual", ctl},
                                {"singular_values", to_json(enc.svd.sigma)},
                                {"projector_identity",
                                 {{"pi_z_residual", pz.pi_z_residual},
                                  {"cnot_gate_residual", pz.cnot_gate_residual},
                                  {"control0_residual", pz.control0_residual},
                                  {"full_operator_residual", pz.full_operator_residual}}}};
        } else if (gq->parsed()) {
            report["command"] = "gqsvt";
            const MatrixInput m = load_matrix(c);
            const double alpha = c.alpha ? *c.alpha : spectral_norm(m.a);
            const BlockEncoding enc = build_standard_encoding(m.a, alpha);
            const MonomialPoly f = parse_polynomial(poly_text);
            log->info("building program of degree {}", f.degree());
            const GqsvtProgram prog = make_program(f, transpose);
            const MatrixXc block = extract_block(prog, enc);
            const MonomialPoly fn = f.scaled(1.0 / prog.subnormalization);
            const MatrixXd as = transpose ? MatrixXd(enc.scaled().transpose()) : enc.scaled();
            const FunctionKind kind = prog.parity == Parity::Even ? FunctionKind::Right : FunctionKind::Diamond;
            const MatrixXd gen = oracle_generalized_function(as, fn, kind);
            const MatrixXd fa = matrix_polynomial(as, fn);
            const VectorXd phi = parse_vector(c.rhs, m.a.rows());
            const StateResult st = apply_to_state(prog, enc, phi.cast<cplx>() / phi.norm());
            report["input"] = {{"matrix", matrix_json(m)}, {"alpha", alpha}, {"poly", poly_text}, {"transpose", transpose}, {"rhs", c.rhs}};
            report["result"] = {{"degree", prog.degree},
                                {"parity", prog.parity == Parity::Even ? "even" : "odd"},
                                {"subnormalization", prog.subnormalization},
                                {"rotations", prog.rotation_count()},
                                {"controlled", prog.controlled_count()},
                                {"phase_error", prog.phase_error},
                                {"success_probability", st.success_probability}};
            if (compare_oracle) {
                // the block carries the subnormalized target; scale back before comparing
                const double sub = prog.subnormalization;
                report["result"]["max_block_error"] = (sub * block - sub * gen.cast<cplx>()).cwiseAbs().maxCoeff();
                report["result"]["max_error_vs_matrix_polynomial"] = (sub * block - sub * fa.cast<cplx>()).cwiseAbs().maxCoeff();
            }
        } else if (solve->parsed() || bicg->parsed()) {
            const bool quantum = solve->parsed();
            report["command"] = quantum ? "solve" : "bicg";
            const MatrixInput m = load_matrix(c);
            const VectorXd b = parse_vector(c.rhs, m.a.rows());
            const int cap = maxit > 0 ? maxit : static_cast<int>(m.a.rows());
            json input = {{"matrix", matrix_json(m)}, {"rhs", c.rhs}, {"tol", tol}, {"maxit", cap}};
            std::vector<BicgIteration> trace;
            VectorXd x;
            bool converged = false;
            int breakdown = -1;
            json result;
            if (quantum) {
                QuantumOptions opt;
                opt.mode = mode == "oracle" ? InnerProductMode::Oracle : mode == "sampled" ? InnerProductMode::Sampled : InnerProductMode::Exact;
                opt.shots = shots;
                opt.seed = seed;
                opt.scale = c.alpha;
                opt.throw_on_breakdown = false;
                input["mode"] = mode;
                if (opt.mode == InnerProductMode::Sampled) input["shots"] = shots;
                input["seed"] = seed;
                log->info("quantum BiCG, mode {}, n = {}", mode, m.a.rows());
                const QuantumResult q = quantum_bicg(m.a, b, tol, cap, opt);
                trace = q.trace;
                x = q.x;
                converged = q.converged;
                breakdown = q.breakdown_iteration;
                result = {{"scale", q.scale},
                          {"b_norm", q.b_norm},
                          {"x_max", number(q.x_max)},
                          {"total_shots", q.total_shots},
                          {"phase_syntheses", q.synthesized},
                          {"depth",
                           {{"k", q.depth.k},
                            {"max_degree", q.depth.max_degree},
                            {"max_controlled", q.depth.max_controlled},
                            {"max_rotations", q.depth.max_rotations},
                            {"consistent", q.depth.consistent}}}};
            } else {
                const ClassicalResult r = classical_bicg(m.a, b, tol, cap, false);
                trace = r.trace;
                x = r.x;
                converged = r.converged;
                breakdown = r.breakdown_iteration;
            }
            for (const auto& it : trace) log->debug("j={} alpha={} rnorm={}", it.j, it.alpha, it.rnorm_est);
            result["converged"] = converged;
            result["iterations"] = static_cast<int>(trace.size());
            result["breakdown_iteration"] = breakdown >= 0 ? json(breakdown) : json(nullptr);
            result["residual"] = (b - m.a * x).norm();
            result["x"] = to_json(x);
            result["trace"] = trace_json(trace);
            report["input"] = input;
            report["result"] = result;
            csv = trace_csv(trace);
            if (breakdown >= 0) code = kBreakdown;
            else if (!converged) code = kNoConvergence;
        } else if (bound->parsed()) {
            report["command"] = "bound";
            const MatrixInput m = load_matrix(c);
            const VectorXd b = parse_vector(c.rhs, m.a.rows());
            const int k = lanczos_k > 0 ? lanczos_k : static_cast<int>(m.a.rows());
            const LanczosResult lz = lanczos_tridiagonalize(m.a, b, k);
            const LanczosCheck chk = check_lanczos(m.a, lz);
            const BoundReport br = convergence_bound(lz);
            json eig = json::array();
            for (const auto& e : br.eigenvalues) eig.push_back({e.real(), e.imag()});
            // measured error norms along a classical run
            const VectorXd xstar = m.a.fullPivLu().solve(b);
            const ClassicalResult run = classical_bicg(m.a, b, 0.0, static_cast<int>(m.a.rows()), false);
            const double e0 = error_r_norm(br, lz, xstar);
            json steps = json::array();
            bool holds = true;
            for (std::size_t j = 1; j < run.solutions.size(); ++j) {
                const double measured = error_r_norm(br, lz, xstar - run.solutions[j]);
                const double limit = br.factor(static_cast<int>(j)) * e0;
                holds = holds && measured <= limit * (1.0 + 1e-8) + 1e-12;
                steps.push_back({{"k", j}, {"error_r", measured}, {"bound", limit}});
            }
            report["input"] = {{"matrix", matrix_json(m)}, {"rhs", c.rhs}, {"steps", k}};
            report["result"] = {{"lanczos_dimension", lz.k},
                                {"invariant_subspace", lz.invariant},
                                {"relation_residual", chk.forward},
                                {"transpose_relation_residual", chk.transpose},
                                {"biorthogonality", chk.biorthogonality},
                                {"kappa", br.kappa},
                                {"ellipse", {{"center", br.ellipse.center}, {"focal", {br.ellipse.focal.real(), br.ellipse.focal.imag()}}, {"semi_x", br.ellipse.semi_x}, {"semi_y", br.ellipse.semi_y}}},
                                {"lambda_star", {br.lambda_star.real(), br.lambda_star.imag()}},
                                {"ratio", br.ratio},
                                {"eigenvalues", eig},
                                {"error_r_0", e0},
                                {"steps", steps},
                                {"bound_holds", holds}};
        }
    } catch (const BreakdownError& e) {
        err << "breakdown at iteration " << e.iteration() << ": " << e.what() << '\n';
        return kBreakdown;
    } catch (const InputError& e) {
        err << "input error";
        if (e.line() > 0) err << " (line " << e.line() << ")";
        err << ": " << e.what() << '\n';
        return kInputError;
    } catch (const Error& e) {
        err << to_string(e.kind()) << " error: " << e.what() << '\n';
        switch (e.kind()) {
            case ErrorKind::Shape:
            case ErrorKind::Scale:
            case ErrorKind::Domain:
            case ErrorKind::Capacity:
            case ErrorKind::Arity:
                return kInputError;
            default:
                return kFailure;
        }
    }

    try {
        const std::string text = report.dump(2) + "\n";
        if (c.report.empty()) out << text;
        else write_file(c.report, text);
        if (!c.trace.empty()) write_file(c.trace, csv);
    } catch (const Error& e) {
        err << "io error: " << e.what() << '\n';
        return kFailure;
    }
    return code;
}

}  // namespace gqsvt::cli
