#pragma once

// Shared helpers for the test suite: block builders, a Haar-distributed
// unitary sampler and a tiny subprocess runner for the command line tool.

#include <opspec/opspec.hpp>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace testsupport {

using namespace opspec;

inline Block scalar_block(double alpha, double a = 0.0, double b = 1.0,
                          int index = 1) {
    cmat m(1, 1);
    m << complexd(alpha, 0);
    return Block(index, Interval(a, b), CoefficientMatrix(m));
}

inline Block diag_block(std::initializer_list<double> alphas, double a = 0.0,
                        double b = 1.0, int index = 1) {
    const int d = static_cast<int>(alphas.size());
    cmat m = cmat::Zero(d, d);
    int k = 0;
    for (double v : alphas) m(k, k) = v, ++k;
    return Block(index, Interval(a, b), CoefficientMatrix(m));
}

inline cmat haar_unitary(int n, std::uint64_t seed) {
    detail::Rng rng(seed);
    cmat g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.cgaussian();
    Eigen::HouseholderQR<cmat> qr(g);
    cmat q = qr.householderQ();
    cmat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        complexd dg = r(j, j);
        q.col(j) *= std::abs(dg) > 0 ? dg / std::abs(dg) : complexd(1, 0);
    }
    return q;
}

// 4x4 swap of the endpoint slots; commutes with diag(A, A) for every A.
inline cmat swap_unitary() {
    cmat w = cmat::Zero(4, 4);
    w(0, 2) = w(1, 3) = w(2, 0) = w(3, 1) = 1;
    return w;
}

// Designated non-admissible parameter for A = diag(1, 4): swaps the two
// components at endpoint a while leaving endpoint b alone.
inline cmat component_swap_unitary() {
    cmat w = cmat::Zero(4, 4);
    w(0, 1) = w(1, 0) = 1;
    w(2, 2) = w(3, 3) = 1;
    return w;
}

struct CliResult {
    int exit_code;
    std::string out;
    std::string err;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline CliResult run_cli(const std::string& bin, const std::string& args,
                         const std::string& env_prefix = "") {
    static int counter = 0;
    std::string tag = std::to_string(++counter);
    std::string out_path = "cli_stdout_" + tag + ".txt";
    std::string err_path = "cli_stderr_" + tag + ".txt";
    std::string cmd = env_prefix + "\"" + bin + "\" " + args + " > " + out_path +
                      " 2> " + err_path;
    int rc = std::system(cmd.c_str());
    CliResult res;
    res.exit_code = (rc == -1) ? -1 : WEXITSTATUS(rc);
    res.out = read_file(out_path);
    res.err = read_file(err_path);
    std::remove(out_path.c_str());
    std::remove(err_path.c_str());
    return res;
}

} // namespace testsupport
