// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace holosched {

using cxd = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using MatD = Eigen::MatrixXd;
using VecD = Eigen::VectorXd;
using VecI = Eigen::ArrayXi;

// Propagation constant used throughout; 3e8 keeps the 30 GHz wavelength at exactly 1 cm.
inline constexpr double kSpeedOfLight = 3.0e8;

// Thrown when an iterative routine produces non-finite values.
struct numerical_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown when the effective channel is too close to rank deficiency for zero forcing.
struct zf_infeasible : numerical_failure {
    using numerical_failure::numerical_failure;
};

// Shortest round-trip decimal form; locale-independent, so emitted files are
// byte-stable across runs.
inline std::string format_double(double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc{}) throw numerical_failure("failed to format double");
    return std::string(buf, ptr);
}

inline bool is_perfect_square(int n) {
    if (n < 1) return false;
    int s = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    return s * s == n;
}

inline int isqrt_exact(int n) {
    if (!is_perfect_square(n))
        throw std::invalid_argument("value " + std::to_string(n) + " is not a perfect square");
    return static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
}

}  // namespace holosched
