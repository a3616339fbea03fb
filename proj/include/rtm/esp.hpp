#pragma once

#include <span>
#include <vector>

namespace rtm {

// Sign/log-magnitude representation; elementary symmetric polynomials span
// thousands of orders of magnitude at n ~ 1e4.
struct LogValue {
    double log_magnitude = 0.0; // natural log of |value|; ignored when sign == 0
    int sign = 0;               // -1, 0, +1

    double value() const;
    static LogValue from_value(double v);
};

// Saddle-point equation result (sum_k rho/(Z_k + rho) = n - d). When the
// equation has no root strictly inside (#zeros, n), rho falls back to 1.
struct SaddleResult {
    double rho = 1.0;
    bool satisfied_equation = false;
    double residual = 0.0; // |sum_k rho/(Z_k+rho) - (n-d)| when satisfied
};

// S_n^{(0)}, ..., S_n^{(d)} for nonnegative Z, via a balanced product tree
// over (1 + Z_k t) truncated to degree d with per-node log rescaling.
// Throws precondition_error on negative entries or d outside [1, n].
std::vector<LogValue> esp_all(std::span<const double> z, int d);

// log(S_n^{(d)} / C(n,d)) as a LogValue.
LogValue log_ustat(std::span<const double> z, int d);

// Maclaurin: (S_n^{(d)}/C(n,d))^{1/d} <= S_n/n, checked in log domain with
// 1e-12 slack. A zero U-statistic passes trivially.
bool maclaurin_check(std::span<const double> z, int d);

// Solves sum_k rho/(Z_k+rho) = n - d (strictly increasing in rho) to relative
// 1e-12 by bracketing plus safeguarded Newton. Requires 1 <= d < n.
SaddleResult solve_rho(std::span<const double> z, int d);

// sum_k ln(Z_k/rho + 1) - d + d ln(rho d / n) with rho from solve_rho.
// Throws precondition_error when the saddle equation had no solution.
double asymptotic_log_ustat(std::span<const double> z, int d);
double asymptotic_log_ustat(std::span<const double> z, int d, const SaddleResult& saddle);

// Test oracle: direct enumeration over d-subsets with compensated summation.
// Requires C(n,d) <= 1e6.
double esp_brute(std::span<const double> z, int d);

} // namespace rtm
