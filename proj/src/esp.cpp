#include "rtm/esp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rtm/errors.hpp"
#include "rtm/index_space.hpp"

namespace rtm {

double LogValue::value() const {
    if (sign == 0) return 0.0;
    return sign * std::exp(log_magnitude);
}

LogValue LogValue::from_value(double v) {
    if (v == 0.0) return {0.0, 0};
    return {std::log(std::abs(v)), v > 0.0 ? 1 : -1};
}

namespace {

// Truncated polynomial with coefficients kept as natural logs (-inf encodes
// zero). A single polynomial's coefficients can span hundreds of orders of
// magnitude, so a shared scale factor is not enough.
using LogPoly = std::vector<double>;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Convolution in the log domain. Coefficients are nonnegative, so each output
// is a log-sum-exp with no cancellation.
LogPoly multiply_truncated(const LogPoly& a, const LogPoly& b, int max_deg) {
    const int deg = std::min<int>(max_deg, static_cast<int>(a.size() + b.size()) - 2);
    LogPoly out(static_cast<std::size_t>(deg) + 1, kNegInf);
    for (int k = 0; k <= deg; ++k) {
        const int lo = std::max(0, k - static_cast<int>(b.size()) + 1);
        const int hi = std::min(k, static_cast<int>(a.size()) - 1);
        double m = kNegInf;
        for (int i = lo; i <= hi; ++i)
            m = std::max(m, a[static_cast<std::size_t>(i)] + b[static_cast<std::size_t>(k - i)]);
        if (m == kNegInf) continue;
        double s = 0.0;
        for (int i = lo; i <= hi; ++i)
            s += std::exp(a[static_cast<std::size_t>(i)] + b[static_cast<std::size_t>(k - i)] - m);
        out[static_cast<std::size_t>(k)] = m + std::log(s);
    }
    return out;
}

void require_nonneg(std::span<const double> z) {
    for (double v : z)
        if (!(v >= 0.0)) throw precondition_error("esp: Z entries must be nonnegative");
}

} // namespace

std::vector<LogValue> esp_all(std::span<const double> z, int d) {
    const int n = static_cast<int>(z.size());
    if (d < 1 || d > n) throw precondition_error("esp_all requires 1 <= d <= n");
    require_nonneg(z);

    std::vector<LogPoly> level(z.size());
    for (std::size_t k = 0; k < z.size(); ++k)
        level[k] = {0.0, z[k] > 0.0 ? std::log(z[k]) : kNegInf};
    while (level.size() > 1) {
        std::vector<LogPoly> next;
        next.reserve((level.size() + 1) / 2);
        for (std::size_t k = 0; k + 1 < level.size(); k += 2)
            next.push_back(multiply_truncated(level[k], level[k + 1], d));
        if (level.size() % 2 == 1) next.push_back(std::move(level.back()));
        level = std::move(next);
    }

    const LogPoly& poly = level.front();
    std::vector<LogValue> out(static_cast<std::size_t>(d) + 1);
    for (int k = 0; k <= d; ++k) {
        const double c =
            (k < static_cast<int>(poly.size())) ? poly[static_cast<std::size_t>(k)] : kNegInf;
        out[static_cast<std::size_t>(k)] = (c > kNegInf) ? LogValue{c, 1} : LogValue{0.0, 0};
    }
    return out;
}

LogValue log_ustat(std::span<const double> z, int d) {
    const auto s = esp_all(z, d);
    LogValue u = s.back();
    if (u.sign == 0) return u;
    u.log_magnitude -= log_binomial(static_cast<int>(z.size()), d);
    return u;
}

bool maclaurin_check(std::span<const double> z, int d) {
    const LogValue u = log_ustat(z, d);
    if (u.sign == 0) return true;
    double s1 = 0.0;
    for (double v : z) s1 += v;
    const double rhs = std::log(s1 / static_cast<double>(z.size()));
    return u.log_magnitude / d <= rhs + 1e-12;
}

SaddleResult solve_rho(std::span<const double> z, int d) {
    const int n = static_cast<int>(z.size());
    if (d < 1 || d >= n) throw precondition_error("solve_rho requires 1 <= d < n");
    require_nonneg(z);

    const double target = static_cast<double>(n - d);
    int zeros = 0;
    for (double v : z)
        if (v == 0.0) ++zeros;
    // lhs(rho) increases from #zeros (rho -> 0+) to n (rho -> inf); the target
    // must lie strictly inside.
    if (!(static_cast<double>(zeros) < target)) return SaddleResult{1.0, false, 0.0};

    const auto lhs = [&](double rho) {
        double s = static_cast<double>(zeros);
        for (double v : z)
            if (v != 0.0) s += rho / (v + rho);
        return s;
    };
    const auto dlhs = [&](double rho) {
        double s = 0.0;
        for (double v : z)
            if (v != 0.0) s += v / ((v + rho) * (v + rho));
        return s;
    };

    double lo = 1.0, hi = 1.0;
    for (int it = 0; it < 2100 && lhs(hi) < target; ++it) hi *= 2.0;
    for (int it = 0; it < 2100 && lhs(lo) > target; ++it) lo *= 0.5;

    double rho = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double f = lhs(rho) - target;
        if (f > 0.0)
            hi = rho;
        else
            lo = rho;
        const double fp = dlhs(rho);
        double next = (fp > 0.0) ? rho - f / fp : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - rho) <= 1e-15 * rho) {
            rho = next;
            break;
        }
        rho = next;
    }
    return SaddleResult{rho, true, std::abs(lhs(rho) - target)};
}

double asymptotic_log_ustat(std::span<const double> z, int d, const SaddleResult& saddle) {
    if (!saddle.satisfied_equation)
        throw precondition_error(
            "asymptotic_log_ustat: saddle equation unsolved (fallback rho=1), "
            "asymptotic formula inapplicable");
    const double n = static_cast<double>(z.size());
    double s = 0.0;
    for (double v : z) s += std::log1p(v / saddle.rho);
    return s - d + d * std::log(saddle.rho * d / n);
}

double asymptotic_log_ustat(std::span<const double> z, int d) {
    return asymptotic_log_ustat(z, d, solve_rho(z, d));
}

double esp_brute(std::span<const double> z, int d) {
    const int n = static_cast<int>(z.size());
    if (d < 0 || d > n) throw precondition_error("esp_brute requires 0 <= d <= n");
    if (binomial(n, d) > BigCount(std::uint64_t{1000000}))
        throw cap_exceeded("esp_brute: C(n,d) exceeds 1e6 subsets");
    double sum = 0.0, comp = 0.0; // Kahan
    for_each_subset(n, d, [&](const std::vector<int>& s) {
        double prod = 1.0;
        for (std::size_t k = s.size(); k-- > 0;) prod = z[static_cast<std::size_t>(s[k])] * prod;
        const double y = prod - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    });
    return sum;
}

} // namespace rtm
