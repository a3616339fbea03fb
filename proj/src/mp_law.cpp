#include "rtm/mp_law.hpp"

#include <algorithm>
#include <cmath>

#include "rtm/errors.hpp"

namespace rtm {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Continuous-part integrand after x = a- + (a+ - a-) sin^2(theta):
// g(theta) = delta^2 sin^2(theta) cos^2(theta) / (pi rho x(theta)), with the
// sin^2/x ratio evaluated in a form that stays finite at the hard edge a-=0.
double edge_free_integrand(double theta, const MPParams& mp) {
    const double delta = mp.a_plus - mp.a_minus;
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    const double s2 = s * s;
    const double denom = mp.a_minus + delta * s2;
    double ratio;
    if (denom > 0.0)
        ratio = s2 / denom;
    else
        ratio = (mp.a_minus == 0.0) ? 1.0 / delta : 0.0;
    return delta * delta * ratio * c * c / (kPi * mp.rho);
}

double adaptive_simpson(const MPParams& mp, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = edge_free_integrand(lm, mp);
    const double frm = edge_free_integrand(rm, mp);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(mp, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(mp, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// Integral of the continuous density from a- to x, absolute accuracy ~1e-10.
double bulk_integral(double x, const MPParams& mp) {
    if (x <= mp.a_minus) return 0.0;
    const double delta = mp.a_plus - mp.a_minus;
    const double frac = std::clamp((x - mp.a_minus) / delta, 0.0, 1.0);
    const double theta_max = std::asin(std::sqrt(frac));
    if (theta_max <= 0.0) return 0.0;
    const double fa = edge_free_integrand(0.0, mp);
    const double fb = edge_free_integrand(theta_max, mp);
    const double fm = edge_free_integrand(0.5 * theta_max, mp);
    const double whole = theta_max / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(mp, 0.0, theta_max, fa, fm, fb, whole, 1e-10, 40);
}

} // namespace

MPParams MPParams::from_rho(double rho) {
    if (!(rho > 0.0)) throw precondition_error("MPParams requires rho > 0");
    const double sq = std::sqrt(rho);
    return MPParams{rho, (1.0 - sq) * (1.0 - sq), (1.0 + sq) * (1.0 + sq),
                    std::max(1.0 - 1.0 / rho, 0.0)};
}

double mp_density(double x, const MPParams& mp) {
    if (x <= mp.a_minus || x >= mp.a_plus) return 0.0;
    return std::sqrt((mp.a_plus - x) * (x - mp.a_minus)) / (2.0 * kPi * x * mp.rho);
}

double mp_cdf(double x, const MPParams& mp) {
    if (x < 0.0) return 0.0;
    double f = mp.atom_mass + bulk_integral(std::min(x, mp.a_plus), mp);
    return std::min(f, 1.0);
}

double mp_quantile(double u, const MPParams& mp) {
    if (!(u > 0.0 && u < 1.0)) throw precondition_error("mp_quantile requires u in (0,1)");
    if (u <= mp.atom_mass) return 0.0;
    double lo = mp.a_minus, hi = mp.a_plus;
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mp_cdf(mid, mp) < u)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::complex<double> mp_stieltjes(std::complex<double> z, const MPParams& mp) {
    if (!(z.imag() > 0.0)) throw precondition_error("mp_stieltjes requires Im z > 0");
    const double rho = mp.rho;
    const std::complex<double> b = z + (rho - 1.0);
    const std::complex<double> disc = std::sqrt(b * b - 4.0 * rho * z);
    const std::complex<double> m1 = (-b + disc) / (2.0 * rho * z);
    const std::complex<double> m2 = (-b - disc) / (2.0 * rho * z);
    return m1.imag() > 0.0 ? m1 : m2;
}

double ks_distance(const ESD& esd, const MPParams& mp) {
    if (esd.size() == 0) throw precondition_error("ks_distance requires a nonempty ESD");
    const auto& ev = esd.eigenvalues;
    const double p = static_cast<double>(ev.size());
    double d = 0.0;
    for (std::size_t i = 0; i < ev.size(); ++i) {
        const double f = mp_cdf(ev[i], mp);
        // Left limit of the reference CDF; it differs from f only at the atom.
        // One-sided maxima stay correct under tied eigenvalues.
        const double fl = (ev[i] == 0.0) ? f - mp.atom_mass : f;
        d = std::max(d, static_cast<double>(i + 1) / p - f);
        d = std::max(d, fl - static_cast<double>(i) / p);
    }
    // The MP atom at zero is a jump of the reference CDF; compare both sides.
    const double below = static_cast<double>(std::lower_bound(ev.begin(), ev.end(), 0.0) - ev.begin());
    const double at = static_cast<double>(std::upper_bound(ev.begin(), ev.end(), 0.0) - ev.begin());
    d = std::max(d, below / p);
    d = std::max(d, std::abs(at / p - mp.atom_mass));
    return d;
}

double wasserstein1(const ESD& esd, const MPParams& mp) {
    if (esd.size() == 0) throw precondition_error("wasserstein1 requires a nonempty ESD");
    const auto& ev = esd.eigenvalues;
    const double p = static_cast<double>(ev.size());
    double w = 0.0;
    for (std::size_t i = 0; i < ev.size(); ++i)
        w += std::abs(ev[i] - mp_quantile((static_cast<double>(i) + 0.5) / p, mp));
    return w / p;
}

} // namespace rtm
