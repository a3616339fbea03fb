#pragma once

#include <complex>

#include "rtm/spectra_types.hpp"

namespace rtm {

// Marchenko-Pastur law with aspect ratio rho > 0: continuous density on
// [a_minus, a_plus] = [(1-sqrt(rho))^2, (1+sqrt(rho))^2] plus an atom of mass
// max{1 - 1/rho, 0} at zero.
struct MPParams {
    double rho;
    double a_minus;
    double a_plus;
    double atom_mass;

    static MPParams from_rho(double rho);
};

// Continuous-part density (the atom is not included); zero outside the bulk.
double mp_density(double x, const MPParams& mp);

// Full CDF (atom included); continuous part integrated by adaptive quadrature
// after the x = a- + (a+ - a-) sin^2(theta) substitution, absolute 1e-9.
double mp_cdf(double x, const MPParams& mp);

// Quantile: smallest x with CDF >= u, u in (0, 1).
double mp_quantile(double u, const MPParams& mp);

// Stieltjes transform m(z) = int dmu(x)/(x - z) for Im z > 0, closed-form
// root of rho z m^2 + (z + rho - 1) m + 1 = 0 with Im m > 0.
std::complex<double> mp_stieltjes(std::complex<double> z, const MPParams& mp);

// Kolmogorov-Smirnov distance between an ESD and the MP law, evaluated at
// both one-sided limits of every jump.
double ks_distance(const ESD& esd, const MPParams& mp);

// Wasserstein-1 proxy from sorted eigenvalues vs MP quantiles at (i-1/2)/p.
double wasserstein1(const ESD& esd, const MPParams& mp);

} // namespace rtm
