#include "rtm/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "rtm/errors.hpp"

namespace rtm {

namespace {

// Householder reduction to tridiagonal form (d: diagonal, e: subdiagonal with
// e[0] = 0). When `vectors` is set, z is overwritten with the accumulated
// orthogonal transform; otherwise z is scratch.
void tridiagonalize(std::vector<double>& z, int n, std::vector<double>& d, std::vector<double>& e,
                    bool vectors) {
    auto Z = [&](int i, int j) -> double& { return z[static_cast<std::size_t>(i) * n + j]; };
    for (int i = n - 1; i >= 1; --i) {
        const int l = i - 1;
        double h = 0.0, scale = 0.0;
        if (l > 0) {
            for (int k = 0; k <= l; ++k) scale += std::abs(Z(i, k));
            if (scale == 0.0) {
                e[i] = Z(i, l);
            } else {
                for (int k = 0; k <= l; ++k) {
                    Z(i, k) /= scale;
                    h += Z(i, k) * Z(i, k);
                }
                double f = Z(i, l);
                double g = (f >= 0.0) ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                Z(i, l) = f - g;
                f = 0.0;
                for (int j = 0; j <= l; ++j) {
                    if (vectors) Z(j, i) = Z(i, j) / h;
                    g = 0.0;
                    for (int k = 0; k <= j; ++k) g += Z(j, k) * Z(i, k);
                    for (int k = j + 1; k <= l; ++k) g += Z(k, j) * Z(i, k);
                    e[j] = g / h;
                    f += e[j] * Z(i, j);
                }
                const double hh = f / (h + h);
                for (int j = 0; j <= l; ++j) {
                    f = Z(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (int k = 0; k <= j; ++k) Z(j, k) -= f * e[k] + g * Z(i, k);
                }
            }
        } else {
            e[i] = Z(i, l);
        }
        d[i] = h;
    }
    if (vectors) {
        d[0] = 0.0;
        e[0] = 0.0;
        for (int i = 0; i < n; ++i) {
            const int l = i;
            if (d[i] != 0.0) {
                for (int j = 0; j < l; ++j) {
                    double g = 0.0;
                    for (int k = 0; k < l; ++k) g += Z(i, k) * Z(k, j);
                    for (int k = 0; k < l; ++k) Z(k, j) -= g * Z(k, i);
                }
            }
            d[i] = Z(i, i);
            Z(i, i) = 1.0;
            for (int j = 0; j < l; ++j) Z(j, i) = Z(i, j) = 0.0;
        }
    } else {
        e[0] = 0.0;
        for (int i = 0; i < n; ++i) d[i] = Z(i, i);
    }
}

// Implicit-shift QL on a tridiagonal (d, e'), where e'[i] couples d[i] and
// d[i+1]. Rotates the columns of z alongside when provided.
void ql_implicit(std::vector<double>& d, std::vector<double>& e, int n, std::vector<double>* z) {
    constexpr int kIterCap = 50;
    const double eps = std::numeric_limits<double>::epsilon();
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd) break;
            }
            if (m != l) {
                if (iter++ == kIterCap)
                    throw std::runtime_error("eigenvalues_sym: QL did not converge at index " +
                                             std::to_string(l));
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    const double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    if (z) {
                        for (int k = 0; k < n; ++k) {
                            double& zki = (*z)[static_cast<std::size_t>(k) * n + i];
                            double& zki1 = (*z)[static_cast<std::size_t>(k) * n + i + 1];
                            f = zki1;
                            zki1 = s * zki + c * f;
                            zki = c * zki - s * f;
                        }
                    }
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

void check_symmetric(const SymMatrix& A) {
    for (std::size_t i = 0; i < A.p; ++i)
        for (std::size_t j = i + 1; j < A.p; ++j)
            if (A.at(i, j) != A.at(j, i))
                throw precondition_error("eigenvalues_sym: input matrix is not exactly symmetric");
}

} // namespace

ESD eigenvalues_sym(const SymMatrix& A) {
    if (A.p == 0) throw precondition_error("eigenvalues_sym requires p >= 1");
    check_symmetric(A);
    const int n = static_cast<int>(A.p);
    std::vector<double> z = A.a;
    std::vector<double> d(A.p), e(A.p);
    if (n == 1) {
        d[0] = z[0];
    } else {
        tridiagonalize(z, n, d, e, /*vectors=*/false);
        ql_implicit(d, e, n, nullptr);
    }
    std::sort(d.begin(), d.end());
    return ESD{std::move(d)};
}

EigenResult eigenvalues_sym_verified(const SymMatrix& A) {
    if (A.p == 0) throw precondition_error("eigenvalues_sym requires p >= 1");
    check_symmetric(A);
    const int n = static_cast<int>(A.p);
    std::vector<double> z = A.a;
    std::vector<double> d(A.p), e(A.p);
    if (n == 1) {
        d[0] = z[0];
        z[0] = 1.0;
    } else {
        tridiagonalize(z, n, d, e, /*vectors=*/true);
        ql_implicit(d, e, n, &z);
    }

    // Sort eigenvalues and permute columns accordingly.
    std::vector<int> order(A.p);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return d[a] < d[b]; });
    EigenResult res;
    res.esd.eigenvalues.resize(A.p);
    res.vectors.assign(A.p * A.p, 0.0);
    for (std::size_t j = 0; j < A.p; ++j) {
        res.esd.eigenvalues[j] = d[static_cast<std::size_t>(order[j])];
        for (std::size_t k = 0; k < A.p; ++k)
            res.vectors[k * A.p + j] = z[k * A.p + static_cast<std::size_t>(order[j])];
    }

    for (std::size_t j = 0; j < A.p; ++j) {
        double rnorm = 0.0;
        for (std::size_t i = 0; i < A.p; ++i) {
            double av = 0.0;
            for (std::size_t k = 0; k < A.p; ++k) av += A.at(i, k) * res.vectors[k * A.p + j];
            const double r = av - res.esd.eigenvalues[j] * res.vectors[i * A.p + j];
            rnorm += r * r;
        }
        res.max_residual = std::max(res.max_residual, std::sqrt(rnorm));
    }
    return res;
}

double esd_moment(const ESD& esd, int k) {
    if (k < 1) throw precondition_error("esd_moment requires k >= 1");
    if (esd.size() == 0) throw precondition_error("esd_moment requires a nonempty ESD");
    double s = 0.0;
    for (double lam : esd.eigenvalues) s += std::pow(lam, k);
    return s / static_cast<double>(esd.size());
}

} // namespace rtm
