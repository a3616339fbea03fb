#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "rtm/errors.hpp"
#include "rtm/rng.hpp"
#include "rtm/spectra.hpp"

using namespace rtm;

namespace {

SymMatrix random_sym(std::size_t p, std::uint64_t seed, double scale = 1.0) {
    CounterRng g(RngStream{seed, 3});
    SymMatrix m = SymMatrix::zero(p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i; j < p; ++j) {
            const double v = scale * g.next_gaussian();
            m.at(i, j) = v;
            m.at(j, i) = v;
        }
    return m;
}

// Cyclic Jacobi eigenvalue oracle; slow and simple on purpose.
std::vector<double> jacobi_eigenvalues(SymMatrix a) {
    const std::size_t p = a.p;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = i + 1; j < p; ++j) off += a.at(i, j) * a.at(i, j);
        if (off <= 1e-24) break;
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = i + 1; j < p; ++j) {
                if (a.at(i, j) == 0.0) continue;
                const double theta = 0.5 * std::atan2(2.0 * a.at(i, j), a.at(j, j) - a.at(i, i));
                const double c = std::cos(theta), s = std::sin(theta);
                for (std::size_t k = 0; k < p; ++k) {
                    const double aki = a.at(k, i), akj = a.at(k, j);
                    a.at(k, i) = c * aki - s * akj;
                    a.at(k, j) = s * aki + c * akj;
                }
                for (std::size_t k = 0; k < p; ++k) {
                    const double aik = a.at(i, k), ajk = a.at(j, k);
                    a.at(i, k) = c * aik - s * ajk;
                    a.at(j, k) = s * aik + c * ajk;
                }
            }
    }
    std::vector<double> d(p);
    for (std::size_t i = 0; i < p; ++i) d[i] = a.at(i, i);
    std::sort(d.begin(), d.end());
    return d;
}

} // namespace

TEST_CASE("eigenvalues match the Jacobi oracle") {
    for (std::size_t p : {std::size_t{1}, std::size_t{2}, std::size_t{5}, std::size_t{12},
                          std::size_t{20}}) {
        for (std::uint64_t seed = 0; seed < 4; ++seed) {
            const SymMatrix a = random_sym(p, 400 + seed * 17 + p);
            const ESD esd = eigenvalues_sym(a);
            const auto oracle = jacobi_eigenvalues(a);
            REQUIRE(esd.size() == p);
            for (std::size_t i = 0; i < p; ++i)
                CHECK(std::abs(esd.eigenvalues[i] - oracle[i]) <=
                      1e-7 * (1.0 + std::abs(oracle[i])));
        }
    }
}

TEST_CASE("diagonal matrices are their own spectra") {
    SymMatrix a = SymMatrix::zero(6);
    const std::vector<double> diag = {3.0, -1.0, 0.0, 7.5, -2.25, 0.5};
    for (std::size_t i = 0; i < 6; ++i) a.at(i, i) = diag[i];
    auto sorted = diag;
    std::sort(sorted.begin(), sorted.end());
    const ESD esd = eigenvalues_sym(a);
    for (std::size_t i = 0; i < 6; ++i)
        CHECK(esd.eigenvalues[i] == doctest::Approx(sorted[i]).epsilon(1e-14));
}

TEST_CASE("verified mode produces small residuals and consistent values") {
    const SymMatrix a = random_sym(15, 999, 2.0);
    const EigenResult r = eigenvalues_sym_verified(a);
    double frob = 0.0;
    for (double v : a.a) frob += v * v;
    frob = std::sqrt(frob);
    CHECK(r.max_residual <= 1e-8 * (frob + 1.0));
    const ESD plain = eigenvalues_sym(a);
    for (std::size_t i = 0; i < a.p; ++i)
        CHECK(r.esd.eigenvalues[i] == doctest::Approx(plain.eigenvalues[i]).epsilon(1e-10));
    // eigenvector columns are unit length
    for (std::size_t j = 0; j < a.p; ++j) {
        double nrm = 0.0;
        for (std::size_t i = 0; i < a.p; ++i) nrm += r.vectors[i * a.p + j] * r.vectors[i * a.p + j];
        CHECK(nrm == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("trace and moment identities") {
    const SymMatrix a = random_sym(10, 31);
    const ESD esd = eigenvalues_sym(a);
    double tr = 0.0, fr = 0.0;
    for (std::size_t i = 0; i < a.p; ++i) {
        tr += a.at(i, i);
        for (std::size_t j = 0; j < a.p; ++j) fr += a.at(i, j) * a.at(i, j);
    }
    CHECK(esd_moment(esd, 1) == doctest::Approx(tr / 10.0).epsilon(1e-10));
    CHECK(esd_moment(esd, 2) == doctest::Approx(fr / 10.0).epsilon(1e-10));
}

TEST_CASE("non-symmetric input is rejected") {
    SymMatrix a = SymMatrix::zero(3);
    a.at(0, 1) = 1.0; // mirror entry left at 0
    CHECK_THROWS_AS(eigenvalues_sym(a), precondition_error);
    CHECK_THROWS_AS(eigenvalues_sym(SymMatrix::zero(0)), precondition_error);
}
