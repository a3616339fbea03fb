#pragma once

#include <cstddef>
#include <vector>

namespace rtm {

// Empirical spectral distribution: eigenvalues sorted ascending, each with
// weight 1/p.
struct ESD {
    std::vector<double> eigenvalues;

    std::size_t size() const { return eigenvalues.size(); }
};

// Dense symmetric matrix, row-major p x p.
struct SymMatrix {
    std::size_t p = 0;
    std::vector<double> a; // size p*p

    static SymMatrix zero(std::size_t p) { return SymMatrix{p, std::vector<double>(p * p, 0.0)}; }

    double& at(std::size_t i, std::size_t j) { return a[i * p + j]; }
    double at(std::size_t i, std::size_t j) const { return a[i * p + j]; }
};

} // namespace rtm
