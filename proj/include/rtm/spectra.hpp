#pragma once

#include "rtm/spectra_types.hpp"

namespace rtm {

struct EigenResult {
    ESD esd;
    // Column j of `vectors` (row-major p x p) is the eigenvector of
    // esd.eigenvalues[j].
    std::vector<double> vectors;
    double max_residual = 0.0; // max_j ||A v_j - lambda_j v_j||
};

// All p eigenvalues of an exactly symmetric matrix, sorted ascending.
// Householder tridiagonalization followed by implicit-shift QL.
// Throws precondition_error on a non-symmetric input and std::runtime_error
// (naming the eigenvalue index) when QL fails to converge.
ESD eigenvalues_sym(const SymMatrix& A);

// Verification mode: also accumulates eigenvectors and the worst residual
// ||A v - lambda v||. Contract: max_residual <= 1e-8 (||A||_F + 1).
EigenResult eigenvalues_sym_verified(const SymMatrix& A);

// p^{-1} sum lambda_i^k, k >= 1.
double esd_moment(const ESD& esd, int k);

} // namespace rtm
