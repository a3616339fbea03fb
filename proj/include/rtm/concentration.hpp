#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rtm/bigcount.hpp"
#include "rtm/index_space.hpp"
#include "rtm/rng.hpp"
#include "rtm/spectra_types.hpp"
#include "rtm/tensor_model.hpp"

namespace rtm {

enum class MatrixKind { Diagonal, ZeroDiagonal, Arbitrary };

std::string matrix_kind_name(MatrixKind k);

struct VarEstimate {
    double point = 0.0;     // unbiased sample variance over all reps
    double std_error = 0.0; // from the spread of per-batch variance estimates
    std::uint64_t reps = 0;
    int batches = 0;
};

// x^T A x for a dense symmetric matrix.
double qform(std::span<const double> x, const SymMatrix& A);

// Test-matrix abstraction: quadratic form evaluation plus the invariants the
// variance bound needs (trace, tr AA^T, structural class). Large unstructured
// matrices expose a float32 replicate-batched path.
class QformOperator {
public:
    virtual ~QformOperator() = default;

    virtual std::size_t dim() const = 0;
    virtual MatrixKind kind() const = 0;
    virtual double trace() const = 0;
    virtual double tr_aat() const = 0;
    virtual double spectral_norm_estimate() const { return 1.0; }

    virtual double apply(std::span<const double> x) const = 0;

    virtual bool prefers_batch() const { return false; }
    // q[b] = x_b^T A x_b for nb replicates stored as a row-major p x kRepBatch
    // float panel (coordinate j of replicate b at panel[j*kRepBatch + b]).
    virtual void apply_batch(const float* panel, std::size_t nb, double* q) const;
};

std::unique_ptr<QformOperator> make_identity_op(std::size_t p);
// Symmetric +-1 entries off the diagonal, zero diagonal, scaled by a power
// iteration estimate of the spectral norm so that ||A|| <= 1 (approx).
std::unique_ptr<QformOperator> make_zero_diag_signs_op(std::size_t p, const RngStream& rng);
// Rank-floor(frac*p) orthogonal projection: a random coordinate projection
// conjugated by two random Householder reflectors (O(p) per quadratic form).
std::unique_ptr<QformOperator> make_projection_op(std::size_t p, double rank_fraction,
                                                  const RngStream& rng);
std::unique_ptr<QformOperator> make_dense_op(SymMatrix a, MatrixKind kind);

// Monte Carlo variance of x^T A x over `reps` independent tensor replicates
// (replicate r uses rng.substream(r)). reps >= 100 and divisible by batches.
// Result is bit-identical for every thread count.
VarEstimate mc_variance(const TensorModelSpec& spec, const QformOperator& op, std::uint64_t reps,
                        const RngStream& rng, int batches = 20, int threads = 1);

// Exact var(x^T x) from the subset-overlap census:
// p * sum_{t=1}^{d} C(d,t) C(n-d,d-t) (K^t - 1). Requires finite fourth
// moment and C(n,d) <= 5000.
double exact_variance_diag_oracle(const TensorModelSpec& spec);

// Variance upper bound: p * trAAt * case factor
//   Diagonal:     (1 + K d/n)^d - 1
//   ZeroDiagonal: (1 + 2K d/n)^d (16 d/n) min(d, 8)      [n >= 16d]
//   Arbitrary:    64 K d^2 / n                           [n >= 16d, 2K d^2 <= n]
// Throws precondition_error naming the violated hypothesis.
double variance_upper_bound(MatrixKind kind, double p, double tr_aat, double K, int d, int n);

// Lower bound p^2 (K-1) d^2 / n for var(x^T x) with i.i.d. entries.
double hoeffding_lower(double p, double K, int d, int n);

// Coverage histogram of a subset quadruple: c[m] = #elements covered by
// exactly m of the four sets; c1 + 2c2 + 3c3 + 4c4 = |i|+|j|+|k|+|l|.
struct LambdaCounts {
    int c1 = 0, c2 = 0, c3 = 0, c4 = 0;
};
LambdaCounts lambda_counts(const SubsetIndex& i, const SubsetIndex& j, const SubsetIndex& k,
                           const SubsetIndex& l);

// gamma(s,t): for a fixed base pair (i0,j0) with |i0 cap j0| = t, the number
// of (k,l) with |k cap l| = t, no singly-covered element, and
// |Lambda_3|/2 + |Lambda_4| = s. Brute force enumerates all pairs
// (requires C(n,d)^2 <= 1e7); the default base pair is the lexicographically
// smallest one, and any valid base pair gives the same count.
BigCount gamma_brute(int n, int d, int s, int t);
BigCount gamma_brute_from_base(int n, int d, int s, int t, std::uint64_t i0_mask,
                               std::uint64_t j0_mask);

// Closed formula:
// sum_{r=0}^{s} C(t,r) C(2(d-t),s-r) C(t-r,s-r) C(n-2d+t,t-s) C(2(d-t),d-t),
// zero when s > t. Requires 0 <= t < d <= n and 2d - t <= n.
BigCount gamma_exact(int n, int d, int s, int t);

// Upper bound 2^{4(d-t)} C(n,d) C(t,s) 2^s (d/n)^{d-(t-s)} 1(s<=t),
// evaluated in log domain.
double gamma_bound(int n, int d, int s, int t);

} // namespace rtm
