#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rtm/bigcount.hpp"
#include "rtm/distributions.hpp"
#include "rtm/rng.hpp"
#include "rtm/spectra_types.hpp"

namespace rtm {

// The symmetric random tensor model: p = C(n,d) coordinates indexed by
// d-subsets in colex order, each the product of the base entries it names.
struct TensorModelSpec {
    int n;
    int d;
    EntryDistribution dist;

    TensorModelSpec(int n_, int d_, EntryDistribution dist_);

    BigCount p() const;
};

// n i.i.d. draws from spec.dist. Sample k of a replicate should use
// rng.substream(k) so replicates can be generated in any order.
std::vector<double> sample_base(const TensorModelSpec& spec, const RngStream& rng);

// Vectorized tensor: entry at colex rank r is prod_{alpha in unrank(r)} X_alpha,
// products folded from the largest element down. Reference implementation
// (per-subset unrank) and the incremental colex walk agree bit for bit.
std::vector<double> vectorize(std::span<const double> x, int d);
std::vector<double> vectorize_reference(std::span<const double> x, int d);

// Streamed sample covariance (1/N) sum_k x_k x_k^T. Accumulates the upper
// triangle only; finalize() mirrors it, so the result is exactly symmetric.
// Partial accumulators merge associatively for fixed-order reductions.
class CovarianceAccumulator {
public:
    explicit CovarianceAccumulator(std::size_t p);

    void accumulate(std::span<const double> x);
    void merge(const CovarianceAccumulator& other);
    std::uint64_t count() const { return count_; }

    SymMatrix finalize() const; // divides by count, mirrors the triangle

private:
    std::size_t p_;
    std::uint64_t count_ = 0;
    std::vector<double> upper_; // row-major p x p, lower part unused
};

// Full sample covariance of N replicates. Replicate k draws its base vector
// from rng.substream(k). Work is split over `threads` workers in fixed slots,
// so the result is bit-identical for every thread count.
// Throws cap_exceeded when p = C(n,d) > max_p.
SymMatrix sample_covariance(const TensorModelSpec& spec, std::uint64_t N, const RngStream& rng,
                            std::size_t max_p = 4096, int threads = 1);

// (||vectorize(X,d)||^2, S_n^{(d)}(X_1^2,...,X_n^2)); the two sides must agree
// to relative 1e-10.
std::pair<double, double> squared_norm_identity_check(std::span<const double> x, int d);

} // namespace rtm
