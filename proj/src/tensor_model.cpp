#include "rtm/tensor_model.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "rtm/errors.hpp"
#include "rtm/esp.hpp"
#include "rtm/index_space.hpp"
#include "rtm/kernels.hpp"

namespace rtm {

TensorModelSpec::TensorModelSpec(int n_, int d_, EntryDistribution dist_)
    : n(n_), d(d_), dist(dist_) {
    if (n < 1 || d < 1 || d > n)
        throw precondition_error("TensorModelSpec requires 1 <= d <= n");
}

BigCount TensorModelSpec::p() const { return binomial(n, d); }

std::vector<double> sample_base(const TensorModelSpec& spec, const RngStream& rng) {
    CounterRng gen(rng);
    std::vector<double> x(static_cast<std::size_t>(spec.n));
    for (double& v : x) v = spec.dist.sample(gen);
    return x;
}

std::vector<double> vectorize_reference(std::span<const double> x, int d) {
    const int n = static_cast<int>(x.size());
    if (d < 1 || d > n) throw precondition_error("vectorize requires 1 <= d <= n");
    const std::uint64_t p = binomial(n, d).to_u64();
    std::vector<double> out(p);
    for (std::uint64_t r = 0; r < p; ++r) {
        const SubsetIndex s = subset_unrank(r, n, d);
        double prod = 1.0;
        for (std::size_t k = s.elements.size(); k-- > 0;)
            prod = x[static_cast<std::size_t>(s.elements[k])] * prod;
        out[r] = prod;
    }
    return out;
}

std::vector<double> vectorize(std::span<const double> x, int d) {
    const int n = static_cast<int>(x.size());
    if (d < 1 || d > n) throw precondition_error("vectorize requires 1 <= d <= n");
    const std::uint64_t p = binomial(n, d).to_u64();
    std::vector<double> out(p);

    // Incremental colex walk. suffix[k] = prod_{j >= k} x[e[j]], folded from
    // the top; a colex step rewrites positions 0..k, so only those suffix
    // products are recomputed (amortized O(1) per coordinate).
    std::vector<int> e(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) e[static_cast<std::size_t>(i)] = i;
    std::vector<double> suffix(static_cast<std::size_t>(d) + 1);
    suffix[static_cast<std::size_t>(d)] = 1.0;
    for (int k = d - 1; k >= 0; --k)
        suffix[static_cast<std::size_t>(k)] =
            x[static_cast<std::size_t>(e[static_cast<std::size_t>(k)])] *
            suffix[static_cast<std::size_t>(k) + 1];

    std::uint64_t r = 0;
    for (;;) {
        out[r++] = suffix[0];
        // inline colex successor, tracking the lowest changed position
        int k = 0;
        for (; k < d; ++k) {
            const int lim = (k + 1 < d) ? e[static_cast<std::size_t>(k + 1)] : n;
            if (e[static_cast<std::size_t>(k)] + 1 < lim) break;
        }
        if (k == d) break;
        ++e[static_cast<std::size_t>(k)];
        for (int j = 0; j < k; ++j) e[static_cast<std::size_t>(j)] = j;
        for (int j = k; j >= 0; --j)
            suffix[static_cast<std::size_t>(j)] =
                x[static_cast<std::size_t>(e[static_cast<std::size_t>(j)])] *
                suffix[static_cast<std::size_t>(j) + 1];
    }
    return out;
}

CovarianceAccumulator::CovarianceAccumulator(std::size_t p)
    : p_(p), upper_(p * p, 0.0) {}

void CovarianceAccumulator::accumulate(std::span<const double> x) {
    if (x.size() != p_) throw precondition_error("CovarianceAccumulator: dimension mismatch");
    const auto& ops = kernels::active_ops();
    for (std::size_t i = 0; i < p_; ++i)
        ops.axpy(x[i], x.data() + i, upper_.data() + i * p_ + i, p_ - i);
    ++count_;
}

void CovarianceAccumulator::merge(const CovarianceAccumulator& other) {
    if (other.p_ != p_) throw precondition_error("CovarianceAccumulator: dimension mismatch");
    for (std::size_t i = 0; i < upper_.size(); ++i) upper_[i] += other.upper_[i];
    count_ += other.count_;
}

SymMatrix CovarianceAccumulator::finalize() const {
    if (count_ == 0) throw precondition_error("CovarianceAccumulator: no samples");
    SymMatrix m = SymMatrix::zero(p_);
    const double inv = 1.0 / static_cast<double>(count_);
    for (std::size_t i = 0; i < p_; ++i)
        for (std::size_t j = i; j < p_; ++j) {
            const double v = upper_[i * p_ + j] * inv;
            m.at(i, j) = v;
            m.at(j, i) = v;
        }
    return m;
}

SymMatrix sample_covariance(const TensorModelSpec& spec, std::uint64_t N, const RngStream& rng,
                            std::size_t max_p, int threads) {
    if (N < 1) throw precondition_error("sample_covariance requires N >= 1");
    const BigCount pc = spec.p();
    if (pc > BigCount(static_cast<std::uint64_t>(max_p)))
        throw cap_exceeded("sample_covariance: p = " + pc.str() + " exceeds the dense cap " +
                           std::to_string(max_p) + " (raise --max-p to override)");
    const std::size_t p = static_cast<std::size_t>(pc.to_u64());

    // Fixed slot partition: replicate k belongs to slot k mod kSlots, each
    // slot accumulates in increasing k, and slots merge in index order. The
    // result is therefore independent of the worker count.
    constexpr std::uint64_t kSlots = 8;
    std::vector<CovarianceAccumulator> slots;
    slots.reserve(kSlots);
    for (std::uint64_t s = 0; s < kSlots; ++s) slots.emplace_back(p);

    const auto run_slot = [&](std::uint64_t s) {
        for (std::uint64_t k = s; k < N; k += kSlots) {
            const std::vector<double> base = sample_base(spec, rng.substream(k));
            slots[s].accumulate(vectorize(base, spec.d));
        }
    };

    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(kSlots)));
    if (workers == 1) {
        for (std::uint64_t s = 0; s < kSlots; ++s) run_slot(s);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::uint64_t> next{0};
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::uint64_t s = next.fetch_add(1); s < kSlots; s = next.fetch_add(1))
                    run_slot(s);
            });
        for (auto& t : pool) t.join();
    }

    for (std::uint64_t s = 1; s < kSlots; ++s) slots[0].merge(slots[s]);
    return slots[0].finalize();
}

std::pair<double, double> squared_norm_identity_check(std::span<const double> x, int d) {
    const std::vector<double> v = vectorize(x, d);
    const double norm2 = kernels::active_ops().dot(v.data(), v.data(), v.size());
    std::vector<double> z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] * x[i];
    const double esp = esp_all(z, d).back().value();
    return {norm2, esp};
}

} // namespace rtm
