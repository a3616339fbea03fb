#include "rtm/concentration.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <sstream>
#include <thread>

#include "rtm/errors.hpp"
#include "rtm/kernels.hpp"

namespace rtm {

std::string matrix_kind_name(MatrixKind k) {
    switch (k) {
        case MatrixKind::Diagonal: return "diagonal";
        case MatrixKind::ZeroDiagonal: return "zero-diagonal";
        case MatrixKind::Arbitrary: return "arbitrary";
    }
    return "?";
}

double qform(std::span<const double> x, const SymMatrix& A) {
    if (x.size() != A.p) throw precondition_error("qform: dimension mismatch");
    const auto& ops = kernels::active_ops();
    double q = 0.0;
    for (std::size_t i = 0; i < A.p; ++i) {
        // diagonal term plus twice the strict upper row
        const double* row = A.a.data() + i * A.p;
        q += x[i] * (row[i] * x[i] + 2.0 * ops.dot(row + i + 1, x.data() + i + 1, A.p - i - 1));
    }
    return q;
}

void QformOperator::apply_batch(const float* panel, std::size_t nb, double* q) const {
    // Fallback: widen each replicate column and evaluate one at a time.
    std::vector<double> x(dim());
    for (std::size_t b = 0; b < nb; ++b) {
        for (std::size_t j = 0; j < dim(); ++j)
            x[j] = static_cast<double>(panel[j * kernels::kRepBatch + b]);
        q[b] += apply(x);
    }
}

namespace {

class IdentityOp final : public QformOperator {
public:
    explicit IdentityOp(std::size_t p) : p_(p) {}

    std::size_t dim() const override { return p_; }
    MatrixKind kind() const override { return MatrixKind::Diagonal; }
    double trace() const override { return static_cast<double>(p_); }
    double tr_aat() const override { return static_cast<double>(p_); }

    double apply(std::span<const double> x) const override {
        if (x.size() != p_) throw precondition_error("qform: dimension mismatch");
        return kernels::active_ops().dot(x.data(), x.data(), p_);
    }

private:
    std::size_t p_;
};

class DenseOp final : public QformOperator {
public:
    DenseOp(SymMatrix a, MatrixKind kind) : a_(std::move(a)), kind_(kind) {
        for (std::size_t i = 0; i < a_.p; ++i) {
            tr_ += a_.at(i, i);
            for (std::size_t j = 0; j < a_.p; ++j) traat_ += a_.at(i, j) * a_.at(i, j);
        }
    }

    std::size_t dim() const override { return a_.p; }
    MatrixKind kind() const override { return kind_; }
    double trace() const override { return tr_; }
    double tr_aat() const override { return traat_; }

    double apply(std::span<const double> x) const override { return qform(x, a_); }

private:
    SymMatrix a_;
    MatrixKind kind_;
    double tr_ = 0.0;
    double traat_ = 0.0;
};

class SignMatrixOp final : public QformOperator {
public:
    SignMatrixOp(std::size_t p, const RngStream& rng) : p_(p), a_(p * p, 0.0f) {
        if (p < 2) throw precondition_error("zero-diag sign matrix requires p >= 2");
        CounterRng gen(rng);
        for (std::size_t i = 0; i < p_; ++i)
            for (std::size_t j = i + 1; j < p_; ++j) {
                const float s = (gen.next_u64() & 1u) ? 1.0f : -1.0f;
                a_[i * p_ + j] = s;
                a_[j * p_ + i] = s;
            }
        norm_ = power_norm(rng.substream(0x5eedULL));
        const float inv = static_cast<float>(1.0 / norm_);
        for (float& v : a_) v *= inv;
        // Every off-diagonal entry is exactly +-1/norm after scaling.
        const double pd = static_cast<double>(p_);
        const double e = 1.0 / norm_;
        traat_ = pd * (pd - 1.0) * e * e;
    }

    std::size_t dim() const override { return p_; }
    MatrixKind kind() const override { return MatrixKind::ZeroDiagonal; }
    double trace() const override { return 0.0; }
    double tr_aat() const override { return traat_; }
    double spectral_norm_estimate() const override { return 1.0; }

    double apply(std::span<const double> x) const override {
        if (x.size() != p_) throw precondition_error("qform: dimension mismatch");
        double q = 0.0;
        for (std::size_t i = 0; i < p_; ++i) {
            const float* row = a_.data() + i * p_;
            double m = 0.0;
            for (std::size_t j = i + 1; j < p_; ++j) m += static_cast<double>(row[j]) * x[j];
            q += 2.0 * x[i] * m;
        }
        return q;
    }

    bool prefers_batch() const override { return true; }

    void apply_batch(const float* panel, std::size_t nb, double* q) const override {
        const auto& ops = kernels::active_ops();
        alignas(64) float m[kernels::kRepBatch];
        for (std::size_t i = 0; i + 1 < p_; ++i) {
            std::fill(m, m + kernels::kRepBatch, 0.0f);
            ops.fma_panel_f32(a_.data() + i * p_ + i + 1,
                              panel + (i + 1) * kernels::kRepBatch, p_ - i - 1, m);
            const float* xi = panel + i * kernels::kRepBatch;
            for (std::size_t b = 0; b < nb; ++b)
                q[b] += 2.0 * static_cast<double>(xi[b]) * static_cast<double>(m[b]);
        }
    }

private:
    // Power iteration on the unscaled sign matrix; the dominant eigenvalue of
    // a symmetric matrix is its spectral norm up to the iteration tolerance.
    double power_norm(const RngStream& rng) const {
        CounterRng gen(rng);
        std::vector<float> v(p_), y(p_);
        for (float& e : v) e = static_cast<float>(gen.next_gaussian());
        const auto& ops = kernels::active_ops();
        double lambda = 0.0;
        for (int iter = 0; iter < 200; ++iter) {
            for (std::size_t i = 0; i < p_; ++i)
                y[i] = ops.dot_f32(a_.data() + i * p_, v.data(), p_);
            const double vy = static_cast<double>(ops.dot_f32(v.data(), y.data(), p_));
            const double vv = static_cast<double>(ops.dot_f32(v.data(), v.data(), p_));
            const double next = std::abs(vy) / vv;
            const double ynorm = std::sqrt(static_cast<double>(ops.dot_f32(y.data(), y.data(), p_)));
            const float inv = static_cast<float>(1.0 / ynorm);
            for (std::size_t i = 0; i < p_; ++i) v[i] = y[i] * inv;
            if (iter > 0 && std::abs(next - lambda) <= 1e-6 * next) {
                lambda = next;
                break;
            }
            lambda = next;
        }
        return lambda;
    }

    std::size_t p_;
    std::vector<float> a_;
    double norm_ = 1.0;
    double traat_ = 0.0;
};

// Rank-k coordinate projection conjugated by two Householder reflectors:
// P = H1 H2 D H2 H1 with D = diag(mask). Exactly idempotent and symmetric in
// exact arithmetic, tr P = tr PP^T = k, ||P|| = 1.
class ProjectionOp final : public QformOperator {
public:
    ProjectionOp(std::size_t p, double frac, const RngStream& rng) : p_(p), mask_(p, 0) {
        if (!(frac > 0.0 && frac <= 1.0))
            throw precondition_error("projection rank fraction must lie in (0, 1]");
        rank_ = std::max<std::size_t>(1, static_cast<std::size_t>(frac * static_cast<double>(p)));
        CounterRng gen(rng);
        std::vector<std::size_t> perm(p);
        for (std::size_t i = 0; i < p; ++i) perm[i] = i;
        for (std::size_t i = p - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(gen.next_u64() % (i + 1));
            std::swap(perm[i], perm[j]);
        }
        for (std::size_t i = 0; i < rank_; ++i) mask_[perm[i]] = 1;
        v1_ = unit_gaussian(gen);
        v2_ = unit_gaussian(gen);
    }

    std::size_t dim() const override { return p_; }
    MatrixKind kind() const override { return MatrixKind::Arbitrary; }
    double trace() const override { return static_cast<double>(rank_); }
    double tr_aat() const override { return static_cast<double>(rank_); }

    double apply(std::span<const double> x) const override {
        if (x.size() != p_) throw precondition_error("qform: dimension mismatch");
        const auto& ops = kernels::active_ops();
        std::vector<double> y(x.begin(), x.end());
        reflect(v1_, y, ops);
        reflect(v2_, y, ops);
        double q = 0.0;
        for (std::size_t i = 0; i < p_; ++i)
            if (mask_[i]) q += y[i] * y[i];
        return q;
    }

private:
    std::vector<double> unit_gaussian(CounterRng& gen) const {
        std::vector<double> v(p_);
        for (double& e : v) e = gen.next_gaussian();
        const double inv = 1.0 / std::sqrt(kernels::scalar_ops().dot(v.data(), v.data(), p_));
        for (double& e : v) e *= inv;
        return v;
    }

    static void reflect(const std::vector<double>& v, std::vector<double>& y,
                        const kernels::Ops& ops) {
        const double c = -2.0 * ops.dot(v.data(), y.data(), v.size());
        ops.axpy(c, v.data(), y.data(), v.size());
    }

    std::size_t p_;
    std::size_t rank_ = 0;
    std::vector<std::uint8_t> mask_;
    std::vector<double> v1_, v2_;
};

} // namespace

std::unique_ptr<QformOperator> make_identity_op(std::size_t p) {
    return std::make_unique<IdentityOp>(p);
}

std::unique_ptr<QformOperator> make_zero_diag_signs_op(std::size_t p, const RngStream& rng) {
    return std::make_unique<SignMatrixOp>(p, rng);
}

std::unique_ptr<QformOperator> make_projection_op(std::size_t p, double rank_fraction,
                                                  const RngStream& rng) {
    return std::make_unique<ProjectionOp>(p, rank_fraction, rng);
}

std::unique_ptr<QformOperator> make_dense_op(SymMatrix a, MatrixKind kind) {
    return std::make_unique<DenseOp>(std::move(a), kind);
}

VarEstimate mc_variance(const TensorModelSpec& spec, const QformOperator& op, std::uint64_t reps,
                        const RngStream& rng, int batches, int threads) {
    if (reps < 100) throw precondition_error("mc_variance requires reps >= 100");
    if (batches < 2 || reps % static_cast<std::uint64_t>(batches) != 0)
        throw precondition_error("mc_variance: reps must be divisible by the batch count");
    const std::size_t p = static_cast<std::size_t>(spec.p().to_u64());
    if (op.dim() != p) throw precondition_error("mc_variance: operator dimension != C(n,d)");

    // Replicate r is a pure function of rng.substream(r): q-values land in a
    // fixed array slot regardless of scheduling, so any thread count gives
    // bit-identical results.
    std::vector<double> q(reps, 0.0);
    constexpr std::uint64_t kSlots = 8;
    const bool batched = op.prefers_batch();

    const auto run_slot = [&](std::uint64_t slot) {
        if (batched) {
            std::vector<float> panel(p * kernels::kRepBatch);
            std::vector<double> x;
            const std::uint64_t panels =
                (reps + kernels::kRepBatch - 1) / kernels::kRepBatch;
            for (std::uint64_t g = slot; g < panels; g += kSlots) {
                const std::uint64_t r0 = g * kernels::kRepBatch;
                const std::size_t nb =
                    static_cast<std::size_t>(std::min<std::uint64_t>(kernels::kRepBatch, reps - r0));
                for (std::size_t b = 0; b < nb; ++b) {
                    const std::vector<double> base = sample_base(spec, rng.substream(r0 + b));
                    x = vectorize(base, spec.d);
                    for (std::size_t j = 0; j < p; ++j)
                        panel[j * kernels::kRepBatch + b] = static_cast<float>(x[j]);
                }
                for (std::size_t b = nb; b < kernels::kRepBatch; ++b)
                    for (std::size_t j = 0; j < p; ++j) panel[j * kernels::kRepBatch + b] = 0.0f;
                op.apply_batch(panel.data(), nb, q.data() + r0);
            }
        } else {
            for (std::uint64_t r = slot; r < reps; r += kSlots) {
                const std::vector<double> base = sample_base(spec, rng.substream(r));
                q[r] = op.apply(vectorize(base, spec.d));
            }
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

    const auto sample_var = [](const double* v, std::uint64_t m) {
        double mean = 0.0;
        for (std::uint64_t i = 0; i < m; ++i) mean += v[i];
        mean /= static_cast<double>(m);
        double ss = 0.0;
        for (std::uint64_t i = 0; i < m; ++i) ss += (v[i] - mean) * (v[i] - mean);
        return ss / static_cast<double>(m - 1);
    };

    VarEstimate est;
    est.reps = reps;
    est.batches = batches;
    est.point = sample_var(q.data(), reps);

    const std::uint64_t bsize = reps / static_cast<std::uint64_t>(batches);
    std::vector<double> bvar(static_cast<std::size_t>(batches));
    for (int m = 0; m < batches; ++m)
        bvar[static_cast<std::size_t>(m)] =
            sample_var(q.data() + static_cast<std::uint64_t>(m) * bsize, bsize);
    double bmean = 0.0;
    for (double v : bvar) bmean += v;
    bmean /= static_cast<double>(batches);
    double bss = 0.0;
    for (double v : bvar) bss += (v - bmean) * (v - bmean);
    est.std_error =
        std::sqrt(bss / (static_cast<double>(batches - 1) * static_cast<double>(batches)));
    return est;
}

double exact_variance_diag_oracle(const TensorModelSpec& spec) {
    const std::optional<double> k4 = spec.dist.fourth_moment();
    if (!k4)
        throw precondition_error(
            "exact_variance_diag_oracle requires a finite fourth moment (" + spec.dist.name() +
            " has none)");
    const BigCount pc = spec.p();
    if (pc > BigCount(5000ULL))
        throw cap_exceeded("exact_variance_diag_oracle: C(n,d) = " + pc.str() + " exceeds 5000");
    // var(x^T x) = sum over ordered subset pairs of (K^{|i cap j|} - 1),
    // grouped by the overlap census.
    double total = 0.0;
    for (int t = 1; t <= spec.d; ++t) {
        const double pairs = binomial(spec.d, t).to_double() *
                             binomial_or_zero(spec.n - spec.d, spec.d - t).to_double();
        total += pairs * (std::pow(*k4, t) - 1.0);
    }
    return pc.to_double() * total;
}

double variance_upper_bound(MatrixKind kind, double p, double tr_aat, double K, int d, int n) {
    std::ostringstream msg;
    if (d < 1 || n < d) throw precondition_error("variance_upper_bound requires 1 <= d <= n");
    if (!(K >= 1.0)) {
        msg << "K >= 1 violated (K=" << K << ")";
        throw precondition_error(msg.str());
    }
    const auto require_16d = [&] {
        if (n < 16 * d) {
            msg << "n >= 16d violated (" << n << " < " << 16 * d << ")";
            throw precondition_error(msg.str());
        }
    };
    const double dn = static_cast<double>(d) / static_cast<double>(n);
    double factor = 0.0;
    switch (kind) {
        case MatrixKind::Diagonal:
            // The diagonal factor is valid algebra for every 1 <= d <= n; the
            // small-dimension oracle sweeps evaluate it below n = 16d.
            factor = std::pow(1.0 + K * dn, d) - 1.0;
            break;
        case MatrixKind::ZeroDiagonal:
            require_16d();
            factor = std::pow(1.0 + 2.0 * K * dn, d) * (16.0 * dn) * std::min(d, 8);
            break;
        case MatrixKind::Arbitrary:
            if (2.0 * K * d * d > static_cast<double>(n)) {
                msg << "2K d^2 <= n violated (" << 2.0 * K * d * d << " > " << n << ")";
                throw precondition_error(msg.str());
            }
            require_16d();
            factor = 64.0 * K * d * d / static_cast<double>(n);
            break;
    }
    return p * tr_aat * factor;
}

double hoeffding_lower(double p, double K, int d, int n) {
    if (!(K >= 1.0)) throw precondition_error("hoeffding_lower requires K >= 1");
    return p * p * (K - 1.0) * d * d / static_cast<double>(n);
}

LambdaCounts lambda_counts(const SubsetIndex& i, const SubsetIndex& j, const SubsetIndex& k,
                           const SubsetIndex& l) {
    std::vector<int> all;
    all.reserve(i.elements.size() + j.elements.size() + k.elements.size() + l.elements.size());
    for (const auto* s : {&i, &j, &k, &l})
        all.insert(all.end(), s->elements.begin(), s->elements.end());
    std::sort(all.begin(), all.end());
    LambdaCounts c;
    for (std::size_t a = 0; a < all.size();) {
        std::size_t b = a;
        while (b < all.size() && all[b] == all[a]) ++b;
        switch (b - a) {
            case 1: ++c.c1; break;
            case 2: ++c.c2; break;
            case 3: ++c.c3; break;
            case 4: ++c.c4; break;
            default: break; // sets, so coverage can not exceed 4
        }
        a = b;
    }
    return c;
}

namespace {

std::vector<std::uint64_t> all_subset_masks(int n, int d) {
    std::vector<std::uint64_t> masks;
    for_each_subset(n, d, [&](const std::vector<int>& s) {
        std::uint64_t m = 0;
        for (int e : s) m |= (1ULL << e);
        masks.push_back(m);
    });
    return masks;
}

} // namespace

BigCount gamma_brute_from_base(int n, int d, int s, int t, std::uint64_t i0_mask,
                               std::uint64_t j0_mask) {
    if (n < 1 || n > 62) throw precondition_error("gamma_brute requires 1 <= n <= 62");
    if (t < 0 || t >= d || d > n) throw precondition_error("gamma_brute requires 0 <= t < d <= n");
    if (s < 0) throw precondition_error("gamma_brute requires s >= 0");
    if (std::popcount(i0_mask) != d || std::popcount(j0_mask) != d ||
        std::popcount(i0_mask & j0_mask) != t)
        throw precondition_error("gamma_brute: base pair does not match (d, t)");
    const double count = binomial(n, d).to_double();
    if (count * count > 1e7)
        throw cap_exceeded("gamma_brute: C(n,d)^2 = " + std::to_string(count * count) +
                           " exceeds 1e7");

    const std::vector<std::uint64_t> masks = all_subset_masks(n, d);
    std::uint64_t hits = 0;
    for (std::uint64_t k : masks)
        for (std::uint64_t l : masks) {
            if (std::popcount(k & l) != t) continue;
            // Bitwise 4-way coverage counter: bit0/bit1/bit2 planes of the
            // per-element sum over {i0, j0, k, l}.
            const std::uint64_t s1 = i0_mask ^ j0_mask, c1 = i0_mask & j0_mask;
            const std::uint64_t s2 = s1 ^ k, c2 = s1 & k;
            const std::uint64_t s3 = s2 ^ l, c3 = s2 & l;
            const std::uint64_t carries1 = c1 ^ c2 ^ c3;
            const std::uint64_t carries2 = (c1 & c2) | (c1 & c3) | (c2 & c3);
            const std::uint64_t singly = s3 & ~carries1 & ~carries2;
            if (singly != 0) continue;
            const std::uint64_t triple = s3 & carries1; // coverage 3 = 011
            const std::uint64_t quad = carries2;        // coverage 4 = 100
            if (std::popcount(triple) + 2 * std::popcount(quad) == 2 * s) ++hits;
        }
    return BigCount(hits);
}

BigCount gamma_brute(int n, int d, int s, int t) {
    if (t < 0 || t >= d || d > n) throw precondition_error("gamma_brute requires 0 <= t < d <= n");
    if (2 * d - t > n)
        throw precondition_error("gamma_brute: no base pair exists (2d - t > n)");
    // Lexicographically smallest base pair: i0 = {0..d-1},
    // j0 = {0..t-1} union {d..2d-t-1}.
    const std::uint64_t i0 = (d == 64) ? ~0ULL : ((1ULL << d) - 1);
    const std::uint64_t j0 = ((1ULL << t) - 1) | (((1ULL << (d - t)) - 1) << d);
    return gamma_brute_from_base(n, d, s, t, i0, j0);
}

BigCount gamma_exact(int n, int d, int s, int t) {
    if (t < 0 || t >= d || d > n) throw precondition_error("gamma_exact requires 0 <= t < d <= n");
    if (2 * d - t > n) throw precondition_error("gamma_exact requires 2d - t <= n");
    if (s < 0) throw precondition_error("gamma_exact requires s >= 0");
    if (s > t) return BigCount(0ULL);
    BigCount total(0ULL);
    for (int r = 0; r <= s; ++r) {
        BigCount term = binomial_or_zero(t, r);
        term *= binomial_or_zero(2 * (d - t), s - r);
        term *= binomial_or_zero(t - r, s - r);
        term *= binomial_or_zero(n - 2 * d + t, t - s);
        term *= binomial_or_zero(2 * (d - t), d - t);
        total += term;
    }
    return total;
}

double gamma_bound(int n, int d, int s, int t) {
    if (t < 0 || t >= d || d > n)
        throw precondition_error("gamma_bound requires 0 <= t < d <= n");
    if (s < 0 || s > t) return 0.0;
    const double log2 = std::log(2.0);
    const double lg = 4.0 * (d - t) * log2 + log_binomial(n, d) + log_binomial(t, s) +
                      s * log2 +
                      (d - (t - s)) * std::log(static_cast<double>(d) / static_cast<double>(n));
    return std::exp(lg);
}

} // namespace rtm
