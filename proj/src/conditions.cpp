#include "rtm/conditions.hpp"

#include <algorithm>
#include <cmath>

#include "rtm/errors.hpp"

namespace rtm {
namespace {

struct McMoments {
    double mean_tail = 0.0;   // E W 1(dW > n), W = X^2 or Z
    double mean_body2 = 0.0;  // E W^2 1(dW <= n)
    double mean_body1 = 0.0;  // E W 1(dW <= n)
    double se_tail = 0.0;
    double se_body2 = 0.0;
    std::uint64_t reps = 0;
};

// Batch-mean Monte Carlo for the truncated moments of W (= X^2 or Z).
McMoments mc_moments(const std::function<double(CounterRng&)>& draw_w, int d, int n,
                     const RngStream& rng, std::uint64_t reps) {
    if (reps < 100) throw precondition_error("truncated-moment MC requires reps >= 100");
    constexpr int kBatches = 20;
    const std::uint64_t bsize = reps / kBatches;
    const double cut = static_cast<double>(n) / static_cast<double>(d);

    CounterRng gen(rng);
    double bt[kBatches], bb2[kBatches], bb1[kBatches];
    for (int m = 0; m < kBatches; ++m) {
        double st = 0.0, sb2 = 0.0, sb1 = 0.0;
        for (std::uint64_t i = 0; i < bsize; ++i) {
            const double w = draw_w(gen);
            if (w > cut) {
                st += w;
            } else {
                sb1 += w;
                sb2 += w * w;
            }
        }
        bt[m] = st / static_cast<double>(bsize);
        bb2[m] = sb2 / static_cast<double>(bsize);
        bb1[m] = sb1 / static_cast<double>(bsize);
    }

    const auto mean_se = [&](const double* b, double& mean, double& se) {
        mean = 0.0;
        for (int m = 0; m < kBatches; ++m) mean += b[m];
        mean /= kBatches;
        double ss = 0.0;
        for (int m = 0; m < kBatches; ++m) ss += (b[m] - mean) * (b[m] - mean);
        se = std::sqrt(ss / ((kBatches - 1.0) * kBatches));
    };

    McMoments out;
    out.reps = bsize * kBatches;
    mean_se(bt, out.mean_tail, out.se_tail);
    mean_se(bb2, out.mean_body2, out.se_body2);
    double se1;
    mean_se(bb1, out.mean_body1, se1);
    return out;
}

bool use_analytic(CondMethod method, bool available) {
    switch (method) {
        case CondMethod::Auto: return available;
        case CondMethod::Analytic:
            if (!available)
                throw precondition_error("analytic truncated moments are not available here");
            return true;
        case CondMethod::MonteCarlo: return false;
    }
    return available;
}

void check_dn(int d, int n) {
    if (d < 1 || d > n) throw precondition_error("condition terms require 1 <= d <= n");
}

} // namespace

ConditionReport entry_moment_condition(const EntryDistribution& dist, int d, int n, CondMethod method,
                            const RngStream& rng, std::uint64_t reps) {
    check_dn(d, n);
    const double dd = static_cast<double>(d);
    const double scale4 = dd * dd / static_cast<double>(n);
    ConditionReport rep;
    if (use_analytic(method, dist.has_analytic_truncation())) {
        const double cut = static_cast<double>(n) / dd;
        rep.term_tail = dd * dist.tail_second_moment(cut);
        rep.term_fourth = scale4 * dist.truncated_fourth_moment(cut);
        return rep;
    }
    const McMoments mc = mc_moments(
        [&dist](CounterRng& g) {
            const double x = dist.sample(g);
            return x * x;
        },
        d, n, rng, reps);
    rep.analytic = false;
    rep.reps = mc.reps;
    rep.term_tail = dd * mc.mean_tail;
    rep.tail_std_error = dd * mc.se_tail;
    rep.term_fourth = scale4 * mc.mean_body2;
    rep.fourth_std_error = scale4 * mc.se_body2;
    return rep;
}

ConditionReport z_moment_condition(const ZDistribution& zdist, int d, int n, CondMethod method,
                               const RngStream& rng, std::uint64_t reps) {
    check_dn(d, n);
    const double dd = static_cast<double>(d);
    const double scale2 = dd * dd / static_cast<double>(n);
    ConditionReport rep;
    if (use_analytic(method, zdist.has_analytic_truncation())) {
        const double cut = static_cast<double>(n) / dd;
        rep.term_tail = dd * zdist.tail_first_moment(cut);
        rep.term_fourth = scale2 * zdist.truncated_second_moment(cut);
        return rep;
    }
    const McMoments mc =
        mc_moments([&zdist](CounterRng& g) { return zdist.sample(g); }, d, n, rng, reps);
    rep.analytic = false;
    rep.reps = mc.reps;
    rep.term_tail = dd * mc.mean_tail;
    rep.tail_std_error = dd * mc.se_tail;
    rep.term_fourth = scale2 * mc.mean_body2;
    rep.fourth_std_error = scale2 * mc.se_body2;
    return rep;
}

std::pair<double, double> second_moment_split(const EntryDistribution& dist, int d, int n,
                                              CondMethod method, const RngStream& rng,
                                              std::uint64_t reps) {
    check_dn(d, n);
    const double cut = static_cast<double>(n) / static_cast<double>(d);
    if (use_analytic(method, dist.has_analytic_truncation()))
        return {dist.tail_second_moment(cut), dist.body_second_moment(cut)};
    const McMoments mc = mc_moments(
        [&dist](CounterRng& g) {
            const double x = dist.sample(g);
            return x * x;
        },
        d, n, rng, reps);
    return {mc.mean_tail, mc.mean_body1};
}

namespace {

bool trends_down(const std::vector<double>& v) {
    if (v.size() < 2) return false;
    double vmax = 0.0;
    for (double x : v) vmax = std::max(vmax, std::abs(x));
    if (vmax <= 1e-12) return true;
    return v.back() <= 0.75 * v.front();
}

} // namespace

RegimeTable regime_classifier(const std::function<EntryDistribution(int)>& dist_of_n,
                              const std::function<int(int)>& d_of_n,
                              const std::vector<int>& n_grid, const RngStream& rng,
                              std::uint64_t reps) {
    for (std::size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1])
            throw precondition_error("regime_classifier requires a strictly increasing n grid");
    RegimeTable table;
    std::vector<double> tails, fourths;
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        const int n = n_grid[i];
        const int d = std::clamp(d_of_n(n), 1, n);
        RegimePoint pt;
        pt.n = n;
        pt.d = d;
        pt.report =
            entry_moment_condition(dist_of_n(n), d, n, CondMethod::Auto, rng.substream(i), reps);
        tails.push_back(pt.report.term_tail);
        fourths.push_back(pt.report.term_fourth);
        table.points.push_back(std::move(pt));
    }
    table.tail_trending_down = trends_down(tails);
    table.fourth_trending_down = trends_down(fourths);
    return table;
}

std::function<int(int)> parse_d_rule(const std::string& text) {
    if (text.rfind("const:", 0) == 0) {
        const int k = std::stoi(text.substr(6));
        if (k < 1) throw precondition_error("const d rule requires k >= 1");
        return [k](int n) { return std::min(k, n); };
    }
    if (text.rfind("floor(n^", 0) == 0 && text.back() == ')') {
        const double a = std::stod(text.substr(8, text.size() - 9));
        if (!(a > 0.0 && a <= 1.0))
            throw precondition_error("floor(n^a) d rule requires a in (0, 1]");
        return [a](int n) {
            const int d = static_cast<int>(std::floor(std::pow(static_cast<double>(n), a)));
            return std::clamp(d, 1, n);
        };
    }
    throw precondition_error("unknown d rule: " + text + " (expected floor(n^a) or const:k)");
}

} // namespace rtm
