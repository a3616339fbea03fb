#include "rtm/index_space.hpp"

#include <cmath>

namespace rtm {

BigCount binomial(int n, int d) {
    if (d < 0 || n < 0 || d > n)
        throw precondition_error("binomial requires 0 <= d <= n");
    if (d > n - d) d = n - d;
    BigCount r{1};
    // r stays exact at every step: after i factors it equals C(n-d+i, i).
    for (int i = 1; i <= d; ++i) {
        r *= BigCount(static_cast<std::uint64_t>(n - d + i));
        r /= BigCount(static_cast<std::uint64_t>(i));
    }
    return r;
}

BigCount binomial_or_zero(int n, int d) {
    if (d < 0 || d > n) return BigCount{0};
    return binomial(n, d);
}

double log_binomial(int n, int d) {
    if (d < 0 || n < 0 || d > n)
        throw precondition_error("log_binomial requires 0 <= d <= n");
    return std::lgamma(n + 1.0) - std::lgamma(d + 1.0) - std::lgamma(n - d + 1.0);
}

std::uint64_t subset_rank(const SubsetIndex& s, int n) {
    const auto& e = s.elements;
    int prev = -1;
    for (std::size_t k = 0; k < e.size(); ++k) {
        if (e[k] <= prev || e[k] < 0 || e[k] >= n)
            throw precondition_error("subset_rank: elements must be strictly increasing in [0, n)");
        prev = e[k];
    }
    BigCount r{0};
    for (std::size_t k = 0; k < e.size(); ++k)
        r += binomial_or_zero(e[k], static_cast<int>(k) + 1);
    return r.to_u64();
}

SubsetIndex subset_unrank(std::uint64_t r, int n, int d) {
    if (d < 0 || d > n)
        throw precondition_error("subset_unrank requires 0 <= d <= n");
    BigCount total = binomial(n, d);
    if (BigCount(r) >= total)
        throw precondition_error("subset_unrank: rank out of range [0, C(n,d))");
    SubsetIndex s;
    s.elements.assign(static_cast<std::size_t>(d), 0);
    BigCount rem{r};
    int a = n - 1;
    for (int k = d; k >= 1; --k) {
        // largest a with C(a, k) <= rem
        while (binomial_or_zero(a, k) > rem) --a;
        s.elements[static_cast<std::size_t>(k - 1)] = a;
        BigCount c = binomial_or_zero(a, k);
        rem = BigCount::from_u128(rem.raw() - c.raw());
        --a;
    }
    return s;
}

bool next_subset_colex(std::vector<int>& e, int n) {
    const int d = static_cast<int>(e.size());
    for (int k = 0; k < d; ++k) {
        const int lim = (k + 1 < d) ? e[static_cast<std::size_t>(k + 1)] : n;
        if (e[static_cast<std::size_t>(k)] + 1 < lim) {
            ++e[static_cast<std::size_t>(k)];
            for (int j = 0; j < k; ++j) e[static_cast<std::size_t>(j)] = j;
            return true;
        }
    }
    return false;
}

void for_each_subset(int n, int d, const std::function<void(const std::vector<int>&)>& f) {
    if (d < 0 || d > n)
        throw precondition_error("for_each_subset requires 0 <= d <= n");
    std::vector<int> e(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) e[static_cast<std::size_t>(i)] = i;
    do {
        f(e);
    } while (next_subset_colex(e, n));
}

} // namespace rtm
