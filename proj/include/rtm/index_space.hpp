#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rtm/bigcount.hpp"

namespace rtm {

// A d-element subset of {0,...,n-1}, kept strictly increasing. The canonical
// coordinate order everywhere in this library is colex rank (combinatorial
// number system): rank(s) = sum_k C(s[k], k+1).
struct SubsetIndex {
    std::vector<int> elements; // strictly increasing, values in [0, n)

    int size() const { return static_cast<int>(elements.size()); }
};

// Exact C(n, d). Throws precondition_error unless 0 <= d <= n, and
// std::overflow_error if the result exceeds 128 bits.
BigCount binomial(int n, int d);

// C(n, d) with the convention C(n, d) = 0 for d < 0 or d > n (n >= 0).
BigCount binomial_or_zero(int n, int d);

// ln C(n, d) via lgamma; relative accuracy ~1e-14.
double log_binomial(int n, int d);

// Colex rank of a subset. Validates strict monotonicity, bounds, and d <= n.
std::uint64_t subset_rank(const SubsetIndex& s, int n);

// Inverse of subset_rank; greedy decoding from the largest element down.
// Requires 0 <= r < C(n, d).
SubsetIndex subset_unrank(std::uint64_t r, int n, int d);

// Advances `elements` to the next subset in colex order. Returns false when
// the last subset was already reached. `elements` must hold a valid subset.
bool next_subset_colex(std::vector<int>& elements, int n);

// Calls f(s) for all C(n, d) subsets in increasing colex rank.
void for_each_subset(int n, int d, const std::function<void(const std::vector<int>&)>& f);

} // namespace rtm
