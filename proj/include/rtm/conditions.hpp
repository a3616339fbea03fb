#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "rtm/distributions.hpp"
#include "rtm/rng.hpp"

namespace rtm {

enum class CondMethod { Auto, Analytic, MonteCarlo };

// Truncated-moment pair behind the fourth-moment convergence condition:
//   tail   = d E X^2 1(d X^2 > n)     (or d E Z 1(dZ > n))
//   fourth = (d^2/n) E X^4 1(d X^2 <= n)  (or (d^2/n) E Z^2 1(dZ <= n))
struct ConditionReport {
    double term_tail = 0.0;
    double term_fourth = 0.0;
    bool analytic = true;
    std::uint64_t reps = 0;         // Monte Carlo only
    double tail_std_error = 0.0;    // of term_tail
    double fourth_std_error = 0.0;  // of term_fourth
};

ConditionReport entry_moment_condition(const EntryDistribution& dist, int d, int n,
                            CondMethod method = CondMethod::Auto, const RngStream& rng = {},
                            std::uint64_t reps = 1000000);

ConditionReport z_moment_condition(const ZDistribution& zdist, int d, int n,
                               CondMethod method = CondMethod::Auto, const RngStream& rng = {},
                               std::uint64_t reps = 1000000);

// (E X^2 1(dX^2 > n), E X^2 1(dX^2 <= n)); the parts must sum to E X^2 = 1.
// Computed from independent expressions (analytic) or the same MC draws.
std::pair<double, double> second_moment_split(const EntryDistribution& dist, int d, int n,
                                              CondMethod method = CondMethod::Auto,
                                              const RngStream& rng = {},
                                              std::uint64_t reps = 1000000);

struct RegimePoint {
    int n = 0;
    int d = 0;
    ConditionReport report;
};

// Finite-grid trend of the two condition terms; no limit is asserted. A term
// "trends down" when it shrinks by at least 25% across the grid or is
// negligible throughout.
struct RegimeTable {
    std::vector<RegimePoint> points;
    bool tail_trending_down = false;
    bool fourth_trending_down = false;
};

RegimeTable regime_classifier(const std::function<EntryDistribution(int)>& dist_of_n,
                              const std::function<int(int)>& d_of_n,
                              const std::vector<int>& n_grid, const RngStream& rng = {},
                              std::uint64_t reps = 1000000);

// "floor(n^a)" or "const:k"; the result is clamped to [1, n].
std::function<int(int)> parse_d_rule(const std::string& text);

} // namespace rtm
