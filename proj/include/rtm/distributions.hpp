#pragma once

#include <optional>
#include <string>

#include "rtm/rng.hpp"

namespace rtm {

// Standardized base-variable law: E X = 0, E X^2 = 1 analytically for every
// parameterization.
//   TwoPoint(a):        X = a w.p. 1/(1+a^2), X = -1/a w.p. a^2/(1+a^2), a > 1
//   SparseBernoulli(q): X = +-q^{-1/2} each w.p. q/2, else 0, q in (0, 1]
//   StudentT(nu):       t_nu / sqrt(nu/(nu-2)), nu > 2
class EntryDistribution {
public:
    enum class Kind { Rademacher, Gaussian, TwoPoint, StudentT, SparseBernoulli };

    static EntryDistribution rademacher() { return {Kind::Rademacher, 0.0}; }
    static EntryDistribution gaussian() { return {Kind::Gaussian, 0.0}; }
    static EntryDistribution two_point(double a);
    static EntryDistribution student_t(double nu);
    static EntryDistribution sparse_bernoulli(double q);

    // Parses "rademacher", "gaussian", "twopoint:a", "studentt:nu",
    // "sparsebernoulli:q".
    static EntryDistribution parse(const std::string& text);

    Kind kind() const { return kind_; }
    double param() const { return param_; }
    std::string name() const;

    double sample(CounterRng& rng) const;

    // Exact E X^4 when finite; nullopt for StudentT with nu <= 4.
    std::optional<double> fourth_moment() const;

    // Closed-form truncated moments are available for the finite-support
    // kinds and the Gaussian.
    bool has_analytic_truncation() const;

    // E X^2 1(X^2 > c) and E X^4 1(X^2 <= c), c >= 0. Throws
    // precondition_error when no closed form exists (use Monte Carlo).
    double tail_second_moment(double c) const;
    double truncated_fourth_moment(double c) const;

    // E X^2 1(X^2 <= c) from a formula independent of tail_second_moment, so
    // body + tail = E X^2 = 1 is a real consistency check.
    double body_second_moment(double c) const;

private:
    EntryDistribution(Kind k, double p) : kind_(k), param_(p) {}

    Kind kind_;
    double param_;
};

// Nonnegative law with E Z = 1, used by the elementary-symmetric-polynomial
// experiments. XSquared wraps Z = X^2 of an entry distribution.
class ZDistribution {
public:
    enum class Kind { ConstOne, Exponential, XSquared };

    static ZDistribution const_one() { return {Kind::ConstOne, {}}; }
    static ZDistribution exponential() { return {Kind::Exponential, {}}; }
    static ZDistribution x_squared(const EntryDistribution& d) { return {Kind::XSquared, d}; }

    // Parses "const", "exp", "xsq:<entry-dist spec>".
    static ZDistribution parse(const std::string& text);

    Kind kind() const { return kind_; }
    const EntryDistribution& base() const { return *base_; }
    std::string name() const;

    double sample(CounterRng& rng) const;

    bool has_analytic_truncation() const;
    // E Z 1(Z > c) and E Z^2 1(Z <= c), c >= 0.
    double tail_first_moment(double c) const;
    double truncated_second_moment(double c) const;

private:
    ZDistribution(Kind k, std::optional<EntryDistribution> b) : kind_(k), base_(b) {}

    Kind kind_;
    std::optional<EntryDistribution> base_;
};

} // namespace rtm
