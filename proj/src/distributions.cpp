#include "rtm/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "rtm/errors.hpp"

namespace rtm {
namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267793994605993438;

double normal_pdf(double s) { return kInvSqrt2Pi * std::exp(-0.5 * s * s); }
double normal_upper_tail(double s) { return 0.5 * std::erfc(s * 0.70710678118654752440); }

std::pair<std::string, std::string> split_spec(const std::string& text) {
    std::string t = text;
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    auto pos = t.find(':');
    if (pos == std::string::npos) return {t, ""};
    return {t.substr(0, pos), t.substr(pos + 1)};
}

double parse_param(const std::string& s, const char* what) {
    if (s.empty()) throw precondition_error(std::string(what) + ": missing parameter");
    return std::stod(s);
}

} // namespace

EntryDistribution EntryDistribution::two_point(double a) {
    if (!(a > 1.0)) throw precondition_error("TwoPoint requires a > 1");
    return {Kind::TwoPoint, a};
}

EntryDistribution EntryDistribution::student_t(double nu) {
    if (!(nu > 2.0)) throw precondition_error("StudentT requires nu > 2");
    return {Kind::StudentT, nu};
}

EntryDistribution EntryDistribution::sparse_bernoulli(double q) {
    if (!(q > 0.0 && q <= 1.0)) throw precondition_error("SparseBernoulli requires q in (0, 1]");
    return {Kind::SparseBernoulli, q};
}

EntryDistribution EntryDistribution::parse(const std::string& text) {
    auto [name, param] = split_spec(text);
    if (name == "rademacher") return rademacher();
    if (name == "gaussian") return gaussian();
    if (name == "twopoint") return two_point(parse_param(param, "twopoint"));
    if (name == "studentt") return student_t(parse_param(param, "studentt"));
    if (name == "sparsebernoulli") return sparse_bernoulli(parse_param(param, "sparsebernoulli"));
    throw precondition_error("unknown entry distribution: " + text);
}

std::string EntryDistribution::name() const {
    switch (kind_) {
        case Kind::Rademacher: return "rademacher";
        case Kind::Gaussian: return "gaussian";
        case Kind::TwoPoint: return "twopoint:" + std::to_string(param_);
        case Kind::StudentT: return "studentt:" + std::to_string(param_);
        case Kind::SparseBernoulli: return "sparsebernoulli:" + std::to_string(param_);
    }
    return "?";
}

double EntryDistribution::sample(CounterRng& rng) const {
    switch (kind_) {
        case Kind::Rademacher:
            return (rng.next_u64() >> 63) ? 1.0 : -1.0;
        case Kind::Gaussian:
            return rng.next_gaussian();
        case Kind::TwoPoint: {
            const double a = param_;
            return rng.next_double() < 1.0 / (1.0 + a * a) ? a : -1.0 / a;
        }
        case Kind::StudentT:
            return rng.next_student_t(param_) / std::sqrt(param_ / (param_ - 2.0));
        case Kind::SparseBernoulli: {
            const double q = param_;
            const double u = rng.next_double();
            if (u < 0.5 * q) return 1.0 / std::sqrt(q);
            if (u < q) return -1.0 / std::sqrt(q);
            return 0.0;
        }
    }
    return 0.0;
}

std::optional<double> EntryDistribution::fourth_moment() const {
    switch (kind_) {
        case Kind::Rademacher: return 1.0;
        case Kind::Gaussian: return 3.0;
        case Kind::TwoPoint: {
            const double a = param_;
            return (a * a * a * a + 1.0 / (a * a)) / (1.0 + a * a);
        }
        case Kind::StudentT: {
            const double nu = param_;
            if (nu <= 4.0) return std::nullopt;
            return 3.0 * (nu - 2.0) / (nu - 4.0);
        }
        case Kind::SparseBernoulli: return 1.0 / param_;
    }
    return std::nullopt;
}

bool EntryDistribution::has_analytic_truncation() const {
    return kind_ != Kind::StudentT;
}

namespace {

// Support atoms (value, weight) for the finite-support kinds.
std::vector<std::pair<double, double>> support(const EntryDistribution& d) {
    switch (d.kind()) {
        case EntryDistribution::Kind::Rademacher:
            return {{1.0, 0.5}, {-1.0, 0.5}};
        case EntryDistribution::Kind::TwoPoint: {
            const double a = d.param();
            return {{a, 1.0 / (1.0 + a * a)}, {-1.0 / a, a * a / (1.0 + a * a)}};
        }
        case EntryDistribution::Kind::SparseBernoulli: {
            const double q = d.param();
            const double v = 1.0 / std::sqrt(q);
            return {{v, 0.5 * q}, {-v, 0.5 * q}, {0.0, 1.0 - q}};
        }
        default:
            throw precondition_error("not a finite-support distribution");
    }
}

} // namespace

double EntryDistribution::tail_second_moment(double c) const {
    if (kind_ == Kind::Gaussian) {
        const double s = std::sqrt(std::max(c, 0.0));
        return 2.0 * (s * normal_pdf(s) + normal_upper_tail(s));
    }
    if (!has_analytic_truncation())
        throw precondition_error("no closed-form truncated moments for " + name());
    double sum = 0.0;
    for (auto [v, w] : support(*this))
        if (v * v > c) sum += w * v * v;
    return sum;
}

double EntryDistribution::truncated_fourth_moment(double c) const {
    if (kind_ == Kind::Gaussian) {
        const double s = std::sqrt(std::max(c, 0.0));
        return 3.0 - 2.0 * (normal_pdf(s) * (s * s * s + 3.0 * s) + 3.0 * normal_upper_tail(s));
    }
    if (!has_analytic_truncation())
        throw precondition_error("no closed-form truncated moments for " + name());
    double sum = 0.0;
    for (auto [v, w] : support(*this))
        if (v * v <= c) sum += w * v * v * v * v;
    return sum;
}

double EntryDistribution::body_second_moment(double c) const {
    if (kind_ == Kind::Gaussian) {
        // E X^2 1(|X| <= s) = (Phi(s) - Phi(-s)) - 2 s phi(s)
        const double s = std::sqrt(std::max(c, 0.0));
        return std::erf(s * 0.70710678118654752440) - 2.0 * s * normal_pdf(s);
    }
    if (!has_analytic_truncation())
        throw precondition_error("no closed-form truncated moments for " + name());
    double sum = 0.0;
    for (auto [v, w] : support(*this))
        if (v * v <= c) sum += w * v * v;
    return sum;
}

ZDistribution ZDistribution::parse(const std::string& text) {
    auto [name, param] = split_spec(text);
    if (name == "const") return const_one();
    if (name == "exp") return exponential();
    if (name == "xsq") return x_squared(EntryDistribution::parse(param));
    throw precondition_error("unknown Z distribution: " + text);
}

std::string ZDistribution::name() const {
    switch (kind_) {
        case Kind::ConstOne: return "const";
        case Kind::Exponential: return "exp";
        case Kind::XSquared: return "xsq:" + base_->name();
    }
    return "?";
}

double ZDistribution::sample(CounterRng& rng) const {
    switch (kind_) {
        case Kind::ConstOne: return 1.0;
        case Kind::Exponential: return rng.next_exponential();
        case Kind::XSquared: {
            const double x = base_->sample(rng);
            return x * x;
        }
    }
    return 0.0;
}

bool ZDistribution::has_analytic_truncation() const {
    switch (kind_) {
        case Kind::ConstOne:
        case Kind::Exponential: return true;
        case Kind::XSquared: return base_->has_analytic_truncation();
    }
    return false;
}

double ZDistribution::tail_first_moment(double c) const {
    switch (kind_) {
        case Kind::ConstOne: return 1.0 > c ? 1.0 : 0.0;
        case Kind::Exponential: return (c + 1.0) * std::exp(-c);
        case Kind::XSquared: return base_->tail_second_moment(c);
    }
    return 0.0;
}

double ZDistribution::truncated_second_moment(double c) const {
    switch (kind_) {
        case Kind::ConstOne: return 1.0 <= c ? 1.0 : 0.0;
        case Kind::Exponential: return 2.0 - (c * c + 2.0 * c + 2.0) * std::exp(-c);
        case Kind::XSquared: return base_->truncated_fourth_moment(c);
    }
    return 0.0;
}

} // namespace rtm
