#pragma once

#include <cmath>
#include <cstdint>

namespace rtm {

// Identifies an independent random stream. Identical (seed, stream_id) pairs
// reproduce identical draw sequences; distinct stream_ids behave independently.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    RngStream substream(std::uint64_t k) const;
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}
} // namespace detail

inline RngStream RngStream::substream(std::uint64_t k) const {
    // Derive a child stream; mixing keeps substream(a).substream(b) distinct
    // from substream(b).substream(a).
    return RngStream{detail::mix64(seed + 0x9e3779b97f4a7c15ULL * k) ^ seed, stream_id + 1};
}

// Counter-based generator: the k-th output is a pure function of
// (seed, stream_id, k), so draws can be produced in any order or in parallel
// with identical results.
class CounterRng {
public:
    explicit CounterRng(RngStream s)
        : key_(detail::mix64(s.seed + 0x9e3779b97f4a7c15ULL) ^
               detail::mix64(s.stream_id + 0xd1b54a32d192ed03ULL)) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (ctr_++) * 0x9e3779b97f4a7c15ULL + key_;
        return detail::mix64(detail::mix64(z) ^ key_);
    }

    // Uniform on [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe operand for log().
    double next_double_open() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    double next_gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u = next_double_open();
        const double v = next_double();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double a = 6.283185307179586476925286766559 * v;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    double next_exponential() { return -std::log(next_double_open()); }

    // Student-t with nu > 0 degrees of freedom (Bailey's polar method).
    double next_student_t(double nu) {
        for (;;) {
            const double u = 2.0 * next_double() - 1.0;
            const double v = 2.0 * next_double() - 1.0;
            const double w = u * u + v * v;
            if (w > 1.0 || w == 0.0) continue;
            return u * std::sqrt(nu * (std::pow(w, -2.0 / nu) - 1.0) / w);
        }
    }

private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

} // namespace rtm
