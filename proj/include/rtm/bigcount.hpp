#pragma once

#include <cstdint>
#include <string>

#include "rtm/errors.hpp"

namespace rtm {

// Exact nonnegative integer on 128 bits. Arithmetic throws std::overflow_error
// instead of wrapping.
class BigCount {
public:
    BigCount() : v_(0) {}
    BigCount(std::uint64_t v) : v_(v) {} // NOLINT(google-explicit-constructor)

    static BigCount from_u128(unsigned __int128 v) {
        BigCount c;
        c.v_ = v;
        return c;
    }

    unsigned __int128 raw() const { return v_; }

    std::uint64_t to_u64() const {
        if (v_ > ~std::uint64_t{0})
            throw std::overflow_error("BigCount does not fit in 64 bits");
        return static_cast<std::uint64_t>(v_);
    }

    double to_double() const { return static_cast<double>(v_); }

    BigCount& operator+=(const BigCount& o) {
        unsigned __int128 r = v_ + o.v_;
        if (r < v_) throw std::overflow_error("BigCount addition overflow");
        v_ = r;
        return *this;
    }
    BigCount& operator*=(const BigCount& o) {
        if (v_ != 0 && o.v_ != 0) {
            unsigned __int128 r = v_ * o.v_;
            if (r / v_ != o.v_) throw std::overflow_error("BigCount multiplication overflow");
            v_ = r;
        } else {
            v_ = 0;
        }
        return *this;
    }
    BigCount& operator/=(const BigCount& o) {
        v_ /= o.v_; // used only for exact divisions in binomial recurrences
        return *this;
    }

    friend BigCount operator+(BigCount a, const BigCount& b) { return a += b; }
    friend BigCount operator*(BigCount a, const BigCount& b) { return a *= b; }
    friend BigCount operator/(BigCount a, const BigCount& b) { return a /= b; }
    friend bool operator==(const BigCount& a, const BigCount& b) { return a.v_ == b.v_; }
    friend bool operator!=(const BigCount& a, const BigCount& b) { return a.v_ != b.v_; }
    friend bool operator<(const BigCount& a, const BigCount& b) { return a.v_ < b.v_; }
    friend bool operator<=(const BigCount& a, const BigCount& b) { return a.v_ <= b.v_; }
    friend bool operator>(const BigCount& a, const BigCount& b) { return a.v_ > b.v_; }
    friend bool operator>=(const BigCount& a, const BigCount& b) { return a.v_ >= b.v_; }

    std::string str() const {
        if (v_ == 0) return "0";
        std::string s;
        unsigned __int128 v = v_;
        while (v != 0) {
            s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
            v /= 10;
        }
        return s;
    }

private:
    unsigned __int128 v_;
};

} // namespace rtm
