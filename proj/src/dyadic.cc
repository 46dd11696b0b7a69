#include "causalloop/dyadic.h"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace causalloop {

namespace {

constexpr __int128 kMaxNum = std::numeric_limits<int64_t>::max();
constexpr __int128 kMinNum = std::numeric_limits<int64_t>::min();

__int128 shift_left_checked(__int128 value, int shift) {
    if (value == 0) {
        return 0;
    }
    if (shift >= 126) {
        throw std::overflow_error("dyadic: numerator overflow");
    }
    __int128 limit = (static_cast<__int128>(1) << (126 - shift));
    if (value >= limit || value <= -limit) {
        throw std::overflow_error("dyadic: numerator overflow");
    }
    return value * (static_cast<__int128>(1) << shift);
}

}  // namespace

Dyadic::Dyadic(int64_t num, int log2den) {
    *this = from_wide(num, log2den);
}

Dyadic Dyadic::from_wide(__int128 num, int log2den) {
    if (num == 0) {
        return Dyadic();
    }
    if (log2den < 0) {
        num = shift_left_checked(num, -log2den);
        log2den = 0;
    }
    while (log2den > 0 && (num & 1) == 0) {
        num /= 2;
        log2den--;
    }
    if (num > kMaxNum || num < kMinNum) {
        throw std::overflow_error("dyadic: numerator overflow");
    }
    Dyadic result;
    result.num_ = static_cast<int64_t>(num);
    result.log2den_ = log2den;
    return result;
}

Dyadic Dyadic::scaled_by_power_of_two(int k) const {
    return from_wide(num_, log2den_ - k);
}

Dyadic Dyadic::operator-() const {
    return from_wide(-static_cast<__int128>(num_), log2den_);
}

Dyadic &Dyadic::operator+=(const Dyadic &other) {
    int q = std::max(log2den_, other.log2den_);
    __int128 a = shift_left_checked(num_, q - log2den_);
    __int128 b = shift_left_checked(other.num_, q - other.log2den_);
    *this = from_wide(a + b, q);
    return *this;
}

Dyadic &Dyadic::operator-=(const Dyadic &other) {
    return *this += -other;
}

Dyadic &Dyadic::operator*=(const Dyadic &other) {
    *this = from_wide(static_cast<__int128>(num_) * other.num_, log2den_ + other.log2den_);
    return *this;
}

std::strong_ordering operator<=>(const Dyadic &a, const Dyadic &b) {
    int q = std::max(a.log2den_, b.log2den_);
    __int128 x = shift_left_checked(a.num_, q - a.log2den_);
    __int128 y = shift_left_checked(b.num_, q - b.log2den_);
    return x <=> y;
}

double Dyadic::to_double() const {
    return std::ldexp(static_cast<double>(num_), -log2den_);
}

Rational Dyadic::to_rational() const {
    boost::multiprecision::cpp_int den = 1;
    den <<= log2den_;
    return Rational(boost::multiprecision::cpp_int(num_), den);
}

std::string Dyadic::str() const {
    if (log2den_ == 0) {
        return std::to_string(num_);
    }
    return std::to_string(num_) + "/2^" + std::to_string(log2den_);
}

std::ostream &operator<<(std::ostream &out, const Dyadic &value) {
    return out << value.str();
}

std::string rational_str(const Rational &value) {
    auto num = boost::multiprecision::numerator(value);
    auto den = boost::multiprecision::denominator(value);
    if (den == 1) {
        return num.str();
    }
    return num.str() + "/" + den.str();
}

std::string float_str(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

}  // namespace causalloop
