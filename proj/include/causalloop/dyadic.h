#ifndef CAUSALLOOP_DYADIC_H
#define CAUSALLOOP_DYADIC_H

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace causalloop {

/// Arbitrary-precision rational, used where values leave the dyadic ring
/// (averages over n parties, causal bounds such as 5/6).
using Rational = boost::multiprecision::cpp_rational;

/// Exact dyadic rational num / 2^log2den.
///
/// Canonical form: log2den >= 0, and num is odd whenever log2den > 0.
/// Zero is stored as 0 / 2^0. All arithmetic is exact; results that do not
/// fit a 64-bit numerator raise std::overflow_error.
class Dyadic {
   public:
    constexpr Dyadic() = default;
    Dyadic(int64_t num) : num_(num) {}  // NOLINT(google-explicit-constructor)
    Dyadic(int64_t num, int log2den);

    /// 2^-k.
    static Dyadic inverse_power_of_two(int k) { return Dyadic(1, k); }

    int64_t num() const { return num_; }
    int log2den() const { return log2den_; }

    bool is_zero() const { return num_ == 0; }
    int sign() const { return (num_ > 0) - (num_ < 0); }

    /// Multiplies by 2^k (k may be negative).
    Dyadic scaled_by_power_of_two(int k) const;

    Dyadic operator-() const;
    Dyadic &operator+=(const Dyadic &other);
    Dyadic &operator-=(const Dyadic &other);
    Dyadic &operator*=(const Dyadic &other);

    friend Dyadic operator+(Dyadic a, const Dyadic &b) { return a += b; }
    friend Dyadic operator-(Dyadic a, const Dyadic &b) { return a -= b; }
    friend Dyadic operator*(Dyadic a, const Dyadic &b) { return a *= b; }

    friend bool operator==(const Dyadic &a, const Dyadic &b) = default;
    friend std::strong_ordering operator<=>(const Dyadic &a, const Dyadic &b);

    double to_double() const;
    Rational to_rational() const;

    /// "p" for integers, "p/2^q" otherwise.
    std::string str() const;

   private:
    static Dyadic from_wide(__int128 num, int log2den);

    int64_t num_ = 0;
    int32_t log2den_ = 0;
};

std::ostream &operator<<(std::ostream &out, const Dyadic &value);

/// "num/den" (or "num" when den == 1).
std::string rational_str(const Rational &value);

/// Decimal rendering with 17 significant digits.
std::string float_str(double value);

}  // namespace causalloop

#endif
