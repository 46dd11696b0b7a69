#include <gtest/gtest.h>

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

#include "causalloop/dyadic.h"

namespace causalloop {
namespace {

TEST(Dyadic, CanonicalForm) {
    EXPECT_EQ(Dyadic(4, 3), Dyadic(1, 1));
    EXPECT_EQ(Dyadic(4, 3).num(), 1);
    EXPECT_EQ(Dyadic(4, 3).log2den(), 1);
    EXPECT_EQ(Dyadic(0, 7).log2den(), 0);
    EXPECT_EQ(Dyadic(3, -2), Dyadic(12));
    EXPECT_EQ(Dyadic(-6, 1), Dyadic(-3));
    EXPECT_EQ(Dyadic::inverse_power_of_two(5), Dyadic(1, 5));
}

TEST(Dyadic, Arithmetic) {
    EXPECT_EQ(Dyadic(1, 1) + Dyadic(1, 1), Dyadic(1));
    EXPECT_EQ(Dyadic(1, 3) + Dyadic(3, 2), Dyadic(7, 3));
    EXPECT_EQ(Dyadic(1, 2) - Dyadic(1, 1), Dyadic(-1, 2));
    EXPECT_EQ(Dyadic(3, 2) * Dyadic(5, 3), Dyadic(15, 5));
    EXPECT_EQ(Dyadic(2, 1) * Dyadic(1, 1), Dyadic(1, 1));
    EXPECT_EQ(-Dyadic(5, 4), Dyadic(-5, 4));
    EXPECT_EQ(Dyadic(3, 2).scaled_by_power_of_two(2), Dyadic(3));
    EXPECT_EQ(Dyadic(3).scaled_by_power_of_two(-3), Dyadic(3, 3));
    EXPECT_TRUE((Dyadic(1, 1) - Dyadic(1, 1)).is_zero());
    EXPECT_EQ(Dyadic(-1, 9).sign(), -1);
    EXPECT_EQ(Dyadic(0).sign(), 0);
}

TEST(Dyadic, Ordering) {
    EXPECT_LT(Dyadic(1, 3), Dyadic(1, 2));
    EXPECT_LT(Dyadic(-1), Dyadic(-1, 4));
    EXPECT_GT(Dyadic(5, 2), Dyadic(1));
    EXPECT_EQ(Dyadic(2, 1) <=> Dyadic(1), std::strong_ordering::equal);
}

TEST(Dyadic, RandomAgainstRational) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int64_t> num(-1000000, 1000000);
    std::uniform_int_distribution<int> den(0, 20);
    for (int k = 0; k < 2000; ++k) {
        Dyadic a(num(rng), den(rng)), b(num(rng), den(rng));
        Rational ra = a.to_rational(), rb = b.to_rational();
        EXPECT_EQ((a + b).to_rational(), ra + rb);
        EXPECT_EQ((a - b).to_rational(), ra - rb);
        EXPECT_EQ((a * b).to_rational(), ra * rb);
        EXPECT_EQ(a < b, ra < rb);
    }
}

TEST(Dyadic, Overflow) {
    const int64_t big = std::numeric_limits<int64_t>::max();
    EXPECT_THROW(Dyadic(big) + Dyadic(1), std::overflow_error);
    EXPECT_THROW(Dyadic(big) * Dyadic(2), std::overflow_error);
    EXPECT_THROW(Dyadic(1).scaled_by_power_of_two(64), std::overflow_error);
    EXPECT_THROW(Dyadic(1, 40) + Dyadic(big), std::overflow_error);
    EXPECT_NO_THROW(Dyadic(big) + Dyadic(-1));
}

TEST(Dyadic, Rendering) {
    EXPECT_EQ(Dyadic(3).str(), "3");
    EXPECT_EQ(Dyadic(-3, 4).str(), "-3/2^4");
    EXPECT_EQ(Dyadic(1, 1).to_double(), 0.5);
    EXPECT_EQ(rational_str(Rational(5, 6)), "5/6");
    EXPECT_EQ(rational_str(Rational(2)), "2");
    EXPECT_EQ(float_str(0.5), "0.5");
}

}  // namespace
}  // namespace causalloop
