#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <map>
#include <random>
#include <stdexcept>
#include <tuple>

#include "causalloop/causal.h"

namespace causalloop {
namespace {

int parity_except(int n, int m, uint64_t bits) {
    int p = 0;
    for (int k = 0; k < n; ++k)
        if (k != m) p ^= bits >> (n - 1 - k) & 1;
    return p;
}

TEST(CausalBound, Values) {
    EXPECT_EQ(causal_bound(2), Rational(3, 4));
    EXPECT_EQ(causal_bound(3), Rational(5, 6));
    EXPECT_EQ(causal_bound(10), Rational(19, 20));
    EXPECT_THROW(causal_bound(1), std::invalid_argument);
}

TEST(Forwarding, ReachesBound) {
    for (int n = 2; n <= 8; ++n) {
        CausalValue v = forwarding_strategy_success(n);
        EXPECT_EQ(v.value, causal_bound(n)) << n;
        EXPECT_EQ(v.per_m[0], Rational(1, 2));
        for (int m = 1; m < n; ++m) EXPECT_EQ(v.per_m[m], Rational(1));
    }
    CausalValue v = forwarding_strategy_success(3);
    EXPECT_EQ(v.witness.first, 0);
    EXPECT_EQ(v.witness.order(1, 0b000), (std::vector<int>{0, 2, 1}));
    EXPECT_EQ(v.witness.order(2, 0b101), (std::vector<int>{0, 1, 2}));
    EXPECT_THROW(forwarding_strategy_success(1), std::invalid_argument);
}

// Two parties, every explicit output function: the first party guesses from
// its own input, the second from both inputs.
TEST(BruteForce, TwoPartiesAgainstExplicitFunctions) {
    Rational best = 0;
    for (int first = 0; first < 2; ++first)
        for (int f = 0; f < 4; ++f)       // X_first(a_first)
            for (int g = 0; g < 16; ++g) {  // X_second(a_second, a_first)
                int wins = 0;
                for (int m = 0; m < 2; ++m)
                    for (uint64_t bits = 0; bits < 4; ++bits) {
                        int a_first = bits >> (1 - first) & 1, a_second = bits >> first & 1;
                        int x = m == first ? (f >> a_first & 1) : (g >> (a_second * 2 + a_first) & 1);
                        wins += x == parity_except(2, m, bits);
                    }
                best = std::max(best, Rational(wins, 8));
            }
    EXPECT_EQ(best, Rational(3, 4));
    EXPECT_EQ(brute_force_causal(2).value, Rational(3, 4));
}

// Three parties, written directly: F first, then a rule choosing the second
// party from (m, a_F); the guesser answers by majority per information set.
Rational three_party_oracle() {
    Rational best = 0;
    for (int first = 0; first < 3; ++first) {
        std::array<int, 2> others{};
        int k = 0;
        for (int p = 0; p < 3; ++p)
            if (p != first) others[k++] = p;
        for (int rule = 0; rule < 64; ++rule) {
            // (m, transcript) -> count of parity 0 / parity 1.
            std::map<std::tuple<int, int, std::vector<int>>, std::array<int, 2>> counts;
            for (int m = 0; m < 3; ++m)
                for (uint64_t bits = 0; bits < 8; ++bits) {
                    auto a = [&](int p) { return int(bits >> (2 - p) & 1); };
                    int second = others[rule >> (m * 2 + a(first)) & 1];
                    int third = 3 - first - second;
                    std::vector<int> seen;
                    for (int p : {first, second, third}) {
                        if (p == m) break;
                        seen.push_back(p);
                        seen.push_back(a(p));
                    }
                    counts[{m, a(m), seen}][parity_except(3, m, bits)]++;
                }
            int wins = 0;
            for (const auto &[key, c] : counts) wins += std::max(c[0], c[1]);
            best = std::max(best, Rational(wins, 24));
        }
    }
    return best;
}

TEST(BruteForce, ThreePartiesAgainstOracle) {
    CausalValue v = brute_force_causal(3);
    EXPECT_EQ(three_party_oracle(), Rational(5, 6));
    EXPECT_EQ(v.value, Rational(5, 6));
    EXPECT_EQ(v.value, causal_bound(3));
    std::vector<Rational> per = v.per_m;
    std::sort(per.begin(), per.end());
    EXPECT_EQ(per, (std::vector<Rational>{Rational(1, 2), 1, 1}));
    EXPECT_EQ(evaluate_protocol(v.witness).value, v.value);
    EXPECT_THROW(brute_force_causal(4), std::domain_error);
}

TEST(BruteForce, RandomProtocolsStayBelowBound) {
    std::mt19937_64 rng(17);
    for (int n = 3; n <= 5; ++n) {
        for (int trial = 0; trial < 200; ++trial) {
            CausalProtocol p{n, int(rng() % n), {}, {}};
            // Random order rule built lazily along every (m, a) path.
            for (int m = 0; m < n; ++m)
                for (uint64_t bits = 0; bits < (uint64_t{1} << n); ++bits) {
                    Transcript t{{p.first, int(bits >> (n - 1 - p.first) & 1)}};
                    std::vector<int> left;
                    for (int q = 0; q < n; ++q)
                        if (q != p.first) left.push_back(q);
                    while (left.size() > 1) {
                        auto [it, fresh] = p.order_rule.try_emplace({m, t}, left[rng() % left.size()]);
                        int next = it->second;
                        left.erase(std::find(left.begin(), left.end(), next));
                        t.emplace_back(next, int(bits >> (n - 1 - next) & 1));
                    }
                }
            // Random outputs on the information sets that occur.
            for (int m = 0; m < n; ++m)
                for (uint64_t bits = 0; bits < (uint64_t{1} << n); ++bits) {
                    InformationSet info{m, m, int(bits >> (n - 1 - m) & 1), {}};
                    for (int q : p.order(m, bits)) {
                        if (q == m) break;
                        info.transcript.emplace_back(q, int(bits >> (n - 1 - q) & 1));
                    }
                    p.outputs.try_emplace(info, int(rng() & 1));
                }
            EXPECT_LE(evaluate_protocol(p).value, causal_bound(n));
        }
    }
}

TEST(EvaluateProtocol, RejectsBrokenRules) {
    CausalProtocol missing{3, 0, {}, {}};
    EXPECT_THROW(evaluate_protocol(missing), std::invalid_argument);
    CausalProtocol repeat{3, 0, {}, {}};
    for (int m = 0; m < 3; ++m)
        for (int a = 0; a < 2; ++a) repeat.order_rule[{m, {{0, a}}}] = 0;
    EXPECT_THROW(evaluate_protocol(repeat), std::invalid_argument);
    CausalProtocol out_of_range{3, 5, {}, {}};
    EXPECT_THROW(evaluate_protocol(out_of_range), std::invalid_argument);
}

TEST(FixedOrder, HalfPlusOneOverTwoN) {
    for (int n = 2; n <= 5; ++n) {
        CausalValue v = best_fixed_order(n);
        EXPECT_EQ(v.value, Rational(1, 2) + Rational(1, 2 * n)) << n;
        if (n >= 3) EXPECT_LT(v.value, causal_bound(n));
    }
    EXPECT_THROW(best_fixed_order(7), std::domain_error);
}

TEST(Repeated, DecaysBelowOnePercent) {
    Rational prev = 1;
    for (int r = 1; r <= 26; ++r) {
        Rational v = repeated_success(3, r);
        EXPECT_LT(v, prev);
        prev = v;
    }
    EXPECT_EQ(repeated_success(3, 26), Rational(boost::multiprecision::pow(boost::multiprecision::cpp_int(5), 26),
                                                boost::multiprecision::pow(boost::multiprecision::cpp_int(6), 26)));
    EXPECT_LT(repeated_success(3, 26), Rational(1, 100));
    EXPECT_GT(repeated_success(3, 25), Rational(1, 100));
    EXPECT_THROW(repeated_success(3, 0), std::invalid_argument);
}

TEST(Report, Json) {
    nlohmann::json j = causal_report(brute_force_causal(3));
    EXPECT_EQ(j["n"], 3);
    EXPECT_EQ(j["model"], kCausalModel);
    EXPECT_EQ(j["value"]["num"], 5);
    EXPECT_EQ(j["value"]["den"], 6);
    EXPECT_EQ(j["bound"], j["value"]);
    EXPECT_TRUE(j["witness"].contains("order_rule"));
}

}  // namespace
}  // namespace causalloop
