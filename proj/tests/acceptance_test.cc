// Acceptance criteria, one PASS/FAIL line each. Exit status is non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "causalloop/causal.h"
#include "causalloop/diagop.h"
#include "causalloop/game.h"
#include "causalloop/process.h"
#include "test_support.h"

namespace causalloop {
namespace {

using testing::from_pauli_strings;

// Time limits per criterion, in seconds.
constexpr double kLimitW3 = 1;
constexpr double kLimitW4 = 1;
constexpr double kLimitWinning = 30;
constexpr double kLimitCausal = 60;
constexpr double kLimitNaive = 10;
constexpr double kLimitOracle = 60;
constexpr double kLimitProperties = 60;

// Largest allowed |estimate - exact| for the sampler.
constexpr double kSamplerTolerance = 0.01;
constexpr uint64_t kSamplerShots = 100000;
constexpr uint64_t kSamplerSeed = 20150101;

struct Check {
    bool ok = true;
    std::string why;

    void expect(bool cond, const std::string &what) {
        if (!cond && ok) {
            ok = false;
            why = what;
        }
    }
};

uint64_t flip(uint64_t v) { return v ^ 1; }

Check w3_literal() {
    Check c;
    ProcessMatrix w = build_w(3);
    DiagOperator lit = from_pauli_strings(w.layout(), {"III III", "IZZ ZZI", "ZIZ IZZ", "ZZI ZIZ"}, Dyadic(1, 3));
    c.expect(w.op() == lit, "W_3 differs from its 4-term expansion");
    c.expect(w.normalization() == Dyadic(1, 3), "prefactor is not 1/8");
    for (uint64_t o = 0; o < 8; ++o) {
        uint64_t o0 = o >> 2 & 1, o1 = o >> 1 & 1, o2 = o & 1;
        std::vector<uint64_t> outs{o0, o1, o2};
        InputDistribution expected{{{o2, o0, o1}, Dyadic(1, 1)}, {{flip(o2), flip(o0), flip(o1)}, Dyadic(1, 1)}};
        c.expect(conditional_distribution(w, outs) == expected, "case table differs at o=" + std::to_string(o));
    }
    return c;
}

Check w4_literal() {
    Check c;
    ProcessMatrix w = build_w(4);
    DiagOperator lit = from_pauli_strings(w.layout(),
                                          {
                                              "I I I I I I I I I I",
                                              "I Z Z I Z Z Z I Z I",
                                              "Z I Z Z I I Z Z I Z",
                                              "Z Z I Z Z Z I Z Z Z",
                                              "Z Z Z I I Z Z I I Z",
                                              "Z I I I Z I I I Z Z",
                                              "I Z I Z I Z I Z I I",
                                              "I I Z Z Z I Z Z Z I",
                                          },
                                          Dyadic(1, 5));
    c.expect(w.op() == lit, "W_4 differs from its 8-term expansion");
    c.expect(w.normalization() == Dyadic(1, 5), "prefactor is not 1/32");
    for (uint64_t p = 0; p < 32; ++p) {
        uint64_t o0 = p >> 4 & 1, o1 = p >> 3 & 1, o21 = p >> 2 & 1, o22 = p >> 1 & 1, o3 = p & 1;
        std::vector<uint64_t> outs{o0, o1, o21 << 1 | o22, o3};
        auto two = [](uint64_t hi, uint64_t lo) { return hi << 1 | lo; };
        Dyadic q(1, 2);
        InputDistribution expected{
            {{o3, o0, o1, two(o21, o22)}, q},
            {{flip(o3), o0, flip(o1), two(o21, flip(o22))}, q},
            {{o3, flip(o0), flip(o1), two(flip(o21), o22)}, q},
            {{flip(o3), flip(o0), o1, two(flip(o21), flip(o22))}, q},
        };
        c.expect(conditional_distribution(w, outs) == expected, "case table differs at o=" + std::to_string(p));
    }
    return c;
}

Check winning() {
    Check c;
    for (int n = 3; n <= 8; ++n)
        c.expect(success_probability_exact(n).p_succ == Rational(1), "p_succ != 1 at n=" + std::to_string(n));
    for (int n : {3, 4}) {
        ProcessMatrix w = build_w(n);
        WinningStrategy s(n);
        for (int m = 0; m < n; ++m)
            for (uint64_t bits = 0; bits < (uint64_t{1} << n); ++bits) {
                std::vector<LocalBehavior> bs;
                int sum = 0;
                for (int k = 0; k < n; ++k) {
                    int a = bits >> (n - 1 - k) & 1;
                    bs.push_back(s.behavior(m, k, a));
                    if (k != m) sum += a;
                }
                auto marg = outcome_distribution(w, bs).marginal(m);
                for (int x = 0; x < 2; ++x) {
                    // ½(1 + (-1)^(x + Σ a_i)).
                    Dyadic closed = (x + sum) % 2 ? Dyadic(0) : Dyadic(1);
                    c.expect(marg[x] == closed, "marginal differs at n=" + std::to_string(n) + " m=" +
                                                    std::to_string(m) + " a=" + std::to_string(bits));
                }
            }
    }
    return c;
}

Check causal_gap() {
    Check c;
    c.expect(brute_force_causal(2).value == Rational(3, 4), "brute force n=2 != 3/4");
    c.expect(brute_force_causal(3).value == Rational(5, 6), "brute force n=3 != 5/6");
    c.expect(causal_bound(2) == Rational(3, 4) && causal_bound(3) == Rational(5, 6), "bound formula");
    for (int n = 3; n <= 8; ++n)
        c.expect(forwarding_strategy_success(n).value == causal_bound(n),
                 "forwarding != bound at n=" + std::to_string(n));
    return c;
}

Check naive_even() {
    Check c;
    ValidationReport bad = validate_process(naive_even_w(4));
    c.expect(!bad.term_structure, "naive W_4 passes term structure");
    c.expect(bad.bilinear_norm.failed >= 1, "naive W_4 passes bilinear normalization");
    ValidationReport good = validate_process(build_w(4).op());
    c.expect(good.passed(), "W_4 fails validation");
    return c;
}

Check oracle_equivalence() {
    Check c;
    for (int n = 3; n <= 8; ++n) {
        ProcessMatrix w = build_w(n);
        auto loops = loop_decomposition(n);
        c.expect(loop_operator(w.layout(), loops) == w.op(), "loop operator != W at n=" + std::to_string(n));
        SampleResult r = sample_game(n, kSamplerShots, kSamplerSeed);
        c.expect(r.wins == r.shots, "sampler lost a round at n=" + std::to_string(n));
        c.expect(std::abs(r.estimate() - 1.0) <= kSamplerTolerance, "sampler off at n=" + std::to_string(n));
    }
    return c;
}

std::vector<uint64_t> closure(std::vector<uint64_t> gens) {
    std::set<uint64_t> g{0};
    for (uint64_t e : gens) {
        std::set<uint64_t> next = g;
        for (uint64_t x : g) next.insert(x ^ e);
        g = std::move(next);
    }
    return {g.begin(), g.end()};
}

bool group_lemma_holds(int wires, const std::vector<uint64_t> &group) {
    WireLayout l = WireLayout::qubits(wires);
    std::vector<ZMonomial> ms;
    DiagOperator::Terms t;
    for (uint64_t m : group) {
        ms.push_back({l, m});
        t[m] = 1;
    }
    GroupCheck gc = abelian_psd_check(ms);
    if (!gc.is_group || !gc.sum_nonneg) return false;
    DiagOperator sum = DiagOperator::from_terms(l, t).to_dense();
    return std::all_of(sum.entries().begin(), sum.entries().end(),
                       [&](const Dyadic &e) { return e == Dyadic(0) || e == Dyadic(int64_t(group.size())); });
}

Check properties() {
    Check c;
    std::mt19937_64 rng(7);
    for (int k = 0; k < 500; ++k) {
        WireLayout l = testing::random_layout(rng, 12);
        DiagOperator d = testing::random_dense(rng, l);
        c.expect(d.to_monomials().to_dense().entries() == d.entries(), "dense/monomial roundtrip");
    }

    // Every subgroup of the even-weight masks for up to five wires.
    for (int wires = 1; wires <= 5; ++wires) {
        std::vector<uint64_t> even;
        for (uint64_t m = 1; m < (uint64_t{1} << wires); ++m)
            if (__builtin_popcountll(m) % 2 == 0) even.push_back(m);
        std::set<std::vector<uint64_t>> groups{{0}};
        std::vector<std::vector<uint64_t>> frontier{{0}};
        while (!frontier.empty()) {
            std::vector<std::vector<uint64_t>> next;
            for (const auto &g : frontier)
                for (uint64_t e : even) {
                    if (std::binary_search(g.begin(), g.end(), e)) continue;
                    std::vector<uint64_t> gens = g;
                    gens.push_back(e);
                    auto h = closure(gens);
                    if (groups.insert(h).second) next.push_back(h);
                }
            frontier = std::move(next);
        }
        for (const auto &g : groups) c.expect(group_lemma_holds(wires, g), "group lemma at " + std::to_string(wires));
    }
    for (int k = 0; k < 200; ++k) {
        std::vector<uint64_t> gens;
        int count = int(rng() % 6);
        while (int(gens.size()) < count) {
            uint64_t m = rng() & 63;
            if (__builtin_popcountll(m) % 2 == 0) gens.push_back(m);
        }
        c.expect(group_lemma_holds(6, closure(gens)), "group lemma on a random subgroup of 6 wires");
    }

    for (int n = 3; n <= 8; ++n) {
        ProcessMatrix w = build_w(n);
        std::vector<std::string> inputs;
        for (int k = 0; k < n; ++k) inputs.push_back(io_wire_name(WireKind::Input, k));
        DiagOperator r = partial_trace(w.op(), inputs);
        c.expect(r == DiagOperator::identity(r.layout()), "Tr_I W != 1_O at n=" + std::to_string(n));
    }

    c.expect(repeated_success(3, 26) < Rational(1, 100), "(5/6)^26 >= 0.01");
    for (int r = 1; r < 26; ++r)
        c.expect(repeated_success(3, r + 1) < repeated_success(3, r), "repeated success not decreasing");
    return c;
}

struct Criterion {
    const char *id;
    const char *name;
    double limit;
    std::function<Check()> run;
};

}  // namespace
}  // namespace causalloop

int main() {
    using namespace causalloop;
    const Criterion criteria[] = {
        {"AC1", "W_3 expansion and case table", kLimitW3, w3_literal},
        {"AC2", "W_4 expansion and case table", kLimitW4, w4_literal},
        {"AC3", "certain winning for n = 3..8", kLimitWinning, winning},
        {"AC4", "causal bound and brute force", kLimitCausal, causal_gap},
        {"AC5", "naive even construction rejected", kLimitNaive, naive_even},
        {"AC6", "loop oracle and sampler", kLimitOracle, oracle_equivalence},
        {"AC7", "property suites", kLimitProperties, properties},
    };
    int failed = 0;
    for (const auto &cr : criteria) {
        auto start = std::chrono::steady_clock::now();
        Check c;
        try {
            c = cr.run();
        } catch (const std::exception &e) {
            c.ok = false;
            c.why = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.ok && secs > cr.limit) {
            c.ok = false;
            c.why = "took " + std::to_string(secs) + " s, limit " + std::to_string(cr.limit) + " s";
        }
        failed += !c.ok;
        std::printf("[%s] %s %s (%.3f s)%s%s\n", c.ok ? "PASS" : "FAIL", cr.id, cr.name, secs, c.ok ? "" : ": ",
                    c.why.c_str());
    }
    std::printf("%d/%zu criteria passed\n", int(std::size(criteria)) - failed, std::size(criteria));
    return failed ? 1 : 0;
}
