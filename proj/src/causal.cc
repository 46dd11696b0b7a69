#include "causalloop/causal.h"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "causalloop/diagop_io.h"

namespace causalloop {

namespace {

int input_of(uint64_t a_bits, int n, int party) {
    return (a_bits >> (n - 1 - party)) & 1;
}

int parity_except(uint64_t a_bits, int n, int m) {
    return __builtin_popcountll(a_bits & ~(uint64_t{1} << (n - 1 - m))) & 1;
}

std::vector<int> remaining_after(int n, const Transcript &t) {
    std::vector<bool> used(n, false);
    for (const auto &[p, a] : t) {
        used[p] = true;
    }
    std::vector<int> out;
    for (int p = 0; p < n; p++) {
        if (!used[p]) {
            out.push_back(p);
        }
    }
    return out;
}

// Guesser's information set in round (m, a) under the protocol's order.
InformationSet guesser_view(const CausalProtocol &protocol, int m, uint64_t a_bits) {
    InformationSet info{m, m, input_of(a_bits, protocol.n, m), {}};
    for (int p : protocol.order(m, a_bits)) {
        if (p == m) {
            break;
        }
        info.transcript.emplace_back(p, input_of(a_bits, protocol.n, p));
    }
    return info;
}

// Fills protocol.outputs with the majority answer per guesser information set
// (ties -> 0) and returns the per-m success.
std::vector<Rational> optimize_outputs(CausalProtocol &protocol) {
    int n = protocol.n;
    std::map<InformationSet, std::array<int, 2>> counts;
    for (int m = 0; m < n; m++) {
        for (uint64_t a_bits = 0; a_bits < (uint64_t{1} << n); a_bits++) {
            counts[guesser_view(protocol, m, a_bits)][parity_except(a_bits, n, m)]++;
        }
    }
    std::vector<int> wins(n, 0);
    protocol.outputs.clear();
    for (const auto &[info, c] : counts) {
        int x = c[1] > c[0] ? 1 : 0;
        protocol.outputs[info] = x;
        wins[info.m] += c[x];
    }
    std::vector<Rational> per_m;
    for (int m = 0; m < n; m++) {
        per_m.emplace_back(wins[m], 1 << n);
    }
    return per_m;
}

Rational mean(const std::vector<Rational> &values) {
    Rational total = 0;
    for (const auto &v : values) {
        total += v;
    }
    return total / Rational((int)values.size());
}

void require_parties(int n) {
    if (n < 2) {
        throw std::invalid_argument("causal: need n >= 2 parties, got " + std::to_string(n));
    }
}

}  // namespace

std::vector<int> CausalProtocol::order(int m, uint64_t a_bits) const {
    std::vector<int> out{first};
    Transcript t{{first, input_of(a_bits, n, first)}};
    while ((int)out.size() < n) {
        std::vector<int> left = remaining_after(n, t);
        int next = left.front();
        if (left.size() > 1) {
            auto it = order_rule.find({m, t});
            if (it == order_rule.end()) {
                throw std::invalid_argument("causal: order rule has no entry for this transcript");
            }
            next = it->second;
            if (std::find(left.begin(), left.end(), next) == left.end()) {
                throw std::invalid_argument("causal: order rule activates party " + std::to_string(next) + " twice");
            }
        }
        out.push_back(next);
        t.emplace_back(next, input_of(a_bits, n, next));
    }
    return out;
}

Rational causal_bound(int n) {
    require_parties(n);
    return Rational(1) - Rational(1, 2 * n);
}

CausalValue evaluate_protocol(const CausalProtocol &protocol) {
    int n = protocol.n;
    require_parties(n);
    if (protocol.first < 0 || protocol.first >= n) {
        throw std::invalid_argument("causal: first party out of range");
    }
    CausalValue result{n, 0, {}, protocol};
    for (int m = 0; m < n; m++) {
        int wins = 0;
        for (uint64_t a_bits = 0; a_bits < (uint64_t{1} << n); a_bits++) {
            auto it = protocol.outputs.find(guesser_view(protocol, m, a_bits));
            int x = it == protocol.outputs.end() ? 0 : it->second;
            wins += x == parity_except(a_bits, n, m);
        }
        result.per_m.emplace_back(wins, 1 << n);
    }
    result.value = mean(result.per_m);
    return result;
}

CausalValue forwarding_strategy_success(int n) {
    require_parties(n);
    CausalProtocol protocol{n, 0, {}, {}};
    // The order never depends on inputs, so one rule per (m, transcript) prefix.
    for (int m = 0; m < n; m++) {
        std::vector<int> order{0};
        for (int p = 1; p < n; p++) {
            if (p != m) {
                order.push_back(p);
            }
        }
        if (m != 0) {
            order.push_back(m);
        }
        for (uint64_t a_bits = 0; a_bits < (uint64_t{1} << n); a_bits++) {
            Transcript t;
            for (int step = 0; step + 1 < n; step++) {
                t.emplace_back(order[step], input_of(a_bits, n, order[step]));
                if (n - 1 - step >= 2) {
                    protocol.order_rule[{m, t}] = order[step + 1];
                }
            }
        }
        for (uint64_t a_bits = 0; a_bits < (uint64_t{1} << n); a_bits++) {
            InformationSet info = guesser_view(protocol, m, a_bits);
            int parity = 0;
            for (const auto &[p, a] : info.transcript) {
                parity ^= a;
            }
            protocol.outputs[info] = parity;
        }
    }
    return evaluate_protocol(protocol);
}

CausalValue brute_force_causal(int n) {
    require_parties(n);
    if (n > 3) {
        throw std::domain_error("brute_force_causal: exhaustive enumeration is limited to n <= 3 (got n = " +
                                std::to_string(n) + "); the order-rule space grows doubly exponentially");
    }
    using Point = std::pair<int, Transcript>;
    bool have_best = false;
    CausalValue best;

    for (int first = 0; first < n; first++) {
        CausalProtocol protocol{n, first, {}, {}};
        std::vector<Point> initial;
        if (n >= 3) {
            for (int m = 0; m < n; m++) {
                for (int a = 0; a < 2; a++) {
                    initial.push_back({m, {{first, a}}});
                }
            }
        }
        std::function<void(std::vector<Point>)> enumerate = [&](std::vector<Point> pending) {
            if (pending.empty()) {
                CausalProtocol candidate = protocol;
                std::vector<Rational> per_m = optimize_outputs(candidate);
                Rational value = mean(per_m);
                if (!have_best || value > best.value) {
                    best = CausalValue{n, value, per_m, candidate};
                    have_best = true;
                }
                return;
            }
            Point point = pending.back();
            pending.pop_back();
            std::vector<int> left = remaining_after(n, point.second);
            for (int next : left) {
                protocol.order_rule[point] = next;
                std::vector<Point> more = pending;
                if (left.size() - 1 >= 2) {
                    for (int a = 0; a < 2; a++) {
                        Transcript t = point.second;
                        t.emplace_back(next, a);
                        more.push_back({point.first, t});
                    }
                }
                enumerate(more);
            }
            protocol.order_rule.erase(point);
        };
        enumerate(initial);
    }
    return best;
}

CausalValue best_fixed_order(int n) {
    require_parties(n);
    if (n > 6) {
        throw std::domain_error("best_fixed_order: limited to n <= 6");
    }
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    bool have_best = false;
    CausalValue best;
    do {
        CausalProtocol protocol{n, perm[0], {}, {}};
        for (int m = 0; m < n; m++) {
            for (uint64_t a_bits = 0; a_bits < (uint64_t{1} << n); a_bits++) {
                Transcript t;
                for (int step = 0; step + 2 < n; step++) {
                    t.emplace_back(perm[step], input_of(a_bits, n, perm[step]));
                    protocol.order_rule[{m, t}] = perm[step + 1];
                }
            }
        }
        std::vector<Rational> per_m = optimize_outputs(protocol);
        Rational value = mean(per_m);
        if (!have_best || value > best.value) {
            best = CausalValue{n, value, per_m, protocol};
            have_best = true;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

Rational repeated_success(int n, int r) {
    if (r < 1) {
        throw std::invalid_argument("repeated_success: r must be >= 1");
    }
    Rational base = causal_bound(n);
    Rational out = 1;
    for (int k = 0; k < r; k++) {
        out *= base;
    }
    return out;
}

nlohmann::json CausalValue::to_json() const {
    nlohmann::json per = nlohmann::json::array();
    for (const auto &p : per_m) {
        per.push_back(rational_to_json(p));
    }
    nlohmann::json rule = nlohmann::json::array();
    for (const auto &[point, next] : witness.order_rule) {
        nlohmann::json t = nlohmann::json::array();
        for (const auto &[p, a] : point.second) {
            t.push_back({p, a});
        }
        rule.push_back({{"m", point.first}, {"transcript", t}, {"next", next}});
    }
    return {{"first", witness.first}, {"per_m", per}, {"order_rule", rule}};
}

nlohmann::json causal_report(const CausalValue &value) {
    return {{"n", value.n},
            {"model", kCausalModel},
            {"value", rational_to_json(value.value)},
            {"bound", rational_to_json(causal_bound(value.n))},
            {"witness", value.to_json()}};
}

}  // namespace causalloop
