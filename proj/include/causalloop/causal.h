#ifndef CAUSALLOOP_CAUSAL_H
#define CAUSALLOOP_CAUSAL_H

#include <compare>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "causalloop/dyadic.h"

namespace causalloop {

/// Model name recorded in every causal report.
inline constexpr const char *kCausalModel = "adaptive-order full-forwarding";

/// (party, input bit) pairs in activation order.
using Transcript = std::vector<std::pair<int, int>>;

/// What a party knows when it acts: M, its own input and everything forwarded so far.
struct InformationSet {
    int m = 0;
    int party = 0;
    int own_input = 0;
    Transcript transcript;

    auto operator<=>(const InformationSet &) const = default;
};

/// A deterministic protocol with a predefined causal order.
///
/// `first` acts first for every value of M. Each later party is chosen from
/// (m, transcript so far); every activated party appends its input to the
/// transcript. Only the guesser's output is scored, so `outputs` maps the
/// guesser's information sets to X_m; missing entries output 0.
struct CausalProtocol {
    int n = 0;
    int first = 0;
    /// (m, transcript) -> next party, for every point with at least two parties left.
    std::map<std::pair<int, Transcript>, int> order_rule;
    std::map<InformationSet, int> outputs;

    /// Activation order for round m and inputs a (a_0 is the most significant bit).
    std::vector<int> order(int m, uint64_t a_bits) const;
};

struct CausalValue {
    int n = 0;
    Rational value;
    std::vector<Rational> per_m;
    CausalProtocol witness;

    nlohmann::json to_json() const;
};

/// 1 - 1/(2n). Throws std::invalid_argument for n < 2.
Rational causal_bound(int n);

/// Exact success probability of a protocol, per m and averaged.
/// Throws std::invalid_argument if the order rule is incomplete or names a party twice.
CausalValue evaluate_protocol(const CausalProtocol &protocol);

/// S_0 first; for m != 0 the others are activated in increasing order with S_m
/// last; every party outputs the parity of the forwarded inputs. Valid for n >= 2.
CausalValue forwarding_strategy_success(int n);

/// Maximum over all deterministic protocols of the model, n in {2, 3}.
/// Throws std::domain_error for larger n.
CausalValue brute_force_causal(int n);

/// Maximum over protocols whose order is one fixed permutation, n in 2..6.
CausalValue best_fixed_order(int n);

/// (1 - 1/(2n))^r: winning r independent rounds under the causal bound.
Rational repeated_success(int n, int r);

/// {"n", "model", "value", "bound", "witness"} report.
nlohmann::json causal_report(const CausalValue &value);

}  // namespace causalloop

#endif
