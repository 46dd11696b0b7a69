#ifndef CAUSALLOOP_GAME_H
#define CAUSALLOOP_GAME_H

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "causalloop/diagop.h"
#include "causalloop/process.h"

namespace causalloop {

/// One round of the parity game: S_m must output the parity of everyone else's input.
struct GameRound {
    int n = 0;
    int m = 0;
    std::vector<int> a;

    /// XOR of a_i over i != m.
    int target() const;
};

/// A party's local operation P(X_i = x, O_i | I_i), one diagonal operator per
/// outcome x on the wires (O_i, I_i), output wire first.
class LocalBehavior {
   public:
    /// Throws std::invalid_argument unless the entries are non-negative and
    /// Σ_{x, o} P(x, o | i) = 1 for every input value i.
    LocalBehavior(int party, int output_width, int input_width, std::array<DiagOperator, 2> per_outcome);

    /// table[i] = (x, o): output o and outcome x on input i, with certainty.
    static LocalBehavior deterministic(int party, int output_width, int input_width,
                                       std::span<const std::pair<int, uint64_t>> table);

    int party() const { return party_; }
    int output_width() const { return output_width_; }
    int input_width() const { return input_width_; }
    const DiagOperator &op(int x) const { return per_outcome_.at(x); }

    Dyadic prob(int x, uint64_t o, uint64_t i) const { return probs_[(x << (output_width_ + input_width_)) | (o << input_width_) | i]; }
    /// P(O = o | I = i) with the outcome summed out.
    Dyadic output_prob(uint64_t o, uint64_t i) const { return prob(0, o, i) + prob(1, o, i); }

   private:
    int party_;
    int output_width_;
    int input_width_;
    std::array<DiagOperator, 2> per_outcome_;
    std::vector<Dyadic> probs_;
};

/// Which bit(s) of the two-bit channel S_{n-2} -> S_{n-1} carry the message (even n).
enum class WideCode { First, Second, Both, Ignore };

const char *wide_code_name(WideCode code);

/// Strategy: behavior of party i in round m given its input bit a_i.
using Strategy = std::function<LocalBehavior(int m, int party, int a)>;

/// The perfect strategy on build_w(n).
///
/// Party m+1 announces its input; every other party forwards its input XOR
/// its own bit and reports what it received as X. For even n the code used on
/// the two-bit channel is chosen per m among the candidates, keeping the
/// first one that delivers the parity with certainty on every loop of
/// loop_decomposition(n).
class WinningStrategy {
   public:
    explicit WinningStrategy(int n);

    int n() const { return n_; }
    /// Code for round m; WideCode::Ignore is also reported for odd n, which has no wide channel.
    WideCode code(int m) const { return codes_.at(m); }
    LocalBehavior behavior(int m, int party, int a) const;
    Strategy as_strategy() const;

    static LocalBehavior behavior_with_code(int n, int m, int party, int a, WideCode code);

   private:
    int n_;
    std::vector<WideCode> codes_;
};

/// Convenience wrapper around WinningStrategy(n).behavior(m, i, a_i).
LocalBehavior winning_behavior(int n, int m, int i, int a_i);

/// Joint distribution of (X_0, ..., X_{n-1}); X_0 is the most significant bit of the index.
struct OutcomeDistribution {
    int n = 0;
    std::vector<Dyadic> probs;

    Dyadic prob(std::span<const int> x) const;
    /// (P(X_party = 0), P(X_party = 1)).
    std::array<Dyadic, 2> marginal(int party) const;
    Dyadic total() const;
};

/// P(x) = Tr((⊗ Q_I ⊗ ⊗ Q_O) · W) for each outcome vector x, with each party's
/// operator rearranged to W's wire order. Throws std::invalid_argument if a
/// behavior does not match W's wires.
OutcomeDistribution outcome_distribution(const ProcessMatrix &w, std::span<const LocalBehavior> behaviors);

/// Same marginal for one party, evaluated on a loop mixture by running the
/// parties around each cycle rather than through W's terms.
std::array<Dyadic, 2> loop_marginal(std::span<const LoopChannel> loops, std::span<const LocalBehavior> behaviors,
                                    int party);

struct GameResult {
    int n = 0;
    std::vector<Dyadic> per_m;
    Rational p_succ;

    nlohmann::json to_json(bool as_float = false) const;
};

/// Exact success probability of the winning strategy on build_w(n).
GameResult success_probability_exact(int n);
GameResult success_probability_exact(const ProcessMatrix &w, const Strategy &strategy);
/// Same quantity through loop_marginal.
GameResult success_probability_loops(std::span<const LoopChannel> loops, int n, const Strategy &strategy);

struct SampleResult {
    int n = 0;
    uint64_t shots = 0;
    uint64_t seed = 0;
    uint64_t wins = 0;
    std::vector<uint64_t> rounds_per_m;
    std::vector<uint64_t> wins_per_m;
    int workers = 1;

    double estimate() const { return shots ? double(wins) / double(shots) : 0.0; }
    nlohmann::json to_json() const;
};

/// Name of the generator used by sample_game, recorded in its output.
inline constexpr const char *kSamplerRng = "mt19937_64";

/// Monte-Carlo play of the game on the loop mixture of build_w(n).
///
/// Each shot draws m and the inputs uniformly, draws one deterministic
/// function table per party from its behavior, then draws a consistent run of
/// the tables around one of the loops (each (loop, run) pair has the loop's
/// weight) and scores X_m. Shots are split across `workers` threads, worker k
/// seeded from (seed, k); the result depends only on (n, strategy, shots,
/// seed, workers).
SampleResult sample_game(int n, uint64_t shots, uint64_t seed, int workers = 4);
SampleResult sample_game(int n, const Strategy &strategy, uint64_t shots, uint64_t seed, int workers = 4);

nlohmann::json distribution_to_json(const GameRound &round, const OutcomeDistribution &dist, bool as_float = false);

}  // namespace causalloop

#endif
