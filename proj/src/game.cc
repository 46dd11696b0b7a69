#include "causalloop/game.h"

#include <random>
#include <stdexcept>
#include <thread>

#include "causalloop/diagop_io.h"

namespace causalloop {

namespace {

WireLayout behavior_layout(int party, int output_width, int input_width) {
    return WireLayout({{io_wire_name(WireKind::Output, party), party, WireKind::Output, output_width},
                       {io_wire_name(WireKind::Input, party), party, WireKind::Input, input_width}});
}

WireLayout single_wire(int party, WireKind kind, int width) {
    return WireLayout({{io_wire_name(kind, party), party, kind, width}});
}

// (1 + (-1)^value σ_z) / 2 on a one-bit wire: the point mass at `value`.
DiagOperator projector(const WireLayout &wire, int value) {
    return DiagOperator::from_terms(wire, {{0, Dyadic(1, 1)}, {1, Dyadic(value ? -1 : 1, 1)}});
}

// (1⊗1 + (-1)^value Z_code) / 2^scale on a two-bit wire.
DiagOperator two_bit_operator(const WireLayout &wire, WideCode code, int value, int log2den) {
    DiagOperator::Terms terms{{0, Dyadic(1, log2den)}};
    uint64_t mask = 0;
    switch (code) {
        case WideCode::First:
            mask = 0b10;
            break;
        case WideCode::Second:
            mask = 0b01;
            break;
        case WideCode::Both:
            mask = 0b11;
            break;
        case WideCode::Ignore:
            break;
    }
    if (mask) {
        terms[mask] = Dyadic(value ? -1 : 1, log2den);
    }
    return DiagOperator::from_terms(wire, std::move(terms));
}

void require_game_indices(int n, int m, int party, int a) {
    if (n == 2) {
        throw std::domain_error("game: n = 2 is unsupported (no valid W_2 construction)");
    }
    if (n < 3 || m < 0 || m >= n || party < 0 || party >= n || (a != 0 && a != 1)) {
        throw std::invalid_argument("game: invalid indices n=" + std::to_string(n) + " m=" + std::to_string(m) +
                                    " party=" + std::to_string(party) + " a=" + std::to_string(a));
    }
}

std::vector<LocalBehavior> round_behaviors(const Strategy &strategy, int n, int m, uint64_t a_bits) {
    std::vector<LocalBehavior> out;
    out.reserve(n);
    for (int k = 0; k < n; k++) {
        out.push_back(strategy(m, k, (a_bits >> (n - 1 - k)) & 1));
    }
    return out;
}

int parity_except(uint64_t a_bits, int n, int m) {
    uint64_t others = a_bits & ~(uint64_t{1} << (n - 1 - m));
    return __builtin_popcountll(others) & 1;
}

Rational average_over_m(const std::vector<Dyadic> &per_m) {
    Rational total = 0;
    for (const auto &p : per_m) {
        total += p.to_rational();
    }
    return total / Rational((int)per_m.size());
}

// Draws an index with probability weights[k]; the weights must sum to 1.
template <typename Rng>
size_t draw(Rng &rng, std::span<const Dyadic> weights) {
    int q = 0;
    for (const auto &w : weights) {
        q = std::max(q, w.log2den());
    }
    if (q > 62) {
        throw std::overflow_error("sample_game: weight denominators too large to sample exactly");
    }
    uint64_t r = q == 0 ? 0 : rng() >> (64 - q);
    uint64_t cumulative = 0;
    for (size_t k = 0; k < weights.size(); k++) {
        cumulative += static_cast<uint64_t>(weights[k].num()) << (q - weights[k].log2den());
        if (r < cumulative) {
            return k;
        }
    }
    throw std::logic_error("sample_game: weights do not sum to 1");
}

struct TableEntry {
    int x;
    uint64_t o;
};

struct ShotTally {
    uint64_t wins = 0;
    std::vector<uint64_t> rounds_per_m;
    std::vector<uint64_t> wins_per_m;
};

}  // namespace

int GameRound::target() const {
    int parity = 0;
    for (int i = 0; i < n; i++) {
        if (i != m) {
            parity ^= a.at(i);
        }
    }
    return parity;
}

LocalBehavior::LocalBehavior(int party, int output_width, int input_width, std::array<DiagOperator, 2> per_outcome)
    : party_(party), output_width_(output_width), input_width_(input_width), per_outcome_(std::move(per_outcome)) {
    WireLayout expected = behavior_layout(party, output_width, input_width);
    for (const auto &op : per_outcome_) {
        if (!(op.layout() == expected)) {
            throw std::invalid_argument("LocalBehavior: operator layout " + op.layout().str() + ", expected " +
                                        expected.str());
        }
    }
    for (int x = 0; x < 2; x++) {
        DiagOperator dense = per_outcome_[x].to_dense();
        probs_.insert(probs_.end(), dense.entries().begin(), dense.entries().end());
    }
    for (uint64_t i = 0; i < (uint64_t{1} << input_width_); i++) {
        Dyadic total;
        for (int x = 0; x < 2; x++) {
            for (uint64_t o = 0; o < (uint64_t{1} << output_width_); o++) {
                if (prob(x, o, i).sign() < 0) {
                    throw std::invalid_argument("LocalBehavior: negative probability");
                }
                total += prob(x, o, i);
            }
        }
        if (total != Dyadic(1)) {
            throw std::invalid_argument("LocalBehavior: probabilities for input " + std::to_string(i) +
                                        " sum to " + total.str());
        }
    }
}

LocalBehavior LocalBehavior::deterministic(int party, int output_width, int input_width,
                                           std::span<const std::pair<int, uint64_t>> table) {
    if (table.size() != (size_t{1} << input_width)) {
        throw std::invalid_argument("LocalBehavior: function table needs one row per input value");
    }
    WireLayout layout = behavior_layout(party, output_width, input_width);
    std::array<std::vector<Dyadic>, 2> dense;
    for (auto &d : dense) {
        d.assign(size_t{1} << layout.width(), Dyadic(0));
    }
    for (uint64_t i = 0; i < table.size(); i++) {
        auto [x, o] = table[i];
        if ((x != 0 && x != 1) || (o >> output_width)) {
            throw std::invalid_argument("LocalBehavior: function table value out of range");
        }
        dense[x][(o << input_width) | i] = 1;
    }
    return LocalBehavior(party, output_width, input_width,
                         {DiagOperator::from_dense(layout, std::move(dense[0])),
                          DiagOperator::from_dense(layout, std::move(dense[1]))});
}

const char *wide_code_name(WideCode code) {
    switch (code) {
        case WideCode::First:
            return "first";
        case WideCode::Second:
            return "second";
        case WideCode::Both:
            return "both";
        case WideCode::Ignore:
            break;
    }
    return "ignore";
}

LocalBehavior WinningStrategy::behavior_with_code(int n, int m, int party, int a, WideCode code) {
    require_game_indices(n, m, party, a);
    bool announcer = party == (m + 1) % n;
    bool even = n % 2 == 0;
    int out_w = even && party == n - 2 ? 2 : 1;
    int in_w = even && party == n - 1 ? 2 : 1;
    WireLayout out_wire = single_wire(party, WireKind::Output, out_w);
    WireLayout in_wire = single_wire(party, WireKind::Input, in_w);

    std::array<DiagOperator, 2> ops;
    for (int x = 0; x < 2; x++) {
        int sent = announcer ? a : a ^ x;
        DiagOperator q_out = out_w == 2 ? two_bit_operator(out_wire, code, sent, 2) : projector(out_wire, sent);
        DiagOperator q_in = in_w == 2 ? two_bit_operator(in_wire, code, x, 1) : projector(in_wire, x);
        ops[x] = tensor(q_out, q_in);
    }
    return LocalBehavior(party, out_w, in_w, std::move(ops));
}

WinningStrategy::WinningStrategy(int n) : n_(n) {
    require_game_indices(n, 0, 0, 0);
    codes_.assign(n, WideCode::Ignore);
    if (n % 2 == 1) {
        return;
    }
    std::vector<LoopChannel> loops = loop_decomposition(n);
    for (int m = 0; m < n; m++) {
        std::vector<WideCode> candidates = m == n - 2 ? std::vector<WideCode>{WideCode::Ignore}
                                                      : std::vector<WideCode>{WideCode::First, WideCode::Second,
                                                                              WideCode::Both};
        bool found = false;
        for (WideCode code : candidates) {
            Strategy s = [n, code](int mm, int party, int a) { return behavior_with_code(n, mm, party, a, code); };
            bool certain = true;
            for (uint64_t a_bits = 0; certain && a_bits < (uint64_t{1} << n); a_bits++) {
                auto behaviors = round_behaviors(s, n, m, a_bits);
                certain = loop_marginal(loops, behaviors, m)[parity_except(a_bits, n, m)] == Dyadic(1);
            }
            if (certain) {
                codes_[m] = code;
                found = true;
                break;
            }
        }
        if (!found) {
            throw std::logic_error("WinningStrategy: no code delivers the parity for m = " + std::to_string(m));
        }
    }
}

LocalBehavior WinningStrategy::behavior(int m, int party, int a) const {
    require_game_indices(n_, m, party, a);
    return behavior_with_code(n_, m, party, a, codes_[m]);
}

Strategy WinningStrategy::as_strategy() const {
    return [self = *this](int m, int party, int a) { return self.behavior(m, party, a); };
}

LocalBehavior winning_behavior(int n, int m, int i, int a_i) {
    require_game_indices(n, m, i, a_i);
    return WinningStrategy(n).behavior(m, i, a_i);
}

Dyadic OutcomeDistribution::prob(std::span<const int> x) const {
    uint64_t index = 0;
    for (int bit : x) {
        index = (index << 1) | (bit & 1);
    }
    return probs.at(index);
}

std::array<Dyadic, 2> OutcomeDistribution::marginal(int party) const {
    std::array<Dyadic, 2> out;
    for (uint64_t index = 0; index < probs.size(); index++) {
        out[(index >> (n - 1 - party)) & 1] += probs[index];
    }
    return out;
}

Dyadic OutcomeDistribution::total() const {
    Dyadic t;
    for (const auto &p : probs) {
        t += p;
    }
    return t;
}

OutcomeDistribution outcome_distribution(const ProcessMatrix &w, std::span<const LocalBehavior> behaviors) {
    int n = w.n();
    if ((int)behaviors.size() != n) {
        throw std::invalid_argument("outcome_distribution: need one behavior per party");
    }
    for (int k = 0; k < n; k++) {
        const auto &b = behaviors[k];
        if (b.party() != k || b.output_width() != w.output_width(k) || b.input_width() != w.input_width(k)) {
            throw std::invalid_argument("outcome_distribution: behavior " + std::to_string(k) +
                                        " does not match the process wires");
        }
    }
    OutcomeDistribution dist{n, std::vector<Dyadic>(size_t{1} << n)};
    std::vector<uint64_t> ins(n), outs(n);

    // Depth-first over parties, branching only on outcomes with non-zero weight.
    std::function<void(int, uint64_t, Dyadic)> expand = [&](int k, uint64_t x_index, Dyadic weight) {
        if (k == n) {
            dist.probs[x_index] += weight;
            return;
        }
        for (int x = 0; x < 2; x++) {
            Dyadic p = behaviors[k].prob(x, outs[k], ins[k]);
            if (!p.is_zero()) {
                expand(k + 1, (x_index << 1) | x, weight * p);
            }
        }
    };
    for (const auto &point : w.support()) {
        for (int k = 0; k < n; k++) {
            ins[k] = w.input_value(k, point.index);
            outs[k] = w.output_value(k, point.index);
        }
        expand(0, 0, point.weight);
    }
    return dist;
}

std::array<Dyadic, 2> loop_marginal(std::span<const LoopChannel> loops, std::span<const LocalBehavior> behaviors,
                                    int party) {
    int n = (int)behaviors.size();
    std::array<Dyadic, 2> out;
    for (const auto &loop : loops) {
        if ((int)loop.edges.size() != n) {
            throw std::invalid_argument("loop_marginal: loop does not match the party count");
        }
        for (int x = 0; x < 2; x++) {
            Dyadic total;
            const auto &closing = loop.edges[n - 1];
            // Fix the last party's output, which fixes I_0, then run around the cycle.
            for (uint64_t last_out = 0; last_out < (uint64_t{1} << closing.width); last_out++) {
                std::function<void(int, uint64_t, Dyadic)> run = [&](int k, uint64_t in, Dyadic weight) {
                    const auto &b = behaviors[k];
                    for (uint64_t o = 0; o < (uint64_t{1} << b.output_width()); o++) {
                        if (k == n - 1 && o != last_out) {
                            continue;
                        }
                        Dyadic p = k == party ? b.prob(x, o, in) : b.output_prob(o, in);
                        if (p.is_zero()) {
                            continue;
                        }
                        if (k == n - 1) {
                            total += weight * p;
                        } else {
                            run(k + 1, o ^ loop.edges[k].flip, weight * p);
                        }
                    }
                };
                run(0, last_out ^ closing.flip, Dyadic(1));
            }
            out[x] += loop.weight * total;
        }
    }
    return out;
}

nlohmann::json GameResult::to_json(bool as_float) const {
    nlohmann::json per = nlohmann::json::array();
    for (const auto &p : per_m) {
        per.push_back(as_float ? nlohmann::json(p.to_double()) : dyadic_to_json(p));
    }
    nlohmann::json succ = as_float ? nlohmann::json(p_succ.convert_to<double>()) : rational_to_json(p_succ);
    return {{"n", n}, {"per_m", per}, {"p_succ", succ}};
}

GameResult success_probability_exact(int n) {
    return success_probability_exact(build_w(n), WinningStrategy(n).as_strategy());
}

GameResult success_probability_exact(const ProcessMatrix &w, const Strategy &strategy) {
    int n = w.n();
    GameResult result{n, {}, 0};
    for (int m = 0; m < n; m++) {
        Dyadic win;
        for (uint64_t a_bits = 0; a_bits < (uint64_t{1} << n); a_bits++) {
            auto behaviors = round_behaviors(strategy, n, m, a_bits);
            win += outcome_distribution(w, behaviors).marginal(m)[parity_except(a_bits, n, m)];
        }
        result.per_m.push_back(win.scaled_by_power_of_two(-n));
    }
    result.p_succ = average_over_m(result.per_m);
    return result;
}

GameResult success_probability_loops(std::span<const LoopChannel> loops, int n, const Strategy &strategy) {
    GameResult result{n, {}, 0};
    for (int m = 0; m < n; m++) {
        Dyadic win;
        for (uint64_t a_bits = 0; a_bits < (uint64_t{1} << n); a_bits++) {
            auto behaviors = round_behaviors(strategy, n, m, a_bits);
            win += loop_marginal(loops, behaviors, m)[parity_except(a_bits, n, m)];
        }
        result.per_m.push_back(win.scaled_by_power_of_two(-n));
    }
    result.p_succ = average_over_m(result.per_m);
    return result;
}

nlohmann::json SampleResult::to_json() const {
    return {{"n", n},
            {"shots", shots},
            {"seed", seed},
            {"wins", wins},
            {"estimate", estimate()},
            {"rounds_per_m", rounds_per_m},
            {"wins_per_m", wins_per_m},
            {"rng", kSamplerRng},
            {"workers", workers}};
}

SampleResult sample_game(int n, uint64_t shots, uint64_t seed, int workers) {
    return sample_game(n, WinningStrategy(n).as_strategy(), shots, seed, workers);
}

SampleResult sample_game(int n, const Strategy &strategy, uint64_t shots, uint64_t seed, int workers) {
    if (shots < 1) {
        throw std::invalid_argument("sample_game: shots must be >= 1");
    }
    if (workers < 1) {
        throw std::invalid_argument("sample_game: workers must be >= 1");
    }
    std::vector<LoopChannel> loops = loop_decomposition(n);
    std::vector<Dyadic> loop_weights;
    for (const auto &l : loops) {
        loop_weights.push_back(l.weight);
    }

    // behaviors[(m * n + k) * 2 + a]
    std::vector<LocalBehavior> behaviors;
    for (int m = 0; m < n; m++) {
        for (int k = 0; k < n; k++) {
            for (int a = 0; a < 2; a++) {
                behaviors.push_back(strategy(m, k, a));
            }
        }
    }
    // Joint (x, o) distribution per behavior and input value.
    struct Row {
        std::vector<TableEntry> outcomes;
        std::vector<Dyadic> weights;
    };
    std::vector<std::vector<Row>> rows(behaviors.size());
    for (size_t b = 0; b < behaviors.size(); b++) {
        const auto &beh = behaviors[b];
        for (uint64_t i = 0; i < (uint64_t{1} << beh.input_width()); i++) {
            Row row;
            for (int x = 0; x < 2; x++) {
                for (uint64_t o = 0; o < (uint64_t{1} << beh.output_width()); o++) {
                    Dyadic p = beh.prob(x, o, i);
                    if (!p.is_zero()) {
                        row.outcomes.push_back({x, o});
                        row.weights.push_back(p);
                    }
                }
            }
            rows[b].push_back(std::move(row));
        }
    }

    auto run_worker = [&](int worker, uint64_t count, ShotTally &tally) {
        std::seed_seq seq{uint32_t(seed), uint32_t(seed >> 32), uint32_t(worker)};
        std::mt19937_64 rng(seq);
        std::uniform_int_distribution<int> pick_m(0, n - 1);
        tally.rounds_per_m.assign(n, 0);
        tally.wins_per_m.assign(n, 0);
        std::vector<std::vector<TableEntry>> tables(n);
        std::vector<int> candidate_x;
        std::vector<Dyadic> candidate_w;
        for (uint64_t s = 0; s < count; s++) {
            int m = pick_m(rng);
            uint64_t a_bits = rng() >> (64 - n);
            for (int k = 0; k < n; k++) {
                int a = (a_bits >> (n - 1 - k)) & 1;
                const auto &party_rows = rows[(size_t(m) * n + k) * 2 + a];
                tables[k].clear();
                for (const auto &row : party_rows) {
                    tables[k].push_back(row.outcomes[draw(rng, row.weights)]);
                }
            }
            candidate_x.clear();
            candidate_w.clear();
            for (size_t l = 0; l < loops.size(); l++) {
                const auto &edges = loops[l].edges;
                for (uint64_t start = 0; start < tables[0].size(); start++) {
                    uint64_t in = start;
                    int x_m = 0;
                    for (int k = 0; k < n; k++) {
                        const TableEntry &e = tables[k][in];
                        if (k == m) {
                            x_m = e.x;
                        }
                        in = e.o ^ edges[k].flip;
                    }
                    if (in == start) {
                        candidate_x.push_back(x_m);
                        candidate_w.push_back(loop_weights[l]);
                    }
                }
            }
            int x_m = candidate_x[draw(rng, candidate_w)];
            tally.rounds_per_m[m]++;
            if (x_m == parity_except(a_bits, n, m)) {
                tally.wins++;
                tally.wins_per_m[m]++;
            }
        }
    };

    std::vector<ShotTally> tallies(workers);
    std::vector<std::thread> threads;
    for (int k = 0; k < workers; k++) {
        uint64_t count = shots / workers + (uint64_t(k) < shots % workers ? 1 : 0);
        threads.emplace_back(run_worker, k, count, std::ref(tallies[k]));
    }
    for (auto &t : threads) {
        t.join();
    }

    SampleResult result;
    result.n = n;
    result.shots = shots;
    result.seed = seed;
    result.workers = workers;
    result.rounds_per_m.assign(n, 0);
    result.wins_per_m.assign(n, 0);
    for (const auto &t : tallies) {
        result.wins += t.wins;
        for (int m = 0; m < n; m++) {
            result.rounds_per_m[m] += t.rounds_per_m[m];
            result.wins_per_m[m] += t.wins_per_m[m];
        }
    }
    return result;
}

nlohmann::json distribution_to_json(const GameRound &round, const OutcomeDistribution &dist, bool as_float) {
    nlohmann::json entries = nlohmann::json::array();
    for (uint64_t index = 0; index < dist.probs.size(); index++) {
        const Dyadic &p = dist.probs[index];
        if (p.is_zero()) {
            continue;
        }
        std::vector<int> x;
        for (int k = 0; k < dist.n; k++) {
            x.push_back((index >> (dist.n - 1 - k)) & 1);
        }
        nlohmann::json e = {{"x", x}};
        if (as_float) {
            e["p"] = p.to_double();
        } else {
            e["num"] = p.num();
            e["log2den"] = p.log2den();
        }
        entries.push_back(e);
    }
    return {{"n", round.n}, {"m", round.m}, {"a", round.a}, {"distribution", entries}};
}

}  // namespace causalloop
