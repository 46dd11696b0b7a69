#include "causalloop/process.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace causalloop {

namespace {

int slot_bit(uint64_t mask, int positions, int slot) {
    return (mask >> (positions - 1 - slot)) & 1;
}

void require_supported(int n) {
    if (n < 2) {
        throw std::invalid_argument("process: need at least 2 parties, got n = " + std::to_string(n));
    }
    if (n == 2) {
        throw std::domain_error(
            "process: n = 2 is unsupported; the two-bit channel cannot be used to signal from its source "
            "to its destination, so the construction needs n >= 3");
    }
}

std::vector<uint64_t> even_weight_patterns(int positions) {
    std::vector<uint64_t> out;
    for (uint64_t m = 0; m < (uint64_t{1} << positions); m++) {
        if ((__builtin_popcountll(m) & 1) == 0) {
            out.push_back(m);
        }
    }
    return out;
}

std::vector<int> ones(int n) {
    return std::vector<int>(n, 1);
}

// Odd-style placement: slot j acts on I_j and on O_{j-1 mod n}.
uint64_t place_cyclic(const WireLayout &layout, int n, uint64_t pattern) {
    uint64_t mask = 0;
    for (int j = 0; j < n; j++) {
        if (slot_bit(pattern, n, j)) {
            mask |= layout.place(*layout.find(j, WireKind::Input), 1);
            mask |= layout.place(*layout.find((j + n - 1) % n, WireKind::Output), 1);
        }
    }
    return mask;
}

// Even-n placement of an element (u over n-1 slots, g' over 2 slots).
uint64_t place_doubled(const WireLayout &layout, int n, uint64_t pattern) {
    int positions = n + 1;
    uint64_t g_prime = pattern & 3;
    uint64_t mask = 0;
    for (int j = 0; j < n - 1; j++) {
        if (slot_bit(pattern, positions, j)) {
            mask |= layout.place(*layout.find(j, WireKind::Input), 1);
            int out_party = j == 0 ? n - 1 : j - 1;
            mask |= layout.place(*layout.find(out_party, WireKind::Output), 1);
        }
    }
    mask |= layout.place(*layout.find(n - 1, WireKind::Input), g_prime);
    mask |= layout.place(*layout.find(n - 2, WireKind::Output), g_prime);
    return mask;
}

WireLayout w_layout(int n) {
    std::vector<int> in = ones(n);
    std::vector<int> out = ones(n);
    if (n % 2 == 0) {
        in[n - 1] = 2;
        out[n - 2] = 2;
    }
    return WireLayout::io(in, out);
}

struct DecodedPoint {
    std::vector<uint64_t> inputs;
    std::vector<uint64_t> outputs;
    Dyadic weight;
};

std::vector<DecodedPoint> decode_support(const ProcessMatrix &w) {
    std::vector<DecodedPoint> out;
    for (const auto &p : w.support()) {
        DecodedPoint d;
        for (int k = 0; k < w.n(); k++) {
            d.inputs.push_back(w.input_value(k, p.index));
            d.outputs.push_back(w.output_value(k, p.index));
        }
        d.weight = p.weight;
        out.push_back(std::move(d));
    }
    return out;
}

// Total probability when party k answers input i with tables[k][i].
Dyadic behavior_total(const std::vector<DecodedPoint> &points, const std::vector<std::vector<uint64_t>> &tables) {
    Dyadic total;
    for (const auto &p : points) {
        bool consistent = true;
        for (size_t k = 0; k < tables.size() && consistent; k++) {
            consistent = tables[k][p.inputs[k]] == p.outputs[k];
        }
        if (consistent) {
            total += p.weight;
        }
    }
    return total;
}

BilinearCheck check_bilinear(const ProcessMatrix &w, const ValidationConfig &config) {
    int n = w.n();
    auto points = decode_support(w);
    std::vector<std::vector<uint64_t>> tables(n);
    double total_tuples = 1;
    for (int k = 0; k < n; k++) {
        tables[k].assign(size_t{1} << w.input_width(k), 0);
        total_tuples *= std::pow(2.0, w.output_width(k) * (double)tables[k].size());
    }

    BilinearCheck result;
    auto check_one = [&]() {
        result.checked++;
        if (behavior_total(points, tables) != Dyadic(1)) {
            result.failed++;
        }
    };

    if (n <= config.exhaustive_max_parties && total_tuples <= double(uint64_t{1} << 32)) {
        result.exhaustive = true;
        // Odometer over every entry of every table.
        while (true) {
            check_one();
            int k = 0;
            size_t i = 0;
            while (k < n) {
                uint64_t limit = uint64_t{1} << w.output_width(k);
                if (++tables[k][i] < limit) {
                    break;
                }
                tables[k][i] = 0;
                if (++i == tables[k].size()) {
                    i = 0;
                    k++;
                }
            }
            if (k == n) {
                break;
            }
        }
        return result;
    }

    std::mt19937_64 rng(config.seed);
    for (uint64_t s = 0; s < config.samples; s++) {
        for (int k = 0; k < n; k++) {
            uint64_t out_mask = (uint64_t{1} << w.output_width(k)) - 1;
            for (auto &entry : tables[k]) {
                entry = rng() & out_mask;
            }
        }
        check_one();
    }
    return result;
}

}  // namespace

GeneratorGroup generator_group(int n) {
    require_supported(n);
    GeneratorGroup group;
    group.n = n;
    if (n % 2 == 1) {
        group.positions = n;
        group.masks = even_weight_patterns(n);
        return group;
    }
    group.positions = n + 1;
    int odd_positions = n - 1;
    uint64_t all = (uint64_t{1} << odd_positions) - 1;
    std::vector<uint64_t> odd = even_weight_patterns(odd_positions);
    for (int complemented = 0; complemented < 2; complemented++) {
        for (uint64_t g : odd) {
            uint64_t g_prime = g >> (odd_positions - 2);
            uint64_t head = complemented ? g ^ all : g;
            group.masks.push_back((head << 2) | g_prime);
        }
    }
    return group;
}

std::string pattern_str(uint64_t mask, int positions) {
    std::string out;
    for (int s = 0; s < positions; s++) {
        out += slot_bit(mask, positions, s) ? '1' : '0';
    }
    return out;
}

int io_party_count(const WireLayout &layout) {
    int n = layout.party_count();
    std::vector<int> inputs(n), outputs(n);
    for (const auto &w : layout.wires()) {
        if (w.party == kEnvParty || w.kind == WireKind::Aux) {
            throw std::invalid_argument("process: layout wire '" + w.name + "' is not a party input/output");
        }
        (w.kind == WireKind::Input ? inputs : outputs)[w.party]++;
    }
    for (int k = 0; k < n; k++) {
        if (inputs[k] != 1 || outputs[k] != 1) {
            throw std::invalid_argument("process: party " + std::to_string(k) +
                                        " needs exactly one input and one output wire");
        }
    }
    return n;
}

ProcessMatrix::ProcessMatrix(const DiagOperator &op) : ProcessMatrix(op, op.coefficient(0)) {}

ProcessMatrix::ProcessMatrix(const DiagOperator &op, Dyadic normalization)
    : op_(op.to_monomials()), normalization_(normalization), n_(io_party_count(op.layout())) {
    for (int k = 0; k < n_; k++) {
        input_wires_.push_back(*layout().find(k, WireKind::Input));
        output_wires_.push_back(*layout().find(k, WireKind::Output));
    }
    DiagOperator dense = op.to_dense();
    const auto &v = dense.entries();
    for (uint64_t b = 0; b < v.size(); b++) {
        if (!v[b].is_zero()) {
            support_.push_back({b, v[b]});
        }
    }
}

ProcessMatrix build_w(int n) {
    GeneratorGroup group = generator_group(n);
    WireLayout layout = w_layout(n);
    int log2den = n % 2 == 1 ? n : n + 1;
    Dyadic c = Dyadic::inverse_power_of_two(log2den);
    DiagOperator::Terms terms;
    for (uint64_t g : group.masks) {
        uint64_t mask = n % 2 == 1 ? place_cyclic(layout, n, g) : place_doubled(layout, n, g);
        terms[mask] += c;
    }
    return ProcessMatrix(DiagOperator::from_terms(std::move(layout), std::move(terms)), c);
}

DiagOperator naive_even_w(int n) {
    if (n < 4 || n % 2 != 0) {
        throw std::invalid_argument("naive_even_w: n must be even and >= 4, got " + std::to_string(n));
    }
    WireLayout layout = WireLayout::io(ones(n), ones(n));
    Dyadic c = Dyadic::inverse_power_of_two(n);
    DiagOperator::Terms terms;
    for (uint64_t g : even_weight_patterns(n)) {
        terms[place_cyclic(layout, n, g)] += c;
    }
    return DiagOperator::from_terms(std::move(layout), std::move(terms));
}

std::vector<std::string> ValidationReport::failures() const {
    std::vector<std::string> out;
    if (!nonneg) {
        out.emplace_back("nonneg");
    }
    if (!channel_norm) {
        out.emplace_back("channel_norm");
    }
    if (!bilinear_norm.ok()) {
        out.emplace_back("bilinear_norm");
    }
    if (!term_structure) {
        out.emplace_back("term_structure");
    }
    return out;
}

nlohmann::json ValidationReport::to_json() const {
    nlohmann::json signal = nlohmann::json::array();
    for (const auto &row : signaling) {
        nlohmann::json r = nlohmann::json::array();
        for (bool b : row) {
            r.push_back(b);
        }
        signal.push_back(r);
    }
    return {{"nonneg", nonneg},
            {"channel_norm", channel_norm},
            {"bilinear_norm", {{"checked", bilinear_norm.checked}, {"failed", bilinear_norm.failed}}},
            {"term_structure", term_structure},
            {"signaling", signal}};
}

ValidationReport validate_process(const DiagOperator &op, const ValidationConfig &config) {
    ProcessMatrix w(op);
    const WireLayout &layout = w.layout();
    int n = w.n();
    ValidationReport report;

    report.nonneg = true;
    for (const auto &p : w.support()) {
        if (p.weight.sign() < 0) {
            report.nonneg = false;
        }
    }

    std::vector<std::string> inputs;
    std::vector<Wire> output_wires;
    for (const auto &wire : layout.wires()) {
        if (wire.kind == WireKind::Input) {
            inputs.push_back(wire.name);
        } else {
            output_wires.push_back(wire);
        }
    }
    report.channel_norm = partial_trace(w.op(), inputs) == DiagOperator::identity(WireLayout(output_wires));

    report.bilinear_norm = check_bilinear(w, config);

    report.term_structure = true;
    report.signaling.assign(n, std::vector<bool>(n, false));
    for (const auto &[mask, c] : w.op().terms()) {
        if (mask == 0) {
            continue;
        }
        bool has_recipient_only = false;
        for (int j = 0; j < n; j++) {
            bool reads = mask & layout.wire_mask(w.input_wire(j));
            bool writes = mask & layout.wire_mask(w.output_wire(j));
            has_recipient_only |= reads && !writes;
        }
        report.term_structure &= has_recipient_only;
        for (int j = 0; j < n; j++) {
            if (!(mask & layout.wire_mask(w.output_wire(j)))) {
                continue;
            }
            for (int i = 0; i < n; i++) {
                if (mask & layout.wire_mask(w.input_wire(i))) {
                    report.signaling[j][i] = true;
                }
            }
        }
    }
    return report;
}

InputDistribution conditional_distribution(const ProcessMatrix &w, std::span<const uint64_t> outputs) {
    if ((int)outputs.size() != w.n()) {
        throw std::invalid_argument("conditional_distribution: need a value for each of the " +
                                    std::to_string(w.n()) + " output wires, got " + std::to_string(outputs.size()));
    }
    uint64_t target = 0;
    uint64_t output_mask = 0;
    for (int k = 0; k < w.n(); k++) {
        target |= w.layout().place(w.output_wire(k), outputs[k]);
        output_mask |= w.layout().wire_mask(w.output_wire(k));
    }
    InputDistribution out;
    for (const auto &p : w.support()) {
        if ((p.index & output_mask) != target) {
            continue;
        }
        std::vector<uint64_t> inputs;
        for (int k = 0; k < w.n(); k++) {
            inputs.push_back(w.input_value(k, p.index));
        }
        out[inputs] += p.weight;
    }
    return out;
}

std::vector<LoopChannel> loop_decomposition(int n) {
    ProcessMatrix w = build_w(n);
    const WireLayout &layout = w.layout();
    uint64_t input_mask = 0;
    for (int k = 0; k < n; k++) {
        input_mask |= layout.wire_mask(w.input_wire(k));
    }
    int input_bits = __builtin_popcountll(input_mask);
    const auto &terms = w.op().terms();

    // A flip pattern v is a loop iff every group character is trivial on (v, o = 0),
    // i.e. every term has even overlap with v on the input wires.
    std::vector<LoopChannel> loops;
    for (uint64_t packed = 0; packed < (uint64_t{1} << input_bits); packed++) {
        uint64_t v = deposit_bits(packed, input_mask);
        bool annihilates = true;
        for (const auto &[mask, c] : terms) {
            if (__builtin_popcountll(mask & v) & 1) {
                annihilates = false;
                break;
            }
        }
        if (!annihilates) {
            continue;
        }
        LoopChannel loop;
        loop.weight = w.normalization() * Dyadic((int64_t)terms.size());
        for (int k = 0; k < n; k++) {
            int next = (k + 1) % n;
            int width = w.output_width(k);
            if (width != w.input_width(next)) {
                throw std::logic_error("loop_decomposition: O_k and I_{k+1} widths differ");
            }
            loop.edges.push_back({k, next, width, w.input_value(next, v)});
        }
        loops.push_back(std::move(loop));
    }
    std::sort(loops.begin(), loops.end(), [](const LoopChannel &a, const LoopChannel &b) {
        for (size_t k = 0; k < a.edges.size(); k++) {
            if (a.edges[k].flip != b.edges[k].flip) {
                return a.edges[k].flip < b.edges[k].flip;
            }
        }
        return false;
    });
    return loops;
}

DiagOperator loop_operator(const WireLayout &layout, std::span<const LoopChannel> loops) {
    int n = io_party_count(layout);
    std::vector<size_t> in(n), out(n);
    uint64_t output_mask = 0;
    for (int k = 0; k < n; k++) {
        in[k] = *layout.find(k, WireKind::Input);
        out[k] = *layout.find(k, WireKind::Output);
        output_mask |= layout.wire_mask(out[k]);
    }
    if (layout.width() > kMaxDenseWidth) {
        throw std::length_error("loop_operator: layout too wide");
    }
    std::vector<Dyadic> entries(size_t{1} << layout.width());
    int output_bits = __builtin_popcountll(output_mask);
    for (uint64_t packed = 0; packed < (uint64_t{1} << output_bits); packed++) {
        uint64_t o = deposit_bits(packed, output_mask);
        for (const auto &loop : loops) {
            if ((int)loop.edges.size() != n) {
                throw std::invalid_argument("loop_operator: loop has wrong number of edges");
            }
            uint64_t index = o;
            for (const auto &e : loop.edges) {
                index |= layout.place(in[e.to], layout.extract(out[e.from], o) ^ e.flip);
            }
            entries[index] += loop.weight;
        }
    }
    return DiagOperator::from_dense(layout, std::move(entries));
}

}  // namespace causalloop
