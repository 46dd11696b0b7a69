#ifndef CAUSALLOOP_PROCESS_H
#define CAUSALLOOP_PROCESS_H

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "causalloop/diagop.h"

namespace causalloop {

/// Abelian group of σ_z patterns that W_n is summed over.
///
/// Masks are over `positions` abstract slots, slot 0 being the most
/// significant bit (so the pattern "011" is the integer 0b011). For odd n
/// these are all even-weight patterns on n slots. For even n there are n + 1
/// slots: n - 1 slots for an element of the odd (n-1) group, then 2 slots for
/// the doubled block g' = (first two slots of the element), and the group is
/// {g ⊗ g'} ∪ {ḡ ⊗ g'} with ḡ the complement of g on the first n - 1 slots.
struct GeneratorGroup {
    int n = 0;
    int positions = 0;
    std::vector<uint64_t> masks;
};

/// Throws std::domain_error for n == 2 and std::invalid_argument for n < 2.
GeneratorGroup generator_group(int n);

/// Renders a group element as a string of '0'/'1', slot 0 first.
std::string pattern_str(uint64_t mask, int positions);

/// Number of parties of an I/O layout (wires I_k, O_k once per party, no aux wires).
/// Throws std::invalid_argument if the layout is not partitioned that way.
int io_party_count(const WireLayout &layout);

/// A diagonal process matrix over I_0..I_{n-1}, O_0..O_{n-1}.
///
/// Holds the operator in monomial form together with its non-zero dense
/// entries, which is what every evaluation in this library iterates over.
class ProcessMatrix {
   public:
    struct SupportPoint {
        uint64_t index;
        Dyadic weight;
    };

    /// Any operator on an I/O layout; validity is checked separately by validate_process.
    explicit ProcessMatrix(const DiagOperator &op);
    ProcessMatrix(const DiagOperator &op, Dyadic normalization);

    int n() const { return n_; }
    const WireLayout &layout() const { return op_.layout(); }
    const DiagOperator &op() const { return op_; }
    /// The prefactor c in W = c Σ g.
    const Dyadic &normalization() const { return normalization_; }

    size_t input_wire(int party) const { return input_wires_.at(party); }
    size_t output_wire(int party) const { return output_wires_.at(party); }
    int input_width(int party) const { return layout().wire(input_wire(party)).width; }
    int output_width(int party) const { return layout().wire(output_wire(party)).width; }
    uint64_t input_value(int party, uint64_t index) const { return layout().extract(input_wire(party), index); }
    uint64_t output_value(int party, uint64_t index) const { return layout().extract(output_wire(party), index); }

    std::span<const SupportPoint> support() const { return support_; }

   private:
    DiagOperator op_;
    Dyadic normalization_;
    int n_ = 0;
    std::vector<size_t> input_wires_;
    std::vector<size_t> output_wires_;
    std::vector<SupportPoint> support_;
};

/// W_n for n >= 3. All wires are one bit wide except, for even n, O_{n-2}
/// and I_{n-1}, which carry two bits.
ProcessMatrix build_w(int n);

/// The even-n analogue of the odd construction (all even-weight patterns on n
/// slots). It is not a valid process; provided for negative testing.
DiagOperator naive_even_w(int n);

struct ValidationConfig {
    /// Bilinear normalization is enumerated exhaustively up to this many parties.
    int exhaustive_max_parties = 5;
    /// Number of random behavior tuples checked above the cutoff.
    uint64_t samples = 1000;
    uint64_t seed = 20150101;
};

struct BilinearCheck {
    uint64_t checked = 0;
    uint64_t failed = 0;
    bool exhaustive = false;

    bool ok() const { return failed == 0; }
};

struct ValidationReport {
    bool nonneg = false;
    bool channel_norm = false;
    BilinearCheck bilinear_norm;
    bool term_structure = false;
    /// signaling[j][i]: some monomial links O_j to I_i.
    std::vector<std::vector<bool>> signaling;

    bool passed() const { return nonneg && channel_norm && bilinear_norm.ok() && term_structure; }
    /// Names of the failing checks, in report order.
    std::vector<std::string> failures() const;
    nlohmann::json to_json() const;
};

/// Runs every check and reports all of them (no fail-fast).
ValidationReport validate_process(const DiagOperator &op, const ValidationConfig &config = {});

/// Per-party input values (I_0, ..., I_{n-1}) -> probability.
using InputDistribution = std::map<std::vector<uint64_t>, Dyadic>;

/// Distribution of the inputs given a complete assignment of all outputs.
/// `outputs[k]` is the value of O_k (first bit most significant).
InputDistribution conditional_distribution(const ProcessMatrix &w, std::span<const uint64_t> outputs);

/// Edge from party `from` to party `to` carrying `width` bits, XORed with `flip`.
struct LoopEdge {
    int from = 0;
    int to = 0;
    int width = 1;
    uint64_t flip = 0;

    bool operator==(const LoopEdge &) const = default;
};

/// Deterministic circular channel O_k -> I_{k+1 mod n} with bit flips.
struct LoopChannel {
    std::vector<LoopEdge> edges;  // edges[k] leaves party k
    Dyadic weight;

    bool operator==(const LoopChannel &) const = default;
};

/// Loops of build_w(n), derived from the characters of its generator group.
std::vector<LoopChannel> loop_decomposition(int n);

/// Dense operator of a loop mixture: entry(i, o) = Σ weight · [i_{k+1} = o_k ⊕ flip_k for all k].
DiagOperator loop_operator(const WireLayout &layout, std::span<const LoopChannel> loops);

}  // namespace causalloop

#endif
