#ifndef CAUSALLOOP_LAYOUT_H
#define CAUSALLOOP_LAYOUT_H

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace causalloop {

/// Party index used for wires owned by the environment rather than a party.
inline constexpr int kEnvParty = -1;

/// Largest total width an operator in monomial form may have (masks are 64-bit).
inline constexpr int kMaxMonomialWidth = 63;

enum class WireKind { Input, Output, Aux };

struct Wire {
    std::string name;
    int party = kEnvParty;
    WireKind kind = WireKind::Aux;
    int width = 1;

    bool operator==(const Wire &) const = default;
};

/// Canonical name of a party's input/output wire: "I3", "O0".
std::string io_wire_name(WireKind kind, int party);

/// Ordered list of wires fixing the global bit ordering of diagonal operators.
///
/// The first declared wire occupies the most significant bits of the global
/// basis index, and within a wire the first bit is the most significant one.
/// So for wires (A, B) of width 1 the basis index is 2*a + b, matching the
/// left-to-right order of a tensor product A ⊗ B.
class WireLayout {
   public:
    WireLayout() = default;
    explicit WireLayout(std::vector<Wire> wires);

    /// Wires I_0..I_{n-1} followed by O_0..O_{n-1}.
    static WireLayout io(std::span<const int> input_widths, std::span<const int> output_widths);
    /// Anonymous 1-bit aux wires named q0, q1, ...
    static WireLayout qubits(int count);

    const std::vector<Wire> &wires() const { return wires_; }
    size_t size() const { return wires_.size(); }
    const Wire &wire(size_t k) const { return wires_.at(k); }
    int width() const { return width_; }

    std::optional<size_t> find(std::string_view name) const;
    std::optional<size_t> find(int party, WireKind kind) const;
    /// Like find, but throws std::invalid_argument for an unknown wire.
    size_t index_of(std::string_view name) const;

    /// Bit offset of the wire's least significant bit in the global index.
    int offset(size_t k) const { return offsets_.at(k); }
    /// Global mask covering all bits of wire k.
    uint64_t wire_mask(size_t k) const;
    /// Global mask with `value` written into the bits of wire k.
    uint64_t place(size_t k, uint64_t value) const;
    /// Value of wire k inside a global index.
    uint64_t extract(size_t k, uint64_t index) const;

    /// Highest party index + 1 over party-owned wires.
    int party_count() const;

    bool operator==(const WireLayout &other) const { return wires_ == other.wires_; }

    std::string str() const;

   private:
    std::vector<Wire> wires_;
    std::vector<int> offsets_;
    int width_ = 0;
};

/// Concatenation a then b; throws std::invalid_argument on a wire-name collision.
WireLayout concat(const WireLayout &a, const WireLayout &b);

/// Packs the bits of `value` selected by `keep` into the low bits, preserving order.
uint64_t compress_bits(uint64_t value, uint64_t keep);
/// Inverse of compress_bits: spreads the low bits of `value` over the set bits of `mask`.
uint64_t deposit_bits(uint64_t value, uint64_t mask);

}  // namespace causalloop

#endif
