#ifndef CAUSALLOOP_DIAGOP_H
#define CAUSALLOOP_DIAGOP_H

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "causalloop/dyadic.h"
#include "causalloop/layout.h"

namespace causalloop {

/// Widest layout that may be materialized as a dense vector (2^24 entries).
inline constexpr int kMaxDenseWidth = 24;

/// σ_z on every bit set in `mask`, identity elsewhere.
///
/// Diagonal entry at basis index b is (-1)^popcount(b & mask).
struct ZMonomial {
    WireLayout layout;
    uint64_t mask = 0;

    int entry(uint64_t index) const { return (__builtin_popcountll(index & mask) & 1) ? -1 : 1; }
    /// 2^width for the identity, 0 otherwise.
    Dyadic trace() const;
    /// One 'I'/'Z' per bit, wires separated by '|': "I|ZZ|Z".
    std::string str() const;

    bool operator==(const ZMonomial &) const = default;
};

/// Exact diagonal operator on a WireLayout.
///
/// Held either as a linear combination of Z monomials (mask -> coefficient,
/// zero coefficients never stored) or as a dense vector of 2^width entries.
/// The two forms are interchangeable through to_dense()/to_monomials();
/// algebraic operations never switch form on their own and reject operands
/// held in different forms.
class DiagOperator {
   public:
    using Terms = std::map<uint64_t, Dyadic>;

    DiagOperator() = default;

    static DiagOperator zero(WireLayout layout);
    static DiagOperator identity(WireLayout layout);
    static DiagOperator monomial(const ZMonomial &m, Dyadic coefficient = 1);
    static DiagOperator from_terms(WireLayout layout, Terms terms);
    static DiagOperator from_dense(WireLayout layout, std::vector<Dyadic> entries);
    /// Dense operator with a single 1 at `index`.
    static DiagOperator point_mass(WireLayout layout, uint64_t index);

    const WireLayout &layout() const { return layout_; }
    int width() const { return layout_.width(); }
    bool is_dense() const { return std::holds_alternative<std::vector<Dyadic>>(data_); }

    /// Monomial terms; throws std::logic_error when dense.
    const Terms &terms() const;
    /// Dense entries; throws std::logic_error when in monomial form.
    const std::vector<Dyadic> &entries() const;

    /// Diagonal entry at a global basis index, in either form.
    Dyadic entry(uint64_t index) const;
    /// Coefficient of a monomial, in either form.
    Dyadic coefficient(uint64_t mask) const;

    /// Walsh (parity) transform to the dense form. Throws std::length_error above kMaxDenseWidth.
    DiagOperator to_dense() const;
    /// Inverse Walsh transform with exact 2^-width scaling.
    DiagOperator to_monomials() const;

    /// Semantic equality: same layout and same diagonal, regardless of form.
    friend bool operator==(const DiagOperator &a, const DiagOperator &b);

    std::string str() const;

   private:
    DiagOperator(WireLayout layout, std::variant<Terms, std::vector<Dyadic>> data)
        : layout_(std::move(layout)), data_(std::move(data)) {}

    WireLayout layout_;
    std::variant<Terms, std::vector<Dyadic>> data_;
};

/// a ⊗ b on the concatenated layout; wire names must be disjoint.
DiagOperator tensor(const DiagOperator &a, const DiagOperator &b);
/// Matrix (= entrywise) product; layouts must be identical.
DiagOperator multiply(const DiagOperator &a, const DiagOperator &b);
DiagOperator add(const DiagOperator &a, const DiagOperator &b);
DiagOperator scale(const DiagOperator &a, const Dyadic &factor);

Dyadic trace(const DiagOperator &a);
/// Sums out the named wires. Throws std::invalid_argument for unknown wires.
DiagOperator partial_trace(const DiagOperator &a, std::span<const std::string> wires);

/// Tr_S(channel · (1 ⊗ state)) where S are the state's wires.
///
/// `channel` is a conditional distribution whose conditioning wires are
/// exactly the state's wires (matched by name and width); the result lives on
/// the remaining wires of the channel, in the channel's order. Dense result.
DiagOperator channel_apply(const DiagOperator &channel, const DiagOperator &state);

/// All diagonal entries >= 0 (positive semi-definiteness for diagonal operators).
bool is_nonnegative(const DiagOperator &a);

struct GroupCheck {
    bool is_group = false;
    bool sum_nonneg = false;
};

/// Whether the monomials (as a set) form a group under multiplication, and
/// whether their unweighted sum is non-negative. A group always has a
/// non-negative sum. Throws std::invalid_argument for an empty set or mixed layouts.
GroupCheck abelian_psd_check(std::span<const ZMonomial> monomials);

}  // namespace causalloop

#endif
