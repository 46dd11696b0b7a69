#include "causalloop/diagop.h"

#include <set>
#include <sstream>
#include <stdexcept>

namespace causalloop {

namespace {

void require_dense_width(int width) {
    if (width > kMaxDenseWidth) {
        throw std::length_error(
            "diagop: width " + std::to_string(width) + " exceeds the dense limit of " +
            std::to_string(kMaxDenseWidth) + " bits");
    }
}

// In-place unnormalized Walsh-Hadamard transform: f(b) <- sum_m f(m) (-1)^{b.m}.
void walsh_transform(std::vector<__int128> &f) {
    for (size_t h = 1; h < f.size(); h <<= 1) {
        for (size_t i = 0; i < f.size(); i += h << 1) {
            for (size_t j = i; j < i + h; j++) {
                __int128 x = f[j];
                __int128 y = f[j + h];
                f[j] = x + y;
                f[j + h] = x - y;
            }
        }
    }
}

// Numerators of `values` over the common denominator 2^q, for the returned q.
template <typename Range>
int common_log2den(const Range &values) {
    int q = 0;
    for (const Dyadic &v : values) {
        q = std::max(q, v.log2den());
    }
    return q;
}

__int128 numerator_over(const Dyadic &v, int q) {
    int shift = q - v.log2den();
    if (shift > 62) {
        throw std::overflow_error("diagop: denominators too far apart for exact transform");
    }
    return static_cast<__int128>(v.num()) << shift;
}

Dyadic from_wide(__int128 num, int log2den) {
    // Strip common factors of two before narrowing.
    while (log2den > 0 && num != 0 && (num & 1) == 0) {
        num /= 2;
        log2den--;
    }
    if (num > INT64_MAX || num < INT64_MIN) {
        throw std::overflow_error("diagop: entry does not fit a 64-bit numerator");
    }
    return Dyadic(static_cast<int64_t>(num), log2den);
}

void require_same_layout(const DiagOperator &a, const DiagOperator &b, const char *op) {
    if (!(a.layout() == b.layout())) {
        throw std::invalid_argument(std::string(op) + ": layout mismatch " + a.layout().str() + " vs " +
                                    b.layout().str());
    }
}

void require_same_form(const DiagOperator &a, const DiagOperator &b, const char *op) {
    if (a.is_dense() != b.is_dense()) {
        throw std::invalid_argument(std::string(op) +
                                    ": operands are in different forms; convert one explicitly first");
    }
}

std::string mask_str(const WireLayout &layout, uint64_t mask) {
    std::string out;
    for (size_t k = 0; k < layout.size(); k++) {
        if (k) {
            out += '|';
        }
        uint64_t bits = layout.extract(k, mask);
        for (int b = layout.wire(k).width; b-- > 0;) {
            out += ((bits >> b) & 1) ? 'Z' : 'I';
        }
    }
    return out;
}

}  // namespace

std::string ZMonomial::str() const {
    return mask_str(layout, mask);
}

Dyadic ZMonomial::trace() const {
    return mask == 0 ? Dyadic(1).scaled_by_power_of_two(layout.width()) : Dyadic(0);
}

DiagOperator DiagOperator::zero(WireLayout layout) {
    return DiagOperator(std::move(layout), Terms{});
}

DiagOperator DiagOperator::identity(WireLayout layout) {
    return DiagOperator(std::move(layout), Terms{{0, Dyadic(1)}});
}

DiagOperator DiagOperator::monomial(const ZMonomial &m, Dyadic coefficient) {
    return from_terms(m.layout, Terms{{m.mask, coefficient}});
}

DiagOperator DiagOperator::from_terms(WireLayout layout, Terms terms) {
    uint64_t full = layout.width() == 64 ? ~uint64_t{0} : (uint64_t{1} << layout.width()) - 1;
    for (auto it = terms.begin(); it != terms.end();) {
        if (it->first & ~full) {
            throw std::invalid_argument("diagop: mask exceeds layout width");
        }
        it = it->second.is_zero() ? terms.erase(it) : std::next(it);
    }
    return DiagOperator(std::move(layout), std::move(terms));
}

DiagOperator DiagOperator::from_dense(WireLayout layout, std::vector<Dyadic> entries) {
    require_dense_width(layout.width());
    if (entries.size() != (size_t{1} << layout.width())) {
        throw std::invalid_argument("diagop: dense vector has " + std::to_string(entries.size()) +
                                    " entries, layout needs " + std::to_string(size_t{1} << layout.width()));
    }
    return DiagOperator(std::move(layout), std::move(entries));
}

DiagOperator DiagOperator::point_mass(WireLayout layout, uint64_t index) {
    require_dense_width(layout.width());
    std::vector<Dyadic> entries(size_t{1} << layout.width());
    entries.at(index) = 1;
    return DiagOperator(std::move(layout), std::move(entries));
}

const DiagOperator::Terms &DiagOperator::terms() const {
    if (is_dense()) {
        throw std::logic_error("diagop: operator is dense; call to_monomials() first");
    }
    return std::get<Terms>(data_);
}

const std::vector<Dyadic> &DiagOperator::entries() const {
    if (!is_dense()) {
        throw std::logic_error("diagop: operator is in monomial form; call to_dense() first");
    }
    return std::get<std::vector<Dyadic>>(data_);
}

Dyadic DiagOperator::entry(uint64_t index) const {
    if (is_dense()) {
        return entries().at(index);
    }
    Dyadic total;
    for (const auto &[mask, c] : terms()) {
        total += (__builtin_popcountll(index & mask) & 1) ? -c : c;
    }
    return total;
}

Dyadic DiagOperator::coefficient(uint64_t mask) const {
    if (!is_dense()) {
        auto it = terms().find(mask);
        return it == terms().end() ? Dyadic(0) : it->second;
    }
    Dyadic total;
    const auto &v = entries();
    for (uint64_t b = 0; b < v.size(); b++) {
        total += (__builtin_popcountll(b & mask) & 1) ? -v[b] : v[b];
    }
    return total.scaled_by_power_of_two(-width());
}

DiagOperator DiagOperator::to_dense() const {
    if (is_dense()) {
        return *this;
    }
    require_dense_width(width());
    const Terms &t = terms();
    int q = 0;
    for (const auto &[mask, c] : t) {
        q = std::max(q, c.log2den());
    }
    std::vector<__int128> f(size_t{1} << width(), 0);
    for (const auto &[mask, c] : t) {
        f[mask] = numerator_over(c, q);
    }
    walsh_transform(f);
    std::vector<Dyadic> out(f.size());
    for (size_t b = 0; b < f.size(); b++) {
        out[b] = from_wide(f[b], q);
    }
    return DiagOperator(layout_, std::move(out));
}

DiagOperator DiagOperator::to_monomials() const {
    if (!is_dense()) {
        return *this;
    }
    const auto &v = entries();
    int q = common_log2den(v);
    std::vector<__int128> f(v.size());
    for (size_t b = 0; b < v.size(); b++) {
        f[b] = numerator_over(v[b], q);
    }
    walsh_transform(f);
    Terms t;
    for (uint64_t m = 0; m < f.size(); m++) {
        if (f[m] != 0) {
            t.emplace(m, from_wide(f[m], q + width()));
        }
    }
    return DiagOperator(layout_, std::move(t));
}

bool operator==(const DiagOperator &a, const DiagOperator &b) {
    if (!(a.layout_ == b.layout_)) {
        return false;
    }
    if (a.is_dense() == b.is_dense()) {
        return a.data_ == b.data_;
    }
    const DiagOperator &monomial_side = a.is_dense() ? b : a;
    const DiagOperator &dense_side = a.is_dense() ? a : b;
    return monomial_side.to_monomials() == dense_side.to_monomials();
}

std::string DiagOperator::str() const {
    std::ostringstream out;
    out << "layout " << layout_.str() << "\n";
    if (is_dense()) {
        const auto &v = entries();
        for (size_t b = 0; b < v.size(); b++) {
            out << "  [" << b << "] " << v[b] << "\n";
        }
    } else {
        for (const auto &[mask, c] : terms()) {
            out << "  " << c << " * " << mask_str(layout_, mask) << "\n";
        }
    }
    return out.str();
}

DiagOperator tensor(const DiagOperator &a, const DiagOperator &b) {
    require_same_form(a, b, "tensor");
    WireLayout layout = concat(a.layout(), b.layout());
    int wb = b.width();
    if (a.is_dense()) {
        require_dense_width(layout.width());
        const auto &va = a.entries();
        const auto &vb = b.entries();
        std::vector<Dyadic> out(va.size() * vb.size());
        for (size_t i = 0; i < va.size(); i++) {
            for (size_t j = 0; j < vb.size(); j++) {
                out[(i << wb) | j] = va[i] * vb[j];
            }
        }
        return DiagOperator::from_dense(std::move(layout), std::move(out));
    }
    DiagOperator::Terms t;
    for (const auto &[ma, ca] : a.terms()) {
        for (const auto &[mb, cb] : b.terms()) {
            t.emplace((ma << wb) | mb, ca * cb);
        }
    }
    return DiagOperator::from_terms(std::move(layout), std::move(t));
}

DiagOperator multiply(const DiagOperator &a, const DiagOperator &b) {
    require_same_layout(a, b, "multiply");
    require_same_form(a, b, "multiply");
    if (a.is_dense()) {
        std::vector<Dyadic> out = a.entries();
        const auto &vb = b.entries();
        for (size_t i = 0; i < out.size(); i++) {
            out[i] *= vb[i];
        }
        return DiagOperator::from_dense(a.layout(), std::move(out));
    }
    DiagOperator::Terms t;
    for (const auto &[ma, ca] : a.terms()) {
        for (const auto &[mb, cb] : b.terms()) {
            t[ma ^ mb] += ca * cb;
        }
    }
    return DiagOperator::from_terms(a.layout(), std::move(t));
}

DiagOperator add(const DiagOperator &a, const DiagOperator &b) {
    require_same_layout(a, b, "add");
    require_same_form(a, b, "add");
    if (a.is_dense()) {
        std::vector<Dyadic> out = a.entries();
        const auto &vb = b.entries();
        for (size_t i = 0; i < out.size(); i++) {
            out[i] += vb[i];
        }
        return DiagOperator::from_dense(a.layout(), std::move(out));
    }
    DiagOperator::Terms t = a.terms();
    for (const auto &[mb, cb] : b.terms()) {
        t[mb] += cb;
    }
    return DiagOperator::from_terms(a.layout(), std::move(t));
}

DiagOperator scale(const DiagOperator &a, const Dyadic &factor) {
    if (a.is_dense()) {
        std::vector<Dyadic> out = a.entries();
        for (auto &v : out) {
            v *= factor;
        }
        return DiagOperator::from_dense(a.layout(), std::move(out));
    }
    DiagOperator::Terms t = a.terms();
    for (auto &[m, c] : t) {
        c *= factor;
    }
    return DiagOperator::from_terms(a.layout(), std::move(t));
}

Dyadic trace(const DiagOperator &a) {
    if (a.is_dense()) {
        Dyadic total;
        for (const auto &v : a.entries()) {
            total += v;
        }
        return total;
    }
    return a.coefficient(0).scaled_by_power_of_two(a.width());
}

DiagOperator partial_trace(const DiagOperator &a, std::span<const std::string> wires) {
    const WireLayout &layout = a.layout();
    uint64_t traced = 0;
    std::set<size_t> traced_wires;
    for (const auto &name : wires) {
        size_t k = layout.index_of(name);
        traced_wires.insert(k);
        traced |= layout.wire_mask(k);
    }
    std::vector<Wire> kept;
    int traced_width = 0;
    for (size_t k = 0; k < layout.size(); k++) {
        if (traced_wires.count(k)) {
            traced_width += layout.wire(k).width;
        } else {
            kept.push_back(layout.wire(k));
        }
    }
    WireLayout out_layout(std::move(kept));
    uint64_t keep = (layout.width() == 64 ? ~uint64_t{0} : (uint64_t{1} << layout.width()) - 1) & ~traced;

    if (a.is_dense()) {
        std::vector<Dyadic> out(size_t{1} << out_layout.width());
        const auto &v = a.entries();
        for (uint64_t b = 0; b < v.size(); b++) {
            out[compress_bits(b, keep)] += v[b];
        }
        return DiagOperator::from_dense(std::move(out_layout), std::move(out));
    }
    DiagOperator::Terms t;
    for (const auto &[mask, c] : a.terms()) {
        if ((mask & traced) == 0) {
            t[compress_bits(mask, keep)] += c.scaled_by_power_of_two(traced_width);
        }
    }
    return DiagOperator::from_terms(std::move(out_layout), std::move(t));
}

DiagOperator channel_apply(const DiagOperator &channel, const DiagOperator &state) {
    const WireLayout &cl = channel.layout();
    const WireLayout &sl = state.layout();
    uint64_t cond = 0;
    std::vector<size_t> channel_wire_of(sl.size());
    for (size_t k = 0; k < sl.size(); k++) {
        auto j = cl.find(sl.wire(k).name);
        if (!j || cl.wire(*j).width != sl.wire(k).width) {
            throw std::invalid_argument("channel_apply: state wire '" + sl.wire(k).name +
                                        "' is not a conditioning wire of the channel");
        }
        channel_wire_of[k] = *j;
        cond |= cl.wire_mask(*j);
    }
    std::vector<Wire> kept;
    for (size_t j = 0; j < cl.size(); j++) {
        if ((cl.wire_mask(j) & cond) == 0) {
            kept.push_back(cl.wire(j));
        }
    }
    WireLayout out_layout(std::move(kept));
    require_dense_width(cl.width());
    uint64_t keep = ((uint64_t{1} << cl.width()) - 1) & ~cond;

    DiagOperator dense_channel = channel.to_dense();
    DiagOperator dense_state = state.to_dense();
    const auto &cv = dense_channel.entries();
    const auto &sv = dense_state.entries();

    std::vector<uint64_t> cond_bits(sv.size());
    for (uint64_t y = 0; y < sv.size(); y++) {
        uint64_t bits = 0;
        for (size_t k = 0; k < sl.size(); k++) {
            bits |= cl.place(channel_wire_of[k], sl.extract(k, y));
        }
        cond_bits[y] = bits;
    }
    std::vector<Dyadic> out(size_t{1} << out_layout.width());
    for (uint64_t x = 0; x < out.size(); x++) {
        uint64_t base = deposit_bits(x, keep);
        Dyadic total;
        for (uint64_t y = 0; y < sv.size(); y++) {
            if (!sv[y].is_zero()) {
                total += cv[base | cond_bits[y]] * sv[y];
            }
        }
        out[x] = total;
    }
    return DiagOperator::from_dense(std::move(out_layout), std::move(out));
}

bool is_nonnegative(const DiagOperator &a) {
    DiagOperator dense = a.to_dense();
    for (const auto &v : dense.entries()) {
        if (v.sign() < 0) {
            return false;
        }
    }
    return true;
}

GroupCheck abelian_psd_check(std::span<const ZMonomial> monomials) {
    if (monomials.empty()) {
        throw std::invalid_argument("abelian_psd_check: empty set (a group needs the identity)");
    }
    const WireLayout &layout = monomials.front().layout;
    std::set<uint64_t> masks;
    for (const auto &m : monomials) {
        if (!(m.layout == layout)) {
            throw std::invalid_argument("abelian_psd_check: monomials on different layouts");
        }
        masks.insert(m.mask);
    }
    GroupCheck result;
    result.is_group = masks.count(0) > 0;
    for (auto x = masks.begin(); result.is_group && x != masks.end(); ++x) {
        for (auto y = x; y != masks.end(); ++y) {
            if (!masks.count(*x ^ *y)) {
                result.is_group = false;
                break;
            }
        }
    }
    DiagOperator::Terms terms;
    for (uint64_t m : masks) {
        terms.emplace(m, Dyadic(1));
    }
    result.sum_nonneg = is_nonnegative(DiagOperator::from_terms(layout, std::move(terms)));
    return result;
}

}  // namespace causalloop
