#include "causalloop/layout.h"

#include <set>
#include <stdexcept>

namespace causalloop {

std::string io_wire_name(WireKind kind, int party) {
    switch (kind) {
        case WireKind::Input:
            return "I" + std::to_string(party);
        case WireKind::Output:
            return "O" + std::to_string(party);
        case WireKind::Aux:
            break;
    }
    throw std::invalid_argument("io_wire_name: aux wires have no canonical name");
}

WireLayout::WireLayout(std::vector<Wire> wires) : wires_(std::move(wires)) {
    std::set<std::string> names;
    for (const auto &w : wires_) {
        if (w.width < 1) {
            throw std::invalid_argument("layout: wire '" + w.name + "' has width < 1");
        }
        if (w.name.empty()) {
            throw std::invalid_argument("layout: wire with empty name");
        }
        if (!names.insert(w.name).second) {
            throw std::invalid_argument("layout: duplicate wire name '" + w.name + "'");
        }
        width_ += w.width;
    }
    if (width_ > kMaxMonomialWidth) {
        throw std::invalid_argument("layout: total width " + std::to_string(width_) + " exceeds 63 bits");
    }
    offsets_.resize(wires_.size());
    int offset = 0;
    for (size_t k = wires_.size(); k-- > 0;) {
        offsets_[k] = offset;
        offset += wires_[k].width;
    }
}

WireLayout WireLayout::io(std::span<const int> input_widths, std::span<const int> output_widths) {
    if (input_widths.size() != output_widths.size()) {
        throw std::invalid_argument("layout: input and output party counts differ");
    }
    std::vector<Wire> wires;
    for (size_t p = 0; p < input_widths.size(); p++) {
        wires.push_back({io_wire_name(WireKind::Input, (int)p), (int)p, WireKind::Input, input_widths[p]});
    }
    for (size_t p = 0; p < output_widths.size(); p++) {
        wires.push_back({io_wire_name(WireKind::Output, (int)p), (int)p, WireKind::Output, output_widths[p]});
    }
    return WireLayout(std::move(wires));
}

WireLayout WireLayout::qubits(int count) {
    std::vector<Wire> wires;
    for (int k = 0; k < count; k++) {
        wires.push_back({"q" + std::to_string(k), kEnvParty, WireKind::Aux, 1});
    }
    return WireLayout(std::move(wires));
}

std::optional<size_t> WireLayout::find(std::string_view name) const {
    for (size_t k = 0; k < wires_.size(); k++) {
        if (wires_[k].name == name) {
            return k;
        }
    }
    return std::nullopt;
}

std::optional<size_t> WireLayout::find(int party, WireKind kind) const {
    for (size_t k = 0; k < wires_.size(); k++) {
        if (wires_[k].party == party && wires_[k].kind == kind) {
            return k;
        }
    }
    return std::nullopt;
}

size_t WireLayout::index_of(std::string_view name) const {
    auto k = find(name);
    if (!k) {
        throw std::invalid_argument("layout: unknown wire '" + std::string(name) + "'");
    }
    return *k;
}

uint64_t WireLayout::wire_mask(size_t k) const {
    return ((uint64_t{1} << wire(k).width) - 1) << offsets_[k];
}

uint64_t WireLayout::place(size_t k, uint64_t value) const {
    if (value >> wire(k).width) {
        throw std::invalid_argument("layout: value does not fit wire '" + wire(k).name + "'");
    }
    return value << offsets_[k];
}

uint64_t WireLayout::extract(size_t k, uint64_t index) const {
    return (index & wire_mask(k)) >> offsets_[k];
}

int WireLayout::party_count() const {
    int count = 0;
    for (const auto &w : wires_) {
        count = std::max(count, w.party + 1);
    }
    return count;
}

std::string WireLayout::str() const {
    std::string out = "[";
    for (size_t k = 0; k < wires_.size(); k++) {
        if (k) {
            out += ", ";
        }
        out += wires_[k].name + ":" + std::to_string(wires_[k].width);
    }
    return out + "]";
}

WireLayout concat(const WireLayout &a, const WireLayout &b) {
    std::vector<Wire> wires = a.wires();
    wires.insert(wires.end(), b.wires().begin(), b.wires().end());
    return WireLayout(std::move(wires));
}

uint64_t compress_bits(uint64_t value, uint64_t keep) {
    uint64_t out = 0;
    int pos = 0;
    for (; keep; keep &= keep - 1) {
        uint64_t low = keep & -keep;
        if (value & low) {
            out |= uint64_t{1} << pos;
        }
        pos++;
    }
    return out;
}

uint64_t deposit_bits(uint64_t value, uint64_t mask) {
    uint64_t out = 0;
    for (; mask && value; mask &= mask - 1, value >>= 1) {
        if (value & 1) {
            out |= mask & -mask;
        }
    }
    return out;
}

}  // namespace causalloop
