#include "causalloop/diagop_io.h"

#include <charconv>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace causalloop {

using nlohmann::json;

namespace {

const char *kind_str(WireKind kind) {
    switch (kind) {
        case WireKind::Input:
            return "I";
        case WireKind::Output:
            return "O";
        case WireKind::Aux:
            break;
    }
    return "aux";
}

WireKind kind_from_str(const std::string &s) {
    if (s == "I") {
        return WireKind::Input;
    }
    if (s == "O") {
        return WireKind::Output;
    }
    if (s == "aux") {
        return WireKind::Aux;
    }
    throw std::invalid_argument("operator json: unknown wire kind '" + s + "'");
}

std::string mask_hex(uint64_t mask) {
    std::ostringstream out;
    out << "0x" << std::hex << mask;
    return out.str();
}

uint64_t parse_hex(const std::string &s) {
    std::string_view v = s;
    if (v.starts_with("0x") || v.starts_with("0X")) {
        v.remove_prefix(2);
    }
    uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out, 16);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
        throw std::invalid_argument("operator json: bad mask '" + s + "'");
    }
    return out;
}

}  // namespace

json layout_to_json(const WireLayout &layout) {
    json out = json::array();
    for (const auto &w : layout.wires()) {
        json party = w.party == kEnvParty ? json("env") : json(w.party);
        out.push_back({{"name", w.name}, {"party", party}, {"kind", kind_str(w.kind)}, {"width", w.width}});
    }
    return out;
}

WireLayout layout_from_json(const json &j) {
    if (!j.is_array()) {
        throw std::invalid_argument("operator json: layout must be an array");
    }
    std::vector<Wire> wires;
    try {
        for (const auto &item : j) {
            Wire w;
            const json &party = item.at("party");
            w.party = party.is_string() && party.get<std::string>() == "env" ? kEnvParty : party.get<int>();
            w.kind = kind_from_str(item.at("kind").get<std::string>());
            w.width = item.at("width").get<int>();
            if (item.contains("name")) {
                w.name = item.at("name").get<std::string>();
            } else if (w.kind != WireKind::Aux && w.party != kEnvParty) {
                w.name = io_wire_name(w.kind, w.party);
            } else {
                w.name = "w" + std::to_string(wires.size());
            }
            wires.push_back(std::move(w));
        }
    } catch (const json::exception &e) {
        throw std::invalid_argument(std::string("operator json: ") + e.what());
    }
    return WireLayout(std::move(wires));
}

json dyadic_to_json(const Dyadic &value) {
    return {{"num", value.num()}, {"log2den", value.log2den()}};
}

json rational_to_json(const Rational &value) {
    auto as_json = [](const boost::multiprecision::cpp_int &v) {
        if (v >= std::numeric_limits<int64_t>::min() && v <= std::numeric_limits<int64_t>::max()) {
            return json(v.convert_to<int64_t>());
        }
        return json(v.str());
    };
    return {{"num", as_json(boost::multiprecision::numerator(value))},
            {"den", as_json(boost::multiprecision::denominator(value))}};
}

json operator_to_json(const DiagOperator &op) {
    DiagOperator m = op.to_monomials();
    json terms = json::array();
    for (const auto &[mask, c] : m.terms()) {
        terms.push_back({{"mask", mask_hex(mask)}, {"num", c.num()}, {"log2den", c.log2den()}});
    }
    return {{"layout", layout_to_json(op.layout())}, {"terms", terms}};
}

DiagOperator operator_from_json(const json &j) {
    try {
        WireLayout layout = layout_from_json(j.at("layout"));
        DiagOperator::Terms terms;
        for (const auto &t : j.at("terms")) {
            uint64_t mask = parse_hex(t.at("mask").get<std::string>());
            terms[mask] += Dyadic(t.at("num").get<int64_t>(), t.at("log2den").get<int>());
        }
        return DiagOperator::from_terms(std::move(layout), std::move(terms));
    } catch (const json::exception &e) {
        throw std::invalid_argument(std::string("operator json: ") + e.what());
    }
}

std::string dense_to_csv(const DiagOperator &op) {
    DiagOperator dense = op.to_dense();
    std::ostringstream out;
    out << "index,numerator,log2den\n";
    const auto &v = dense.entries();
    for (size_t b = 0; b < v.size(); b++) {
        out << b << "," << v[b].num() << "," << v[b].log2den() << "\n";
    }
    return out.str();
}

DiagOperator dense_from_csv(const WireLayout &layout, std::string_view csv) {
    if (layout.width() > kMaxDenseWidth) {
        throw std::length_error("dense csv: layout too wide");
    }
    std::vector<Dyadic> entries(size_t{1} << layout.width());
    std::vector<bool> seen(entries.size());
    std::istringstream in{std::string(csv)};
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.starts_with("index")) {
            continue;
        }
        uint64_t index = 0;
        int64_t num = 0;
        int log2den = 0;
        char c1 = 0, c2 = 0;
        std::istringstream row(line);
        if (!(row >> index >> c1 >> num >> c2 >> log2den) || c1 != ',' || c2 != ',') {
            throw std::invalid_argument("dense csv: malformed row '" + line + "'");
        }
        if (index >= entries.size() || seen[index]) {
            throw std::invalid_argument("dense csv: bad or repeated index in row '" + line + "'");
        }
        seen[index] = true;
        entries[index] = Dyadic(num, log2den);
    }
    return DiagOperator::from_dense(layout, std::move(entries));
}

}  // namespace causalloop
