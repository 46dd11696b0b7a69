#ifndef CAUSALLOOP_DIAGOP_IO_H
#define CAUSALLOOP_DIAGOP_IO_H

#include <string>
#include <string_view>

#include "json.hpp"

#include "causalloop/diagop.h"

namespace causalloop {

// Operator JSON schema:
//   {"layout": [{"name": "I0", "party": 0, "kind": "I", "width": 1}, ...],
//    "terms":  [{"mask": "0x2c", "num": 1, "log2den": 3}, ...]}
// "party" is an integer or "env"; "kind" is "I", "O" or "aux"; "name" is
// optional for I/O wires. Mask bit 0 is the least significant bit of the last
// declared wire. Terms are emitted in increasing mask order.
//
// Dense CSV: header "index,numerator,log2den" then one row per basis index.

nlohmann::json layout_to_json(const WireLayout &layout);
WireLayout layout_from_json(const nlohmann::json &j);

nlohmann::json dyadic_to_json(const Dyadic &value);
nlohmann::json rational_to_json(const Rational &value);

/// Dense operators are written through their monomial expansion.
nlohmann::json operator_to_json(const DiagOperator &op);
/// Throws std::invalid_argument on schema errors.
DiagOperator operator_from_json(const nlohmann::json &j);

std::string dense_to_csv(const DiagOperator &op);
DiagOperator dense_from_csv(const WireLayout &layout, std::string_view csv);

}  // namespace causalloop

#endif
