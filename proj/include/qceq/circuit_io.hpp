#pragma once

#include <iosfwd>
#include <string>

#include "qceq/circuit.hpp"

namespace qceq {

/// Text circuit format: a `qubits <n>` header, an optional
/// `theory <qc|qciso|qcancilla|qcground>` header (default qc), then one gate
/// per line (H 0, P(0.785398) 2, CX 0 1, CCX 0 1 2, SWAP 1 2, CSWAP 0 1 2,
/// X 0, Z 0, RX(1.2) 0, PHASE(3.141593), INIT, FREE 3, DISCARD 2,
/// CTRL[+0,-2] P(0.5) 3). '#' starts a comment. Wire-bookkeeping violations
/// are rejected with line numbers.
Circuit parse_circuit_text(std::istream &in);
Circuit parse_circuit_text(const std::string &text);
std::string circuit_to_text(const Circuit &c);

/// JSON mirror of the same schema.
std::string circuit_to_json(const Circuit &c, int indent = 2);
Circuit circuit_from_json(const std::string &json);

/// Loads either format (sniffs for a leading '{').
Circuit load_circuit(const std::string &path);
void save_circuit(const Circuit &c, const std::string &path);

} // namespace qceq
