#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qceq/circuit.hpp"
#include "qceq/rules.hpp"

namespace qceq {

/// A located rule embedding. `positions` are the matched gate indices in
/// ascending order (anchor first); every gate skipped between them commutes
/// structurally (disjoint wires) with the gates matched after it.
struct Match {
  std::string rule;
  bool l2r = true;
  std::size_t anchor = 0;
  std::vector<std::size_t> positions;
  std::vector<int> wire_binding; // wire var -> circuit wire id (-1 unbound)
  std::vector<int> dashed_wires;
  std::vector<double> params; // bound angle slots (LHS slots, or RHS when r2l)
};

inline constexpr std::size_t kMatchWindow = 8;

/// All embeddings of the rule's matched side (LHS for l2r, RHS for r2l)
/// within a bounded commutation window. The pseudo-rule "BULLET" matches any
/// two adjacent gates that commute semantically.
std::vector<Match> find_matches(const Circuit &c, const std::string &rule,
                                bool l2r = true,
                                std::size_t window = kMatchWindow);

struct MatchHints {
  std::optional<std::size_t> anchor;
  std::size_t anchor_slack = 2;
  std::vector<int> wires;    // bindings for wire vars 0,1,...
  std::vector<double> params;
};

std::vector<Match> find_matches_hinted(const Circuit &c,
                                       const std::string &rule, bool l2r,
                                       const MatchHints &hints,
                                       std::size_t window = kMatchWindow);

/// Replace the matched slice by the rule's other side (solver-filled for the
/// Euler/K* family in the L2R direction). Throws StaleMatch when the match
/// no longer fits the circuit.
Circuit apply_match(const Circuit &c, const Match &m);

/// Canonical gate ordering: earliest possible layer under the wire-conflict
/// partial order, ties broken by lowest wire id. Idempotent and
/// semantics-preserving. Structural gates keep their relative order.
Circuit deformation_normal_form(const Circuit &c);

struct DerivationStep {
  std::string rule;
  bool l2r = true;
  std::optional<std::size_t> anchor;
  std::vector<int> wires;
  std::vector<double> params;
};

struct Derivation {
  std::string name;
  Circuit start;
  std::vector<DerivationStep> steps;
  Circuit end;
};

/// Script format: `derivation <name>`, `start <file>`,
/// `step <RULE> <L2R|R2L> [@<anchor>] [wires=w0,w1,...] [params=p0,...]`,
/// `end <file>`. Paths are resolved relative to the script.
Derivation parse_derivation_file(const std::string &path);

struct StepReport {
  std::size_t index = 0;
  std::string rule;
  bool ok = false;
  double deviation = 0;
  std::string message;
};

struct ReplayReport {
  std::string name;
  bool success = false;
  std::vector<StepReport> steps;
  std::string message;
  Circuit result;
};

/// Executes the steps in order; every intermediate is semantically
/// spot-checked, and the final circuit must equal the expected end modulo
/// deformation normal form.
ReplayReport replay(const Derivation &d,
                    int max_qubits = kDefaultMaxQubits,
                    bool semantic_checks = true);

} // namespace qceq
