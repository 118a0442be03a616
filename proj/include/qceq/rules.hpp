#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qceq/circuit.hpp"
#include "qceq/matrix.hpp"
#include "qceq/semantics.hpp"

namespace qceq {

struct RuleInstance {
  std::string rule;
  Circuit lhs, rhs;
  std::vector<double> params;
  int size = 0;
};

// Declarative gate-sequence templates with parameter slots; both the
// instantiator and the rewrite engine read them.
struct PatAngle {
  enum Kind { Const, Free, Neg, Half, NegHalf, Sum, Solved } kind = Const;
  double value = 0;
  int slot = -1, slot2 = -1;

  static PatAngle constant(double v) { return {Const, v, -1, -1}; }
  static PatAngle free(int s) { return {Free, 0, s, -1}; }
  static PatAngle neg(int s) { return {Neg, 0, s, -1}; }
  static PatAngle half(int s) { return {Half, 0, s, -1}; }
  static PatAngle neghalf(int s) { return {NegHalf, 0, s, -1}; }
  static PatAngle sum(int a, int b) { return {Sum, 0, a, b}; }
  static PatAngle solved(int s) { return {Solved, 0, s, -1}; }

  double eval(const std::vector<double> &params,
              const std::vector<double> &solved) const;
};

struct PatGate {
  GateKind kind = GateKind::H;
  PatAngle angle = PatAngle::constant(0);
  std::vector<int> targets; // wire-variable ids; for Init: the created wire
  std::vector<std::pair<int, bool>> controls;
  bool dashed = false; // also controlled by the rule's shared control set
};

enum class SolverKind {
  None,
  EulerZXZ,
  EulerXZX,
  EulerZXZNoPhase,
  Kstar,
  KstarOld,
};

struct Rule {
  std::string name;
  Theory home = Theory::QC;
  bool axiom = false;
  bool retired = false;
  bool identity = false;
  int n_params = 0;
  // Size knob: rules with min_size < max_size scale with qubit/control count.
  int min_size = 0, max_size = 0;
  int n_wire_vars = 0;
  bool has_dashed = false;
  std::vector<PatGate> lhs, rhs;
  SolverKind solver = SolverKind::None;
  std::function<bool(const std::vector<double> &)> param_check;
};

const std::vector<Rule> &rule_catalog();
const Rule &find_rule(const std::string &name); // throws UnknownRule

/// Concretize a rule on wires 0..size-1 (dashed controls first, then the
/// explicit wires, then any Init-created wires).
RuleInstance build_rule_instance(const Rule &r,
                                 const std::vector<double> &params, int size);

RuleInstance instantiate(const std::string &name,
                         const std::vector<double> &params, int size = 0);

/// Solver outputs feeding the rule's Solved angle slots (Euler/K* angles).
std::vector<double> rule_solved_params(const Rule &r,
                                       const std::vector<double> &params);

/// Draw parameters appropriate for the rule (P-type in [0,2pi), Rx-type in
/// [0,4pi)) and a size within its range.
RuleInstance instantiate_random(const Rule &r, std::mt19937_64 &rng,
                                int max_size_cap = 5);

struct SoundnessReport {
  std::string rule;
  int size = 0;
  std::vector<double> params;
  std::string semantics;
  double deviation = 0;
  bool pass = false;
};

/// Evaluates both sides (unitary, or CPTP when the instance needs it) and
/// reports the max deviation.
SoundnessReport soundness_check(const RuleInstance &inst, Tolerance tol = {},
                                int max_qubits = kDefaultMaxQubits);
/// Forces superoperator semantics (used for the QCground reading of rules).
SoundnessReport soundness_check_cptp(const RuleInstance &inst,
                                     Tolerance tol = {},
                                     int max_qubits = kDefaultMaxQubits);

/// Axiom names of each theory's equational presentation.
std::vector<std::string> axiom_set(Theory t);
/// The retired rules (n), (o), K*old.
std::vector<std::string> retired_set();
/// Derived identities provable in (and checked within) the given theory.
std::vector<std::string> identity_set(Theory t);

struct IdentityReport {
  std::string rule;
  int trials = 0;
  double max_deviation = 0;
  bool pass = false;
};

std::vector<IdentityReport> derived_identity_suite(Theory t, int trials,
                                                   std::uint64_t seed,
                                                   Tolerance tol = {});

} // namespace qceq
