#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qceq/error.hpp"

namespace qceq {

enum class Theory { QC, QCiso, QCancilla, QCground };

const char *theory_name(Theory t);
std::optional<Theory> theory_from_name(const std::string &name);

// Primitive gate kinds. Multi-controlled forms are expressed by attaching
// controls to P, Rx, X and Swap (CNot = X + 1 control, Toffoli = X + 2,
// Fredkin = Swap + 1, MCP/MCRx = P/Rx + controls).
enum class GateKind {
  GlobalPhase, // 0 -> 0, angle
  H,           // 1 -> 1
  P,           // 1 -> 1, angle, controllable
  X,           // 1 -> 1, controllable
  Z,           // 1 -> 1, controllable
  Rx,          // 1 -> 1, angle, controllable
  Swap,        // 2 -> 2, controllable
  Init,        // 0 -> 1, appends a fresh wire
  Free,        // 1 -> 0, releases a |0> wire
  Discard,     // 1 -> 0, traces out a wire
};

const char *gate_kind_name(GateKind k);
bool kind_has_angle(GateKind k);
bool kind_controllable(GateKind k);
/// Angle period: 2*pi for P/GlobalPhase, 4*pi for Rx, 0 otherwise.
double kind_angle_period(GateKind k);

struct Control {
  int wire = 0;
  bool positive = true;

  friend bool operator==(const Control &a, const Control &b) {
    return a.wire == b.wire && a.positive == b.positive;
  }
};

struct Gate {
  GateKind kind = GateKind::H;
  double angle = 0.0;
  std::vector<int> targets;
  std::vector<Control> controls;

  static Gate global_phase(double phi);
  static Gate h(int w);
  static Gate p(double phi, int w);
  static Gate x(int w);
  static Gate z(int w);
  static Gate rx(double theta, int w);
  static Gate swap(int a, int b);
  static Gate cnot(int ctrl, int tgt);
  static Gate toffoli(int c1, int c2, int tgt);
  static Gate fredkin(int ctrl, int a, int b);
  static Gate cp(double phi, int ctrl, int tgt);
  static Gate mcp(double phi, std::vector<int> ctrls, int tgt);
  static Gate mcrx(double theta, std::vector<int> ctrls, int tgt);
  static Gate init();
  static Gate free_wire(int w);
  static Gate discard(int w);

  Gate with_controls(std::vector<Control> cs) const;

  bool is_cnot() const;
  bool is_toffoli() const;
  bool is_structural() const {
    return kind == GateKind::Init || kind == GateKind::Free ||
           kind == GateKind::Discard;
  }
  /// All wires the gate touches (targets then control wires).
  std::vector<int> wires() const;
};

bool same_gate(const Gate &a, const Gate &b, double angle_eps = 1e-9);

/// Flat gate list over a stable-id wire timeline. Input wires are 0..n_in-1;
/// each Init allocates the next unused id and the new wire joins the end of
/// the live-wire (tensor) order. Free/Discard remove their wire from the
/// live order. Wire ids are never reused.
struct Circuit {
  Theory theory = Theory::QC;
  int n_in = 0;
  std::vector<Gate> gates;

  Circuit() = default;
  Circuit(Theory t, int inputs) : theory(t), n_in(inputs) {}

  int init_count() const;
  int removed_count() const;
  int n_out() const { return n_in + init_count() - removed_count(); }
  /// Highest wire id ever allocated + 1.
  int wire_id_bound() const { return n_in + init_count(); }

  /// Live wire ids, in tensor order, after the first `upto` gates.
  std::vector<int> live_wires(std::size_t upto) const;
  std::vector<int> live_wires() const { return live_wires(gates.size()); }

  Circuit &add(Gate g) {
    gates.push_back(std::move(g));
    return *this;
  }
};

/// Empty string when the gate kind is allowed in the theory, else a message.
std::string kind_allowed_message(Theory t, const Gate &g);

/// Error message (with offending gate index) or nullopt when consistent.
std::optional<std::string> validate(const Circuit &c);
void validate_or_throw(const Circuit &c);

Circuit compose_seq(const Circuit &a, const Circuit &b);
Circuit tensor(const Circuit &a, const Circuit &b);
Circuit adjoint(const Circuit &c);

/// Reduce P angles mod 2*pi, Rx mod 4*pi, global phases mod 2*pi.
Circuit canonicalize_angles(const Circuit &c);

/// Rewrite derived gate kinds down to the theory's primitive generators
/// (negative controls removed, X/Z/Rx/Toffoli/multi-controls expanded).
/// For QCground the global-phase bookkeeping of the Rx expansion is dropped.
Circuit expand_shortcuts(const Circuit &c);

/// One fresh control wire is prepended (old wire w becomes w+1); Hadamards
/// and swaps are first rewritten so every remaining gate has a controlled
/// form, then everything is controlled on the new wire. The result satisfies
/// [[result]] = diag(I, [[c]]).
Circuit controlize(const Circuit &c);

/// Structural equality modulo angle canonicalization.
bool circuits_equal(const Circuit &a, const Circuit &b,
                    double angle_eps = 1e-9);

std::string to_string(const Gate &g);

} // namespace qceq
