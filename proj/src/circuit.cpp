#include "qceq/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qceq/matrix.hpp"

namespace qceq {

const char *theory_name(Theory t) {
  switch (t) {
  case Theory::QC: return "qc";
  case Theory::QCiso: return "qciso";
  case Theory::QCancilla: return "qcancilla";
  case Theory::QCground: return "qcground";
  }
  return "?";
}

std::optional<Theory> theory_from_name(const std::string &name) {
  if (name == "qc") return Theory::QC;
  if (name == "qciso") return Theory::QCiso;
  if (name == "qcancilla") return Theory::QCancilla;
  if (name == "qcground") return Theory::QCground;
  return std::nullopt;
}

const char *gate_kind_name(GateKind k) {
  switch (k) {
  case GateKind::GlobalPhase: return "PHASE";
  case GateKind::H: return "H";
  case GateKind::P: return "P";
  case GateKind::X: return "X";
  case GateKind::Z: return "Z";
  case GateKind::Rx: return "RX";
  case GateKind::Swap: return "SWAP";
  case GateKind::Init: return "INIT";
  case GateKind::Free: return "FREE";
  case GateKind::Discard: return "DISCARD";
  }
  return "?";
}

bool kind_has_angle(GateKind k) {
  return k == GateKind::GlobalPhase || k == GateKind::P || k == GateKind::Rx;
}

bool kind_controllable(GateKind k) {
  return k == GateKind::P || k == GateKind::X || k == GateKind::Z ||
         k == GateKind::Rx || k == GateKind::Swap;
}

double kind_angle_period(GateKind k) {
  if (k == GateKind::Rx) return 4.0 * kPi;
  if (kind_has_angle(k)) return 2.0 * kPi;
  return 0.0;
}

Gate Gate::global_phase(double phi) { return {GateKind::GlobalPhase, phi, {}, {}}; }
Gate Gate::h(int w) { return {GateKind::H, 0.0, {w}, {}}; }
Gate Gate::p(double phi, int w) { return {GateKind::P, phi, {w}, {}}; }
Gate Gate::x(int w) { return {GateKind::X, 0.0, {w}, {}}; }
Gate Gate::z(int w) { return {GateKind::Z, 0.0, {w}, {}}; }
Gate Gate::rx(double theta, int w) { return {GateKind::Rx, theta, {w}, {}}; }
Gate Gate::swap(int a, int b) { return {GateKind::Swap, 0.0, {a, b}, {}}; }
Gate Gate::cnot(int ctrl, int tgt) {
  return {GateKind::X, 0.0, {tgt}, {{ctrl, true}}};
}
Gate Gate::toffoli(int c1, int c2, int tgt) {
  return {GateKind::X, 0.0, {tgt}, {{c1, true}, {c2, true}}};
}
Gate Gate::fredkin(int ctrl, int a, int b) {
  return {GateKind::Swap, 0.0, {a, b}, {{ctrl, true}}};
}
Gate Gate::cp(double phi, int ctrl, int tgt) {
  return {GateKind::P, phi, {tgt}, {{ctrl, true}}};
}
Gate Gate::mcp(double phi, std::vector<int> ctrls, int tgt) {
  Gate g{GateKind::P, phi, {tgt}, {}};
  for (int c : ctrls) g.controls.push_back({c, true});
  return g;
}
Gate Gate::mcrx(double theta, std::vector<int> ctrls, int tgt) {
  Gate g{GateKind::Rx, theta, {tgt}, {}};
  for (int c : ctrls) g.controls.push_back({c, true});
  return g;
}
Gate Gate::init() { return {GateKind::Init, 0.0, {}, {}}; }
Gate Gate::free_wire(int w) { return {GateKind::Free, 0.0, {w}, {}}; }
Gate Gate::discard(int w) { return {GateKind::Discard, 0.0, {w}, {}}; }

Gate Gate::with_controls(std::vector<Control> cs) const {
  Gate g = *this;
  g.controls.insert(g.controls.end(), cs.begin(), cs.end());
  return g;
}

bool Gate::is_cnot() const {
  return kind == GateKind::X && controls.size() == 1 && controls[0].positive;
}

bool Gate::is_toffoli() const {
  return kind == GateKind::X && controls.size() == 2 &&
         controls[0].positive && controls[1].positive;
}

std::vector<int> Gate::wires() const {
  std::vector<int> ws = targets;
  for (const Control &c : controls) ws.push_back(c.wire);
  return ws;
}

namespace {

double angle_dist_mod(double a, double b, double period) {
  if (period <= 0.0) return 0.0;
  double d = std::fmod(a - b, period);
  if (d < 0) d += period;
  return std::min(d, period - d);
}

} // namespace

bool same_gate(const Gate &a, const Gate &b, double angle_eps) {
  if (a.kind != b.kind) return false;
  if (a.kind == GateKind::Swap) {
    // symmetric targets
    auto ta = a.targets, tb = b.targets;
    std::sort(ta.begin(), ta.end());
    std::sort(tb.begin(), tb.end());
    if (ta != tb) return false;
  } else if (a.targets != b.targets) {
    return false;
  }
  // Control order is irrelevant.
  std::vector<Control> ca = a.controls, cb = b.controls;
  auto key = [](const Control &c) { return c.wire * 2 + (c.positive ? 1 : 0); };
  std::sort(ca.begin(), ca.end(),
            [&](auto &l, auto &r) { return key(l) < key(r); });
  std::sort(cb.begin(), cb.end(),
            [&](auto &l, auto &r) { return key(l) < key(r); });
  if (ca != cb) return false;
  if (!kind_has_angle(a.kind)) return true;
  return angle_dist_mod(a.angle, b.angle, kind_angle_period(a.kind)) <=
         angle_eps;
}

int Circuit::init_count() const {
  int n = 0;
  for (const Gate &g : gates)
    if (g.kind == GateKind::Init) ++n;
  return n;
}

int Circuit::removed_count() const {
  int n = 0;
  for (const Gate &g : gates)
    if (g.kind == GateKind::Free || g.kind == GateKind::Discard) ++n;
  return n;
}

std::vector<int> Circuit::live_wires(std::size_t upto) const {
  std::vector<int> order(n_in);
  for (int i = 0; i < n_in; ++i) order[i] = i;
  int next_id = n_in;
  for (std::size_t i = 0; i < upto && i < gates.size(); ++i) {
    const Gate &g = gates[i];
    if (g.kind == GateKind::Init) {
      order.push_back(next_id++);
    } else if (g.kind == GateKind::Free || g.kind == GateKind::Discard) {
      auto it = std::find(order.begin(), order.end(), g.targets.at(0));
      if (it != order.end()) order.erase(it);
    }
  }
  return order;
}

namespace {

bool kind_allowed(Theory t, GateKind k) {
  switch (k) {
  case GateKind::GlobalPhase: return t != Theory::QCground;
  case GateKind::Init: return t != Theory::QC;
  case GateKind::Free: return t == Theory::QCancilla;
  case GateKind::Discard: return t == Theory::QCground;
  default: return true;
  }
}

} // namespace

std::string kind_allowed_message(Theory t, const Gate &g) {
  if (kind_allowed(t, g.kind)) return "";
  return std::string(gate_kind_name(g.kind)) + " not allowed in theory " +
         theory_name(t);
}

std::optional<std::string> validate(const Circuit &c) {
  if (c.n_in < 0) return "negative input arity";
  std::vector<int> order(c.n_in);
  for (int i = 0; i < c.n_in; ++i) order[i] = i;
  int next_id = c.n_in;
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const Gate &g = c.gates[i];
    auto fail = [&](const std::string &msg) {
      return "gate " + std::to_string(i) + " (" + to_string(g) + "): " + msg;
    };
    if (!kind_allowed(c.theory, g.kind))
      return fail(std::string(gate_kind_name(g.kind)) + " not allowed in " +
                  theory_name(c.theory));
    std::size_t want_targets =
        g.kind == GateKind::GlobalPhase ? 0
        : g.kind == GateKind::Swap      ? 2
        : g.kind == GateKind::Init      ? 0
                                        : 1;
    if (g.targets.size() != want_targets) return fail("bad target count");
    if (!g.controls.empty() && !kind_controllable(g.kind))
      return fail("controls not allowed on this kind");
    std::vector<int> ws = g.wires();
    std::sort(ws.begin(), ws.end());
    if (std::adjacent_find(ws.begin(), ws.end()) != ws.end())
      return fail("duplicate wire");
    for (int w : ws)
      if (std::find(order.begin(), order.end(), w) == order.end())
        return fail("wire " + std::to_string(w) + " not live");
    if (g.kind == GateKind::Init) {
      order.push_back(next_id++);
    } else if (g.kind == GateKind::Free || g.kind == GateKind::Discard) {
      order.erase(std::find(order.begin(), order.end(), g.targets[0]));
    }
  }
  return std::nullopt;
}

void validate_or_throw(const Circuit &c) {
  if (auto err = validate(c))
    throw Error(ErrorCode::WireBookkeeping, *err);
}

namespace {

Gate remap_gate(const Gate &g, const std::vector<int> &map) {
  Gate out = g;
  for (int &t : out.targets) t = map.at(static_cast<std::size_t>(t));
  for (Control &c : out.controls) c.wire = map.at(static_cast<std::size_t>(c.wire));
  return out;
}

} // namespace

Circuit compose_seq(const Circuit &a, const Circuit &b) {
  if (a.theory != b.theory)
    throw Error(ErrorCode::TheoryMismatch,
                std::string(theory_name(a.theory)) + " vs " +
                    theory_name(b.theory));
  if (a.n_out() != b.n_in)
    throw Error(ErrorCode::ArityMismatch,
                "first circuit emits " + std::to_string(a.n_out()) +
                    " wires, second expects " + std::to_string(b.n_in));
  Circuit out(a.theory, a.n_in);
  out.gates = a.gates;
  std::vector<int> a_out = a.live_wires();
  // b's wire w maps to a's w-th output for inputs, to a fresh id otherwise.
  std::vector<int> map(static_cast<std::size_t>(b.wire_id_bound()), -1);
  for (int j = 0; j < b.n_in; ++j) map[static_cast<std::size_t>(j)] = a_out[static_cast<std::size_t>(j)];
  int next_id = a.wire_id_bound();
  int b_next = b.n_in;
  for (const Gate &g : b.gates) {
    if (g.kind == GateKind::Init) map[static_cast<std::size_t>(b_next++)] = next_id++;
    out.gates.push_back(remap_gate(g, map));
  }
  return out;
}

Circuit tensor(const Circuit &a, const Circuit &b) {
  if (a.theory != b.theory)
    throw Error(ErrorCode::TheoryMismatch,
                std::string(theory_name(a.theory)) + " vs " +
                    theory_name(b.theory));
  Circuit out(a.theory, a.n_in + b.n_in);
  int next_id = out.n_in;
  std::vector<int> amap(static_cast<std::size_t>(a.wire_id_bound()), -1);
  for (int j = 0; j < a.n_in; ++j) amap[static_cast<std::size_t>(j)] = j;
  int a_next = a.n_in;
  for (const Gate &g : a.gates) {
    if (g.kind == GateKind::Init) amap[static_cast<std::size_t>(a_next++)] = next_id++;
    out.gates.push_back(remap_gate(g, amap));
  }
  std::vector<int> bmap(static_cast<std::size_t>(b.wire_id_bound()), -1);
  for (int j = 0; j < b.n_in; ++j) bmap[static_cast<std::size_t>(j)] = a.n_in + j;
  int b_next = b.n_in;
  for (const Gate &g : b.gates) {
    if (g.kind == GateKind::Init) bmap[static_cast<std::size_t>(b_next++)] = next_id++;
    out.gates.push_back(remap_gate(g, bmap));
  }
  // Wires created by Init join the end of the live order, which interleaves
  // the two halves; restore the a-then-b tensor order with explicit swaps.
  std::vector<int> cur = out.live_wires();
  std::vector<int> want;
  {
    std::vector<int> a_out = a.live_wires();
    for (int w : a_out) want.push_back(amap[static_cast<std::size_t>(w)]);
    std::vector<int> b_out = b.live_wires();
    for (int w : b_out) want.push_back(bmap[static_cast<std::size_t>(w)]);
  }
  // cur[p] holds the state that belongs at position index_in(want); sort by
  // swapping states until position p carries want[p]'s state.
  std::vector<int> holds = cur; // holds[p] = id whose output state is at p
  for (std::size_t p = 0; p < want.size(); ++p) {
    std::size_t q = static_cast<std::size_t>(
        std::find(holds.begin(), holds.end(), want[p]) - holds.begin());
    if (q == p) continue;
    out.gates.push_back(Gate::swap(cur[p], cur[q]));
    std::swap(holds[p], holds[q]);
  }
  return out;
}

Circuit adjoint(const Circuit &c) {
  for (const Gate &g : c.gates)
    if (g.is_structural())
      throw Error(ErrorCode::UnsupportedTheory,
                  "adjoint is defined for vanilla circuits only");
  Circuit out(c.theory, c.n_in);
  for (auto it = c.gates.rbegin(); it != c.gates.rend(); ++it) {
    Gate g = *it;
    if (kind_has_angle(g.kind)) g.angle = -g.angle;
    out.gates.push_back(std::move(g));
  }
  return out;
}

Circuit canonicalize_angles(const Circuit &c) {
  Circuit out = c;
  for (Gate &g : out.gates) {
    double period = kind_angle_period(g.kind);
    if (period <= 0.0) continue;
    g.angle = std::fmod(g.angle, period);
    if (g.angle < 0) g.angle += period;
    if (g.angle >= period) g.angle = 0.0;
  }
  return out;
}

namespace {

std::vector<int> control_wires(const Gate &g) {
  std::vector<int> ws;
  for (const Control &c : g.controls) ws.push_back(c.wire);
  return ws;
}

void expand_into(const Gate &g, Theory theory, std::vector<Gate> &out);

void emit_all(const std::vector<Gate> &gs, Theory theory,
              std::vector<Gate> &out) {
  for (const Gate &g : gs) expand_into(g, theory, out);
}

void expand_into(const Gate &g, Theory theory, std::vector<Gate> &out) {
  // Negative controls first: bullet notation is X-conjugation.
  for (const Control &c : g.controls) {
    if (!c.positive) {
      Gate pos = g;
      for (Control &pc : pos.controls)
        if (pc.wire == c.wire) pc.positive = true;
      expand_into(Gate::x(c.wire), theory, out);
      expand_into(pos, theory, out);
      expand_into(Gate::x(c.wire), theory, out);
      return;
    }
  }
  std::vector<int> ctrls = control_wires(g);
  switch (g.kind) {
  case GateKind::GlobalPhase:
  case GateKind::H:
  case GateKind::Init:
  case GateKind::Free:
  case GateKind::Discard:
    out.push_back(g);
    return;
  case GateKind::Z:
    expand_into(Gate::mcp(kPi, ctrls, g.targets[0]), theory, out);
    return;
  case GateKind::X: {
    int t = g.targets[0];
    if (ctrls.size() == 1) {
      out.push_back(g); // CNot is primitive
      return;
    }
    if (ctrls.empty()) {
      emit_all({Gate::h(t), Gate::p(kPi, t), Gate::h(t)}, theory, out);
      return;
    }
    // Toffoli and beyond: H-conjugated multi-controlled phase.
    emit_all({Gate::h(t), Gate::mcp(kPi, ctrls, t), Gate::h(t)}, theory, out);
    return;
  }
  case GateKind::Rx: {
    int t = g.targets[0];
    if (ctrls.empty()) {
      if (theory != Theory::QCground)
        out.push_back(Gate::global_phase(-g.angle / 2.0));
      emit_all({Gate::h(t), Gate::p(g.angle, t), Gate::h(t)}, theory, out);
      return;
    }
    // Split one control c: Rx(a/2) on the rest, then a CZ written as
    // H-conjugated CNot, then Rx(-a/2), then the CZ again.
    int c = ctrls.front();
    std::vector<int> rest(ctrls.begin() + 1, ctrls.end());
    emit_all({Gate::mcrx(g.angle / 2.0, rest, t), Gate::h(t),
              Gate::cnot(c, t), Gate::h(t), Gate::mcrx(-g.angle / 2.0, rest, t),
              Gate::h(t), Gate::cnot(c, t), Gate::h(t)},
             theory, out);
    return;
  }
  case GateKind::P: {
    int t = g.targets[0];
    if (ctrls.empty()) {
      out.push_back(g);
      return;
    }
    // Controlled phase splits into a smaller phase on one control plus an
    // H-conjugated controlled X-rotation on the target.
    int c = ctrls.front();
    std::vector<int> rest(ctrls.begin() + 1, ctrls.end());
    emit_all({Gate::mcp(g.angle / 2.0, rest, c), Gate::h(t),
              Gate::mcrx(g.angle, ctrls, t), Gate::h(t)},
             theory, out);
    return;
  }
  case GateKind::Swap: {
    int x = g.targets[0], y = g.targets[1];
    if (ctrls.empty()) {
      out.push_back(g); // prop-structural, kept primitive
      return;
    }
    std::vector<int> xctrls = ctrls;
    xctrls.push_back(x);
    Gate mid{GateKind::X, 0.0, {y}, {}};
    for (int c : xctrls) mid.controls.push_back({c, true});
    emit_all({Gate::cnot(y, x), mid, Gate::cnot(y, x)}, theory, out);
    return;
  }
  }
}

} // namespace

Circuit expand_shortcuts(const Circuit &c) {
  Circuit out(c.theory, c.n_in);
  for (const Gate &g : c.gates) expand_into(g, c.theory, out.gates);
  return out;
}

Circuit controlize(const Circuit &c) {
  if (c.theory != Theory::QC)
    throw Error(ErrorCode::UnsupportedTheory,
                "controlisation acts on vanilla circuits");
  Circuit flat = expand_shortcuts(c);
  Circuit out(Theory::QC, c.n_in + 1);
  auto shift = [](int w) { return w + 1; };
  std::vector<Gate> staged;
  for (const Gate &g : flat.gates) {
    if (g.kind == GateKind::H) {
      int t = shift(g.targets[0]);
      staged.push_back(Gate::p(kPi / 2.0, t));
      staged.push_back(Gate::rx(kPi / 2.0, t));
      staged.push_back(Gate::p(kPi / 2.0, t));
    } else if (g.kind == GateKind::Swap && g.controls.empty()) {
      int x = shift(g.targets[0]), y = shift(g.targets[1]);
      staged.push_back(Gate::cnot(x, y));
      staged.push_back(Gate::cnot(y, x));
      staged.push_back(Gate::cnot(x, y));
    } else {
      Gate s = g;
      for (int &t : s.targets) t = shift(t);
      for (Control &ctl : s.controls) ctl.wire = shift(ctl.wire);
      staged.push_back(std::move(s));
    }
  }
  for (Gate &g : staged) {
    if (g.kind == GateKind::GlobalPhase) {
      out.gates.push_back(Gate::p(g.angle, 0));
    } else {
      g.controls.insert(g.controls.begin(), Control{0, true});
      out.gates.push_back(std::move(g));
    }
  }
  return out;
}

bool circuits_equal(const Circuit &a, const Circuit &b, double angle_eps) {
  if (a.theory != b.theory || a.n_in != b.n_in ||
      a.gates.size() != b.gates.size())
    return false;
  for (std::size_t i = 0; i < a.gates.size(); ++i)
    if (!same_gate(a.gates[i], b.gates[i], angle_eps)) return false;
  return true;
}

std::string to_string(const Gate &g) {
  std::ostringstream out;
  out.precision(17);
  if (!g.controls.empty()) {
    out << "CTRL[";
    for (std::size_t i = 0; i < g.controls.size(); ++i) {
      if (i) out << ',';
      out << (g.controls[i].positive ? '+' : '-') << g.controls[i].wire;
    }
    out << "] ";
  }
  out << gate_kind_name(g.kind);
  if (kind_has_angle(g.kind)) out << '(' << g.angle << ')';
  for (int t : g.targets) out << ' ' << t;
  return out.str();
}

} // namespace qceq
