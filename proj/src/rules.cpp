#include "qceq/rules.hpp"

#include <algorithm>
#include <cmath>

#include "qceq/angles.hpp"

namespace qceq {

double PatAngle::eval(const std::vector<double> &params,
                      const std::vector<double> &solved) const {
  switch (kind) {
  case Const: return value;
  case Free: return params.at(static_cast<std::size_t>(slot));
  case Neg: return -params.at(static_cast<std::size_t>(slot));
  case Half: return params.at(static_cast<std::size_t>(slot)) / 2.0;
  case NegHalf: return -params.at(static_cast<std::size_t>(slot)) / 2.0;
  case Sum:
    return params.at(static_cast<std::size_t>(slot)) +
           params.at(static_cast<std::size_t>(slot2));
  case Solved: return solved.at(static_cast<std::size_t>(slot));
  }
  return 0;
}

namespace {

using PA = PatAngle;

PatGate pg(GateKind k, PA a, std::vector<int> tgts,
           std::vector<std::pair<int, bool>> ctrls = {}, bool dashed = false) {
  return {k, a, std::move(tgts), std::move(ctrls), dashed};
}
PatGate pH(int v) { return pg(GateKind::H, PA::constant(0), {v}); }
PatGate pX(int v, std::vector<std::pair<int, bool>> c = {}, bool d = false) {
  return pg(GateKind::X, PA::constant(0), {v}, std::move(c), d);
}
PatGate pZ(int v, std::vector<std::pair<int, bool>> c = {}, bool d = false) {
  return pg(GateKind::Z, PA::constant(0), {v}, std::move(c), d);
}
PatGate pP(PA a, int v, std::vector<std::pair<int, bool>> c = {},
           bool d = false) {
  return pg(GateKind::P, a, {v}, std::move(c), d);
}
PatGate pRx(PA a, int v, std::vector<std::pair<int, bool>> c = {},
            bool d = false) {
  return pg(GateKind::Rx, a, {v}, std::move(c), d);
}
PatGate pSwap(int a, int b, std::vector<std::pair<int, bool>> c = {},
              bool d = false) {
  return pg(GateKind::Swap, PA::constant(0), {a, b}, std::move(c), d);
}
PatGate pPhase(PA a) { return pg(GateKind::GlobalPhase, a, {}); }
PatGate pInit(int v) { return pg(GateKind::Init, PA::constant(0), {v}); }
PatGate pFree(int v) { return pg(GateKind::Free, PA::constant(0), {v}); }
PatGate pDiscard(int v) { return pg(GateKind::Discard, PA::constant(0), {v}); }

int count_created(const std::vector<PatGate> &side) {
  int n = 0;
  for (const PatGate &g : side)
    if (g.kind == GateKind::Init) ++n;
  return n;
}

Matrix mat_rx2(double t) {
  Matrix m(2, 2);
  Complex c(std::cos(t / 2), 0), s(0, -std::sin(t / 2));
  m << c, s, s, c;
  return m;
}

Matrix mat_p2(double a) {
  Matrix m(2, 2);
  m << 1, 0, 0, std::polar(1.0, a);
  return m;
}

} // namespace

std::vector<double> rule_solved_params(const Rule &r,
                                       const std::vector<double> &params) {
  switch (r.solver) {
  case SolverKind::None: return {};
  case SolverKind::EulerZXZ:
  case SolverKind::EulerZXZNoPhase: {
    Matrix u = mat_rx2(params[2]) * mat_p2(params[1]) * mat_rx2(params[0]);
    EulerAngles e = euler_zxz(u);
    return {e.b0, e.b1, e.b2, e.b3};
  }
  case SolverKind::EulerXZX: {
    Matrix u = mat_p2(params[2]) * mat_rx2(params[1]) * mat_p2(params[0]);
    EulerAngles e = euler_xzx(u);
    return {e.b0, e.b1, e.b2, e.b3};
  }
  case SolverKind::Kstar: {
    std::array<double, 4> g{params[0], params[1], params[2], params[3]};
    KstarAngles k = solve_kstar(g);
    return std::vector<double>(k.delta.begin(), k.delta.end());
  }
  case SolverKind::KstarOld: {
    std::array<double, 4> g{params[0], params[1], params[2], params[3]};
    KstarOldAngles k = kstar_old_from_new(solve_kstar(g));
    return std::vector<double>(k.delta.begin(), k.delta.end());
  }
  }
  return {};
}

namespace {

int solver_output_count(SolverKind k) {
  switch (k) {
  case SolverKind::None: return 0;
  case SolverKind::EulerZXZ:
  case SolverKind::EulerXZX:
  case SolverKind::EulerZXZNoPhase: return 4;
  case SolverKind::Kstar: return 8;
  case SolverKind::KstarOld: return 9;
  }
  return 0;
}

void check_explicit_solved(const Rule &r, const std::vector<double> &solved) {
  std::string why;
  switch (r.solver) {
  case SolverKind::Kstar: {
    std::array<double, 8> d;
    std::copy_n(solved.begin(), 8, d.begin());
    if (!kstar_is_canonical(d, &why))
      throw Error(ErrorCode::BadParameters, r.name + ": " + why);
    return;
  }
  case SolverKind::KstarOld: {
    std::array<double, 9> d;
    std::copy_n(solved.begin(), 9, d.begin());
    if (!kstar_old_is_canonical(d, &why))
      throw Error(ErrorCode::BadParameters, r.name + ": " + why);
    return;
  }
  case SolverKind::EulerZXZ:
  case SolverKind::EulerXZX:
  case SolverKind::EulerZXZNoPhase: {
    double b0 = solved[0], b1 = solved[1], b2 = solved[2], b3 = solved[3];
    bool ok = b1 >= 0 && b1 < kPi && b0 >= 0 && b0 < kTau && b2 >= 0 &&
              b2 < kTau && b3 >= 0 && b3 < kTau;
    if ((angle_is(snap_angle(b2), 0) || angle_is(snap_angle(b2), kPi)) &&
        !angle_is(snap_angle(b1), 0))
      ok = false;
    if (!ok)
      throw Error(ErrorCode::BadParameters,
                  r.name + ": explicit Euler angles are not canonical");
    return;
  }
  case SolverKind::None: return;
  }
}

} // namespace

RuleInstance build_rule_instance(const Rule &r,
                                 const std::vector<double> &params_in,
                                 int size) {
  // Solver rules also accept explicit right-hand-side angles appended to the
  // free parameters; those are validated against the canonicity clauses.
  std::vector<double> params = params_in;
  std::vector<double> explicit_solved;
  int extra = solver_output_count(r.solver);
  if (extra &&
      static_cast<int>(params_in.size()) == r.n_params + extra) {
    explicit_solved.assign(params_in.begin() + r.n_params, params_in.end());
    params.assign(params_in.begin(), params_in.begin() + r.n_params);
    check_explicit_solved(r, explicit_solved);
  }
  if (static_cast<int>(params.size()) != r.n_params)
    throw Error(ErrorCode::BadParameters,
                r.name + " expects " + std::to_string(r.n_params) +
                    " parameter(s)");
  if (r.param_check && !r.param_check(params))
    throw Error(ErrorCode::BadParameters,
                r.name + ": parameters outside the documented range");
  if (size == 0) size = r.min_size;
  if (size < r.min_size || (r.max_size && size > r.max_size))
    throw Error(ErrorCode::BadParameters,
                r.name + ": size " + std::to_string(size) + " out of range");
  std::vector<double> solved =
      explicit_solved.empty() ? rule_solved_params(r, params)
                              : explicit_solved;

  const int ncreated = count_created(r.lhs);
  const int ndashed = size - r.n_wire_vars;
  if (ndashed < 0)
    throw Error(ErrorCode::BadParameters, r.name + ": size too small");
  const int n_in = size - ncreated;
  const int explicit_inputs = r.n_wire_vars - ncreated;
  auto wire_of = [&](int var) {
    if (var < explicit_inputs) return ndashed + var;
    return n_in + (var - explicit_inputs); // created ids follow the inputs
  };

  auto build_side = [&](const std::vector<PatGate> &side) {
    Circuit c(r.home, n_in);
    for (const PatGate &g : side) {
      if (g.kind == GateKind::Init) {
        c.add(Gate::init());
        continue;
      }
      Gate out;
      out.kind = g.kind;
      if (kind_has_angle(g.kind)) out.angle = g.angle.eval(params, solved);
      for (int v : g.targets) out.targets.push_back(wire_of(v));
      for (auto [v, pos] : g.controls)
        out.controls.push_back({wire_of(v), pos});
      if (g.dashed)
        for (int w = 0; w < ndashed; ++w) out.controls.push_back({w, true});
      c.add(std::move(out));
    }
    return c;
  };

  RuleInstance inst;
  inst.rule = r.name;
  inst.params = params;
  inst.size = size;
  inst.lhs = build_side(r.lhs);
  inst.rhs = build_side(r.rhs);
  return inst;
}

namespace {

std::vector<Rule> make_catalog() {
  std::vector<Rule> rules;
  auto add = [&](Rule r) { rules.push_back(std::move(r)); };
  const double pi = kPi;

  // ---- QC axioms ---------------------------------------------------------
  {
    Rule r;
    r.name = "A";
    r.axiom = true;
    r.n_params = 1;
    r.param_check = [](const std::vector<double> &p) {
      return angle_is(snap_angle(p[0]), 0, 1e-9) ||
             angle_is(snap_angle(p[0]), kTau, 1e-9);
    };
    r.lhs = {pPhase(PA::free(0))};
    add(r);
  }
  {
    Rule r;
    r.name = "B";
    r.axiom = true;
    r.n_params = 2;
    r.lhs = {pPhase(PA::free(0)), pPhase(PA::free(1))};
    r.rhs = {pPhase(PA::sum(0, 1))};
    add(r);
  }
  {
    Rule r;
    r.name = "C";
    r.axiom = true;
    r.n_wire_vars = 1;
    r.min_size = r.max_size = 1;
    r.lhs = {pH(0), pH(0)};
    add(r);
  }
  {
    Rule r;
    r.name = "D";
    r.axiom = true;
    r.n_wire_vars = 1;
    r.min_size = r.max_size = 1;
    r.lhs = {pP(PA::constant(0), 0)};
    add(r);
  }
  {
    Rule r;
    r.name = "E";
    r.axiom = true;
    r.n_wire_vars = 2;
    r.min_size = r.max_size = 2;
    r.lhs = {pX(1, {{0, true}}), pX(0, {{1, true}}), pX(1, {{0, true}})};
    r.rhs = {pSwap(0, 1)};
    add(r);
  }
  {
    Rule r;
    r.name = "F";
    r.axiom = true;
    r.n_wire_vars = 3;
    r.min_size = r.max_size = 3;
    r.lhs = {pX(2, {{0, true}}), pX(2, {{1, true}})};
    r.rhs = {pX(1, {{0, true}}), pX(2, {{1, true}}), pX(1, {{0, true}})};
    add(r);
  }
  {
    Rule r;
    r.name = "G";
    r.axiom = true;
    r.n_params = 1;
    r.n_wire_vars = 2;
    r.min_size = r.max_size = 2;
    r.lhs = {pX(1, {{0, true}}), pP(PA::free(0), 0), pX(1, {{0, true}})};
    r.rhs = {pP(PA::free(0), 0)};
    add(r);
  }
  {
    Rule r;
    r.name = "H";
    r.axiom = true;
    r.n_wire_vars = 2;
    r.min_size = r.max_size = 2;
    r.lhs = {pH(1), pX(1, {{0, true}}), pH(1)};
    r.rhs = {pP(PA::constant(pi), 1, {{0, true}})};
    add(r);
  }
  {
    Rule r;
    r.name = "I";
    r.axiom = true;
    r.n_wire_vars = 1;
    r.min_size = r.max_size = 1;
    r.lhs = {pH(0)};
    r.rhs = {pP(PA::constant(pi / 2), 0), pRx(PA::constant(pi / 2), 0),
             pP(PA::constant(pi / 2), 0)};
    add(r);
  }
  {
    Rule r;
    r.name = "J";
    r.axiom = true;
    r.n_params = 3;
    r.n_wire_vars = 1;
    r.min_size = r.max_size = 1;
    r.solver = SolverKind::EulerZXZ;
    r.lhs = {pRx(PA::free(0), 0), pP(PA::free(1), 0), pRx(PA::free(2), 0)};
    r.rhs = {pPhase(PA::solved(0)), pP(PA::solved(1), 0),
             pRx(PA::solved(2), 0), pP(PA::solved(3), 0)};
    add(r);
  }
  {
    Rule r;
    r.name = "J'";
    r.home = Theory::QCground;
    r.axiom = true;
    r.n_params = 3;
    r.n_wire_vars = 1;
    r.min_size = r.max_size = 1;
    r.solver = SolverKind::EulerZXZNoPhase;
    r.lhs = {pRx(PA::free(0), 0), pP(PA::free(1), 0), pRx(PA::free(2), 0)};
    r.rhs = {pP(PA::solved(1), 0), pRx(PA::solved(2), 0),
             pP(PA::solved(3), 0)};
    add(r);
  }
  auto kstar_lhs_pat = []() {
    return std::vector<PatGate>{pRx(PA::free(0), 0, {{1, true}}, true),
                                pP(PA::free(1), 1, {{0, true}}, true),
                                pRx(PA::free(2), 1, {{0, true}}, true),
                                pRx(PA::free(3), 0, {{1, true}}, true)};
  };
  auto kstar_rhs_pat = []() {
    return std::vector<PatGate>{pP(PA::solved(0), 1, {{0, true}}, true),
                                pP(PA::solved(1), 1, {}, true),
                                pRx(PA::solved(2), 1, {{0, true}}, true),
                                pRx(PA::solved(3), 0, {{1, true}}, true),
                                pP(PA::solved(4), 1, {{0, true}}, true),
                                pRx(PA::solved(5), 1, {{0, true}}, true),
                                pP(PA::solved(6), 1, {{0, true}}, true),
                                pP(PA::solved(7), 0, {}, true)};
  };
  {
    Rule r;
    r.name = "K*";
    r.axiom = true;
    r.n_params = 4;
    r.n_wire_vars = 2;
    r.has_dashed = true;
    r.min_size = 2;
    r.max_size = 11;
    r.solver = SolverKind::Kstar;
    r.lhs = kstar_lhs_pat();
    r.rhs = kstar_rhs_pat();
    add(r);
  }
  {
    Rule r;
    r.name = "K2";
    r.axiom = true;
    r.n_params = 4;
    r.n_wire_vars = 2;
    r.min_size = r.max_size = 2;
    r.solver = SolverKind::Kstar;
    r.lhs = kstar_lhs_pat();
    r.rhs = kstar_rhs_pat();
    add(r);
  }
  {
    Rule r;
    r.name = "K*old";
    r.retired = true;
    r.n_params = 4;
    r.n_wire_vars = 2;
    r.has_dashed = true;
    r.min_size = 2;
    r.max_size = 11;
    r.solver = SolverKind::KstarOld;
    r.lhs = kstar_lhs_pat();
    r.rhs = kstar_rhs_pat();
    r.rhs.push_back(pP(PA::solved(8), 1, {}, true));
    add(r);
  }
  // ---- init / discard axioms ---------------------------------------------
  {
    Rule r;
    r.name = "L";
    r.home = Theory::QCiso;
    r.axiom = true;
    r.n_params = 1;
    r.n_wire_vars = 1;
    r.min_size = r.max_size = 1;
    r.lhs = {pInit(0), pP(PA::free(0), 0)};
    r.rhs = {pInit(0)};
    add(r);
  }
  {
    Rule r;
    r.name = "M";
    r.home = Theory::QCiso;
    r.axiom = true;
    r.n_wire_vars = 2;
    r.min_size = r.max_size = 2;
    r.lhs = {pInit(1), pX(0, {{1, true}})};
    r.rhs = {pInit(1)};
    add(r);
  }
  {
    Rule r;
    r.name = "N";
    r.home = Theory::QCancilla;
    r.axiom = true;
    r.n_wire_vars = 1;
    r.min_size = r.max_size = 1;
    r.lhs = {pInit(0), pFree(0)};
    add(r);
  }
  {
    Rule r;
    r.name = "O";
    r.home = Theory::QCground;
    r.axiom = true;
    r.n_wire_vars = 1;
    r.min_size = r.max_size = 1;
    r.lhs = {pH(0), pDiscard(0)};
    r.rhs = {pDiscard(0)};
    add(r);
  }
  {
    Rule r;
    r.name = "P";
    r.home = Theory::QCground;
    r.axiom = true;
    r.n_params = 1;
    r.n_wire_vars = 1;
    r.min_size = r.max_size = 1;
    r.lhs = {pP(PA::free(0), 0), pDiscard(0)};
    r.rhs = {pDiscard(0)};
    add(r);
  }
  {
    Rule r;
    r.name = "Q";
    r.home = Theory::QCground;
    r.axiom = true;
    r.n_wire_vars = 1;
    r.min_size = r.max_size = 1;
    r.lhs = {pInit(0), pDiscard(0)};
    add(r);
  }
  {
    Rule r;
    r.name = "R";
    r.home = Theory::QCground;
    r.axiom = true;
    r.n_wire_vars = 2;
    r.min_size = r.max_size = 2;
    r.lhs = {pX(1, {{0, true}}), pDiscard(0), pDiscard(1)};
    r.rhs = {pDiscard(0), pDiscard(1)};
    add(r);
  }
  // ---- retired rules (n), (o): the X-gadget commutations ------------------
  {
    Rule r;
    r.name = "n";
    r.retired = true;
    r.n_params = 2;
    r.n_wire_vars = 2;
    r.min_size = r.max_size = 2;
    r.lhs = {pRx(PA::free(0), 0), pX(1, {{0, true}}), pRx(PA::free(1), 0),
             pX(1, {{0, true}})};
    r.rhs = {pX(1, {{0, true}}), pRx(PA::free(1), 0), pX(1, {{0, true}}),
             pRx(PA::free(0), 0)};
    add(r);
  }
  {
    Rule r;
    r.name = "o";
    r.retired = true;
    r.n_params = 2;
    r.n_wire_vars = 3;
    r.min_size = r.max_size = 3;
    r.lhs = {pX(1, {{0, true}}), pRx(PA::free(0), 0), pX(1, {{0, true}}),
             pX(2, {{0, true}}), pRx(PA::free(1), 0), pX(2, {{0, true}})};
    r.rhs = {pX(2, {{0, true}}), pRx(PA::free(1), 0), pX(2, {{0, true}}),
             pX(1, {{0, true}}), pRx(PA::free(0), 0), pX(1, {{0, true}})};
    add(r);
  }
  // ---- shortcut definitions (Fig. 1) --------------------------------------
  auto identity_rule = [&](const char *name, int nv, std::vector<PatGate> lhs,
                           std::vector<PatGate> rhs, int np = 0,
                           bool dashed = false, int max_extra = 2,
                           Theory home = Theory::QC) {
    Rule r;
    r.name = name;
    r.home = home;
    r.identity = true;
    r.n_params = np;
    r.n_wire_vars = nv;
    r.has_dashed = dashed;
    r.min_size = nv;
    r.max_size = dashed ? nv + max_extra : nv;
    r.lhs = std::move(lhs);
    r.rhs = std::move(rhs);
    add(r);
  };
  identity_rule("RXdef", 1, {pRx(PA::free(0), 0)},
                {pPhase(PA::neghalf(0)), pH(0), pP(PA::free(0), 0), pH(0)}, 1);
  identity_rule("Zdef", 1, {pZ(0)}, {pP(PA::constant(pi), 0)});
  identity_rule("Xdef", 1, {pX(0)}, {pH(0), pZ(0), pH(0)});
  identity_rule("MCRXdef", 2, {pRx(PA::free(0), 1, {{0, true}}, true)},
                {pRx(PA::half(0), 1, {}, true), pH(1), pX(1, {{0, true}}),
                 pH(1), pRx(PA::neghalf(0), 1, {}, true), pH(1),
                 pX(1, {{0, true}}), pH(1)},
                1, true);
  identity_rule("MCPdef", 2, {pP(PA::free(0), 1, {{0, true}}, true)},
                {pP(PA::half(0), 0, {}, true), pH(1),
                 pRx(PA::free(0), 1, {{0, true}}, true), pH(1)},
                1, true);
  identity_rule("TOFdef", 3, {pX(2, {{0, true}, {1, true}})},
                {pH(2), pP(PA::constant(pi), 2, {{0, true}, {1, true}}),
                 pH(2)});
  identity_rule("MCPalt", 2, {pP(PA::free(0), 1, {{0, true}}, true)},
                {pP(PA::half(0), 1, {}, true), pX(1, {{0, true}}),
                 pP(PA::neghalf(0), 1, {}, true), pX(1, {{0, true}}),
                 pP(PA::half(0), 0, {}, true)},
                1, true);
  identity_rule("Fredkindef", 3, {pSwap(1, 2, {{0, true}})},
                {pX(1, {{2, true}}), pX(2, {{0, true}, {1, true}}),
                 pX(1, {{2, true}})});
  // ---- Fig. 3 identities ---------------------------------------------------
  identity_rule("XX", 1, {pX(0), pX(0)}, {});
  identity_rule("ZZ", 1, {pZ(0), pZ(0)}, {});
  identity_rule("RX0", 1, {pRx(PA::constant(0), 0)}, {});
  identity_rule("Zminuspi", 1, {pP(PA::constant(-pi), 0)}, {pZ(0)});
  identity_rule("Paddition", 1, {pP(PA::free(0), 0), pP(PA::free(1), 0)},
                {pP(PA::sum(0, 1), 0)}, 2);
  identity_rule("RXaddition", 1, {pRx(PA::free(0), 0), pRx(PA::free(1), 0)},
                {pRx(PA::sum(0, 1), 0)}, 2);
  identity_rule("CNOTCNOT", 2, {pX(1, {{0, true}}), pX(1, {{0, true}})}, {});
  identity_rule("CNOTHH", 2,
                {pH(0), pH(1), pX(1, {{0, true}}), pH(0), pH(1)},
                {pX(0, {{1, true}})});
  identity_rule("CNOTSWAP", 2, {pX(1, {{0, true}})},
                {pX(0, {{1, true}}), pSwap(0, 1), pX(0, {{1, true}})});
  identity_rule("PcommutCNOT", 2, {pP(PA::free(0), 0), pX(1, {{0, true}})},
                {pX(1, {{0, true}}), pP(PA::free(0), 0)}, 1);
  identity_rule("RXcommutCNOT", 2, {pRx(PA::free(0), 1), pX(1, {{0, true}})},
                {pX(1, {{0, true}}), pRx(PA::free(0), 1)}, 1);
  identity_rule("XcommutCNOT", 2, {pX(1), pX(1, {{0, true}})},
                {pX(1, {{0, true}}), pX(1)});
  identity_rule("CNOTXX", 2, {pX(0), pX(1, {{0, true}})},
                {pX(1, {{0, true}}), pX(0), pX(1)});
  identity_rule("CNOTZZ", 2, {pZ(1), pX(1, {{0, true}})},
                {pX(1, {{0, true}}), pZ(0), pZ(1)});
  identity_rule("CNOTscontrolcommut", 3,
                {pX(1, {{0, true}}), pX(2, {{0, true}})},
                {pX(2, {{0, true}}), pX(1, {{0, true}})});
  identity_rule("CNOTstargetcommut", 3,
                {pX(2, {{0, true}}), pX(2, {{1, true}})},
                {pX(2, {{1, true}}), pX(2, {{0, true}})});
  identity_rule("3CNOTscontrol", 3, {pX(0, {{2, true}}), pX(1, {{2, true}})},
                {pX(0, {{1, true}}), pX(1, {{2, true}}), pX(0, {{1, true}})});
  identity_rule("XPX", 1, {pX(0), pP(PA::free(0), 0), pX(0)},
                {pPhase(PA::free(0)), pP(PA::neg(0), 0)}, 1);
  identity_rule("ZRXZ", 1, {pZ(0), pRx(PA::free(0), 0), pZ(0)},
                {pRx(PA::neg(0), 0)}, 1);
  identity_rule("Pphasegadget", 2,
                {pX(1, {{0, true}}), pP(PA::free(0), 1), pX(1, {{0, true}})},
                {pX(0, {{1, true}}), pP(PA::free(0), 0), pX(0, {{1, true}})},
                1);
  identity_rule("RXphasegadget", 2,
                {pX(1, {{0, true}}), pRx(PA::free(0), 0), pX(1, {{0, true}})},
                {pX(0, {{1, true}}), pRx(PA::free(0), 1), pX(0, {{1, true}})},
                1);
  {
    Rule r;
    r.name = "inverseEuler";
    r.identity = true;
    r.n_params = 3;
    r.n_wire_vars = 1;
    r.min_size = r.max_size = 1;
    r.solver = SolverKind::EulerXZX;
    r.lhs = {pP(PA::free(0), 0), pRx(PA::free(1), 0), pP(PA::free(2), 0)};
    r.rhs = {pPhase(PA::solved(0)), pRx(PA::solved(1), 0),
             pP(PA::solved(2), 0), pRx(PA::solved(3), 0)};
    add(r);
  }
  // ---- Fig. 4 multi-controlled identities ----------------------------------
  identity_rule("mctrlPaddition", 2,
                {pP(PA::free(0), 1, {{0, true}}, true),
                 pP(PA::free(1), 1, {{0, true}}, true)},
                {pP(PA::sum(0, 1), 1, {{0, true}}, true)}, 2, true);
  identity_rule("mctrlRXaddition", 2,
                {pRx(PA::free(0), 1, {{0, true}}, true),
                 pRx(PA::free(1), 1, {{0, true}}, true)},
                {pRx(PA::sum(0, 1), 1, {{0, true}}, true)}, 2, true);
  identity_rule("TOFTOF", 3,
                {pX(2, {{0, true}, {1, true}}), pX(2, {{0, true}, {1, true}})},
                {});
  identity_rule("mctrlPop", 2,
                {pX(0), pP(PA::free(0), 1, {{0, true}}, true), pX(0)},
                {pP(PA::free(0), 1, {}, true),
                 pP(PA::neg(0), 1, {{0, true}}, true)},
                1, true);
  identity_rule("mctrlRXop", 1, {pZ(0), pRx(PA::free(0), 0, {}, true), pZ(0)},
                {pRx(PA::neg(0), 0, {}, true)}, 1, true);
  identity_rule("mctrlPlift", 2, {pP(PA::free(0), 1, {{0, true}}, true)},
                {pP(PA::free(0), 0, {{1, true}}, true)}, 1, true);
  identity_rule("mctrlPSWAP", 3,
                {pP(PA::free(0), 2, {{0, true}, {1, true}}, true)},
                {pSwap(0, 1),
                 pP(PA::free(0), 2, {{0, true}, {1, true}}, true),
                 pSwap(0, 1)},
                1, true);
  identity_rule("mctrlRXSWAP", 3,
                {pRx(PA::free(0), 2, {{0, true}, {1, true}}, true)},
                {pSwap(0, 1),
                 pRx(PA::free(0), 2, {{0, true}, {1, true}}, true),
                 pSwap(0, 1)},
                1, true);
  identity_rule("mctrlP2pi", 1, {pP(PA::constant(kTau), 0, {}, true)}, {}, 0,
                true);
  identity_rule("mctrlRX2piP", 2,
                {pRx(PA::constant(kTau), 1, {{0, true}}, true)},
                {pP(PA::constant(pi), 0, {}, true)}, 0, true);
  identity_rule("SWAPSWAP", 2, {pSwap(0, 1), pSwap(0, 1)}, {});
  // ---- Fig. 7 ancilla identities (provable in QCiso) -----------------------
  identity_rule("ancillaCNOT", 2,
                {pInit(1), pX(1), pX(0, {{1, true}}), pX(1)},
                {pInit(1), pX(0)}, 0, false, 0, Theory::QCiso);
  identity_rule("ancillaTOFneg", 3, {pInit(2), pX(1, {{2, true}, {0, true}})},
                {pInit(2)}, 0, false, 0, Theory::QCiso);
  identity_rule("ancillaTOFpos", 3,
                {pInit(2), pX(2), pX(1, {{2, true}, {0, true}}), pX(2)},
                {pInit(2), pX(1, {{0, true}})}, 0, false, 0, Theory::QCiso);
  identity_rule("ancillamctrlPneg", 2,
                {pInit(1), pP(PA::free(0), 0, {{1, true}}, true)},
                {pInit(1)}, 1, true, 2, Theory::QCiso);
  identity_rule("ancillamctrlPpos", 2,
                {pInit(1), pX(1), pP(PA::free(0), 0, {{1, true}}, true),
                 pX(1)},
                {pInit(1), pP(PA::free(0), 0, {}, true)}, 1, true, 2,
                Theory::QCiso);
  identity_rule("ancillamctrlRXneg", 2,
                {pInit(1), pRx(PA::free(0), 0, {{1, true}}, true)},
                {pInit(1)}, 1, true, 2, Theory::QCiso);
  identity_rule("ancillamctrlRXpos", 2,
                {pInit(1), pX(1), pRx(PA::free(0), 0, {{1, true}}, true),
                 pX(1)},
                {pInit(1), pRx(PA::free(0), 0, {}, true)}, 1, true, 2,
                Theory::QCiso);
  // ---- Appendix E ----------------------------------------------------------
  identity_rule("Paltdef", 4,
                {pInit(3), pP(PA::free(0), 2, {{0, true}, {1, true}}, true)},
                {pInit(3), pX(3, {{0, true}, {1, true}}),
                 pP(PA::free(0), 2, {{3, true}}, true),
                 pX(3, {{0, true}, {1, true}})},
                1, true, 2, Theory::QCiso);
  identity_rule("RXaltdef", 4,
                {pInit(3), pRx(PA::free(0), 2, {{0, true}, {1, true}}, true)},
                {pInit(3), pX(3, {{0, true}, {1, true}}),
                 pRx(PA::free(0), 2, {{3, true}}, true),
                 pX(3, {{0, true}, {1, true}})},
                1, true, 2, Theory::QCiso);
  identity_rule("multi2", 3, {pInit(2), pP(PA::free(0), 1, {{0, true}}, true)},
                {pInit(2), pX(2, {{0, true}}, true),
                 pP(PA::free(0), 1, {{2, true}}), pX(2, {{0, true}}, true)},
                1, true, 2, Theory::QCiso);
  identity_rule("ctrlPinit", 3, {pInit(2), pP(PA::free(0), 1, {{0, true}})},
                {pInit(2), pX(2, {{0, true}, {1, true}}), pP(PA::free(0), 2),
                 pX(2, {{0, true}, {1, true}})},
                1, false, 0, Theory::QCiso);
  identity_rule("HHTOFHH", 3,
                {pH(1), pH(2), pX(2, {{0, true}, {1, true}}), pH(1), pH(2)},
                {pX(1, {{0, true}, {2, true}})});
  identity_rule("HHFredkinHH", 3,
                {pH(1), pH(2), pSwap(1, 2, {{0, true}}), pH(1), pH(2)},
                {pSwap(1, 2, {{0, true}})});
  identity_rule("initTOF", 4, {pInit(3), pX(2, {{0, true}, {1, true}})},
                {pInit(3), pX(3, {{0, true}, {1, true}}), pX(2, {{3, true}}),
                 pX(3, {{0, true}, {1, true}})},
                0, false, 0, Theory::QCiso);
  identity_rule("K1", 4,
                {pX(3, {{0, true}, {1, true}}), pX(3, {{0, true}, {2, true}})},
                {pX(2, {{0, true}, {1, true}}), pX(3, {{0, true}, {2, true}}),
                 pX(2, {{0, true}, {1, true}})});
  identity_rule("3tofs2cnots", 3,
                {pX(2, {{0, true}, {1, true}}), pX(1, {{0, true}, {2, true}}),
                 pX(2, {{0, true}, {1, true}})},
                {pX(1, {{2, true}}), pX(2, {{0, true}, {1, true}}),
                 pX(1, {{2, true}})});
  identity_rule("wbTOF", 3, {pX(0), pX(2, {{0, true}, {1, true}}), pX(0)},
                {pX(2, {{1, true}}), pX(2, {{0, true}, {1, true}})});
  identity_rule("5tofs", 3,
                {pX(2, {{0, true}, {1, true}}), pX(1, {{0, true}, {2, true}}),
                 pX(2, {{0, true}, {1, true}}), pX(1, {{0, true}, {2, true}}),
                 pX(2, {{0, true}, {1, true}})},
                {pX(1, {{0, true}, {2, true}})});
  identity_rule("TOFFredkin", 4,
                {pSwap(1, 2, {{0, true}}), pX(3, {{0, true}, {1, true}}),
                 pSwap(1, 2, {{0, true}})},
                {pX(3, {{0, true}, {2, true}})});
  identity_rule("wFredkin", 3, {pX(0), pSwap(1, 2, {{0, true}}), pX(0)},
                {pSwap(1, 2, {{0, true}}), pSwap(1, 2)});
  identity_rule("wCZ-Z", 2,
                {pX(0), pP(PA::constant(pi), 1, {{0, true}}), pX(0)},
                {pZ(1), pP(PA::constant(pi), 1, {{0, true}})});
  identity_rule("ctrlPphasegadget", 3,
                {pX(2, {{0, true}, {1, true}}), pP(PA::free(0), 2, {{0, true}}),
                 pX(2, {{0, true}, {1, true}})},
                {pX(1, {{0, true}, {2, true}}), pP(PA::free(0), 1, {{0, true}}),
                 pX(1, {{0, true}, {2, true}})},
                1);
  identity_rule("wCCZ-CZ", 3,
                {pX(0), pP(PA::constant(pi), 2, {{0, true}, {1, true}}),
                 pX(0)},
                {pP(PA::constant(pi), 2, {{1, true}}),
                 pP(PA::constant(pi), 2, {{0, true}, {1, true}})});
  identity_rule("wCCRX-CRX", 3,
                {pX(0), pRx(PA::free(0), 2, {{0, true}, {1, true}}), pX(0)},
                {pRx(PA::free(0), 2, {{1, true}}),
                 pRx(PA::neg(0), 2, {{0, true}, {1, true}})},
                1);
  identity_rule("FredkinwbTOF", 4,
                {pX(0), pX(3, {{0, true}, {1, true}}), pX(0),
                 pSwap(1, 2, {{0, true}})},
                {pSwap(1, 2, {{0, true}}), pX(0), pX(3, {{0, true}, {1, true}}),
                 pX(0)});
  {
    Rule r;
    r.name = "K3";
    r.identity = true;
    r.n_params = 4;
    r.n_wire_vars = 2;
    r.has_dashed = true;
    r.min_size = r.max_size = 3;
    r.solver = SolverKind::Kstar;
    r.lhs = kstar_lhs_pat();
    r.rhs = kstar_rhs_pat();
    add(r);
  }
  return rules;
}

} // namespace

const std::vector<Rule> &rule_catalog() {
  static const std::vector<Rule> catalog = make_catalog();
  return catalog;
}

const Rule &find_rule(const std::string &name) {
  for (const Rule &r : rule_catalog())
    if (r.name == name) return r;
  throw Error(ErrorCode::UnknownRule, name);
}

RuleInstance instantiate(const std::string &name,
                         const std::vector<double> &params, int size) {
  return build_rule_instance(find_rule(name), params, size);
}

namespace {

std::vector<double> draw_params(const Rule &r, std::mt19937_64 &rng) {
  std::vector<double> periods(static_cast<std::size_t>(r.n_params), kTau);
  for (const PatGate &g : r.lhs) {
    if (g.kind != GateKind::Rx) continue;
    if ((g.angle.kind == PatAngle::Free || g.angle.kind == PatAngle::Neg ||
         g.angle.kind == PatAngle::Half ||
         g.angle.kind == PatAngle::NegHalf) &&
        g.angle.slot >= 0 && g.angle.slot < r.n_params)
      periods[static_cast<std::size_t>(g.angle.slot)] = 2 * kTau;
  }
  std::vector<double> out;
  for (double p : periods) {
    std::uniform_real_distribution<double> u(0.0, p);
    out.push_back(u(rng));
  }
  return out;
}

} // namespace

RuleInstance instantiate_random(const Rule &r, std::mt19937_64 &rng,
                                int max_size_cap) {
  std::vector<double> params;
  if (r.name == "A")
    params = {std::uniform_int_distribution<int>(0, 1)(rng) ? kTau : 0.0};
  else
    params = draw_params(r, rng);
  int lo = r.min_size;
  int hi = r.max_size ? std::min(r.max_size, std::max(lo, max_size_cap))
                      : r.min_size;
  if (hi < lo) hi = lo;
  int size = lo == hi ? lo : std::uniform_int_distribution<int>(lo, hi)(rng);
  return build_rule_instance(r, params, size);
}

namespace {

bool wants_cptp(const RuleInstance &inst) {
  if (inst.lhs.theory == Theory::QCground) return true;
  for (const Gate &g : inst.lhs.gates)
    if (g.kind == GateKind::Discard) return true;
  return false;
}

} // namespace

SoundnessReport soundness_check(const RuleInstance &inst, Tolerance tol,
                                int max_qubits) {
  if (wants_cptp(inst)) return soundness_check_cptp(inst, tol, max_qubits);
  SoundnessReport rep;
  rep.rule = inst.rule;
  rep.size = inst.size;
  rep.params = inst.params;
  rep.semantics = "unitary";
  Matrix a = eval_unitary(inst.lhs, max_qubits);
  Matrix b = eval_unitary(inst.rhs, max_qubits);
  rep.deviation = max_abs_diff(a, b);
  rep.pass = rep.deviation <= tol.abs_eps;
  return rep;
}

SoundnessReport soundness_check_cptp(const RuleInstance &inst, Tolerance tol,
                                     int max_qubits) {
  SoundnessReport rep;
  rep.rule = inst.rule;
  rep.size = inst.size;
  rep.params = inst.params;
  rep.semantics = "cptp";
  auto strip = [](Circuit c) {
    c.theory = Theory::QCground;
    std::vector<Gate> kept;
    for (Gate &g : c.gates)
      if (g.kind != GateKind::GlobalPhase) kept.push_back(std::move(g));
    c.gates = std::move(kept);
    return c;
  };
  Superoperator a = eval_cptp(strip(inst.lhs), max_qubits);
  Superoperator b = eval_cptp(strip(inst.rhs), max_qubits);
  rep.deviation = superop_distance(a, b);
  rep.pass = rep.deviation <= tol.abs_eps;
  return rep;
}

std::vector<std::string> axiom_set(Theory t) {
  switch (t) {
  case Theory::QC:
    return {"A", "B", "C", "D", "E", "F", "G", "H", "I", "J", "K*"};
  case Theory::QCiso:
    return {"A", "B", "C", "D", "E", "F", "G", "H", "I", "J", "K*", "L", "M"};
  case Theory::QCancilla:
    return {"A", "B", "C", "D", "E", "F", "G", "H", "I",
            "J", "K2", "L", "M", "N"};
  case Theory::QCground:
    return {"C", "D", "E", "F", "G", "H", "I", "J'",
            "K2", "L", "M", "O", "P", "Q", "R"};
  }
  return {};
}

std::vector<std::string> retired_set() { return {"n", "o", "K*old"}; }

std::vector<std::string> identity_set(Theory t) {
  switch (t) {
  case Theory::QC:
    return {"RXdef",
            "Zdef",
            "Xdef",
            "MCRXdef",
            "MCPdef",
            "TOFdef",
            "MCPalt",
            "Fredkindef",
            "XX",
            "ZZ",
            "RX0",
            "Zminuspi",
            "Paddition",
            "RXaddition",
            "CNOTCNOT",
            "CNOTHH",
            "CNOTSWAP",
            "PcommutCNOT",
            "RXcommutCNOT",
            "XcommutCNOT",
            "CNOTXX",
            "CNOTZZ",
            "CNOTscontrolcommut",
            "CNOTstargetcommut",
            "3CNOTscontrol",
            "XPX",
            "ZRXZ",
            "Pphasegadget",
            "RXphasegadget",
            "inverseEuler",
            "mctrlPaddition",
            "mctrlRXaddition",
            "TOFTOF",
            "mctrlPop",
            "mctrlRXop",
            "mctrlPlift",
            "mctrlPSWAP",
            "mctrlRXSWAP",
            "mctrlP2pi",
            "mctrlRX2piP",
            "SWAPSWAP"};
  case Theory::QCiso:
    return {"ancillaCNOT",      "ancillaTOFneg",    "ancillaTOFpos",
            "ancillamctrlPneg", "ancillamctrlPpos", "ancillamctrlRXneg",
            "ancillamctrlRXpos"};
  case Theory::QCancilla:
    return {"Paltdef",   "RXaltdef",        "multi2",   "ctrlPinit",
            "K3",        "HHTOFHH",         "HHFredkinHH", "initTOF",
            "K1",        "3tofs2cnots",     "wbTOF",    "5tofs",
            "TOFFredkin", "wFredkin",       "wCZ-Z",    "ctrlPphasegadget",
            "wCCZ-CZ",   "wCCRX-CRX",       "FredkinwbTOF"};
  case Theory::QCground:
    return {};
  }
  return {};
}

std::vector<IdentityReport> derived_identity_suite(Theory t, int trials,
                                                   std::uint64_t seed,
                                                   Tolerance tol) {
  std::vector<IdentityReport> out;
  std::mt19937_64 rng(seed);
  for (const std::string &name : identity_set(t)) {
    const Rule &r = find_rule(name);
    IdentityReport rep;
    rep.rule = name;
    rep.pass = true;
    for (int i = 0; i < trials; ++i) {
      RuleInstance inst = instantiate_random(r, rng, 5);
      SoundnessReport s = soundness_check(inst, tol);
      rep.max_deviation = std::max(rep.max_deviation, s.deviation);
      rep.pass = rep.pass && s.pass;
      ++rep.trials;
    }
    out.push_back(rep);
  }
  return out;
}

} // namespace qceq
