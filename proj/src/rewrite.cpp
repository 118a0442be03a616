#include "qceq/rewrite.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "qceq/angles.hpp"
#include "qceq/circuit_io.hpp"
#include "qceq/semantics.hpp"

namespace qceq {

namespace {

double angle_dist(double a, double b, double period) {
  if (period <= 0) return std::abs(a - b);
  double d = std::fmod(a - b, period);
  if (d < 0) d += period;
  return std::min(d, period - d);
}

constexpr double kAngleMatchEps = 1e-9;

// Created wire id for each Init gate, by gate index.
std::vector<int> created_ids(const Circuit &c) {
  std::vector<int> ids(c.gates.size(), -1);
  int next = c.n_in;
  for (std::size_t i = 0; i < c.gates.size(); ++i)
    if (c.gates[i].kind == GateKind::Init) ids[i] = next++;
  return ids;
}

struct MatchState {
  std::vector<int> vars;          // var -> wire (-1 unbound)
  std::optional<std::vector<int>> dashed;
  std::vector<double> params;     // slot -> angle
  std::vector<bool> params_bound;
  std::vector<std::size_t> positions;
};

class Matcher {
public:
  Matcher(const Circuit &c, const Rule &rule, bool l2r,
          const MatchHints *hints, std::size_t window)
      : c_(c), rule_(rule), side_(l2r ? rule.lhs : rule.rhs),
        other_side_(l2r ? rule.rhs : rule.lhs), l2r_(l2r), hints_(hints),
        window_(window), created_(created_ids(c)) {}

  std::vector<Match> all() {
    std::vector<Match> out;
    if (side_.empty()) {
      // Insertion: only meaningful with an anchor hint.
      if (hints_ && hints_->anchor) {
        Match m = seed_match();
        m.anchor = std::min(*hints_->anchor, c_.gates.size());
        out.push_back(std::move(m));
      }
      return out;
    }
    for (std::size_t a = 0; a < c_.gates.size(); ++a) {
      if (hints_ && hints_->anchor) {
        std::size_t lo = *hints_->anchor > hints_->anchor_slack
                             ? *hints_->anchor - hints_->anchor_slack
                             : 0;
        if (a < lo || a > *hints_->anchor + hints_->anchor_slack) continue;
      }
      MatchState st = seed_state();
      std::set<int> skipped;
      if (try_slot(0, a, a, st, skipped, out) && !exhaustive_) break;
    }
    return out;
  }

private:
  MatchState seed_state() {
    MatchState st;
    st.vars.assign(static_cast<std::size_t>(rule_.n_wire_vars), -1);
    if (hints_)
      for (std::size_t i = 0; i < hints_->wires.size() && i < st.vars.size();
           ++i)
        st.vars[i] = hints_->wires[i];
    st.params.assign(static_cast<std::size_t>(params_len()), 0.0);
    st.params_bound.assign(static_cast<std::size_t>(params_len()), false);
    if (hints_)
      for (std::size_t i = 0;
           i < hints_->params.size() && i < st.params.size(); ++i) {
        st.params[i] = hints_->params[i];
        st.params_bound[i] = true;
      }
    return st;
  }

  Match seed_match() {
    MatchState st = seed_state();
    Match m;
    m.rule = rule_.name;
    m.l2r = l2r_;
    m.wire_binding = st.vars;
    m.params = st.params;
    return m;
  }

  int params_len() const {
    if (l2r_) return rule_.n_params;
    // When matching the RHS, solver-filled slots bind as free angles.
    int n = rule_.n_params;
    for (const PatGate &g : rule_.rhs)
      if (g.angle.kind == PatAngle::Solved) n = std::max(n, g.angle.slot + 1);
    return n;
  }

  // Returns true if at least one match was found from this anchor.
  bool try_slot(std::size_t slot, std::size_t pos, std::size_t anchor,
                MatchState st, std::set<int> skipped,
                std::vector<Match> &out) {
    if (slot == side_.size()) {
      if (!replacement_constructible(st)) return false;
      Match m;
      m.rule = rule_.name;
      m.l2r = l2r_;
      m.anchor = anchor;
      m.positions = st.positions;
      m.wire_binding = st.vars;
      if (st.dashed) m.dashed_wires = *st.dashed;
      m.params = st.params;
      if (l2r_ && rule_.param_check && !rule_.param_check(m.params))
        return false;
      out.push_back(std::move(m));
      return true;
    }
    bool found = false;
    for (std::size_t j = pos; j < c_.gates.size() && j <= anchor + window_;
         ++j) {
      const Gate &g = c_.gates[j];
      bool blocked = false;
      for (int w : g.wires())
        if (skipped.count(w)) blocked = true;
      if (!blocked) {
        MatchState next = st;
        if (bind_gate(side_[slot], g, j, next)) {
          next.positions.push_back(j);
          if (try_slot(slot + 1, j + 1, anchor, std::move(next), skipped,
                       out)) {
            found = true;
            if (!exhaustive_) return true;
          }
        }
      }
      if (slot == 0) break; // the anchor gate must match exactly at `pos`
      for (int w : c_.gates[j].wires()) skipped.insert(w);
      if (c_.gates[j].kind == GateKind::Init) skipped.insert(created_[j]);
    }
    return found;
  }

  // Every wire variable the replacement side uses must be bound by the
  // matched side (or a hint), except wires its own Init gates create.
  bool replacement_constructible(const MatchState &st) const {
    std::vector<bool> created(st.vars.size(), false);
    for (const PatGate &pg : other_side_)
      if (pg.kind == GateKind::Init)
        created[static_cast<std::size_t>(pg.targets[0])] = true;
    auto ok = [&](int v) {
      return created[static_cast<std::size_t>(v)] ||
             st.vars[static_cast<std::size_t>(v)] >= 0;
    };
    for (const PatGate &pg : other_side_) {
      if (pg.kind != GateKind::Init)
        for (int v : pg.targets)
          if (!ok(v)) return false;
      for (auto [v, pol] : pg.controls) {
        (void)pol;
        if (!ok(v)) return false;
      }
    }
    return true;
  }

  bool bind_var(int var, int wire, MatchState &st) {
    int &slotv = st.vars[static_cast<std::size_t>(var)];
    if (slotv == -1) {
      // wire vars are pairwise distinct
      for (int v : st.vars)
        if (v == wire) return false;
      if (st.dashed)
        for (int w : *st.dashed)
          if (w == wire) return false;
      slotv = wire;
      return true;
    }
    return slotv == wire;
  }

  bool bind_angle(const PatAngle &pa, double angle, double period,
                  MatchState &st) {
    auto have = [&](int s) { return st.params_bound[static_cast<std::size_t>(s)]; };
    auto val = [&](int s) { return st.params[static_cast<std::size_t>(s)]; };
    auto setp = [&](int s, double v) {
      st.params[static_cast<std::size_t>(s)] = v;
      st.params_bound[static_cast<std::size_t>(s)] = true;
      return true;
    };
    switch (pa.kind) {
    case PatAngle::Const:
      return angle_dist(angle, pa.value, period) <= kAngleMatchEps;
    case PatAngle::Free:
    case PatAngle::Solved:
      if (have(pa.slot))
        return angle_dist(angle, val(pa.slot), period) <= kAngleMatchEps;
      return setp(pa.slot, angle);
    case PatAngle::Neg:
      if (have(pa.slot))
        return angle_dist(angle, -val(pa.slot), period) <= kAngleMatchEps;
      return setp(pa.slot, -angle);
    case PatAngle::Half:
      if (have(pa.slot))
        return angle_dist(angle, val(pa.slot) / 2, period) <= kAngleMatchEps;
      return setp(pa.slot, 2 * angle);
    case PatAngle::NegHalf:
      if (have(pa.slot))
        return angle_dist(angle, -val(pa.slot) / 2, period) <= kAngleMatchEps;
      return setp(pa.slot, -2 * angle);
    case PatAngle::Sum:
      if (have(pa.slot) && have(pa.slot2))
        return angle_dist(angle, val(pa.slot) + val(pa.slot2), period) <=
               kAngleMatchEps;
      if (have(pa.slot)) return setp(pa.slot2, angle - val(pa.slot));
      if (have(pa.slot2)) return setp(pa.slot, angle - val(pa.slot2));
      // Underdetermined split: put everything in the first slot.
      return setp(pa.slot, angle) && setp(pa.slot2, 0.0);
    }
    return false;
  }

  bool bind_gate(const PatGate &p, const Gate &g, std::size_t index,
                 MatchState &st) {
    if (p.kind != g.kind) return false;
    if (p.kind == GateKind::Init)
      return bind_var(p.targets[0], created_[index], st);
    if (p.targets.size() != g.targets.size()) return false;
    for (std::size_t i = 0; i < p.targets.size(); ++i)
      if (!bind_var(p.targets[i], g.targets[i], st)) return false;
    if (kind_has_angle(g.kind) &&
        !bind_angle(p.angle, g.angle, kind_angle_period(g.kind), st))
      return false;
    return bind_controls(p, g, st);
  }

  bool bind_controls(const PatGate &p, const Gate &g, MatchState &st) {
    // Assign pattern controls to concrete controls (order-insensitive),
    // then the leftovers must be exactly the dashed set.
    std::vector<bool> used(g.controls.size(), false);
    if (!assign_ctrl(p, g, 0, used, st)) return false;
    return true;
  }

  bool assign_ctrl(const PatGate &p, const Gate &g, std::size_t k,
                   std::vector<bool> &used, MatchState &st) {
    if (k == p.controls.size()) {
      std::vector<int> rest;
      for (std::size_t i = 0; i < g.controls.size(); ++i)
        if (!used[i]) {
          if (!g.controls[i].positive) return false;
          rest.push_back(g.controls[i].wire);
        }
      std::sort(rest.begin(), rest.end());
      if (!p.dashed) return rest.empty();
      if (st.dashed) return rest == *st.dashed;
      for (int w : rest)
        for (int v : st.vars)
          if (v == w) return false;
      st.dashed = rest;
      return true;
    }
    auto [var, pol] = p.controls[k];
    for (std::size_t i = 0; i < g.controls.size(); ++i) {
      if (used[i] || g.controls[i].positive != pol) continue;
      MatchState saved = st;
      if (bind_var(var, g.controls[i].wire, st)) {
        used[i] = true;
        if (assign_ctrl(p, g, k + 1, used, st)) return true;
        used[i] = false;
      }
      st = saved;
    }
    return false;
  }

  const Circuit &c_;
  const Rule &rule_;
  const std::vector<PatGate> &side_;
  const std::vector<PatGate> &other_side_;
  bool l2r_;
  const MatchHints *hints_;
  std::size_t window_;
  std::vector<int> created_;
  bool exhaustive_ = true;
};

// Two gates commute semantically (checked on their joint support).
bool gates_commute(const Gate &a, const Gate &b) {
  std::vector<int> wires = a.wires();
  for (int w : b.wires()) wires.push_back(w);
  std::sort(wires.begin(), wires.end());
  wires.erase(std::unique(wires.begin(), wires.end()), wires.end());
  if (wires.size() > 6) return false;
  std::vector<int> remap(static_cast<std::size_t>(wires.empty() ? 0 : wires.back() + 1), -1);
  for (std::size_t i = 0; i < wires.size(); ++i)
    remap[static_cast<std::size_t>(wires[i])] = static_cast<int>(i);
  auto local = [&](const Gate &g) {
    Gate out = g;
    for (int &t : out.targets) t = remap[static_cast<std::size_t>(t)];
    for (Control &ct : out.controls) ct.wire = remap[static_cast<std::size_t>(ct.wire)];
    return out;
  };
  Circuit ab(Theory::QC, static_cast<int>(wires.size()));
  ab.add(local(a)).add(local(b));
  Circuit ba(Theory::QC, static_cast<int>(wires.size()));
  ba.add(local(b)).add(local(a));
  return max_abs_diff(eval_unitary(ab), eval_unitary(ba)) <= 1e-10;
}

std::vector<Match> bullet_matches(const Circuit &c, const MatchHints *hints) {
  std::vector<Match> out;
  for (std::size_t i = 0; i + 1 < c.gates.size(); ++i) {
    if (hints && hints->anchor &&
        (i + hints->anchor_slack < *hints->anchor ||
         i > *hints->anchor + hints->anchor_slack))
      continue;
    const Gate &a = c.gates[i], &b = c.gates[i + 1];
    if (a.is_structural() || b.is_structural()) continue;
    if (a.kind == GateKind::GlobalPhase || b.kind == GateKind::GlobalPhase ||
        gates_commute(a, b)) {
      Match m;
      m.rule = "BULLET";
      m.anchor = i;
      m.positions = {i, i + 1};
      out.push_back(std::move(m));
    }
  }
  return out;
}

} // namespace

std::vector<Match> find_matches(const Circuit &c, const std::string &rule,
                                bool l2r, std::size_t window) {
  if (rule == "BULLET") return bullet_matches(c, nullptr);
  Matcher m(c, find_rule(rule), l2r, nullptr, window);
  return m.all();
}

std::vector<Match> find_matches_hinted(const Circuit &c,
                                       const std::string &rule, bool l2r,
                                       const MatchHints &hints,
                                       std::size_t window) {
  std::vector<Match> out;
  if (rule == "BULLET") {
    out = bullet_matches(c, &hints);
  } else {
    Matcher m(c, find_rule(rule), l2r, &hints, window);
    out = m.all();
  }
  if (hints.anchor) {
    auto dist = [&](const Match &m) {
      long a = static_cast<long>(m.anchor), h = static_cast<long>(*hints.anchor);
      return a > h ? a - h : h - a;
    };
    std::stable_sort(out.begin(), out.end(),
                     [&](const Match &a, const Match &b) {
                       return dist(a) < dist(b);
                     });
  }
  return out;
}

namespace {

// Derive the replacement-side parameters when applying a solver rule in the
// reverse direction (canonical RHS -> some LHS).
std::vector<double> invert_solver(const Rule &r,
                                  const std::vector<double> &rhs_params) {
  switch (r.solver) {
  case SolverKind::EulerZXZ: {
    EulerAngles e{rhs_params[0], rhs_params[1], rhs_params[2], rhs_params[3]};
    EulerAngles x = euler_xzx(euler_zxz_matrix(e));
    if (!angle_is(mod_2pi(x.b0), 0, 1e-9) &&
        !angle_is(mod_2pi(x.b0), kTau, 1e-9))
      throw Error(ErrorCode::StaleMatch,
                  "J reversed: matrix needs a global phase");
    return {x.b1, x.b2, x.b3};
  }
  case SolverKind::EulerZXZNoPhase: {
    EulerAngles e{0, rhs_params[1], rhs_params[2], rhs_params[3]};
    EulerAngles x = euler_xzx(euler_zxz_matrix(e));
    return {x.b1, x.b2, x.b3};
  }
  case SolverKind::EulerXZX: {
    EulerAngles e{rhs_params[0], rhs_params[1], rhs_params[2], rhs_params[3]};
    EulerAngles z = euler_zxz(euler_xzx_matrix(e));
    if (!angle_is(mod_2pi(z.b0), 0, 1e-9) &&
        !angle_is(mod_2pi(z.b0), kTau, 1e-9))
      throw Error(ErrorCode::StaleMatch,
                  "inverse Euler reversed: matrix needs a global phase");
    return {z.b1, z.b2, z.b3};
  }
  case SolverKind::Kstar:
  case SolverKind::KstarOld: {
    std::array<double, 8> d;
    for (int i = 0; i < 8; ++i) d[static_cast<std::size_t>(i)] = rhs_params[static_cast<std::size_t>(i)];
    Matrix block = kstar_rhs_block(d);
    if (r.solver == SolverKind::KstarOld) {
      std::array<double, 9> d9;
      for (int i = 0; i < 9; ++i) d9[static_cast<std::size_t>(i)] = rhs_params[static_cast<std::size_t>(i)];
      block = kstar_old_rhs_block(d9);
    }
    std::array<double, 4> g = kstar_gamma_from_block(block);
    return {g[0], g[1], g[2], g[3]};
  }
  case SolverKind::None: break;
  }
  return rhs_params;
}

} // namespace

Circuit apply_match(const Circuit &c, const Match &m) {
  if (m.rule == "BULLET") {
    if (m.positions.size() != 2 || m.positions[1] >= c.gates.size() ||
        m.positions[1] != m.positions[0] + 1)
      throw Error(ErrorCode::StaleMatch, "BULLET positions out of date");
    Circuit out = c;
    std::swap(out.gates[m.positions[0]], out.gates[m.positions[1]]);
    return out;
  }
  const Rule &rule = find_rule(m.rule);
  const auto &matched_side = m.l2r ? rule.lhs : rule.rhs;
  const auto &repl_side = m.l2r ? rule.rhs : rule.lhs;
  if (m.positions.size() != matched_side.size())
    throw Error(ErrorCode::StaleMatch, "match shape mismatch");
  for (std::size_t i = 0; i < m.positions.size(); ++i) {
    if (m.positions[i] >= c.gates.size() ||
        c.gates[m.positions[i]].kind != matched_side[i].kind)
      throw Error(ErrorCode::StaleMatch,
                  "circuit changed under the match at position " +
                      std::to_string(m.positions[i]));
  }

  // Parameters and solver outputs for the replacement side.
  std::vector<double> params, solved;
  if (m.l2r) {
    params = m.params;
    solved = rule_solved_params(rule, params);
  } else {
    params = invert_solver(rule, m.params);
    if (rule.solver == SolverKind::None) {
      params.resize(static_cast<std::size_t>(rule.n_params));
    }
    solved.assign(m.params.begin(), m.params.end());
  }

  std::vector<int> var_map = m.wire_binding;
  auto var_wire = [&](int v) {
    int w = var_map.at(static_cast<std::size_t>(v));
    if (w < 0)
      throw Error(ErrorCode::StaleMatch,
                  "unbound wire variable " + std::to_string(v) +
                      " in replacement");
    return w;
  };

  // Re-emit the whole circuit, renumbering created wires consistently.
  std::set<std::size_t> matched(m.positions.begin(), m.positions.end());
  std::vector<int> old_created = created_ids(c);
  std::size_t anchor = m.positions.empty()
                           ? m.anchor
                           : m.positions.front();

  Circuit out(c.theory, c.n_in);
  std::vector<int> wire_map(static_cast<std::size_t>(c.wire_id_bound()), -1);
  for (int i = 0; i < c.n_in; ++i) wire_map[static_cast<std::size_t>(i)] = i;
  int next_id = c.n_in;

  auto emit_old = [&](std::size_t idx) {
    Gate g = c.gates[idx];
    if (g.kind == GateKind::Init) {
      wire_map[static_cast<std::size_t>(old_created[idx])] = next_id++;
      out.add(std::move(g));
      return;
    }
    for (int &t : g.targets) {
      if (wire_map[static_cast<std::size_t>(t)] < 0)
        throw Error(ErrorCode::StaleMatch, "dangling wire after rewrite");
      t = wire_map[static_cast<std::size_t>(t)];
    }
    for (Control &ct : g.controls) ct.wire = wire_map[static_cast<std::size_t>(ct.wire)];
    out.add(std::move(g));
  };

  auto emit_replacement = [&]() {
    for (const PatGate &p : repl_side) {
      if (p.kind == GateKind::Init) {
        int v = p.targets[0];
        int fresh = next_id++;
        int old = var_map.at(static_cast<std::size_t>(v));
        if (old >= 0 && old < static_cast<int>(wire_map.size()))
          wire_map[static_cast<std::size_t>(old)] = fresh;
        var_map[static_cast<std::size_t>(v)] = fresh >= static_cast<int>(wire_map.size())
                         ? (wire_map.push_back(fresh), fresh)
                         : fresh;
        // the created wire is referenced directly by var below
        out.add(Gate::init());
        continue;
      }
      Gate g;
      g.kind = p.kind;
      if (kind_has_angle(p.kind)) g.angle = p.angle.eval(params, solved);
      for (int v : p.targets) {
        int w = var_wire(v);
        g.targets.push_back(w < static_cast<int>(wire_map.size()) &&
                                    wire_map[static_cast<std::size_t>(w)] >= 0
                                ? wire_map[static_cast<std::size_t>(w)]
                                : w);
      }
      for (auto [v, pol] : p.controls) {
        int w = var_wire(v);
        g.controls.push_back({w < static_cast<int>(wire_map.size()) &&
                                      wire_map[static_cast<std::size_t>(w)] >= 0
                                  ? wire_map[static_cast<std::size_t>(w)]
                                  : w,
                              pol});
      }
      for (int w : m.dashed_wires)
        g.controls.push_back({wire_map[static_cast<std::size_t>(w)], true});
      out.add(std::move(g));
    }
  };

  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    if (i == anchor) emit_replacement();
    if (matched.count(i)) {
      // Validate that the match is still accurate.
      continue;
    }
    emit_old(i);
  }
  if (anchor >= c.gates.size()) emit_replacement();
  if (auto err = validate(out))
    throw Error(ErrorCode::StaleMatch, "rewrite produced " + *err);
  return out;
}

Circuit deformation_normal_form(const Circuit &c) {
  const std::size_t n = c.gates.size();
  std::vector<int> layer(n, 0);
  std::vector<int> old_created_pre = created_ids(c);
  // Effective wire footprint; an Init owns the wire it creates.
  std::vector<std::vector<int>> eff(n);
  for (std::size_t i = 0; i < n; ++i) {
    eff[i] = c.gates[i].wires();
    if (c.gates[i].kind == GateKind::Init) eff[i].push_back(old_created_pre[i]);
  }
  auto conflicts = [&](std::size_t i, std::size_t j) {
    if (c.gates[i].is_structural() && c.gates[j].is_structural()) return true;
    for (int w : eff[i])
      if (std::find(eff[j].begin(), eff[j].end(), w) != eff[j].end())
        return true;
    return false;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (conflicts(i, j)) layer[i] = std::max(layer[i], layer[j] + 1);
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  auto min_wire = [&](const Gate &g) {
    std::vector<int> ws = g.wires();
    if (g.kind == GateKind::GlobalPhase || ws.empty()) return -1;
    return *std::min_element(ws.begin(), ws.end());
  };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (layer[a] != layer[b]) return layer[a] < layer[b];
    return min_wire(c.gates[a]) < min_wire(c.gates[b]);
  });
  Circuit out(c.theory, c.n_in);
  // Re-emit with consistent created-wire numbering.
  std::vector<int> old_created = created_ids(c);
  std::vector<int> wire_map(static_cast<std::size_t>(c.wire_id_bound()), -1);
  for (int i = 0; i < c.n_in; ++i) wire_map[static_cast<std::size_t>(i)] = i;
  int next_id = c.n_in;
  for (std::size_t idx : order) {
    Gate g = c.gates[idx];
    if (g.kind == GateKind::Init) {
      wire_map[static_cast<std::size_t>(old_created[idx])] = next_id++;
      out.add(std::move(g));
      continue;
    }
    for (int &t : g.targets) t = wire_map[static_cast<std::size_t>(t)];
    for (Control &ct : g.controls) ct.wire = wire_map[static_cast<std::size_t>(ct.wire)];
    out.add(std::move(g));
  }
  return out;
}

Derivation parse_derivation_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IO, "cannot open " + path);
  std::filesystem::path base = std::filesystem::path(path).parent_path();
  Derivation d;
  bool have_start = false, have_end = false;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    auto fail = [&](const std::string &msg) -> void {
      throw Error(ErrorCode::ParseError,
                  path + ":" + std::to_string(line_no) + ": " + msg);
    };
    if (head == "derivation") {
      ls >> d.name;
    } else if (head == "start" || head == "end") {
      std::string file;
      if (!(ls >> file)) fail("expected a circuit file");
      Circuit c = load_circuit((base / file).string());
      if (head == "start") {
        d.start = std::move(c);
        have_start = true;
      } else {
        d.end = std::move(c);
        have_end = true;
      }
    } else if (head == "step") {
      DerivationStep st;
      std::string tok;
      if (!(ls >> st.rule)) fail("step needs a rule name");
      if (!(ls >> tok) || (tok != "L2R" && tok != "R2L"))
        fail("step needs L2R or R2L");
      st.l2r = tok == "L2R";
      while (ls >> tok) {
        if (tok[0] == '@') {
          st.anchor = static_cast<std::size_t>(std::stoul(tok.substr(1)));
        } else if (tok.rfind("wires=", 0) == 0) {
          std::istringstream ws(tok.substr(6));
          std::string item;
          while (std::getline(ws, item, ',')) st.wires.push_back(std::stoi(item));
        } else if (tok.rfind("params=", 0) == 0) {
          std::istringstream psr(tok.substr(7));
          std::string item;
          while (std::getline(psr, item, ','))
            st.params.push_back(std::stod(item));
        } else {
          fail("unknown step token '" + tok + "'");
        }
      }
      d.steps.push_back(std::move(st));
    } else {
      fail("unknown directive '" + head + "'");
    }
  }
  if (!have_start || !have_end)
    throw Error(ErrorCode::ParseError, path + ": missing start or end");
  return d;
}

namespace {

bool semantically_checkable(const Circuit &c, int max_qubits) {
  int live = c.n_in;
  int peak = live;
  for (const Gate &g : c.gates) {
    if (g.kind == GateKind::Init) ++live;
    if (g.kind == GateKind::Free || g.kind == GateKind::Discard) --live;
    peak = std::max(peak, live);
  }
  int cap = c.theory == Theory::QCground ? max_qubits / 2 : max_qubits;
  return peak <= cap;
}

double semantic_gap(const Circuit &a, const Circuit &b, int max_qubits) {
  if (a.theory == Theory::QCground)
    return superop_distance(eval_cptp(a, max_qubits), eval_cptp(b, max_qubits));
  return max_abs_diff(eval_unitary(a, max_qubits), eval_unitary(b, max_qubits));
}

} // namespace

ReplayReport replay(const Derivation &d, int max_qubits,
                    bool semantic_checks) {
  ReplayReport rep;
  rep.name = d.name;
  Circuit cur = d.start;
  for (std::size_t i = 0; i < d.steps.size(); ++i) {
    const DerivationStep &st = d.steps[i];
    StepReport sr;
    sr.index = i;
    sr.rule = st.rule;
    MatchHints hints;
    hints.anchor = st.anchor;
    hints.wires = st.wires;
    hints.params = st.params;
    try {
      std::vector<Match> ms = st.anchor || !st.wires.empty() || !st.params.empty()
                                  ? find_matches_hinted(cur, st.rule, st.l2r, hints)
                                  : find_matches(cur, st.rule, st.l2r);
      if (ms.empty())
        throw Error(ErrorCode::StepFailed,
                    "no match for " + st.rule + (st.l2r ? " L2R" : " R2L"));
      Circuit next = apply_match(cur, ms.front());
      if (semantic_checks && semantically_checkable(cur, max_qubits) &&
          semantically_checkable(next, max_qubits)) {
        sr.deviation = semantic_gap(cur, next, max_qubits);
        if (sr.deviation > 1e-9)
          throw Error(ErrorCode::StepFailed,
                      "semantic drift " + std::to_string(sr.deviation));
      }
      cur = std::move(next);
      sr.ok = true;
    } catch (const Error &e) {
      sr.ok = false;
      sr.message = e.what();
      rep.steps.push_back(sr);
      rep.success = false;
      rep.message = "step " + std::to_string(i) + " failed: " + e.what();
      rep.result = cur;
      return rep;
    }
    rep.steps.push_back(sr);
  }
  Circuit got = deformation_normal_form(canonicalize_angles(cur));
  Circuit want = deformation_normal_form(canonicalize_angles(d.end));
  rep.result = cur;
  if (circuits_equal(got, want, 1e-8)) {
    rep.success = true;
  } else {
    rep.success = false;
    rep.message = "final circuit does not match the expected end";
  }
  return rep;
}

} // namespace qceq
