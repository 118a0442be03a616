#pragma once

#include <random>

#include "qceq/circuit.hpp"
#include "qceq/matrix.hpp"

namespace qceq::testutil {

/// Random vanilla circuit on n wires (H, P, Rx, X, Z, CNot, Swap, controls).
inline Circuit random_qc_circuit(std::mt19937_64 &rng, int n, int len,
                                 bool allow_phase = true) {
  std::uniform_int_distribution<int> kind_pick(0, allow_phase ? 7 : 6);
  std::uniform_real_distribution<double> ang(0.0, 2 * kTau);
  std::uniform_int_distribution<int> wire(0, n - 1);
  Circuit c(Theory::QC, n);
  auto other_wire = [&](int w) {
    int v = wire(rng);
    while (v == w) v = wire(rng);
    return v;
  };
  for (int i = 0; i < len; ++i) {
    switch (kind_pick(rng)) {
    case 0: c.add(Gate::h(wire(rng))); break;
    case 1: c.add(Gate::p(ang(rng), wire(rng))); break;
    case 2: c.add(Gate::rx(ang(rng), wire(rng))); break;
    case 3: {
      if (n < 2) { c.add(Gate::x(wire(rng))); break; }
      int t = wire(rng);
      c.add(Gate::cnot(other_wire(t), t));
      break;
    }
    case 4: {
      if (n < 2) { c.add(Gate::z(wire(rng))); break; }
      int a = wire(rng);
      c.add(Gate::swap(a, other_wire(a)));
      break;
    }
    case 5: {
      int t = wire(rng);
      Gate g = Gate::p(ang(rng), t);
      if (n >= 2 && std::uniform_int_distribution<int>(0, 1)(rng)) {
        int cw = other_wire(t);
        g.controls.push_back({cw, std::uniform_int_distribution<int>(0, 1)(rng) == 1});
      }
      c.add(std::move(g));
      break;
    }
    case 6: {
      int t = wire(rng);
      Gate g = Gate::rx(ang(rng), t);
      if (n >= 3 && std::uniform_int_distribution<int>(0, 1)(rng)) {
        int c1 = other_wire(t);
        g.controls.push_back({c1, true});
      }
      c.add(std::move(g));
      break;
    }
    default: c.add(Gate::global_phase(ang(rng))); break;
    }
  }
  return c;
}

/// Random QCiso circuit: a few inits interleaved with vanilla gates.
inline Circuit random_iso_circuit(std::mt19937_64 &rng, int n_in, int inits,
                                  int len) {
  Circuit c(Theory::QCiso, n_in);
  int live = n_in;
  std::uniform_real_distribution<double> ang(0.0, kTau);
  std::uniform_int_distribution<int> pick(0, 5);
  for (int i = 0; i < len; ++i) {
    if (inits > 0 && (live < 2 || pick(rng) == 0)) {
      c.add(Gate::init());
      ++live;
      --inits;
      continue;
    }
    std::uniform_int_distribution<int> wire(0, live - 1);
    auto lw = c.live_wires();
    int t = lw[static_cast<std::size_t>(wire(rng))];
    switch (pick(rng)) {
    case 0: c.add(Gate::h(t)); break;
    case 1: c.add(Gate::p(ang(rng), t)); break;
    case 2: c.add(Gate::rx(ang(rng), t)); break;
    default: {
      if (live < 2) { c.add(Gate::h(t)); break; }
      int u = lw[static_cast<std::size_t>(wire(rng))];
      while (u == t) u = lw[static_cast<std::size_t>(wire(rng))];
      c.add(Gate::cnot(u, t));
      break;
    }
    }
  }
  while (inits-- > 0) c.add(Gate::init());
  return c;
}

} // namespace qceq::testutil
