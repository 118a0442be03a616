#include <doctest.h>

#include "qceq/circuit.hpp"
#include "qceq/circuit_io.hpp"
#include "qceq/semantics.hpp"
#include "test_util.hpp"

using namespace qceq;

TEST_CASE("compose_seq concatenates and checks arity") {
  Circuit h(Theory::QC, 1);
  h.add(Gate::h(0));
  Circuit hh = compose_seq(h, h);
  CHECK(hh.gates.size() == 2);
  CHECK(max_abs_diff(eval_unitary(hh), Matrix::Identity(2, 2)) < 1e-12);

  Circuit empty0(Theory::QC, 1);
  CHECK(circuits_equal(compose_seq(h, empty0), h));

  Circuit two(Theory::QC, 2);
  CHECK_THROWS_AS(compose_seq(h, two), Error);
  Circuit iso(Theory::QCiso, 1);
  CHECK_THROWS_AS(compose_seq(h, iso), Error);
}

TEST_CASE("compose_seq: CNot;CNot is the identity") {
  Circuit cx(Theory::QC, 2);
  cx.add(Gate::cnot(0, 1));
  Circuit c2 = compose_seq(cx, cx);
  CHECK(max_abs_diff(eval_unitary(c2), Matrix::Identity(4, 4)) == 0.0);
}

TEST_CASE("tensor shifts wires and keeps the unit law") {
  Circuit h(Theory::QC, 1);
  h.add(Gate::h(0));
  Circuit empty(Theory::QC, 0);
  CHECK(circuits_equal(tensor(empty, h), h));
  Circuit hh = tensor(h, h);
  REQUIRE(hh.n_in == 2);
  CHECK(hh.gates[0].targets[0] == 0);
  CHECK(hh.gates[1].targets[0] == 1);
}

TEST_CASE("tensor(Init, Id) evaluates to |0> (x) I") {
  Circuit init(Theory::QCiso, 0);
  init.add(Gate::init());
  Circuit id1(Theory::QCiso, 1);
  Matrix m = eval_unitary(tensor(init, id1));
  REQUIRE(m.rows() == 4);
  REQUIRE(m.cols() == 2);
  Matrix want = Matrix::Zero(4, 2); // |0> on the first factor
  want(0, 0) = 1;
  want(1, 1) = 1;
  CHECK(max_abs_diff(m, want) < 1e-12);
}

TEST_CASE("adjoint negates parametrized gates and reverses") {
  Circuit c(Theory::QC, 1);
  c.add(Gate::p(0.7, 0));
  Circuit a = adjoint(c);
  CHECK(a.gates[0].kind == GateKind::P);
  CHECK(a.gates[0].angle == doctest::Approx(-0.7));
  Circuit h(Theory::QC, 1);
  h.add(Gate::h(0));
  CHECK(circuits_equal(adjoint(h), h));

  std::mt19937_64 rng(11);
  Circuit r = testutil::random_qc_circuit(rng, 3, 18);
  Circuit ra = adjoint(r);
  // structural involution modulo angle normalization
  CHECK(circuits_equal(canonicalize_angles(adjoint(ra)), canonicalize_angles(r)));
  Matrix u = eval_unitary(r);
  CHECK(max_abs_diff(eval_unitary(ra), u.adjoint()) < 1e-10);
  Matrix prod = eval_unitary(compose_seq(r, ra));
  CHECK(max_abs_diff(prod, Matrix::Identity(8, 8)) < 1e-9);

  Circuit iso(Theory::QCiso, 0);
  iso.add(Gate::init());
  CHECK_THROWS_AS(adjoint(iso), Error);
}

TEST_CASE("expand_shortcuts reaches primitive generators and keeps semantics") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Circuit c(Theory::QC, 3);
    std::uniform_real_distribution<double> ang(0, 2 * kTau);
    c.add(Gate::toffoli(0, 1, 2));
    c.add(Gate::mcp(ang(rng), {0, 1}, 2));
    c.add(Gate::mcrx(ang(rng), {2}, 0));
    c.add(Gate::fredkin(0, 1, 2));
    Gate neg = Gate::x(2);
    neg.controls = {{0, false}, {1, true}};
    c.add(neg);
    c.add(Gate::z(1));
    c.add(Gate::rx(ang(rng), 0));
    Circuit e = expand_shortcuts(c);
    for (const Gate &g : e.gates) {
      bool primitive = g.kind == GateKind::GlobalPhase ||
                       g.kind == GateKind::H ||
                       (g.kind == GateKind::P && g.controls.empty()) ||
                       (g.kind == GateKind::X && g.is_cnot()) ||
                       (g.kind == GateKind::Swap && g.controls.empty());
      CHECK(primitive);
    }
    CHECK(max_abs_diff(eval_unitary(e), eval_unitary(c)) < 1e-10);
  }
}

TEST_CASE("expand_shortcuts: Rx and zero-control bases") {
  Circuit c(Theory::QC, 1);
  c.add(Gate::rx(1.25, 0));
  Circuit e = expand_shortcuts(c);
  REQUIRE(e.gates.size() == 4);
  CHECK(e.gates[0].kind == GateKind::GlobalPhase);
  CHECK(e.gates[0].angle == doctest::Approx(-0.625));
  CHECK(e.gates[1].kind == GateKind::H);
  CHECK(e.gates[2].kind == GateKind::P);
  CHECK(e.gates[3].kind == GateKind::H);

  // zero-control MCP is plain P
  Circuit p(Theory::QC, 1);
  p.add(Gate::mcp(0.5, {}, 0));
  Circuit ep = expand_shortcuts(p);
  REQUIRE(ep.gates.size() == 1);
  CHECK(ep.gates[0].kind == GateKind::P);
}

TEST_CASE("controlize implements diag(I, U)") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    Circuit c = testutil::random_qc_circuit(rng, 2, 10);
    Matrix u = eval_unitary(c);
    Circuit lc = controlize(c);
    Matrix v = eval_unitary(lc);
    Matrix want = Matrix::Identity(8, 8);
    want.bottomRightCorner(4, 4) = u;
    CHECK(max_abs_diff(v, want) < 1e-10);
  }
  // controlize(X) acts as CNot
  Circuit x(Theory::QC, 1);
  x.add(Gate::x(0));
  Matrix v = eval_unitary(controlize(x));
  Circuit cx(Theory::QC, 2);
  cx.add(Gate::cnot(0, 1));
  CHECK(max_abs_diff(v, eval_unitary(cx)) < 1e-12);
  // controlize(GlobalPhase) is P on the control wire
  Circuit ph(Theory::QC, 0);
  ph.add(Gate::global_phase(0.9));
  Circuit lp = controlize(ph);
  REQUIRE(lp.gates.size() == 1);
  CHECK(lp.gates[0].kind == GateKind::P);
  CHECK(lp.gates[0].targets[0] == 0);
  // controlize of an idle wire is the identity on two wires
  Circuit idle(Theory::QC, 1);
  Circuit lidle = controlize(idle);
  CHECK(lidle.n_in == 2);
  CHECK(max_abs_diff(eval_unitary(lidle), Matrix::Identity(4, 4)) == 0.0);
}

TEST_CASE("validate catches bookkeeping violations") {
  Circuit c(Theory::QC, 2);
  c.add(Gate::cnot(0, 1));
  CHECK(!validate(c));
  Circuit bad(Theory::QC, 1);
  bad.add(Gate::h(1));
  CHECK(validate(bad).has_value());
  Circuit dup(Theory::QC, 2);
  dup.add(Gate::swap(1, 1));
  CHECK(validate(dup).has_value());
  Circuit wrongTheory(Theory::QC, 1);
  wrongTheory.add(Gate::init());
  CHECK(validate(wrongTheory).has_value());
  Circuit ground(Theory::QCground, 0);
  ground.add(Gate::global_phase(1.0));
  CHECK(validate(ground).has_value());
  Circuit freed(Theory::QCancilla, 1);
  freed.add(Gate::free_wire(0));
  freed.add(Gate::h(0)); // wire is gone
  CHECK(validate(freed).has_value());
}

TEST_CASE("text round trip and parse errors with line numbers") {
  std::string text =
      "qubits 2\n"
      "theory qciso\n"
      "H 0\n"
      "P(0.785398) 1\n"
      "CX 0 1\n"
      "INIT\n"
      "CTRL[+0,-2] P(0.5) 1\n"
      "SWAP 1 2\n";
  Circuit c = parse_circuit_text(text);
  CHECK(c.n_in == 2);
  CHECK(c.gates.size() == 6);
  Circuit back = parse_circuit_text(circuit_to_text(c));
  CHECK(circuits_equal(back, c, 1e-12));
  Circuit viaJson = circuit_from_json(circuit_to_json(c));
  CHECK(circuits_equal(viaJson, c, 1e-12));

  try {
    parse_circuit_text("qubits 1\nH 3\n");
    FAIL("expected a parse error");
  } catch (const Error &e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  try {
    parse_circuit_text("qubits 1\nFROB 0\n");
    FAIL("expected a parse error");
  } catch (const Error &e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  // discard in a non-ground theory is rejected at parse time
  CHECK_THROWS_AS(parse_circuit_text("qubits 1\ntheory qc\nDISCARD 0\n"), Error);
}

TEST_CASE("interchange law holds semantically") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 5; ++t) {
    Circuit c1 = testutil::random_qc_circuit(rng, 2, 5);
    Circuit c2 = testutil::random_qc_circuit(rng, 1, 4);
    Circuit c3 = testutil::random_qc_circuit(rng, 2, 5);
    Circuit c4 = testutil::random_qc_circuit(rng, 1, 4);
    Matrix lhs = eval_unitary(compose_seq(tensor(c1, c2), tensor(c3, c4)));
    Matrix rhs = eval_unitary(tensor(compose_seq(c1, c3), compose_seq(c2, c4)));
    CHECK(max_abs_diff(lhs, rhs) < 1e-10);
  }
}
