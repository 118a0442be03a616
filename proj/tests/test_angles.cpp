#include <doctest.h>

#include <cstring>

#include "qceq/angles.hpp"

using namespace qceq;

namespace {

Matrix hadamard() {
  Matrix h(2, 2);
  double s = 1.0 / std::sqrt(2.0);
  h << s, s, s, -s;
  return h;
}

bool canonical_zxz(const EulerAngles &e) {
  if (!(e.b1 >= 0 && e.b1 < kPi)) return false;
  for (double b : {e.b0, e.b2, e.b3})
    if (!(b >= 0 && b < kTau)) return false;
  if ((angle_is(e.b2, 0) || angle_is(e.b2, kPi)) && !angle_is(e.b1, 0))
    return false;
  return true;
}

} // namespace

TEST_CASE("euler_zxz canonical examples") {
  EulerAngles id = euler_zxz(Matrix::Identity(2, 2));
  CHECK(id.b0 == 0.0);
  CHECK(id.b1 == 0.0);
  CHECK(id.b2 == 0.0);
  CHECK(id.b3 == 0.0);

  // H = P(pi/2) Rx(pi/2) P(pi/2) exactly, with no global phase.
  EulerAngles h = euler_zxz(hadamard());
  CHECK(h.b0 == doctest::Approx(0.0));
  CHECK(h.b1 == doctest::Approx(kPi / 2));
  CHECK(h.b2 == doctest::Approx(kPi / 2));
  CHECK(h.b3 == doctest::Approx(kPi / 2));
  CHECK(max_abs_diff(euler_zxz_matrix(h), hadamard()) < 1e-12);

  Matrix p13(2, 2);
  p13 << 1, 0, 0, std::polar(1.0, 1.3);
  EulerAngles p = euler_zxz(p13);
  CHECK(p.b0 == 0.0);
  CHECK(p.b1 == 0.0); // b2 = 0 forces b1 = 0
  CHECK(p.b2 == 0.0);
  CHECK(p.b3 == doctest::Approx(1.3));

  Matrix junk = Matrix::Ones(2, 2);
  CHECK_THROWS_AS(euler_zxz(junk), Error);
}

TEST_CASE("euler reconstruction and canonicity on random unitaries") {
  std::mt19937_64 rng(123);
  for (int t = 0; t < 300; ++t) {
    Matrix u = random_unitary(2, rng);
    EulerAngles e = euler_zxz(u);
    CHECK(max_abs_diff(euler_zxz_matrix(e), u) < 1e-10);
    CHECK(canonical_zxz(e));
    EulerAngles x = euler_xzx(u);
    CHECK(max_abs_diff(euler_xzx_matrix(x), u) < 1e-10);
  }
}

TEST_CASE("euler determinism is bitwise on equal inputs") {
  std::mt19937_64 rng(77);
  Matrix u = random_unitary(2, rng);
  Matrix v = u; // exact copy
  EulerAngles a = euler_zxz(u), b = euler_zxz(v);
  CHECK(std::memcmp(&a, &b, sizeof a) == 0);
}

TEST_CASE("euler_xzx examples") {
  EulerAngles id = euler_xzx(Matrix::Identity(2, 2));
  CHECK(id.b0 == 0.0);
  CHECK(id.b1 == 0.0);
  CHECK(id.b2 == 0.0);
  CHECK(id.b3 == 0.0);

  Matrix rx(2, 2);
  double t = 2.1;
  rx << Complex(std::cos(t / 2), 0), Complex(0, -std::sin(t / 2)),
      Complex(0, -std::sin(t / 2)), Complex(std::cos(t / 2), 0);
  EulerAngles e = euler_xzx(rx);
  CHECK(e.b0 == doctest::Approx(0.0));
  CHECK(e.b1 == doctest::Approx(0.0));
  CHECK(e.b2 == doctest::Approx(0.0));
  CHECK(max_abs_diff(euler_xzx_matrix(e), rx) < 1e-12);

  EulerAngles h = euler_xzx(hadamard());
  CHECK(max_abs_diff(euler_xzx_matrix(h), hadamard()) < 1e-12);
}

TEST_CASE("solve_kstar examples") {
  KstarAngles z = solve_kstar({0, 0, 0, 0});
  for (double d : z.delta) CHECK(d == 0.0);

  // gamma = (0,0,0,2pi): the left side is a controlled Rx(2pi); the solver
  // reproduces it with the phase content in the delta4 rotation slot.
  KstarAngles k = solve_kstar({0, 0, 0, kTau});
  CHECK(max_abs_diff(kstar_rhs_block(k.delta), kstar_lhs_block(k.gamma)) <
        1e-12);
  CHECK(k.delta[3] == doctest::Approx(kTau));
  CHECK(kstar_is_canonical(k.delta));

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ang(-2 * kTau, 2 * kTau);
  for (int t = 0; t < 100; ++t) {
    std::array<double, 4> g{ang(rng), ang(rng), ang(rng), ang(rng)};
    KstarAngles kk = solve_kstar(g);
    CHECK(max_abs_diff(kstar_rhs_block(kk.delta), kstar_lhs_block(g)) < 1e-9);
    CHECK(kstar_is_canonical(kk.delta));
  }
}

TEST_CASE("solver output depends only on the block") {
  // gamma and gamma shifted by full periods share the semantics.
  std::array<double, 4> g1{1.2, 0.4, 2.2, 5.0};
  std::array<double, 4> g2{1.2 - 2 * kTau, 0.4 + kTau, 2.2, 5.0 - 2 * kTau};
  Matrix b1 = kstar_lhs_block(g1), b2 = kstar_lhs_block(g2);
  REQUIRE(max_abs_diff(b1, b2) < 1e-12);
  auto d1 = solve_kstar_block(b1);
  auto d1again = solve_kstar_block(b1); // identical inputs: bitwise equal
  for (int i = 0; i < 8; ++i) CHECK(d1[i] == d1again[i]);
  auto d2 = solve_kstar_block(b2); // equal semantics: canonical agreement
  for (int i = 0; i < 8; ++i)
    CHECK(std::abs(d1[i] - d2[i]) < 1e-9);
}

TEST_CASE("kstar conversions follow the closed-form case tables") {
  // all-zero tuple
  KstarAngles zero;
  KstarOldAngles old = kstar_old_from_new(zero);
  for (double d : old.delta) CHECK(d == 0.0);

  // delta'4 in [2pi,4pi) with delta'6 != 0 flips delta6 and shifts delta8/9.
  KstarAngles dn;
  dn.delta = {0.3, 0.0, 1.1, 2.5 * kPi, 0.0, 1.9, 0.7, 0.2};
  KstarOldAngles o = kstar_old_from_new(dn);
  CHECK(o.delta[8] == doctest::Approx(kPi));
  CHECK(o.delta[5] == doctest::Approx(kTau - 1.9));
  CHECK(o.delta[7] == doctest::Approx(mod_2pi(0.2 + kPi)));
  CHECK(o.delta[3] == doctest::Approx(2.5 * kPi - kTau));
  CHECK(kstar_old_is_canonical(o.delta));
  KstarAngles back = kstar_new_from_old(o);
  for (int i = 0; i < 8; ++i)
    CHECK(back.delta[i] == doctest::Approx(dn.delta[i]).epsilon(1e-12));

  // both right-hand sides carry the same semantics
  CHECK(max_abs_diff(kstar_old_rhs_block(o.delta), kstar_rhs_block(dn.delta)) <
        1e-12);

  std::mt19937_64 rng(99);
  for (int t = 0; t < 200; ++t) {
    KstarAngles c;
    c.delta = random_canonical_kstar(rng);
    KstarOldAngles g = kstar_old_from_new(c);
    CHECK(kstar_old_is_canonical(g.delta));
    KstarAngles f = kstar_new_from_old(g);
    for (int i = 0; i < 8; ++i)
      CHECK(std::abs(snap_angle(f.delta[i], 1e-12) -
                     snap_angle(c.delta[i], 1e-12)) <= 1e-12);
  }

  KstarAngles badTuple;
  badTuple.delta = {0.3, 0.2, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0}; // d3=0,d6!=0,d2!=0
  CHECK_THROWS_AS(kstar_old_from_new(badTuple), Error);
}

TEST_CASE("solve_kstar near-degenerate corners") {
  // gamma1, gamma4 near odd multiples of pi: the block sits a hair from the
  // boundary of the half-open canonicity ranges.
  std::array<double, 4> g{-15.7082, 0, 19.3432, 15.708};
  KstarAngles k = solve_kstar(g);
  CHECK(max_abs_diff(kstar_rhs_block(k.delta), kstar_lhs_block(g)) < 1e-9);
  CHECK(kstar_is_canonical(k.delta));

  // pure-phase branch: delta2 != 0 together with delta4 in {pi,3pi} is
  // canonical when delta3 = delta6 = 0.
  KstarAngles phase;
  phase.delta = {0, 0.5, 0, kPi, 0, 0, 1.0, 2.0};
  CHECK(kstar_is_canonical(phase.delta));
  KstarOldAngles old = kstar_old_from_new(phase);
  CHECK(old.delta[8] == doctest::Approx(0.5)); // delta9 carries the phase
  CHECK(old.delta[1] == 0.0);
  KstarAngles back = kstar_new_from_old(old);
  for (int i = 0; i < 8; ++i)
    CHECK(back.delta[i] == doctest::Approx(phase.delta[i]).epsilon(1e-12));
  // and the solver reproduces such a block canonically
  auto d = solve_kstar_block(kstar_rhs_block(phase.delta));
  CHECK(max_abs_diff(kstar_rhs_block(d), kstar_rhs_block(phase.delta)) <
        1e-9);
  CHECK(kstar_is_canonical(d));
}

TEST_CASE("kstar reverse extraction finds a preimage") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> ang(0, 2 * kTau);
  for (int t = 0; t < 50; ++t) {
    std::array<double, 4> g{ang(rng), ang(rng), ang(rng), ang(rng)};
    Matrix b = kstar_lhs_block(g);
    std::array<double, 4> g2 = kstar_gamma_from_block(b);
    CHECK(max_abs_diff(kstar_lhs_block(g2), b) < 1e-9);
  }
}
