#include <doctest.h>

#include "qceq/semantics.hpp"
#include "qceq/synthesis.hpp"
#include "test_util.hpp"

using namespace qceq;

namespace {

Matrix embed_block(const Matrix &inner, Eigen::Index total) {
  Matrix u = Matrix::Identity(total, total);
  u.bottomRightCorner(inner.rows(), inner.cols()) = inner;
  return u;
}

} // namespace

TEST_CASE("factorization conventions") {
  std::mt19937_64 rng(2);
  // identity
  QrFactors qi = qr_decompose(Matrix::Identity(4, 4));
  CHECK(max_abs_diff(qi.q, Matrix::Identity(4, 4)) < 1e-14);
  CHECK(max_abs_diff(qi.r, Matrix::Identity(4, 4)) < 1e-14);
  // diagonal phases are absorbed into Q
  Matrix d = Matrix::Zero(3, 3);
  d(0, 0) = std::polar(2.0, 0.3);
  d(1, 1) = std::polar(1.5, -1.1);
  d(2, 2) = std::polar(0.5, 2.2);
  QrFactors qd = qr_decompose(d);
  for (int i = 0; i < 3; ++i) {
    CHECK(qd.r(i, i).imag() == doctest::Approx(0.0));
    CHECK(qd.r(i, i).real() >= 0.0);
  }
  CHECK(max_abs_diff(qd.q * qd.r, d) < 1e-12);
  // random reconstruction for QR / QL / RQ / SVD
  for (int t = 0; t < 5; ++t) {
    Matrix a(8, 8);
    std::normal_distribution<double> g(0, 1);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) a(i, j) = Complex(g(rng), g(rng));
    QrFactors qr = qr_decompose(a);
    CHECK(max_abs_diff(qr.q * qr.r, a) < 1e-11);
    QlFactors ql = ql_decompose(a);
    CHECK(max_abs_diff(ql.q * ql.l, a) < 1e-11);
    for (int i = 0; i < 8; ++i) {
      CHECK(ql.l(i, i).imag() == doctest::Approx(0.0));
      CHECK(ql.l(i, i).real() >= -1e-12);
      for (int j = i + 1; j < 8; ++j) CHECK(std::abs(ql.l(i, j)) < 1e-11);
    }
    RqFactors rq = rq_decompose(a);
    CHECK(max_abs_diff(rq.r * rq.q, a) < 1e-11);
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < i; ++j) CHECK(std::abs(rq.r(i, j)) < 1e-11);
    SvdFactors svd = svd_decompose(a);
    CHECK(max_abs_diff(svd.u * svd.d.asDiagonal().toDenseMatrix().cast<Complex>() * svd.v, a) < 1e-11);
    for (int i = 0; i + 1 < 8; ++i) CHECK(svd.d(i) >= svd.d(i + 1));
  }
}

TEST_CASE("csd_modified block-diagonal case has no rotations") {
  std::mt19937_64 rng(3);
  Matrix u00 = random_unitary(2, rng);
  Matrix u11 = random_unitary(4, rng);
  Matrix u = Matrix::Zero(8, 8);
  u.topLeftCorner(2, 2) = Matrix::Identity(2, 2);
  u.block(2, 2, 2, 2) = u00;
  u.bottomRightCorner(4, 4) = u11;
  CsdBlocks b = csd_modified(u, 2);
  CHECK(b.d == 0);
  CHECK(max_abs_diff(csd_reconstruct(b), u) < 1e-10);
}

TEST_CASE("csd_modified single rotation pair for a controlled rotation") {
  double theta = 1.31;
  double c = std::cos(theta / 2), s = std::sin(theta / 2);
  // Rotation between |01> and |11> (the CSD pair for k = 1): the 2-qubit
  // controlled-Rx with target on the first qubit, conjugated to real form.
  Matrix u = Matrix::Identity(4, 4);
  u(1, 1) = c;
  u(1, 3) = -s;
  u(3, 1) = s;
  u(3, 3) = c;
  CsdBlocks b = csd_modified(u, 1);
  REQUIRE(b.d == 1);
  CHECK(b.c(0) == doctest::Approx(c));
  CHECK(b.s(0) == doctest::Approx(s));
  CHECK(max_abs_diff(csd_reconstruct(b), u) < 1e-12);
}

TEST_CASE("csd_modified random blocks reconstruct") {
  std::mt19937_64 rng(5);
  for (int n : {3, 4}) {
    Eigen::Index dim = Eigen::Index(1) << n;
    for (Eigen::Index k : {Eigen::Index(1), Eigen::Index(2), Eigen::Index(4)}) {
      Matrix inner = random_unitary(static_cast<int>(dim - k), rng);
      Matrix u = Matrix::Identity(dim, dim);
      u.bottomRightCorner(dim - k, dim - k) = inner;
      CsdBlocks b = csd_modified(u, k);
      CHECK(max_abs_diff(csd_reconstruct(b), u) < 1e-10);
      for (Eigen::Index t = 0; t < b.d; ++t) {
        CHECK(b.c(t) < 1.0);
        CHECK(b.c(t) * b.c(t) + b.s(t) * b.s(t) == doctest::Approx(1.0).epsilon(1e-12));
      }
      CHECK(is_unitary(b.a0, {1e-10}));
      CHECK(is_unitary(b.a1, {1e-10}));
      CHECK(is_unitary(b.b0, {1e-10}));
      CHECK(is_unitary(b.b1, {1e-10}));
    }
  }
  CHECK_THROWS_AS(csd_modified(Matrix::Ones(4, 4), 1), Error);
  std::mt19937_64 rng2(6);
  Matrix notid = random_unitary(4, rng2);
  CHECK_THROWS_AS(csd_modified(notid, 2), Error);
}

TEST_CASE("synth_unitary round trips") {
  std::mt19937_64 rng(7);
  // identity gives an empty-equivalent circuit
  Circuit idc = synth_unitary(Matrix::Identity(4, 4));
  CHECK(idc.gates.empty());
  // CNot reproduces exactly
  Circuit cx(Theory::QC, 2);
  cx.add(Gate::cnot(0, 1));
  Matrix ucx = eval_unitary(cx);
  Circuit scx = synth_unitary(ucx);
  CHECK(max_abs_diff(eval_unitary(scx), ucx) < 1e-10);
  for (int n = 1; n <= 3; ++n) {
    for (int t = 0; t < 4; ++t) {
      Matrix u = random_unitary(1 << n, rng);
      Circuit c = synth_unitary(u);
      CHECK(max_abs_diff(eval_unitary(c), u) < 1e-8);
      // determinism
      Circuit c2 = synth_unitary(u);
      CHECK(circuits_equal(c, c2, 0.0));
    }
  }
}

TEST_CASE("synth_zero_controlled realizes the zero-controlled block") {
  std::mt19937_64 rng(9);
  // n_init = 1 on two wires
  Matrix inner = random_unitary(2, rng);
  Matrix u = embed_block(inner, 4);
  Circuit c = synth_zero_controlled(u, 1);
  Matrix got = eval_unitary(c);
  Matrix want = u.leftCols(2);
  CHECK(max_abs_diff(got, want) < 1e-8);

  // n_init = 2 on three wires
  Matrix inner2 = random_unitary(6, rng);
  Matrix u2 = Matrix::Identity(8, 8);
  u2.bottomRightCorner(6, 6) = inner2;
  Circuit c2 = synth_zero_controlled(u2, 2);
  Matrix got2 = eval_unitary(c2);
  CHECK(max_abs_diff(got2, u2.leftCols(2)) < 1e-8);

  // u = I: bare inits
  Circuit c3 = synth_zero_controlled(Matrix::Identity(8, 8), 2);
  Matrix got3 = eval_unitary(c3);
  CHECK(max_abs_diff(got3, Matrix::Identity(8, 8).leftCols(2)) < 1e-12);

  CHECK_THROWS_AS(synth_zero_controlled(random_unitary(8, rng), 2), Error);
}

TEST_CASE("synth_isometry round trips") {
  std::mt19937_64 rng(11);
  // |0> from nothing
  Matrix ket0 = Matrix::Zero(2, 1);
  ket0(0, 0) = 1;
  Circuit c0 = synth_isometry(ket0);
  CHECK(max_abs_diff(eval_unitary(c0), ket0) < 1e-10);

  // standard-basis copy |x> -> |xx> matches Init + CNot
  Matrix copy = Matrix::Zero(4, 2);
  copy(0, 0) = 1;
  copy(3, 1) = 1;
  Circuit cc = synth_isometry(copy);
  Circuit reference(Theory::QCiso, 1);
  reference.add(Gate::init()).add(Gate::cnot(0, 1));
  CHECK(max_abs_diff(eval_unitary(cc), eval_unitary(reference)) < 1e-10);

  for (int t = 0; t < 6; ++t) {
    int m = 2 + static_cast<int>(rng() % 3); // up to 4 total qubits
    int n = 1 + static_cast<int>(rng() % m);
    if (n > m) n = m;
    Matrix v = random_isometry(1 << m, 1 << n, rng);
    Circuit c = synth_isometry(v, 7);
    CHECK(max_abs_diff(eval_unitary(c), v) < 1e-8);
  }
  CHECK_THROWS_AS(synth_isometry(Matrix::Ones(4, 2)), Error);
}
