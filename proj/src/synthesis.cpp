#include "qceq/synthesis.hpp"

#include <algorithm>
#include <cmath>

#include "qceq/angles.hpp"
#include "qceq/semantics.hpp"

namespace qceq {

namespace {

bool is_pow2(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

int log2i(Eigen::Index n) {
  int k = 0;
  while ((Eigen::Index(1) << k) < n) ++k;
  return k;
}

} // namespace

CsdBlocks csd_modified(const Matrix &u, Eigen::Index k) {
  const Eigen::Index n = u.rows();
  if (u.cols() != n || !is_pow2(n) || n < 2)
    throw Error(ErrorCode::DimensionMismatch, "csd_modified wants a square power-of-two matrix");
  if (!is_unitary(u, {1e-8}))
    throw Error(ErrorCode::NotUnitary, "csd_modified input");
  const Eigen::Index half = n / 2;
  if (k < 0 || k > half)
    throw Error(ErrorCode::DimensionMismatch, "identity block exceeds half dimension");
  Matrix idk = Matrix::Identity(k, k);
  if (k > 0 && max_abs_diff(u.topLeftCorner(k, k), idk) > 1e-9)
    throw Error(ErrorCode::BlockNotIdentity, "top-left block is not I");

  const Eigen::Index m0 = half - k, m1 = half;
  Matrix u00 = u.block(k, k, m0, m0);
  Matrix u01 = u.block(k, half, m0, m1);
  Matrix u10 = u.block(half, k, m1, m0);
  Matrix u11 = u.block(half, half, m1, m1);

  CsdBlocks out;
  out.k = k;
  out.half = half;

  SvdFactors svd;
  if (m0 > 0) {
    svd = svd_decompose(u00); // u00 = A0 C0 B0
  } else {
    svd.u = Matrix(0, 0);
    svd.v = Matrix(0, 0);
    svd.d = Eigen::VectorXd(0);
  }
  out.a0 = svd.u;
  out.b0 = svd.v;

  Matrix x = Matrix::Zero(m1, half);
  if (m0 > 0) x.rightCols(m0) = u10 * out.b0.adjoint();
  QlFactors ql = ql_decompose(x); // x = A1 L
  out.a1 = ql.q;

  Matrix y = Matrix::Zero(half, m1);
  if (m0 > 0) y.bottomRows(m0) = out.a0.adjoint() * u01;
  RqFactors rq = rq_decompose(y); // y = R B1p
  Matrix b1p = rq.q;

  // Unit singular values sort first; everything after the first entry with a
  // genuinely nonzero sine participates in a rotation pair.
  Eigen::Index i0 = 0;
  while (i0 < m0 && ql.l(k + i0, k + i0).real() <= 1e-12) ++i0;
  const Eigen::Index d = m0 - i0;
  out.d = d;
  out.c.resize(d);
  out.s.resize(d);
  for (Eigen::Index t = 0; t < d; ++t) {
    out.c(t) = std::min(svd.d(i0 + t), 1.0);
    out.s(t) = ql.l(k + i0 + t, k + i0 + t).real();
  }

  // Fold the residual unitary block of A1^dag U11 B1p^dag into B1.
  Matrix z = out.a1.adjoint() * u11 * b1p.adjoint();
  Matrix fold = Matrix::Zero(m1, m1);
  fold.topLeftCorner(m1 - d, m1 - d) = z.topLeftCorner(m1 - d, m1 - d);
  fold.bottomRightCorner(d, d) = -Matrix::Identity(d, d);
  out.b1 = fold * b1p;
  return out;
}

Matrix csd_reconstruct(const CsdBlocks &b) {
  const Eigen::Index n = 2 * b.half;
  Matrix left = Matrix::Zero(n, n);
  left.topLeftCorner(b.k, b.k) = Matrix::Identity(b.k, b.k);
  left.block(b.k, b.k, b.a0.rows(), b.a0.cols()) = b.a0;
  left.bottomRightCorner(b.a1.rows(), b.a1.cols()) = b.a1;
  Matrix right = Matrix::Zero(n, n);
  right.topLeftCorner(b.k, b.k) = Matrix::Identity(b.k, b.k);
  right.block(b.k, b.k, b.b0.rows(), b.b0.cols()) = b.b0;
  right.bottomRightCorner(b.b1.rows(), b.b1.cols()) = b.b1;
  Matrix mid = Matrix::Identity(n, n);
  for (Eigen::Index t = 0; t < b.d; ++t) {
    Eigen::Index j = b.half - b.d + t;
    mid(j, j) = b.c(t);
    mid(j, j + b.half) = -b.s(t);
    mid(j + b.half, j) = b.s(t);
    mid(j + b.half, j + b.half) = b.c(t);
  }
  return left * mid * right;
}

namespace {

// wire w <-> bit (n-1-w); bit 0 is the least significant index bit.
int wire_of_bit(int n, int bit) { return n - 1 - bit; }

void emit_controlled_phase(std::vector<Gate> &gs, int n, double phase,
                           std::vector<Control> ctrls) {
  (void)n;
  if (angle_is(mod_2pi(snap_angle(phase)), 0, 1e-12)) return;
  if (ctrls.empty()) {
    gs.push_back(Gate::global_phase(phase));
    return;
  }
  auto pos = std::find_if(ctrls.begin(), ctrls.end(),
                          [](const Control &c) { return c.positive; });
  if (pos == ctrls.end()) {
    Control flip = ctrls.front();
    gs.push_back(Gate::x(flip.wire));
    std::vector<Control> rest = ctrls;
    rest.front().positive = true;
    emit_controlled_phase(gs, n, phase, std::move(rest));
    gs.push_back(Gate::x(flip.wire));
    return;
  }
  Gate g = Gate::p(phase, pos->wire);
  for (const Control &c : ctrls)
    if (c.wire != pos->wire) g.controls.push_back(c);
  gs.push_back(std::move(g));
}

void emit_controlled_1q(std::vector<Gate> &gs, int n, int target_wire,
                        const Matrix &w, const std::vector<Control> &ctrls) {
  EulerAngles e = euler_zxz(w);
  auto nonzero = [](double a, double period) {
    return !angle_is(mod_pos(snap_angle(a), period), 0, 1e-12);
  };
  if (nonzero(e.b1, kTau)) {
    Gate g = Gate::p(e.b1, target_wire);
    g.controls = ctrls;
    gs.push_back(std::move(g));
  }
  if (nonzero(e.b2, 2 * kTau)) {
    Gate g = Gate::rx(e.b2, target_wire);
    g.controls = ctrls;
    gs.push_back(std::move(g));
  }
  if (nonzero(e.b3, kTau)) {
    Gate g = Gate::p(e.b3, target_wire);
    g.controls = ctrls;
    gs.push_back(std::move(g));
  }
  emit_controlled_phase(gs, n, e.b0, ctrls);
}

// Two-level unitary w on basis states (r, s), routed along a Gray path.
void emit_two_level(std::vector<Gate> &gs, int n, long long r, long long s,
                    const Matrix &w) {
  std::vector<int> flips;
  for (int b = 0; b < n; ++b)
    if (((r ^ s) >> b) & 1) flips.push_back(b);
  long long v = r;
  std::vector<Gate> route;
  for (std::size_t i = 0; i + 1 < flips.size(); ++i) {
    int bit = flips[i];
    long long nxt = v ^ (1LL << bit);
    Gate g = Gate::x(wire_of_bit(n, bit));
    for (int b = 0; b < n; ++b)
      if (b != bit)
        g.controls.push_back({wire_of_bit(n, b), ((nxt >> b) & 1) != 0});
    route.push_back(g);
    v = nxt;
  }
  int core_bit = flips.back();
  std::vector<Control> ctrls;
  for (int b = 0; b < n; ++b)
    if (b != core_bit)
      ctrls.push_back({wire_of_bit(n, b), ((s >> b) & 1) != 0});
  // The (r,s) ordering maps onto the target bit being 0 / 1.
  Matrix w_eff = w;
  if ((v >> core_bit) & 1) {
    // v reached the bit-set side: swap the roles of |0> and |1>.
    Matrix xw(2, 2);
    xw << 0, 1, 1, 0;
    w_eff = xw * w * xw;
  }
  for (const Gate &g : route) gs.push_back(g);
  emit_controlled_1q(gs, n, wire_of_bit(n, core_bit), w_eff, ctrls);
  for (auto it = route.rbegin(); it != route.rend(); ++it) gs.push_back(*it);
}

struct TwoLevelOp {
  long long lo, hi;
  Matrix t; // applied matrix on basis pair (lo, hi)
};

} // namespace

Circuit synth_unitary(const Matrix &u, int max_qubits) {
  const Eigen::Index dim = u.rows();
  if (u.cols() != dim || !is_pow2(dim))
    throw Error(ErrorCode::DimensionMismatch, "synth_unitary wants a square power-of-two matrix");
  if (!is_unitary(u, {1e-8}))
    throw Error(ErrorCode::NotUnitary, "synth_unitary input");
  const int n = log2i(dim);
  if (n > max_qubits)
    throw Error(ErrorCode::DimensionCap,
                "synth_unitary cap is " + std::to_string(max_qubits));
  Circuit out(Theory::QC, n);
  if (n == 0) {
    double ph = std::arg(u(0, 0));
    if (!angle_is(mod_2pi(snap_angle(ph)), 0, 1e-12))
      out.add(Gate::global_phase(ph));
    return out;
  }
  Matrix v = u;
  std::vector<TwoLevelOp> ops;
  auto apply_pair = [&](long long lo, long long hi, const Matrix &t) {
    Eigen::RowVectorXcd a = v.row(lo), b = v.row(hi);
    v.row(lo) = t(0, 0) * a + t(0, 1) * b;
    v.row(hi) = t(1, 0) * a + t(1, 1) * b;
    ops.push_back({lo, hi, t});
  };
  for (long long c = 0; c < dim; ++c) {
    for (long long r = dim - 1; r > c; --r) {
      if (std::abs(v(r, c)) <= 1e-14) continue;
      Complex a = v(c, c), b = v(r, c);
      double norm = std::sqrt(std::norm(a) + std::norm(b));
      Matrix t(2, 2);
      t << std::conj(a) / norm, std::conj(b) / norm, -b / norm, a / norm;
      apply_pair(c, r, t);
    }
    double ph = std::arg(v(c, c));
    if (!angle_is(mod_2pi(snap_angle(ph)), 0, 1e-13)) {
      Matrix t = Matrix::Identity(2, 2);
      long long partner = c + 1 < dim ? c + 1 : c - 1;
      long long lo = std::min(c, partner), hi = std::max(c, partner);
      if (c == lo)
        t(0, 0) = std::polar(1.0, -ph);
      else
        t(1, 1) = std::polar(1.0, -ph);
      apply_pair(lo, hi, t);
    }
  }
  for (auto it = ops.rbegin(); it != ops.rend(); ++it)
    emit_two_level(out.gates, n, it->lo, it->hi, it->t.adjoint());
  return out;
}

namespace {

// Gray-code multiplexed-Rx ladder on wire 0 controlled by wires 1..m-1, with
// one branch angle per control pattern.
void emit_multiplexed_rx(std::vector<Gate> &gs, int m,
                         const std::vector<double> &theta) {
  const long long branches = 1LL << (m - 1);
  if (m == 1) {
    if (!angle_is(mod_4pi(snap_angle(theta[0])), 0, 1e-12))
      gs.push_back(Gate::rx(theta[0], 0));
    return;
  }
  bool all_zero = true;
  for (double t : theta)
    if (!angle_is(mod_4pi(snap_angle(t)), 0, 1e-12)) all_zero = false;
  if (all_zero) return;
  auto gray = [](long long x) { return x ^ (x >> 1); };
  std::vector<double> phi(static_cast<std::size_t>(branches), 0.0);
  for (long long sidx = 0; sidx < branches; ++sidx) {
    double acc = 0;
    for (long long i = 0; i < branches; ++i) {
      int sign = __builtin_popcountll(static_cast<unsigned long long>(i & gray(sidx))) & 1 ? -1 : 1;
      acc += sign * theta[static_cast<std::size_t>(i)];
    }
    phi[static_cast<std::size_t>(sidx)] = acc / static_cast<double>(branches);
  }
  gs.push_back(Gate::p(kPi / 2, 0));
  for (long long sidx = 0; sidx < branches; ++sidx) {
    gs.push_back(Gate::rx(phi[static_cast<std::size_t>(sidx)], 0));
    long long diff = gray(sidx) ^ gray((sidx + 1) % branches);
    int bit = 0;
    while (!((diff >> bit) & 1)) ++bit;
    // pattern bit b of the branch index lives on wire (m-1) - b
    gs.push_back(Gate::cnot(m - 1 - bit, 0));
  }
  gs.push_back(Gate::p(-kPi / 2, 0));
}

// Vanilla circuit for a block unitary diag(I_{2^{m-j}}, *) on m qubits.
Circuit synth_block(const Matrix &u, int j, int m) {
  Circuit out(Theory::QC, m);
  const Eigen::Index dim = u.rows();
  if (max_abs_diff(u, Matrix::Identity(dim, dim)) <= 1e-13) return out;
  if (j <= 0) return synth_unitary(u, m);
  const Eigen::Index half = dim / 2;
  if (j == 1) {
    // diag(I, U11): controlise a circuit for the lower block (Lemma 10 path).
    Matrix u11 = u.bottomRightCorner(half, half);
    return controlize(synth_unitary(u11, m - 1));
  }
  CsdBlocks csd = csd_modified(u, Eigen::Index(1) << (m - j));

  auto append = [&](const Circuit &c) {
    for (const Gate &g : c.gates) out.add(g);
  };
  auto wrapped_block = [&](const Matrix &top, const Matrix &bottom) {
    // diag(diag(I_k, top), bottom) on m wires, top/bottom of dim 2^(m-1).
    Circuit part(Theory::QC, m);
    Matrix wtop = Matrix::Identity(half, half);
    wtop.bottomRightCorner(top.rows(), top.cols()) = top;
    if (max_abs_diff(wtop, Matrix::Identity(half, half)) > 1e-13) {
      part.add(Gate::x(0));
      Circuit inner = controlize(synth_block(wtop, j - 1, m - 1));
      for (const Gate &g : inner.gates) part.add(g);
      part.add(Gate::x(0));
    }
    if (max_abs_diff(bottom, Matrix::Identity(half, half)) > 1e-13) {
      Circuit inner = controlize(synth_unitary(bottom, m - 1));
      for (const Gate &g : inner.gates) part.add(g);
    }
    return part;
  };

  // u = A * mid * B; B acts first.
  append(wrapped_block(csd.b0, csd.b1));
  std::vector<double> theta(static_cast<std::size_t>(half), 0.0);
  for (Eigen::Index t = 0; t < csd.d; ++t)
    theta[static_cast<std::size_t>(half - csd.d + t)] =
        2.0 * std::atan2(csd.s(t), csd.c(t));
  emit_multiplexed_rx(out.gates, m, theta);
  append(wrapped_block(csd.a0, csd.a1));
  return out;
}

// Initialisations plus the swap layer placing them on the top wires.
Circuit init_header(int m, int j) {
  Circuit out(Theory::QCiso, m - j);
  for (int t = 0; t < j; ++t) out.add(Gate::init());
  // position p should receive the state currently at sigma(p)
  std::vector<int> src(static_cast<std::size_t>(m));
  for (int p = 0; p < m; ++p)
    src[static_cast<std::size_t>(p)] = p < j ? (m - j + p) : (p - j);
  std::vector<int> cur(static_cast<std::size_t>(m));
  for (int p = 0; p < m; ++p) cur[static_cast<std::size_t>(p)] = p;
  for (int p = 0; p < m; ++p) {
    auto it = std::find(cur.begin(), cur.end(), src[static_cast<std::size_t>(p)]);
    int q = static_cast<int>(it - cur.begin());
    if (q == p) continue;
    out.add(Gate::swap(p, q));
    std::swap(cur[static_cast<std::size_t>(p)], cur[static_cast<std::size_t>(q)]);
  }
  return out;
}

} // namespace

Circuit synth_zero_controlled(const Matrix &u, int n_init) {
  const Eigen::Index dim = u.rows();
  if (u.cols() != dim || !is_pow2(dim))
    throw Error(ErrorCode::ShapeMismatch, "expected a square power-of-two matrix");
  const int m = log2i(dim);
  if (n_init < 0 || n_init > m)
    throw Error(ErrorCode::ShapeMismatch, "init count out of range");
  if (!is_unitary(u, {1e-8}))
    throw Error(ErrorCode::NotUnitary, "synth_zero_controlled input");
  Eigen::Index k = Eigen::Index(1) << (m - n_init);
  if (n_init > 0 &&
      max_abs_diff(u.topLeftCorner(k, k), Matrix::Identity(k, k)) > 1e-8)
    throw Error(ErrorCode::ShapeMismatch, "block is not diag(I, *)");

  Circuit out = init_header(m, n_init);
  Circuit block = n_init == 0 ? synth_unitary(u, m) : synth_block(u, n_init, m);
  for (const Gate &g : block.gates) out.add(g);
  validate_or_throw(out);
  return out;
}

Circuit synth_isometry(const Matrix &v, std::uint64_t seed) {
  const Eigen::Index rows = v.rows(), cols = v.cols();
  if (!is_pow2(rows) || !is_pow2(cols) || cols > rows)
    throw Error(ErrorCode::ShapeMismatch, "isometry dims must be powers of two");
  if (!is_isometry(v, {1e-9}))
    throw Error(ErrorCode::NotIsometry, "synth_isometry input");
  const int m = log2i(rows), n = log2i(cols);
  std::mt19937_64 rng(seed);
  Matrix ext(rows, rows);
  ext.leftCols(cols) = v;
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index jj = cols; jj < rows; ++jj)
      ext(i, jj) = Complex(gauss(rng), gauss(rng));
  // Householder QR keeps the leading orthonormal columns in place (their R
  // diagonal is 1), so Q extends v to a unitary.
  Matrix q = qr_decompose(ext).q;
  Circuit out = init_header(m, m - n);
  Circuit block = synth_unitary(q, m);
  for (const Gate &g : block.gates) out.add(g);
  validate_or_throw(out);
  return out;
}

} // namespace qceq
