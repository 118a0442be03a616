#include "qceq/semantics.hpp"

#include <algorithm>
#include <cmath>

namespace qceq {

namespace {

// Row-space local gate application. The state is a (2^L * stride) x C matrix
// whose row index decomposes as r_hi * 2^L * ... ; we act on a chosen L-bit
// field of the row index. `bit_shift` is the position of the field's least
// significant bit, `conjugate` conjugates the gate coefficients (used for
// the column side of superoperators).
struct RowField {
  int live_count;
  int bit_shift;
  bool conjugate;
};

int find_pos(const std::vector<int> &order, int wire) {
  auto it = std::find(order.begin(), order.end(), wire);
  return static_cast<int>(it - order.begin());
}

void apply_gate_field(Matrix &m, const std::vector<int> &order, const Gate &g,
                      RowField f) {
  const int L = f.live_count;
  auto bit_of = [&](int wire) {
    long long p = find_pos(order, wire);
    return 1LL << (f.bit_shift + (L - 1 - p));
  };
  const long long rows = m.rows();
  long long ctrl_mask = 0, ctrl_want = 0;
  for (const Control &c : g.controls) {
    long long b = bit_of(c.wire);
    ctrl_mask |= b;
    if (c.positive) ctrl_want |= b;
  }
  auto ctrl_ok = [&](long long r) { return (r & ctrl_mask) == ctrl_want; };

  switch (g.kind) {
  case GateKind::GlobalPhase: {
    Complex ph = std::polar(1.0, f.conjugate ? -g.angle : g.angle);
    m *= ph;
    return;
  }
  case GateKind::P:
  case GateKind::Z: {
    double a = g.kind == GateKind::Z ? kPi : g.angle;
    Complex ph = std::polar(1.0, f.conjugate ? -a : a);
    long long tb = bit_of(g.targets[0]);
    for (long long r = 0; r < rows; ++r)
      if ((r & tb) && ctrl_ok(r)) m.row(r) *= ph;
    return;
  }
  case GateKind::X: {
    long long tb = bit_of(g.targets[0]);
    for (long long r = 0; r < rows; ++r)
      if (!(r & tb) && ctrl_ok(r)) m.row(r).swap(m.row(r | tb));
    return;
  }
  case GateKind::Swap: {
    long long ba = bit_of(g.targets[0]), bb = bit_of(g.targets[1]);
    for (long long r = 0; r < rows; ++r)
      if ((r & ba) && !(r & bb) && ctrl_ok(r))
        m.row(r).swap(m.row((r & ~ba) | bb));
    return;
  }
  case GateKind::H: {
    const double inv = 1.0 / std::sqrt(2.0);
    long long tb = bit_of(g.targets[0]);
    for (long long r = 0; r < rows; ++r) {
      if ((r & tb) || !ctrl_ok(r)) continue;
      Eigen::RowVectorXcd lo = m.row(r), hi = m.row(r | tb);
      m.row(r) = inv * (lo + hi);
      m.row(r | tb) = inv * (lo - hi);
    }
    return;
  }
  case GateKind::Rx: {
    double half = g.angle / 2.0;
    Complex c(std::cos(half), 0.0);
    Complex s(0.0, f.conjugate ? std::sin(half) : -std::sin(half));
    long long tb = bit_of(g.targets[0]);
    for (long long r = 0; r < rows; ++r) {
      if ((r & tb) || !ctrl_ok(r)) continue;
      Eigen::RowVectorXcd lo = m.row(r), hi = m.row(r | tb);
      m.row(r) = c * lo + s * hi;
      m.row(r | tb) = s * lo + c * hi;
    }
    return;
  }
  default:
    throw Error(ErrorCode::UnsupportedTheory,
                "structural gate reached the local applier");
  }
}

void check_cap(int live, int max_qubits, const char *what) {
  if (live > max_qubits)
    throw Error(ErrorCode::DimensionCap,
                std::string(what) + " needs " + std::to_string(live) +
                    " qubits, cap is " + std::to_string(max_qubits));
}

} // namespace

Matrix eval_unitary(const Circuit &c, int max_qubits) {
  if (c.theory == Theory::QCground)
    throw Error(ErrorCode::UnsupportedTheory,
                "QCground circuits have CPTP semantics; use eval_cptp");
  validate_or_throw(c);
  check_cap(c.n_in, max_qubits, "eval_unitary");
  std::vector<int> order(c.n_in);
  for (int i = 0; i < c.n_in; ++i) order[i] = i;
  int next_id = c.n_in;
  long long dim = 1LL << c.n_in;
  Matrix m = Matrix::Identity(dim, dim);
  for (const Gate &g : c.gates) {
    switch (g.kind) {
    case GateKind::Init: {
      check_cap(static_cast<int>(order.size()) + 1, max_qubits, "eval_unitary");
      Matrix grown = Matrix::Zero(m.rows() * 2, m.cols());
      for (long long r = 0; r < m.rows(); ++r) grown.row(2 * r) = m.row(r);
      m = std::move(grown);
      order.push_back(next_id++);
      break;
    }
    case GateKind::Free: {
      int p = find_pos(order, g.targets[0]);
      int L = static_cast<int>(order.size());
      long long tb = 1LL << (L - 1 - p);
      Matrix shrunk(m.rows() / 2, m.cols());
      for (long long r = 0; r < m.rows(); ++r) {
        if (r & tb) continue;
        long long lo = r & (tb - 1);
        long long hi = (r >> (L - p)) << (L - 1 - p);
        shrunk.row(hi | lo) = m.row(r);
      }
      m = std::move(shrunk);
      order.erase(order.begin() + p);
      break;
    }
    case GateKind::Discard:
      throw Error(ErrorCode::UnsupportedTheory, "Discard in unitary eval");
    default:
      apply_gate_field(m, order, g, {static_cast<int>(order.size()), 0, false});
    }
  }
  return m;
}

Superoperator eval_cptp(const Circuit &c, int max_qubits) {
  validate_or_throw(c);
  for (const Gate &g : c.gates)
    if (g.kind == GateKind::Free)
      throw Error(ErrorCode::UnsupportedTheory, "Free has no CPTP semantics");
  int cap = std::max(1, max_qubits / 2);
  check_cap(c.n_in, cap, "eval_cptp");
  std::vector<int> order(c.n_in);
  for (int i = 0; i < c.n_in; ++i) order[i] = i;
  int next_id = c.n_in;
  long long dim = 1LL << (2 * c.n_in);
  Matrix m = Matrix::Identity(dim, dim);
  for (const Gate &g : c.gates) {
    int L = static_cast<int>(order.size());
    switch (g.kind) {
    case GateKind::GlobalPhase:
      break; // identity channel
    case GateKind::Init: {
      check_cap(L + 1, cap, "eval_cptp");
      // Row index is (r << L) | col; both halves gain a zero bit at the end.
      Matrix grown = Matrix::Zero(m.rows() * 4, m.cols());
      for (long long idx = 0; idx < m.rows(); ++idx) {
        long long r = idx >> L, col = idx & ((1LL << L) - 1);
        grown.row((((r << 1) << (L + 1)) | (col << 1))) = m.row(idx);
      }
      m = std::move(grown);
      order.push_back(next_id++);
      break;
    }
    case GateKind::Discard: {
      int p = find_pos(order, g.targets[0]);
      long long tb = 1LL << (L - 1 - p);
      auto drop_bit = [&](long long v) {
        long long lo = v & (tb - 1);
        return ((v >> (L - p)) << (L - 1 - p)) | lo;
      };
      Matrix shrunk = Matrix::Zero(m.rows() / 4, m.cols());
      for (long long idx = 0; idx < m.rows(); ++idx) {
        long long r = idx >> L, col = idx & ((1LL << L) - 1);
        if (((r & tb) != 0) != ((col & tb) != 0)) continue;
        long long nr = drop_bit(r), nc = drop_bit(col);
        shrunk.row((nr << (L - 1)) | nc) += m.row(idx);
      }
      m = std::move(shrunk);
      order.erase(order.begin() + p);
      break;
    }
    case GateKind::Free:
      throw Error(ErrorCode::UnsupportedTheory, "Free in eval_cptp");
    default:
      apply_gate_field(m, order, g, {L, L, false}); // row side: U
      apply_gate_field(m, order, g, {L, 0, true});  // column side: conj(U)
    }
  }
  Superoperator s;
  s.n_in = c.n_in;
  s.n_out = c.n_out();
  s.map = std::move(m);
  return s;
}

Matrix apply_superop(const Superoperator &s, const Matrix &rho) {
  long long din = 1LL << s.n_in, dout = 1LL << s.n_out;
  if (rho.rows() != din || rho.cols() != din)
    throw Error(ErrorCode::DimensionMismatch, "apply_superop");
  Vector v(din * din);
  for (long long i = 0; i < din; ++i)
    for (long long j = 0; j < din; ++j) v(i * din + j) = rho(i, j);
  Vector w = s.map * v;
  Matrix out(dout, dout);
  for (long long i = 0; i < dout; ++i)
    for (long long j = 0; j < dout; ++j) out(i, j) = w(i * dout + j);
  return out;
}

Matrix choi_matrix(const Superoperator &s) {
  long long din = 1LL << s.n_in, dout = 1LL << s.n_out;
  Matrix j(din * dout, din * dout);
  for (long long i = 0; i < din; ++i)
    for (long long jj = 0; jj < din; ++jj)
      for (long long k = 0; k < dout; ++k)
        for (long long l = 0; l < dout; ++l)
          j(i * dout + k, jj * dout + l) = s.map(k * dout + l, i * din + jj);
  return j;
}

bool is_cptp(const Superoperator &s, double psd_eps, double tp_eps) {
  Matrix j = choi_matrix(s);
  long long din = 1LL << s.n_in, dout = 1LL << s.n_out;
  // Trace preservation: partial trace of Choi over the output equals I.
  Matrix tr = Matrix::Zero(din, din);
  for (long long i = 0; i < din; ++i)
    for (long long jj = 0; jj < din; ++jj)
      for (long long k = 0; k < dout; ++k)
        tr(i, jj) += j(i * dout + k, jj * dout + k);
  if (max_abs_diff(tr, Matrix::Identity(din, din)) > tp_eps) return false;
  // Complete positivity: Choi is positive semidefinite.
  Matrix h = 0.5 * (j + j.adjoint());
  if (max_abs_diff(h, j) > tp_eps) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  return es.eigenvalues().minCoeff() >= -psd_eps;
}

Superoperator superop_of_matrix(const Matrix &m, int n_in, int n_out) {
  Superoperator s;
  s.n_in = n_in;
  s.n_out = n_out;
  s.map = kron(m, m.conjugate());
  return s;
}

double superop_distance(const Superoperator &a, const Superoperator &b) {
  return max_abs_diff(a.map, b.map);
}

} // namespace qceq
