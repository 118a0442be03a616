#include "qceq/matrix.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace qceq {

const char *error_code_name(ErrorCode code) {
  switch (code) {
  case ErrorCode::ArityMismatch: return "ArityMismatch";
  case ErrorCode::TheoryMismatch: return "TheoryMismatch";
  case ErrorCode::UnsupportedTheory: return "UnsupportedTheory";
  case ErrorCode::DimensionCap: return "DimensionCap";
  case ErrorCode::DimensionMismatch: return "DimensionMismatch";
  case ErrorCode::NotUnitary: return "NotUnitary";
  case ErrorCode::NotIsometry: return "NotIsometry";
  case ErrorCode::ShapeMismatch: return "ShapeMismatch";
  case ErrorCode::BlockNotIdentity: return "BlockNotIdentity";
  case ErrorCode::SolveFailure: return "SolveFailure";
  case ErrorCode::InvalidInput: return "InvalidInput";
  case ErrorCode::UnknownRule: return "UnknownRule";
  case ErrorCode::BadParameters: return "BadParameters";
  case ErrorCode::StaleMatch: return "StaleMatch";
  case ErrorCode::StepFailed: return "StepFailed";
  case ErrorCode::ParseError: return "ParseError";
  case ErrorCode::WireBookkeeping: return "WireBookkeeping";
  case ErrorCode::IO: return "IO";
  }
  return "Error";
}

double max_abs_diff(const Matrix &a, const Matrix &b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::DimensionMismatch,
                "comparing " + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " against " +
                    std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

bool matrices_equal(const Matrix &a, const Matrix &b, Tolerance tol) {
  return max_abs_diff(a, b) <= tol.abs_eps;
}

double phase_aligned_diff(const Matrix &a, const Matrix &b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw Error(ErrorCode::DimensionMismatch, "phase_aligned_diff");
  // Align on the largest entry of a.
  Eigen::Index r = 0, c = 0;
  a.cwiseAbs().maxCoeff(&r, &c);
  if (std::abs(a(r, c)) < 1e-14 || std::abs(b(r, c)) < 1e-14)
    return max_abs_diff(a, b);
  Complex phase = (b(r, c) / a(r, c));
  phase /= std::abs(phase);
  return max_abs_diff(a * phase, b);
}

bool is_unitary(const Matrix &m, Tolerance tol) {
  if (m.rows() != m.cols()) return false;
  Matrix id = Matrix::Identity(m.rows(), m.cols());
  return max_abs_diff(m.adjoint() * m, id) <= tol.abs_eps &&
         max_abs_diff(m * m.adjoint(), id) <= tol.abs_eps;
}

bool is_isometry(const Matrix &m, Tolerance tol) {
  if (m.rows() < m.cols()) return false;
  Matrix id = Matrix::Identity(m.cols(), m.cols());
  return max_abs_diff(m.adjoint() * m, id) <= tol.abs_eps;
}

Matrix kron(const Matrix &a, const Matrix &b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix random_unitary(int dim, std::mt19937_64 &rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      g(i, j) = Complex(gauss(rng), gauss(rng));
  QrFactors f = qr_decompose(g);
  return f.q;
}

Matrix random_isometry(int rows, int cols, std::mt19937_64 &rng) {
  if (cols > rows)
    throw Error(ErrorCode::DimensionMismatch, "isometry needs rows >= cols");
  return random_unitary(rows, rng).leftCols(cols);
}

namespace {

// Moves the phases of the diagonal of r into q so r's diagonal becomes
// non-negative real.
void normalize_qr_phases(Matrix &q, Matrix &r) {
  for (Eigen::Index i = 0; i < r.rows() && i < r.cols(); ++i) {
    Complex d = r(i, i);
    if (std::abs(d) < 1e-300) continue;
    Complex ph = d / std::abs(d);
    r.row(i) *= std::conj(ph);
    q.col(i) *= ph;
  }
}

Matrix antitranspose_flip(const Matrix &a) {
  // Reverse both row and column order.
  return a.rowwise().reverse().colwise().reverse();
}

} // namespace

QrFactors qr_decompose(const Matrix &a) {
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  normalize_qr_phases(q, r);
  return {q, r};
}

QlFactors ql_decompose(const Matrix &a) {
  if (a.rows() != a.cols())
    throw Error(ErrorCode::DimensionMismatch, "QL expects a square matrix");
  // Flip so an ordinary QR yields the lower-triangular factor.
  QrFactors f = qr_decompose(antitranspose_flip(a));
  return {antitranspose_flip(f.q), antitranspose_flip(f.r)};
}

RqFactors rq_decompose(const Matrix &a) {
  if (a.rows() != a.cols())
    throw Error(ErrorCode::DimensionMismatch, "RQ expects a square matrix");
  // a = R Q  <=>  a^dag = Q^dag R^dag with R^dag lower triangular.
  QlFactors f = ql_decompose(a.adjoint());
  return {f.l.adjoint(), f.q.adjoint()};
}

SvdFactors svd_decompose(const Matrix &a) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV().adjoint()};
}

std::string matrix_to_text(const Matrix &m) {
  std::ostringstream out;
  out.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ' ';
      double re = m(i, j).real(), im = m(i, j).imag();
      out << re << (im < 0 || std::signbit(im) ? "-" : "+")
          << std::abs(im) << 'j';
    }
    out << '\n';
  }
  return out.str();
}

namespace {

Complex parse_entry(const std::string &tok, int line_no) {
  // Accepts re+imj / re-imj / re (pure real) / imj (pure imaginary).
  std::string s = tok;
  bool has_j = !s.empty() && (s.back() == 'j' || s.back() == 'i');
  if (has_j) s.pop_back();
  // Split at the last +/- that is not part of an exponent and not leading.
  std::size_t split = std::string::npos;
  for (std::size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  try {
    if (!has_j) return Complex(std::stod(s), 0.0);
    if (split == std::string::npos) return Complex(0.0, std::stod(s));
    double re = std::stod(s.substr(0, split));
    double im = std::stod(s.substr(split));
    return Complex(re, im);
  } catch (const std::exception &) {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) +
                                           ": bad matrix entry '" + tok + "'");
  }
}

} // namespace

Matrix matrix_from_text(std::istream &in) {
  std::vector<std::vector<Complex>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ls(line);
    std::vector<Complex> row;
    std::string tok;
    while (ls >> tok) {
      if (tok[0] == '#') break;
      row.push_back(parse_entry(tok, line_no));
    }
    if (row.empty()) continue;
    if (!rows.empty() && rows.front().size() != row.size())
      throw Error(ErrorCode::ParseError,
                  "line " + std::to_string(line_no) + ": ragged matrix row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::ParseError, "empty matrix");
  Matrix m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

Matrix matrix_from_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IO, "cannot open " + path);
  return matrix_from_text(in);
}

void matrix_to_file(const Matrix &m, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IO, "cannot open " + path);
  out << matrix_to_text(m);
}

} // namespace qceq
