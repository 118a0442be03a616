#pragma once

#include <Eigen/Dense>
#include <complex>
#include <iosfwd>
#include <random>
#include <vector>

#include "qceq/error.hpp"

namespace qceq {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kTau = 2.0 * kPi;

/// Absolute max-entry-modulus comparison threshold.
struct Tolerance {
  double abs_eps = 1e-9;
};

double max_abs_diff(const Matrix &a, const Matrix &b);

bool matrices_equal(const Matrix &a, const Matrix &b,
                    Tolerance tol = Tolerance{});

/// Equality up to a global phase; reports the residual after phase alignment.
double phase_aligned_diff(const Matrix &a, const Matrix &b);

bool is_unitary(const Matrix &m, Tolerance tol = Tolerance{});
bool is_isometry(const Matrix &m, Tolerance tol = Tolerance{});

Matrix kron(const Matrix &a, const Matrix &b);

/// Haar-ish random unitary via QR of a Ginibre matrix, with the R diagonal
/// phases absorbed so the result is distribution- and seed-deterministic.
Matrix random_unitary(int dim, std::mt19937_64 &rng);

/// First `cols` columns of a random unitary.
Matrix random_isometry(int rows, int cols, std::mt19937_64 &rng);

// Fixed-convention dense factorizations (non-negative real diagonals on the
// triangular factors, descending singular values).
struct QrFactors {
  Matrix q; // unitary
  Matrix r; // upper triangular, non-negative real diagonal
};
struct QlFactors {
  Matrix q; // unitary
  Matrix l; // lower triangular, non-negative real diagonal
};
struct RqFactors {
  Matrix r; // upper triangular, non-negative real diagonal
  Matrix q; // unitary
};
struct SvdFactors {
  Matrix u;
  Eigen::VectorXd d; // descending, non-negative
  Matrix v;          // a = u * diag(d) * v
};

QrFactors qr_decompose(const Matrix &a);
QlFactors ql_decompose(const Matrix &a);
RqFactors rq_decompose(const Matrix &a);
SvdFactors svd_decompose(const Matrix &a);

// Matrix text format: one row per line, entries "re+imj" separated by spaces.
std::string matrix_to_text(const Matrix &m);
Matrix matrix_from_text(std::istream &in);
Matrix matrix_from_file(const std::string &path);
void matrix_to_file(const Matrix &m, const std::string &path);

} // namespace qceq
