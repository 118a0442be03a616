#pragma once

#include <array>

#include "qceq/matrix.hpp"

namespace qceq {

// Angle helpers used throughout the solvers.
double mod_2pi(double x);
double mod_4pi(double x);
double mod_pos(double x, double period);
/// Snap an angle to the nearest multiple of pi within eps (default 1e-10).
double snap_angle(double x, double eps = 1e-10);
bool angle_is(double x, double v, double eps = 1e-12);

/// beta0..beta3 for the diagram [phase(b0)][P(b1)][Rx(b2)][P(b3)] (ZXZ) or
/// [phase(b0)][Rx(b1)][P(b2)][Rx(b3)] (XZX); the gate listed first acts
/// first, so the ZXZ matrix is e^{i b0} P(b3) Rx(b2) P(b1).
struct EulerAngles {
  double b0 = 0, b1 = 0, b2 = 0, b3 = 0;
};

Matrix euler_zxz_matrix(const EulerAngles &e);
Matrix euler_xzx_matrix(const EulerAngles &e);

/// Canonical ZXZ angles: b1 in [0,pi), b0/b2/b3 in [0,2pi), and b1 = 0
/// whenever b2 in {0,pi}. Deterministic; throws NotUnitary.
EulerAngles euler_zxz(const Matrix &u);

/// Canonical XZX angles, obtained by Hadamard conjugation of the ZXZ form;
/// the inherited constraints are b1 in [0,pi), the rest in [0,2pi), and
/// b1 = 0 whenever the middle phase b2 is in {0,pi}.
EulerAngles euler_xzx(const Matrix &u);

/// LHS parameters (gamma) and canonical RHS parameters (delta1..delta8) of
/// the K* rule. delta indices are 0-based in the arrays.
struct KstarAngles {
  std::array<double, 4> gamma{};
  std::array<double, 8> delta{};
};

struct KstarOldAngles {
  std::array<double, 9> delta{};
};

/// 4x4 semantics of the K* left side on the all-controls-on subspace; basis
/// order |ab> with a the next-to-last and b the last qubit.
Matrix kstar_lhs_block(const std::array<double, 4> &gamma);
Matrix kstar_rhs_block(const std::array<double, 8> &delta);
Matrix kstar_old_rhs_block(const std::array<double, 9> &delta);

/// Canonical delta for the K* right side. The solution is a function of the
/// 4x4 block only, so equal-semantics inputs give identical outputs.
KstarAngles solve_kstar(const std::array<double, 4> &gamma);
std::array<double, 8> solve_kstar_block(const Matrix &block);

/// Best-effort inversion: gamma whose left side realizes the given block.
/// Throws SolveFailure when the block is not in the left-side image.
std::array<double, 4> kstar_gamma_from_block(const Matrix &block);

/// Canonicity validators (clause membership uses snapped angles).
bool kstar_is_canonical(const std::array<double, 8> &delta,
                        std::string *why = nullptr);
bool kstar_old_is_canonical(const std::array<double, 9> &delta,
                            std::string *why = nullptr);

/// The g / f maps between the simplified and the original right-hand sides;
/// f(g(x)) = x on canonical tuples. Throw InvalidInput on non-canonical
/// arguments.
KstarOldAngles kstar_old_from_new(const KstarAngles &dn);
KstarAngles kstar_new_from_old(const KstarOldAngles &dold);

/// Random canonical K* tuple (mixes generic draws with the special values
/// that trigger the conditional clauses).
std::array<double, 8> random_canonical_kstar(std::mt19937_64 &rng);

} // namespace qceq
