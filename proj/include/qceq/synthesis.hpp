#pragma once

#include "qceq/circuit.hpp"
#include "qceq/matrix.hpp"

namespace qceq {

/// Blocks of the modified cosine-sine decomposition: for a unitary
///   u = diag(I_k, [[U00, U01], [U10, U11]])
/// with U00 of size N/2-k and U11 of size N/2,
///   u = diag(I_k, A0, A1) * M * diag(I_k, B0, B1)
/// where M rotates the d basis pairs (j, j+N/2), j in [N/2-d, N/2), by the
/// angles in (C, S). Unit singular values of U00 are excluded from C, so all
/// c_i < 1 and C^2 + S^2 = I.
struct CsdBlocks {
  Matrix a0, a1, b0, b1;
  Eigen::VectorXd c, s;
  Eigen::Index k = 0;
  Eigen::Index half = 0;
  Eigen::Index d = 0;
};

CsdBlocks csd_modified(const Matrix &u, Eigen::Index k);
Matrix csd_reconstruct(const CsdBlocks &b);

/// Exact synthesis of an arbitrary unitary into a vanilla circuit via
/// two-level (Gray-code routed) multi-controlled rotations and Euler angles.
Circuit synth_unitary(const Matrix &u, int max_qubits = 6);

/// QCiso circuit with n_init initialisations realizing the isometry
/// u * (|0...0> (x) I), for u = diag(I, *) with identity block 2^(m-n_init).
/// Recurses through the modified CSD with Gray-code multiplexed rotations.
Circuit synth_zero_controlled(const Matrix &u, int n_init);

/// QCiso circuit realizing an arbitrary isometry (orthonormal completion to
/// a unitary, then full synthesis behind the initialisations).
Circuit synth_isometry(const Matrix &v, std::uint64_t seed = 7);

} // namespace qceq
