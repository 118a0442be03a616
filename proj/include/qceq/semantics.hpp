#pragma once

#include "qceq/circuit.hpp"
#include "qceq/matrix.hpp"

namespace qceq {

/// Default evaluator qubit cap; QCEQ_MAX_QUBITS overrides it in the CLI.
inline constexpr int kDefaultMaxQubits = 12;

/// Dense semantics of a QC/QCiso/QCancilla circuit: a 2^n_out x 2^n_in
/// matrix. Wire order: live position 0 is the most significant bit. Free is
/// evaluated as the <0| row selector.
Matrix eval_unitary(const Circuit &c, int max_qubits = kDefaultMaxQubits);

/// Superoperator acting on row-vectorized density matrices,
/// vec(rho)_{i*d+j} = rho_{ij}; a unitary gate lifts as U (x) conj(U).
struct Superoperator {
  int n_in = 0;
  int n_out = 0;
  Matrix map; // 4^n_out x 4^n_in
};

/// CPTP semantics. Accepts any circuit without Free (global phases act as
/// the identity channel, matching the phase-free embedding into QCground).
Superoperator eval_cptp(const Circuit &c, int max_qubits = kDefaultMaxQubits);

Matrix apply_superop(const Superoperator &s, const Matrix &rho);

/// Choi matrix J with J[(i,k),(j,l)] = S(|i><j|)_{k,l}.
Matrix choi_matrix(const Superoperator &s);

bool is_cptp(const Superoperator &s, double psd_eps = 1e-9,
             double tp_eps = 1e-9);

/// Unitary-conjugation superoperator of a matrix (for cross-checks).
Superoperator superop_of_matrix(const Matrix &m, int n_in, int n_out);

double superop_distance(const Superoperator &a, const Superoperator &b);

} // namespace qceq
