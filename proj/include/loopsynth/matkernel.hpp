#pragma once

#include <Eigen/Dense>
#include <optional>

namespace loopsynth {

using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

/// Tolerances shared by the dense kernels. Values are fixed so that
/// downstream results are deterministic and testable.
struct NumericConfig {
  double imag_axis_tol = 1e-9;      ///< |Re(lambda)| <= tol*max(1,||H||_F) counts as on-axis
  double care_residual_tol = 1e-8;  ///< accepted relative Frobenius residual of a Riccati solution
  double symmetry_tol = 1e-10;
  int max_swap_sweeps = 400;        ///< bubble passes in schur_ordered before reporting failure
};

enum class SpectrumHalf { kNegativeReal, kPositiveReal };

/// Real Schur decomposition M = Q T Q^T with the eigenvalues matching the
/// selection predicate ordered into the leading diagonal block of T.
struct SchurResult {
  MatrixXd Q;     ///< orthogonal
  MatrixXd T;     ///< real quasi-upper-triangular (1x1 / 2x2 diagonal blocks)
  VectorXcd eig;  ///< eigenvalues in the order they appear along the diagonal
  int selected = 0;
};

/// Two-sided diagonal similarity scaling (Parlett-Reinsch, powers of two):
/// balanced = D^-1 M D with D = diag(d).
struct Balancing {
  MatrixXd balanced;
  VectorXd d;
};
Balancing balance(const MatrixXd& M);

SchurResult schur_ordered(const MatrixXd& M, SpectrumHalf select,
                          const NumericConfig& cfg = {});

/// True iff some eigenvalue of H satisfies |Re| <= tol*max(1, ||H||_F).
bool hamiltonian_has_imaginary_eig(const MatrixXd& H, double tol);

/// Stabilizing solution X of  F^T X + X F - X G X + Qm = 0  extracted from the
/// stable invariant subspace of the Hamiltonian H = [F, -G; -Qm, -F^T].
/// Returns nullopt when H has eigenvalues on the imaginary axis (within
/// cfg.imag_axis_tol), when the subspace extraction is singular, or when the
/// residual check fails. All of these are recoverable: the gamma iteration in
/// the synthesis layer treats them as "infeasible at this gamma".
std::optional<MatrixXd> try_care_hamiltonian(const MatrixXd& H,
                                             const NumericConfig& cfg = {});

/// Continuous-time algebraic Riccati equation
///   A^T X + X A - X B R^-1 B^T X + Q = 0,
/// stabilizing solution via the Hamiltonian Schur route. Throws
/// std::invalid_argument on malformed input (non-square, indefinite R) and
/// std::runtime_error when no stabilizing solution can be extracted.
MatrixXd care(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q,
              const MatrixXd& R, const NumericConfig& cfg = {});

/// Frobenius-relative Riccati residual ||A^T X + X A - X B R^-1 B^T X + Q||_F
/// normalized by max(1, ||Q||_F). Used by tests and self-checks.
double care_residual(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q,
                     const MatrixXd& R, const MatrixXd& X);

}  // namespace loopsynth
