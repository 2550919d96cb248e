#include "loopsynth/matkernel.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace loopsynth {

namespace {

void require_square_finite(const MatrixXd& M, const char* who) {
  if (M.rows() != M.cols()) {
    throw std::invalid_argument(std::string(who) + ": matrix must be square");
  }
  if (!M.allFinite()) {
    throw std::invalid_argument(std::string(who) + ": matrix has NaN/Inf entries");
  }
}

// Diagonal blocks of a real quasi-upper-triangular matrix. Entry = block start
// index; block size is next start minus this one.
std::vector<int> block_starts(const MatrixXd& T, double tol) {
  std::vector<int> starts;
  const int n = static_cast<int>(T.rows());
  int i = 0;
  while (i < n) {
    starts.push_back(i);
    if (i + 1 < n && std::abs(T(i + 1, i)) > tol) {
      i += 2;
    } else {
      i += 1;
    }
  }
  return starts;
}

std::complex<double> block_eig_first(const MatrixXd& T, int i, int size) {
  if (size == 1) return {T(i, i), 0.0};
  const double a = T(i, i), b = T(i, i + 1);
  const double c = T(i + 1, i), d = T(i + 1, i + 1);
  const double mean = 0.5 * (a + d);
  const double disc = 0.25 * (a - d) * (a - d) + b * c;
  if (disc < 0.0) return {mean, std::sqrt(-disc)};
  // Real pair inside a 2x2 block: should not occur for standardized Schur
  // forms, but report the larger root rather than failing.
  return {mean + std::sqrt(disc), 0.0};
}

double block_real_part(const MatrixXd& T, int i, int size) {
  if (size == 1) return T(i, i);
  return 0.5 * (T(i, i) + T(i + 1, i + 1));
}

// Exchange two adjacent diagonal blocks T11 (p x p, at offset i) and T22
// (q x q) of the quasi-triangular T via an orthogonal similarity, updating T
// and the accumulated Q. Direct-swap method: the columns of [X; I] with
// T11 X - X T22 = -T12 span the invariant subspace of the T22 eigenvalues;
// a QR factorization of that basis moves the block to the front.
void swap_adjacent_blocks(MatrixXd& T, MatrixXd& Q, int i, int p, int q) {
  const int w = p + q;
  const MatrixXd T11 = T.block(i, i, p, p);
  const MatrixXd T12 = T.block(i, i + p, p, q);
  const MatrixXd T22 = T.block(i + p, i + p, q, q);

  // Sylvester solve through the Kronecker system (sizes p*q <= 4).
  MatrixXd S(p * q, p * q);
  VectorXd rhs(p * q);
  for (int col = 0; col < q; ++col) {
    for (int row = 0; row < p; ++row) {
      const int eq = col * p + row;
      for (int cc = 0; cc < q; ++cc) {
        for (int rr = 0; rr < p; ++rr) {
          const int var = cc * p + rr;
          double v = 0.0;
          if (cc == col) v += T11(row, rr);
          if (rr == row) v -= T22(cc, col);
          S(eq, var) = v;
        }
      }
      rhs(eq) = -T12(row, col);
    }
  }
  Eigen::FullPivLU<MatrixXd> lu(S);
  if (!lu.isInvertible()) {
    throw std::runtime_error(
        "schur_ordered: cannot exchange adjacent blocks with coincident "
        "spectra");
  }
  const VectorXd xv = lu.solve(rhs);
  MatrixXd X(p, q);
  for (int col = 0; col < q; ++col)
    for (int row = 0; row < p; ++row) X(row, col) = xv(col * p + row);

  MatrixXd V(w, q);
  V.topRows(p) = X;
  V.bottomRows(q) = MatrixXd::Identity(q, q);
  const Eigen::HouseholderQR<MatrixXd> qr(V);
  const MatrixXd G = qr.householderQ();

  T.middleRows(i, w) = G.transpose() * T.middleRows(i, w);
  T.middleCols(i, w) = T.middleCols(i, w) * G;
  Q.middleCols(i, w) = Q.middleCols(i, w) * G;
  // The (2,1) window block is exactly zero in theory; clear the roundoff.
  T.block(i + q, i, p, q).setZero();
}

}  // namespace

Balancing balance(const MatrixXd& M) {
  require_square_finite(M, "balance");
  const int n = static_cast<int>(M.rows());
  Balancing out{M, VectorXd::Ones(n)};
  const double radix = 2.0;
  bool converged = false;
  int guard = 0;
  while (!converged && guard++ < 100) {
    converged = true;
    for (int i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(out.balanced(j, i));
        r += std::abs(out.balanced(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double f = 1.0;
      const double s = c + r;
      while (c < r / radix) {
        c *= radix;
        r /= radix;
        f *= radix;
      }
      while (c >= r * radix) {
        c /= radix;
        r *= radix;
        f /= radix;
      }
      if ((c + r) < 0.95 * s) {
        converged = false;
        out.d(i) *= f;
        out.balanced.row(i) /= f;
        out.balanced.col(i) *= f;
      }
    }
  }
  return out;
}

SchurResult schur_ordered(const MatrixXd& M, SpectrumHalf select,
                          const NumericConfig& cfg) {
  require_square_finite(M, "schur_ordered");
  const int n = static_cast<int>(M.rows());
  SchurResult out;
  if (n == 0) {
    out.Q = MatrixXd::Zero(0, 0);
    out.T = MatrixXd::Zero(0, 0);
    out.eig = VectorXcd::Zero(0);
    return out;
  }

  Eigen::RealSchur<MatrixXd> schur(M);
  if (schur.info() != Eigen::Success) {
    throw std::runtime_error("schur_ordered: QR iteration failed to converge");
  }
  out.T = schur.matrixT();
  out.Q = schur.matrixU();

  const double subdiag_tol =
      1e-14 * std::max(1.0, M.norm());  // block detection threshold
  const auto selected = [&](double re) {
    return select == SpectrumHalf::kNegativeReal ? re < 0.0 : re > 0.0;
  };

  // Bubble the selected blocks to the top, one adjacent exchange at a time.
  int sweeps = 0;
  bool moved = true;
  while (moved) {
    if (++sweeps > cfg.max_swap_sweeps) {
      throw std::runtime_error(
          "schur_ordered: block reordering did not converge");
    }
    moved = false;
    const std::vector<int> starts = block_starts(out.T, subdiag_tol);
    const int nb = static_cast<int>(starts.size());
    for (int b = 0; b + 1 < nb; ++b) {
      const int i = starts[b];
      const int p = (b + 1 < nb ? starts[b + 1] : n) - i;
      const int j = starts[b + 1];
      const int q = (b + 2 < nb ? starts[b + 2] : n) - j;
      const bool up_sel = selected(block_real_part(out.T, i, p));
      const bool dn_sel = selected(block_real_part(out.T, j, q));
      if (!up_sel && dn_sel) {
        swap_adjacent_blocks(out.T, out.Q, i, p, q);
        moved = true;
        break;  // block boundaries changed; rescan
      }
    }
  }

  const std::vector<int> starts = block_starts(out.T, subdiag_tol);
  out.eig.resize(n);
  int k = 0;
  out.selected = 0;
  for (std::size_t b = 0; b < starts.size(); ++b) {
    const int i = starts[b];
    const int size =
        (b + 1 < starts.size() ? starts[b + 1] : n) - i;
    const std::complex<double> lam = block_eig_first(out.T, i, size);
    out.eig(k++) = lam;
    if (size == 2) out.eig(k++) = std::conj(lam);
    if (selected(block_real_part(out.T, i, size))) out.selected += size;
  }
  return out;
}

bool hamiltonian_has_imaginary_eig(const MatrixXd& H, double tol) {
  require_square_finite(H, "hamiltonian_has_imaginary_eig");
  if (H.rows() % 2 != 0) {
    throw std::invalid_argument(
        "hamiltonian_has_imaginary_eig: dimension must be even");
  }
  if (H.rows() == 0) return false;
  const double scale = std::max(1.0, H.norm());
  const Balancing bal = balance(H);
  Eigen::EigenSolver<MatrixXd> es(bal.balanced, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("hamiltonian_has_imaginary_eig: eigensolver failed");
  }
  return (es.eigenvalues().real().array().abs() <= tol * scale).any();
}

std::optional<MatrixXd> try_care_hamiltonian(const MatrixXd& H,
                                             const NumericConfig& cfg) {
  require_square_finite(H, "try_care_hamiltonian");
  if (H.rows() % 2 != 0) {
    throw std::invalid_argument("try_care_hamiltonian: dimension must be even");
  }
  const int n = static_cast<int>(H.rows()) / 2;
  if (hamiltonian_has_imaginary_eig(H, cfg.imag_axis_tol)) return std::nullopt;

  // Balance first: the plants mix henry/farad/ohm scales and the raw
  // Hamiltonian can be wildly graded.
  const Balancing bal = balance(H);
  SchurResult schur;
  try {
    schur = schur_ordered(bal.balanced, SpectrumHalf::kNegativeReal, cfg);
  } catch (const std::runtime_error&) {
    return std::nullopt;
  }
  if (schur.selected != n) return std::nullopt;

  const MatrixXd U = bal.d.asDiagonal() * schur.Q.leftCols(n);
  const MatrixXd U1 = U.topRows(n);
  const MatrixXd U2 = U.bottomRows(n);
  Eigen::FullPivLU<MatrixXd> lu(U1);
  if (!lu.isInvertible()) return std::nullopt;
  MatrixXd X = lu.solve(MatrixXd::Identity(n, n));  // U1^-1
  X = U2 * X;

  const double xnorm = std::max(1.0, X.norm());
  if ((X - X.transpose()).norm() > 1e-6 * xnorm) return std::nullopt;
  X = 0.5 * (X + X.transpose());

  const MatrixXd F = H.topLeftCorner(n, n);
  const MatrixXd G = -H.topRightCorner(n, n);
  const MatrixXd Qm = -H.bottomLeftCorner(n, n);
  const MatrixXd res = F.transpose() * X + X * F - X * G * X + Qm;
  if (res.norm() > cfg.care_residual_tol * std::max(1.0, Qm.norm())) {
    return std::nullopt;
  }
  return X;
}

MatrixXd care(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q,
              const MatrixXd& R, const NumericConfig& cfg) {
  require_square_finite(A, "care(A)");
  require_square_finite(Q, "care(Q)");
  require_square_finite(R, "care(R)");
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  if (B.rows() != n || Q.rows() != n || R.rows() != m) {
    throw std::invalid_argument("care: inconsistent dimensions");
  }
  if ((Q - Q.transpose()).norm() > 1e-8 * std::max(1.0, Q.norm()) ||
      (R - R.transpose()).norm() > 1e-8 * std::max(1.0, R.norm())) {
    throw std::invalid_argument("care: Q and R must be symmetric");
  }
  Eigen::LLT<MatrixXd> llt(0.5 * (R + R.transpose()));
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("care: R must be positive definite");
  }
  const MatrixXd G = B * llt.solve(B.transpose());

  MatrixXd H(2 * n, 2 * n);
  H.topLeftCorner(n, n) = A;
  H.topRightCorner(n, n) = -G;
  H.bottomLeftCorner(n, n) = -0.5 * (Q + Q.transpose());
  H.bottomRightCorner(n, n) = -A.transpose();

  const auto X = try_care_hamiltonian(H, cfg);
  if (!X) {
    throw std::runtime_error(
        "care: no stabilizing solution (Hamiltonian eigenvalues on the "
        "imaginary axis or singular subspace extraction)");
  }
  return *X;
}

double care_residual(const MatrixXd& A, const MatrixXd& B, const MatrixXd& Q,
                     const MatrixXd& R, const MatrixXd& X) {
  Eigen::LLT<MatrixXd> llt(0.5 * (R + R.transpose()));
  const MatrixXd res = A.transpose() * X + X * A -
                       X * B * llt.solve(B.transpose()) * X + Q;
  return res.norm() / std::max(1.0, Q.norm());
}

}  // namespace loopsynth
