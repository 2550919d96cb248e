#pragma once

// Test-only oracles, independent of the implementation paths they check.

#include <complex>
#include <random>

#include "loopsynth/lti.hpp"
#include "loopsynth/matkernel.hpp"

namespace loopsynth::testing {

inline std::mt19937& rng() {
  static std::mt19937 gen(0x5eed);
  return gen;
}

inline MatrixXd random_matrix(int rows, int cols, double scale = 1.0) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  MatrixXd M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = dist(rng());
  return M;
}

/// Random Hurwitz A: random matrix shifted left of the imaginary axis.
inline MatrixXd random_stable_A(int n, double scale = 1.0) {
  MatrixXd A = random_matrix(n, n, scale);
  const double shift = A.eigenvalues().real().maxCoeff();
  A -= (shift + 0.2 + 0.8 * scale) * MatrixXd::Identity(n, n);
  return A;
}

inline StateSpace random_stable_siso(int n, double scale = 1.0) {
  return StateSpace(random_stable_A(n, scale), random_matrix(n, 1, scale),
                    random_matrix(1, n, scale), random_matrix(1, 1, 0.2));
}

/// Characteristic polynomial coefficients (monic, descending) via the
/// Faddeev-LeVerrier recursion.
inline VectorXd char_poly(const MatrixXd& A) {
  const int n = static_cast<int>(A.rows());
  VectorXd c(n + 1);
  c(0) = 1.0;
  MatrixXd M = MatrixXd::Zero(n, n);
  for (int k = 1; k <= n; ++k) {
    M = A * M + c(k - 1) * MatrixXd::Identity(n, n);
    c(k) = -(A * M).trace() / k;
  }
  return c;
}

/// SISO transfer function from a realization: num(s) = C adj(sI-A) B + D den(s),
/// via the same recursion. Oracle path distinct from freq_response.
inline RationalTF ss_to_tf(const StateSpace& g) {
  const int n = g.states();
  const VectorXd den = char_poly(g.A);
  VectorXd num = VectorXd::Zero(n + 1);
  MatrixXd M = MatrixXd::Zero(n, n);
  for (int k = 1; k <= n; ++k) {
    M = g.A * M + den(k - 1) * MatrixXd::Identity(n, n);
    num(k) = (g.C * M * g.B)(0, 0);
  }
  num += g.D(0, 0) * den;
  return RationalTF(num, den);
}

/// Matrix exponential by scaling-and-squaring on a Taylor series; reference
/// for integration-order checks. Adequate for the small test systems.
inline MatrixXd expm(const MatrixXd& A) {
  const int n = static_cast<int>(A.rows());
  int squarings = 0;
  double norm = A.norm();
  MatrixXd As = A;
  while (norm > 0.5) {
    As *= 0.5;
    norm *= 0.5;
    ++squarings;
  }
  MatrixXd out = MatrixXd::Identity(n, n);
  MatrixXd term = MatrixXd::Identity(n, n);
  for (int k = 1; k <= 24; ++k) {
    term = term * As / k;
    out += term;
  }
  for (int s = 0; s < squarings; ++s) out = out * out;
  return out;
}

/// Bounded-real-lemma norm oracle: ||G||_inf via bisection on the existence of
/// imaginary-axis eigenvalues of the BRL Hamiltonian. Independent of the
/// grid-scan route used by hinf_norm.
inline double brl_norm(const StateSpace& g, double rel_tol = 1e-6) {
  const int n = g.states();
  const double d_norm =
      g.D.size() > 0 ? g.D.jacobiSvd().singularValues()(0) : 0.0;
  double lo = d_norm + 1e-12, hi = std::max(1.0, 2.0 * d_norm);

  const auto norm_below = [&](double gamma) {
    const MatrixXd R =
        gamma * gamma * MatrixXd::Identity(g.inputs(), g.inputs()) -
        g.D.transpose() * g.D;
    Eigen::LLT<MatrixXd> llt(R);
    if (llt.info() != Eigen::Success) return false;
    const MatrixXd Rinv_Dt_C = llt.solve(g.D.transpose() * g.C);
    MatrixXd H(2 * n, 2 * n);
    H.topLeftCorner(n, n) = g.A + g.B * Rinv_Dt_C;
    H.topRightCorner(n, n) = g.B * llt.solve(g.B.transpose());
    H.bottomLeftCorner(n, n) =
        -g.C.transpose() * (MatrixXd::Identity(g.outputs(), g.outputs()) +
                            g.D * llt.solve(g.D.transpose())) *
        g.C;
    H.bottomRightCorner(n, n) = -(g.A + g.B * Rinv_Dt_C).transpose();
    return !hamiltonian_has_imaginary_eig(H, 1e-12);
  };

  if (n == 0) return d_norm;
  while (!norm_below(hi)) hi *= 2.0;
  for (int it = 0; it < 200 && (hi - lo) > rel_tol * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (norm_below(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace loopsynth::testing
