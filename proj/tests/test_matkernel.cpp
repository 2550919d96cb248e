#include "loopsynth/matkernel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"

using namespace loopsynth;
namespace lt = loopsynth::testing;

namespace {

// Direct quadratic solve of the decoupled Riccati for diagonal A, B, Q, R:
// per entry, -b^2/r x^2 + 2 a x + q = 0, stabilizing root a - b x b / r < 0.
double scalar_care_oracle(double a, double b, double q, double r) {
  const double disc = a * a + b * b * q / r;
  return (a + std::sqrt(disc)) * r / (b * b);
}

std::vector<std::complex<double>> sorted_eigs(const VectorXcd& v) {
  std::vector<std::complex<double>> out(v.data(), v.data() + v.size());
  std::sort(out.begin(), out.end(), [](auto x, auto y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return out;
}

}  // namespace

TEST_CASE("schur_ordered: diagonal input is already in form") {
  MatrixXd M = MatrixXd::Zero(2, 2);
  M(0, 0) = -1.0;
  M(1, 1) = -2.0;
  const SchurResult s = schur_ordered(M, SpectrumHalf::kNegativeReal);
  CHECK((s.T - M).norm() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((s.Q - MatrixXd::Identity(2, 2)).norm() ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(s.selected == 2);
}

TEST_CASE("schur_ordered: rotation matrix has eigenvalues +-i") {
  MatrixXd M(2, 2);
  M << 0, 1, -1, 0;
  const SchurResult s = schur_ordered(M, SpectrumHalf::kNegativeReal);
  const auto eigs = sorted_eigs(s.eig);
  CHECK(std::abs(eigs[0] - std::complex<double>(0, -1)) < 1e-12);
  CHECK(std::abs(eigs[1] - std::complex<double>(0, 1)) < 1e-12);
  CHECK(s.selected == 0);
}

TEST_CASE("schur_ordered: reassembly and orthogonality residuals") {
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixXd M = lt::random_matrix(5, 5, 2.0);
    const SchurResult s = schur_ordered(M, SpectrumHalf::kNegativeReal);
    CHECK((s.Q * s.T * s.Q.transpose() - M).norm() <= 1e-8 * M.norm());
    CHECK((s.Q.transpose() * s.Q - MatrixXd::Identity(5, 5)).norm() <=
          1e-10 * 5);
    // Selected block leads: no selected block may follow an unselected one.
    bool seen_unselected = false;
    for (int i = 0; i < 5;) {
      const bool pair = i + 1 < 5 && std::abs(s.T(i + 1, i)) > 1e-12;
      const double re = pair ? 0.5 * (s.T(i, i) + s.T(i + 1, i + 1)) : s.T(i, i);
      if (re < 0.0) {
        CHECK(!seen_unselected);
      } else {
        seen_unselected = true;
      }
      i += pair ? 2 : 1;
    }
  }
}

TEST_CASE("schur_ordered: eigenvalue multiset preserved vs char-poly roots") {
  for (int n = 2; n <= 4; ++n) {
    for (int trial = 0; trial < 10; ++trial) {
      const MatrixXd M = lt::random_matrix(n, n, 1.5);
      const SchurResult s = schur_ordered(M, SpectrumHalf::kNegativeReal);
      const auto got = sorted_eigs(s.eig);
      const auto want = sorted_eigs(polynomial_roots(lt::char_poly(M)));
      const double scale = std::max(1.0, M.norm());
      for (int i = 0; i < n; ++i) {
        CHECK(std::abs(got[i] - want[i]) <= 1e-8 * scale);
      }
    }
  }
}

TEST_CASE("schur_ordered: rejects non-square input") {
  CHECK_THROWS_AS(schur_ordered(MatrixXd::Zero(2, 3), SpectrumHalf::kNegativeReal),
                  std::invalid_argument);
}

TEST_CASE("care: scalar closed forms") {
  SUBCASE("A=0,B=1,Q=1,R=1 gives X=1") {
    const MatrixXd X =
        care(MatrixXd::Zero(1, 1), MatrixXd::Ones(1, 1), MatrixXd::Ones(1, 1),
             MatrixXd::Ones(1, 1));
    CHECK(X(0, 0) == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("stable A, zero cost gives X=0") {
    const MatrixXd X = care(-MatrixXd::Ones(1, 1), MatrixXd::Ones(1, 1),
                            MatrixXd::Zero(1, 1), MatrixXd::Ones(1, 1));
    CHECK(std::abs(X(0, 0)) < 1e-12);
  }
}

TEST_CASE("care: agrees with the direct quadratic oracle on diagonal systems") {
  std::uniform_real_distribution<double> dist(0.2, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    MatrixXd A = MatrixXd::Zero(2, 2), B = MatrixXd::Zero(2, 2);
    MatrixXd Q = MatrixXd::Zero(2, 2), R = MatrixXd::Zero(2, 2);
    for (int i = 0; i < 2; ++i) {
      A(i, i) = dist(lt::rng()) - 1.5;
      B(i, i) = dist(lt::rng());
      Q(i, i) = dist(lt::rng());
      R(i, i) = dist(lt::rng());
    }
    const MatrixXd X = care(A, B, Q, R);
    for (int i = 0; i < 2; ++i) {
      const double want = scalar_care_oracle(A(i, i), B(i, i), Q(i, i), R(i, i));
      CHECK(X(i, i) == doctest::Approx(want).epsilon(1e-10));
    }
    CHECK(std::abs(X(0, 1)) < 1e-9);
  }
}

TEST_CASE("care: random stabilizable instances satisfy the contract") {
  int solved = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 3;  // 2..4
    const MatrixXd A = lt::random_matrix(n, n, 1.0);
    const MatrixXd B = lt::random_matrix(n, 1 + trial % 2, 1.0);
    const MatrixXd Qh = lt::random_matrix(n, n, 1.0);
    const MatrixXd Q = Qh.transpose() * Qh;
    const MatrixXd R =
        MatrixXd::Identity(B.cols(), B.cols()) * (0.5 + 0.1 * (trial % 5));

    MatrixXd X;
    try {
      X = care(A, B, Q, R);
    } catch (const std::runtime_error&) {
      continue;  // not stabilizable/detectable draw
    }
    ++solved;
    CHECK(care_residual(A, B, Q, R, X) <= 1e-8);
    CHECK((X - X.transpose()).norm() <= 1e-10 * std::max(1.0, X.norm()));
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(X, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= -1e-8 * std::max(1.0, X.norm()));
    const MatrixXd Acl = A - B * R.llt().solve(B.transpose()) * X;
    CHECK(Acl.eigenvalues().real().maxCoeff() < 0.0);
  }
  CHECK(solved >= 45);  // nearly all random draws are admissible
}

TEST_CASE("care: rejects indefinite R") {
  MatrixXd R(1, 1);
  R << -1.0;
  CHECK_THROWS_AS(care(MatrixXd::Zero(1, 1), MatrixXd::Ones(1, 1),
                       MatrixXd::Ones(1, 1), R),
                  std::invalid_argument);
}

TEST_CASE("hamiltonian_has_imaginary_eig") {
  SUBCASE("rotation matrix: eigenvalues on the axis") {
    MatrixXd H(2, 2);
    H << 0, 1, -1, 0;
    CHECK(hamiltonian_has_imaginary_eig(H, 1e-9));
  }
  SUBCASE("diag(-1,1): strictly off the axis") {
    MatrixXd H = MatrixXd::Zero(2, 2);
    H(0, 0) = -1;
    H(1, 1) = 1;
    CHECK_FALSE(hamiltonian_has_imaginary_eig(H, 1e-9));
  }
  SUBCASE("scalar full-information Hamiltonian at gamma below the optimum") {
    // H(gamma) = [a, g; -1, -a] with g = b1^2/gamma^2 - b2^2 has imaginary
    // eigenvalues exactly when gamma < b1/sqrt(a^2 + b2^2).
    const double a = -0.7, b1 = 2.0, b2 = 1.3;
    const double gamma_opt = b1 / std::sqrt(a * a + b2 * b2);
    const auto build = [&](double gamma) {
      MatrixXd H(2, 2);
      H << a, b1 * b1 / (gamma * gamma) - b2 * b2, -1.0, -a;
      return H;
    };
    CHECK(hamiltonian_has_imaginary_eig(build(0.99 * gamma_opt), 1e-9));
    CHECK_FALSE(hamiltonian_has_imaginary_eig(build(1.01 * gamma_opt), 1e-9));
  }
  SUBCASE("odd dimension rejected") {
    CHECK_THROWS_AS(hamiltonian_has_imaginary_eig(MatrixXd::Zero(3, 3), 1e-9),
                    std::invalid_argument);
  }
}

TEST_CASE("balance: similarity preserved") {
  MatrixXd M = lt::random_matrix(4, 4, 1.0);
  M.row(0) *= 1e6;  // grade it badly
  M.col(2) *= 1e-5;
  const Balancing bal = balance(M);
  const MatrixXd back =
      bal.d.asDiagonal() * bal.balanced * bal.d.cwiseInverse().asDiagonal();
  CHECK((back - M).norm() <= 1e-12 * std::max(1.0, M.norm()));
}
