#include "loopsynth/synth.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace loopsynth {

namespace {

StateSpace weight_or_identity(const std::optional<RationalTF>& w) {
  if (!w) return StateSpace::identity(1);
  if (!w->is_proper()) {
    throw std::invalid_argument("augment_with_weights: improper weight");
  }
  if (!w->is_stable(0.0)) {
    throw std::invalid_argument("augment_with_weights: unstable weight");
  }
  return tf_to_ss(*w);
}

StateSpace block_diag_weights(
    const std::vector<std::optional<RationalTF>>& ws) {
  StateSpace out = StateSpace::identity(0);
  for (const auto& w : ws) out = append(out, weight_or_identity(w));
  return out;
}

double sigma_max_or_zero(const MatrixXd& M) {
  if (M.rows() == 0 || M.cols() == 0) return 0.0;
  return M.jacobiSvd().singularValues()(0);
}

bool is_psd(const MatrixXd& X, double tol) {
  if (X.rows() == 0) return true;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(X, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol * std::max(1.0, X.norm());
}

// PBH test: every eigenvalue of A with Re >= 0 must be controllable through B.
bool pbh_stabilizable(const MatrixXd& A, const MatrixXd& B) {
  const int n = static_cast<int>(A.rows());
  if (n == 0) return true;
  Eigen::EigenSolver<MatrixXd> es(A, false);
  const VectorXcd lam = es.eigenvalues();
  const double scale = std::max(1.0, A.norm() + B.norm());
  for (int i = 0; i < lam.size(); ++i) {
    if (lam(i).real() < 0.0) continue;
    MatrixXcd M(n, n + B.cols());
    M.leftCols(n) =
        A.cast<std::complex<double>>() - lam(i) * MatrixXcd::Identity(n, n);
    M.rightCols(B.cols()) = B.cast<std::complex<double>>();
    const double smin = M.jacobiSvd().singularValues().minCoeff();
    if (smin < 1e-10 * scale) return false;
  }
  return true;
}

struct NormalizedPlant {
  MatrixXd A, B1, B2, C1, C2, D11, D12, D21;
  MatrixXd u_tf;  ///< u = u_tf * u_tilde
  MatrixXd y_tf;  ///< y_tilde = y_tf * y
  int n = 0, m1 = 0, m2 = 0, p1 = 0, p2 = 0;
};

// Orthogonal/scaling transformations bringing D12 to [0; I] and D21 to [0 I].
// The w/z transformations are orthogonal so closed-loop norms are unchanged;
// the u/y scalings are absorbed into the controller afterwards.
NormalizedPlant normalize_plant(const GeneralizedPlant& P) {
  NormalizedPlant N;
  N.n = P.states();
  N.m1 = P.n_w;
  N.m2 = P.n_u;
  N.p1 = P.n_z;
  N.p2 = P.n_y;

  const MatrixXd D12 = P.D12();
  Eigen::JacobiSVD<MatrixXd> svd12(D12, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VectorXd s12 = svd12.singularValues();
  if (s12.size() < N.m2 || s12.minCoeff() <= 0.0) {
    throw std::invalid_argument("hinf_synthesize: D12 not full column rank");
  }
  MatrixXd perm_z = MatrixXd::Zero(N.p1, N.p1);  // rows [m2..p1) then [0..m2)
  perm_z.topRightCorner(N.p1 - N.m2, N.p1 - N.m2).setIdentity();
  perm_z.bottomLeftCorner(N.m2, N.m2).setIdentity();
  const MatrixXd Tz = perm_z * svd12.matrixU().transpose();
  const MatrixXd u_scale =
      svd12.matrixV() * s12.head(N.m2).cwiseInverse().asDiagonal();

  const MatrixXd D21 = P.D21();
  Eigen::JacobiSVD<MatrixXd> svd21(D21, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VectorXd s21 = svd21.singularValues();
  if (s21.size() < N.p2 || s21.minCoeff() <= 0.0) {
    throw std::invalid_argument("hinf_synthesize: D21 not full row rank");
  }
  MatrixXd perm_w = MatrixXd::Zero(N.m1, N.m1);
  perm_w.topRightCorner(N.m1 - N.p2, N.m1 - N.p2).setIdentity();
  perm_w.bottomLeftCorner(N.p2, N.p2).setIdentity();
  const MatrixXd Tw = svd21.matrixV() * perm_w.transpose();
  const MatrixXd y_scale =
      s21.head(N.p2).cwiseInverse().asDiagonal() * svd21.matrixU().transpose();

  N.A = P.A();
  N.B1 = P.B1() * Tw;
  N.B2 = P.B2() * u_scale;
  N.C1 = Tz * P.C1();
  N.C2 = y_scale * P.C2();
  N.D11 = Tz * P.D11() * Tw;
  N.D12 = MatrixXd::Zero(N.p1, N.m2);
  N.D12.bottomRows(N.m2).setIdentity();
  N.D21 = MatrixXd::Zero(N.p2, N.m1);
  N.D21.rightCols(N.p2).setIdentity();
  N.u_tf = u_scale;
  N.y_tf = y_scale;
  return N;
}

struct GammaTrial {
  bool feasible = false;
  MatrixXd X, Y;
  MatrixXd R, Rt;  // the indefinite quadratic-form matrices at this gamma
};

GammaTrial try_gamma(const NormalizedPlant& N, double gamma,
                     const NumericConfig& cfg) {
  GammaTrial t;
  const int n = N.n, m1 = N.m1, m2 = N.m2, p1 = N.p1, p2 = N.p2;
  const int m = m1 + m2, p = p1 + p2;

  const MatrixXd D1111 = N.D11.topLeftCorner(p1 - m2, m1 - p2);
  const MatrixXd D1112 = N.D11.topRightCorner(p1 - m2, p2);
  const MatrixXd D1121 = N.D11.bottomLeftCorner(m2, m1 - p2);
  MatrixXd top(p1 - m2, m1);
  top.leftCols(m1 - p2) = D1111;
  top.rightCols(p2) = D1112;
  MatrixXd left(p1, m1 - p2);
  left.topRows(p1 - m2) = D1111;
  left.bottomRows(m2) = D1121;
  const double gamma_floor = std::max(sigma_max_or_zero(top), sigma_max_or_zero(left));
  if (gamma <= gamma_floor * (1.0 + 1e-9)) return t;

  MatrixXd B(n, m);
  B << N.B1, N.B2;
  MatrixXd C(p, n);
  C << N.C1, N.C2;
  MatrixXd D1dot(p1, m);
  D1dot << N.D11, N.D12;
  MatrixXd Ddot1(p, m1);
  Ddot1 << N.D11, N.D21;

  MatrixXd R = D1dot.transpose() * D1dot;
  R.topLeftCorner(m1, m1) -= gamma * gamma * MatrixXd::Identity(m1, m1);
  MatrixXd Rt = Ddot1 * Ddot1.transpose();
  Rt.topLeftCorner(p1, p1) -= gamma * gamma * MatrixXd::Identity(p1, p1);

  Eigen::FullPivLU<MatrixXd> luR(R), luRt(Rt);
  if (!luR.isInvertible() || !luRt.isInvertible()) return t;

  MatrixXd Hx(2 * n, 2 * n);
  Hx.topLeftCorner(n, n) = N.A;
  Hx.topRightCorner(n, n).setZero();
  Hx.bottomLeftCorner(n, n) = -N.C1.transpose() * N.C1;
  Hx.bottomRightCorner(n, n) = -N.A.transpose();
  MatrixXd Ux(2 * n, m);
  Ux.topRows(n) = B;
  Ux.bottomRows(n) = -N.C1.transpose() * D1dot;
  MatrixXd Vx(m, 2 * n);
  Vx.leftCols(n) = D1dot.transpose() * N.C1;
  Vx.rightCols(n) = B.transpose();
  Hx -= Ux * luR.solve(Vx);

  const auto X = try_care_hamiltonian(Hx, cfg);
  if (!X || !is_psd(*X, 1e-8)) return t;

  MatrixXd Hy(2 * n, 2 * n);
  Hy.topLeftCorner(n, n) = N.A.transpose();
  Hy.topRightCorner(n, n).setZero();
  Hy.bottomLeftCorner(n, n) = -N.B1 * N.B1.transpose();
  Hy.bottomRightCorner(n, n) = -N.A;
  MatrixXd Uy(2 * n, p);
  Uy.topRows(n) = C.transpose();
  Uy.bottomRows(n) = -N.B1 * Ddot1.transpose();
  MatrixXd Vy(p, 2 * n);
  Vy.leftCols(n) = Ddot1 * N.B1.transpose();
  Vy.rightCols(n) = C;
  Hy -= Uy * luRt.solve(Vy);

  const auto Y = try_care_hamiltonian(Hy, cfg);
  if (!Y || !is_psd(*Y, 1e-8)) return t;

  if (n > 0) {
    const MatrixXd XY = (*X) * (*Y);
    const double rho = XY.eigenvalues().cwiseAbs().maxCoeff();
    if (rho >= gamma * gamma * (1.0 - 1e-9)) return t;
  }

  t.feasible = true;
  t.X = *X;
  t.Y = *Y;
  t.R = R;
  t.Rt = Rt;
  return t;
}

// Central controller at a feasible gamma (normalized coordinates).
StateSpace build_central_controller(const NormalizedPlant& N,
                                    const GammaTrial& trial, double gamma) {
  const int n = N.n, m1 = N.m1, m2 = N.m2, p1 = N.p1, p2 = N.p2;
  const int m = m1 + m2, p = p1 + p2;
  const double g2 = gamma * gamma;

  MatrixXd B(n, m);
  B << N.B1, N.B2;
  MatrixXd C(p, n);
  C << N.C1, N.C2;
  MatrixXd D1dot(p1, m);
  D1dot << N.D11, N.D12;
  MatrixXd Ddot1(p, m1);
  Ddot1 << N.D11, N.D21;

  const MatrixXd F = -trial.R.fullPivLu().solve(
      D1dot.transpose() * N.C1 + B.transpose() * trial.X);
  const MatrixXd L =
      -(N.B1 * Ddot1.transpose() + trial.Y * C.transpose()) *
      trial.Rt.fullPivLu().solve(MatrixXd::Identity(p, p));

  const MatrixXd F12 = F.block(m1 - p2, 0, p2, n);
  const MatrixXd F2 = F.bottomRows(m2);
  const MatrixXd L12 = L.middleCols(p1 - m2, m2);
  const MatrixXd L2 = L.rightCols(p2);

  const MatrixXd D1111 = N.D11.topLeftCorner(p1 - m2, m1 - p2);
  const MatrixXd D1112 = N.D11.topRightCorner(p1 - m2, p2);
  const MatrixXd D1121 = N.D11.bottomLeftCorner(m2, m1 - p2);
  const MatrixXd D1122 = N.D11.bottomRightCorner(m2, p2);

  const MatrixXd gI_row =
      g2 * MatrixXd::Identity(p1 - m2, p1 - m2) - D1111 * D1111.transpose();
  const MatrixXd gI_col =
      g2 * MatrixXd::Identity(m1 - p2, m1 - p2) - D1111.transpose() * D1111;
  const Eigen::FullPivLU<MatrixXd> lu_row(gI_row), lu_col(gI_col);

  const MatrixXd Dhat11 =
      -D1121 * D1111.transpose() * lu_row.solve(D1112) - D1122;
  const MatrixXd M12 = MatrixXd::Identity(m2, m2) -
                       D1121 * lu_col.solve(D1121.transpose());
  const MatrixXd M21 = MatrixXd::Identity(p2, p2) -
                       D1112.transpose() * lu_row.solve(D1112);
  Eigen::LLT<MatrixXd> llt12(M12), llt21(M21);
  if (llt12.info() != Eigen::Success || llt21.info() != Eigen::Success) {
    throw SynthesisInfeasible(
        "hinf_synthesize: controller feedthrough factorization failed");
  }
  const MatrixXd Dhat12 = MatrixXd(llt12.matrixL());
  const MatrixXd Dhat21 = MatrixXd(llt21.matrixL()).transpose();

  const MatrixXd Z =
      (MatrixXd::Identity(n, n) - trial.Y * trial.X / g2).fullPivLu().solve(
          MatrixXd::Identity(n, n));

  const MatrixXd Bhat2 = Z * (N.B2 + L12) * Dhat12;
  const MatrixXd Chat2 = -Dhat21 * (N.C2 + F12);
  const MatrixXd Dhat12_inv =
      Dhat12.fullPivLu().solve(MatrixXd::Identity(m2, m2));
  const MatrixXd Dhat21_inv =
      Dhat21.fullPivLu().solve(MatrixXd::Identity(p2, p2));
  const MatrixXd Bhat1 = -Z * L2 + Bhat2 * Dhat12_inv * Dhat11;
  const MatrixXd Chat1 = F2 + Dhat11 * Dhat21_inv * Chat2;
  const MatrixXd Ahat = N.A + B * F + Bhat1 * Dhat21_inv * Chat2;

  // Undo the u/y scalings of the normalization.
  return StateSpace(Ahat, Bhat1 * N.y_tf, N.u_tf * Chat1,
                    N.u_tf * Dhat11 * N.y_tf);
}

// Appends delta*u rows to z (D12 rank) and delta-scaled noise inputs to w
// (D21 rank) where needed; the epsilon terms of the paper-style weights serve
// the same purpose on the weight side.
GeneralizedPlant regularize_plant(const GeneralizedPlant& P, double delta,
                                  bool* d12_reg, bool* d21_reg) {
  const int n_w = P.n_w, n_u = P.n_u, n_z = P.n_z, n_y = P.n_y;
  MatrixXd B = P.sys.B, C = P.sys.C, D = P.sys.D;
  int new_w = n_w, new_z = n_z;

  const bool need_d12 =
      (n_z < n_u) ||
      sigma_max_or_zero(P.D12()) == 0.0 ||
      Eigen::JacobiSVD<MatrixXd>(P.D12()).singularValues().minCoeff() < delta;
  const bool need_d21 =
      (n_w < n_y) ||
      sigma_max_or_zero(P.D21()) == 0.0 ||
      Eigen::JacobiSVD<MatrixXd>(P.D21()).singularValues().minCoeff() < delta;

  if (need_d12) {
    C.conservativeResize(C.rows() + n_u, Eigen::NoChange);
    C.bottomRows(n_u).setZero();
    D.conservativeResize(D.rows() + n_u, Eigen::NoChange);
    D.bottomRows(n_u).setZero();
    D.bottomRightCorner(n_u, n_u) = delta * MatrixXd::Identity(n_u, n_u);
    // Move the new rows into the z block: reorder rows [z, extra, y].
    MatrixXd Cr(C.rows(), C.cols()), Dr(D.rows(), D.cols());
    Cr.topRows(n_z) = C.topRows(n_z);
    Cr.middleRows(n_z, n_u) = C.bottomRows(n_u);
    Cr.bottomRows(n_y) = C.middleRows(n_z, n_y);
    Dr.topRows(n_z) = D.topRows(n_z);
    Dr.middleRows(n_z, n_u) = D.bottomRows(n_u);
    Dr.bottomRows(n_y) = D.middleRows(n_z, n_y);
    C = Cr;
    D = Dr;
    new_z = n_z + n_u;
  }
  if (need_d21) {
    // Insert noise columns between w and u: inputs [w, noise, u].
    MatrixXd Bn(B.rows(), B.cols() + n_y);
    Bn.leftCols(n_w) = B.leftCols(n_w);
    Bn.middleCols(n_w, n_y).setZero();
    Bn.rightCols(n_u) = B.rightCols(n_u);
    MatrixXd Dn(D.rows(), D.cols() + n_y);
    Dn.leftCols(n_w) = D.leftCols(n_w);
    Dn.middleCols(n_w, n_y).setZero();
    Dn.rightCols(n_u) = D.rightCols(n_u);
    Dn.block(new_z, n_w, n_y, n_y) = delta * MatrixXd::Identity(n_y, n_y);
    B = Bn;
    D = Dn;
    new_w = n_w + n_y;
  }
  *d12_reg = need_d12;
  *d21_reg = need_d21;
  if (!need_d12 && !need_d21) return P;
  StateSpace sys(P.sys.A, B, C, D);
  return GeneralizedPlant(std::move(sys), new_w, n_u, new_z, n_y);
}

}  // namespace

GeneralizedPlant augment_with_weights(const GeneralizedPlant& P,
                                      const WeightAssignment& W) {
  if (static_cast<int>(W.z_weights.size()) != P.n_z ||
      static_cast<int>(W.w_weights.size()) != P.n_w) {
    throw std::invalid_argument("augment_with_weights: channel-count mismatch");
  }
  const StateSpace win = block_diag_weights(W.w_weights);
  const StateSpace wout = block_diag_weights(W.z_weights);
  const StateSpace win_full = append(win, StateSpace::identity(P.n_u));
  const StateSpace wout_full = append(wout, StateSpace::identity(P.n_y));
  StateSpace sys = series(series(win_full, P.sys), wout_full);
  sys.input_labels = P.sys.input_labels;
  sys.output_labels = P.sys.output_labels;
  return GeneralizedPlant(std::move(sys), P.n_w, P.n_u, P.n_z, P.n_y);
}

GeneralizedPlant augment_mixed_sensitivity(const GeneralizedPlant& P,
                                           const MixedSensitivityWeights& W) {
  if (P.n_z != 2 || P.n_w != 2) {
    throw std::invalid_argument(
        "augment_mixed_sensitivity: expects z = [error, effort], w = "
        "[reference, disturbance]");
  }
  WeightAssignment assign;
  assign.z_weights = {W.W_s, W.W_u};
  assign.w_weights = {std::nullopt, W.W_d};
  return augment_with_weights(P, assign);
}

GeneralizedPlant make_tracking_plant(const StateSpace& plant) {
  if (plant.inputs() != 2 || plant.outputs() != 1) {
    throw std::invalid_argument(
        "make_tracking_plant: plant must have inputs [u, d] and one output");
  }
  const int n = plant.states();
  const MatrixXd Bu = plant.B.col(0), Bd = plant.B.col(1);
  const double Du = plant.D(0, 0), Dd = plant.D(0, 1);

  MatrixXd B(n, 3);  // [r, d | u]
  B.col(0).setZero();
  B.col(1) = Bd;
  B.col(2) = Bu;
  MatrixXd C(3, n);
  C.row(0) = -plant.C;  // e = r - y
  C.row(1).setZero();   // u
  C.row(2) = -plant.C;  // measured e
  MatrixXd D(3, 3);
  D << 1.0, -Dd, -Du,
       0.0, 0.0, 1.0,
       1.0, -Dd, -Du;
  StateSpace sys(plant.A, B, C, D, {"r", "d", "u"}, {"z_err", "z_u", "y_err"});
  return GeneralizedPlant(std::move(sys), 2, 1, 2, 1);
}

StateSpace lft_lower(const GeneralizedPlant& P, const StateSpace& K) {
  if (K.inputs() != P.n_y || K.outputs() != P.n_u) {
    throw std::invalid_argument("lft_lower: controller dimension mismatch");
  }
  const int n = P.states(), nk = K.states();
  const MatrixXd A = P.A(), B1 = P.B1(), B2 = P.B2();
  const MatrixXd C1 = P.C1(), C2 = P.C2();
  const MatrixXd D11 = P.D11(), D12 = P.D12(), D21 = P.D21(), D22 = P.D22();

  const MatrixXd E = MatrixXd::Identity(P.n_u, P.n_u) - K.D * D22;
  Eigen::FullPivLU<MatrixXd> lu(E);
  if (!lu.isInvertible()) {
    throw std::invalid_argument("lft_lower: algebraic loop (ill-posed)");
  }
  const MatrixXd Phi = lu.solve(MatrixXd::Identity(P.n_u, P.n_u));

  MatrixXd Acl(n + nk, n + nk), Bcl(n + nk, P.n_w);
  MatrixXd Ccl(P.n_z, n + nk), Dcl(P.n_z, P.n_w);
  const MatrixXd PhiDKC2 = Phi * K.D * C2;
  const MatrixXd PhiDKD21 = Phi * K.D * D21;
  Acl.topLeftCorner(n, n) = A + B2 * PhiDKC2;
  Acl.topRightCorner(n, nk) = B2 * Phi * K.C;
  Acl.bottomLeftCorner(nk, n) = K.B * (C2 + D22 * PhiDKC2);
  Acl.bottomRightCorner(nk, nk) = K.A + K.B * D22 * Phi * K.C;
  Bcl.topRows(n) = B1 + B2 * PhiDKD21;
  Bcl.bottomRows(nk) = K.B * (D21 + D22 * PhiDKD21);
  Ccl.leftCols(n) = C1 + D12 * PhiDKC2;
  Ccl.rightCols(nk) = D12 * Phi * K.C;
  Dcl = D11 + D12 * PhiDKD21;

  std::vector<std::string> in(P.sys.input_labels.begin(),
                              P.sys.input_labels.begin() + P.n_w);
  std::vector<std::string> out(P.sys.output_labels.begin(),
                               P.sys.output_labels.begin() + P.n_z);
  return StateSpace(Acl, Bcl, Ccl, Dcl, in, out);
}

SynthesisResult hinf_synthesize(const GeneralizedPlant& P,
                                const HinfOptions& opt) {
  if (P.n_u < 1 || P.n_y < 1 || P.n_w < 1 || P.n_z < 1) {
    throw std::invalid_argument("hinf_synthesize: empty channel partition");
  }
  if (P.D22().norm() != 0.0) {
    throw std::invalid_argument(
        "hinf_synthesize: nonzero D22 is not supported");
  }
  if (!pbh_stabilizable(P.A(), P.B2())) {
    throw std::invalid_argument("hinf_synthesize: (A, B2) not stabilizable");
  }
  if (!pbh_stabilizable(P.A().transpose(), P.C2().transpose())) {
    throw std::invalid_argument("hinf_synthesize: (C2, A) not detectable");
  }

  SynthesisResult result;
  const GeneralizedPlant Preg = regularize_plant(
      P, opt.reg_delta, &result.d12_regularized, &result.d21_regularized);
  const NormalizedPlant N = normalize_plant(Preg);

  double lo = opt.gamma_lo, hi = opt.gamma_hi;
  GammaTrial trial_hi = try_gamma(N, hi, opt.numerics);
  result.iterations.push_back({hi, trial_hi.feasible});
  if (!trial_hi.feasible) {
    throw SynthesisInfeasible(
        "hinf_synthesize: infeasible over the whole gamma range");
  }
  GammaTrial trial_lo = try_gamma(N, lo, opt.numerics);
  result.iterations.push_back({lo, trial_lo.feasible});
  if (trial_lo.feasible) {
    hi = lo;
    trial_hi = trial_lo;
  } else {
    while (hi / lo > 1.0 + opt.rel_tol) {
      const double mid = std::sqrt(lo * hi);
      const GammaTrial t = try_gamma(N, mid, opt.numerics);
      result.iterations.push_back({mid, t.feasible});
      if (t.feasible) {
        hi = mid;
        trial_hi = t;
      } else {
        lo = mid;
      }
    }
  }

  result.gamma = hi;
  result.K = build_central_controller(N, trial_hi, hi);
  result.synthesis_plant = Preg;

  const StateSpace closed = lft_lower(Preg, result.K);
  if (!is_stable(closed, 0.0)) {
    throw CertificationError(
        "hinf_synthesize: closed loop not internally stable");
  }
  if (opt.certify) {
    result.certified_norm = hinf_norm(closed, 1e-5, opt.cert_band);
    if (result.certified_norm > result.gamma * (1.0 + opt.cert_rel_slack)) {
      throw CertificationError(
          "hinf_synthesize: achieved norm exceeds claimed gamma");
    }
  }
  return result;
}

RationalTF pi_inverse_design(const RationalTF& G_p, double omega_bw) {
  if (G_p.order() != 1 || !G_p.is_strictly_proper()) {
    throw std::invalid_argument(
        "pi_inverse_design: plant must be strictly proper first order");
  }
  if (!G_p.is_stable(0.0)) {
    throw std::invalid_argument("pi_inverse_design: plant pole must be stable");
  }
  if (!(omega_bw > 0.0)) {
    throw std::invalid_argument("pi_inverse_design: omega_bw must be positive");
  }
  const double b = G_p.num(0);
  if (b == 0.0) {
    throw std::invalid_argument("pi_inverse_design: zero plant gain");
  }
  // (omega/s) * (a1 s + a0)/b
  VectorXd num(2), den(2);
  num << omega_bw * G_p.den(0) / b, omega_bw * G_p.den(1) / b;
  den << 1.0, 0.0;
  return RationalTF(num, den);
}

SensitivitySet sensitivity_set(const StateSpace& G, const StateSpace& K,
                               const StateSpace& G_d) {
  if (G.inputs() != 1 || G.outputs() != 1 || K.inputs() != 1 ||
      K.outputs() != 1) {
    throw std::invalid_argument("sensitivity_set: G and K must be SISO");
  }
  const StateSpace L = series(K, G);
  SensitivitySet out;
  out.S = feedback(StateSpace::identity(1), L);
  out.T = feedback(L, StateSpace::identity(1));
  out.GdS = series(out.S, G_d);
  return out;
}

}  // namespace loopsynth
