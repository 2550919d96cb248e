#include "loopsynth/lti.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace loopsynth {

namespace {

VectorXd trim_leading_zeros(const VectorXd& c) {
  int first = 0;
  while (first < c.size() - 1 && c(first) == 0.0) ++first;
  return c.tail(c.size() - first);
}

std::vector<std::string> default_labels(const char* prefix, int count) {
  std::vector<std::string> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(prefix + std::to_string(i + 1));
  return out;
}

void format_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  out += buf;
}

}  // namespace

RationalTF::RationalTF() : num(VectorXd::Zero(1)), den(VectorXd::Ones(1)) {}

RationalTF::RationalTF(VectorXd num_coeffs, VectorXd den_coeffs) {
  if (num_coeffs.size() == 0 || den_coeffs.size() == 0) {
    throw std::invalid_argument("RationalTF: empty coefficient vector");
  }
  if (!num_coeffs.allFinite() || !den_coeffs.allFinite()) {
    throw std::invalid_argument("RationalTF: non-finite coefficients");
  }
  den = trim_leading_zeros(den_coeffs);
  if (den(0) == 0.0) {
    throw std::invalid_argument("RationalTF: zero denominator");
  }
  num = trim_leading_zeros(num_coeffs);
}

RationalTF RationalTF::constant(double k) {
  RationalTF g;
  g.num = VectorXd::Constant(1, k);
  g.den = VectorXd::Ones(1);
  return g;
}

std::complex<double> RationalTF::eval(std::complex<double> s) const {
  const auto horner = [&](const VectorXd& c) {
    std::complex<double> acc = 0.0;
    for (int i = 0; i < c.size(); ++i) acc = acc * s + c(i);
    return acc;
  };
  return horner(num) / horner(den);
}

VectorXcd polynomial_roots(const VectorXd& coeffs) {
  const VectorXd c = trim_leading_zeros(coeffs);
  const int n = static_cast<int>(c.size()) - 1;
  if (n <= 0) return VectorXcd::Zero(0);
  MatrixXd companion = MatrixXd::Zero(n, n);
  companion.bottomLeftCorner(n - 1, n - 1).setIdentity();
  for (int i = 0; i < n; ++i) companion(0, i) = -c(i + 1) / c(0);
  Eigen::EigenSolver<MatrixXd> es(companion, false);
  return es.eigenvalues();
}

VectorXcd RationalTF::poles() const { return polynomial_roots(den); }

bool RationalTF::is_stable(double margin) const {
  const VectorXcd p = poles();
  for (int i = 0; i < p.size(); ++i) {
    if (p(i).real() >= -margin) return false;
  }
  return true;
}

RationalTF operator*(const RationalTF& a, const RationalTF& b) {
  const auto conv = [](const VectorXd& x, const VectorXd& y) {
    VectorXd out = VectorXd::Zero(x.size() + y.size() - 1);
    for (int i = 0; i < x.size(); ++i)
      for (int j = 0; j < y.size(); ++j) out(i + j) += x(i) * y(j);
    return out;
  };
  return RationalTF(conv(a.num, b.num), conv(a.den, b.den));
}

StateSpace::StateSpace()
    : A(MatrixXd::Zero(0, 0)),
      B(MatrixXd::Zero(0, 0)),
      C(MatrixXd::Zero(0, 0)),
      D(MatrixXd::Zero(0, 0)) {}

StateSpace::StateSpace(MatrixXd A_in, MatrixXd B_in, MatrixXd C_in,
                       MatrixXd D_in, std::vector<std::string> inputs,
                       std::vector<std::string> outputs)
    : A(std::move(A_in)),
      B(std::move(B_in)),
      C(std::move(C_in)),
      D(std::move(D_in)),
      input_labels(std::move(inputs)),
      output_labels(std::move(outputs)) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n) throw std::invalid_argument("StateSpace: A must be square");
  if (B.rows() != n) throw std::invalid_argument("StateSpace: B row mismatch");
  if (C.cols() != n) throw std::invalid_argument("StateSpace: C column mismatch");
  if (D.rows() != C.rows() || D.cols() != B.cols()) {
    throw std::invalid_argument("StateSpace: D dimension mismatch");
  }
  if (!A.allFinite() || !B.allFinite() || !C.allFinite() || !D.allFinite()) {
    throw std::invalid_argument("StateSpace: non-finite entries");
  }
  const int m = static_cast<int>(B.cols());
  const int p = static_cast<int>(C.rows());
  if (input_labels.empty()) input_labels = default_labels("u", m);
  if (output_labels.empty()) output_labels = default_labels("y", p);
  if (static_cast<int>(input_labels.size()) != m ||
      static_cast<int>(output_labels.size()) != p) {
    throw std::invalid_argument("StateSpace: label count mismatch");
  }
}

StateSpace StateSpace::static_gain(const MatrixXd& gain) {
  const int p = static_cast<int>(gain.rows());
  const int m = static_cast<int>(gain.cols());
  return StateSpace(MatrixXd::Zero(0, 0), MatrixXd::Zero(0, m),
                    MatrixXd::Zero(p, 0), gain);
}

StateSpace StateSpace::identity(int channels) {
  return static_gain(MatrixXd::Identity(channels, channels));
}

MatrixXd StateSpace::dc_gain() const {
  if (states() == 0) return D;
  Eigen::FullPivLU<MatrixXd> lu(A);
  if (!lu.isInvertible()) {
    throw std::runtime_error("dc_gain: A is singular (pole at the origin)");
  }
  return D - C * lu.solve(B);
}

VectorXcd StateSpace::poles() const {
  if (states() == 0) return VectorXcd::Zero(0);
  Eigen::EigenSolver<MatrixXd> es(A, false);
  return es.eigenvalues();
}

StateSpace tf_to_ss(const RationalTF& g) {
  if (!g.is_proper()) {
    throw std::invalid_argument("tf_to_ss: transfer function must be proper");
  }
  const int n = g.order();
  VectorXd den = g.den / g.den(0);
  VectorXd num = VectorXd::Zero(n + 1);
  num.tail(g.num.size()) = g.num / g.den(0);

  if (n == 0) return StateSpace::static_gain(MatrixXd::Constant(1, 1, num(0)));

  MatrixXd A = MatrixXd::Zero(n, n);
  A.bottomLeftCorner(n - 1, n - 1).setIdentity();
  for (int i = 0; i < n; ++i) A(0, i) = -den(i + 1);
  MatrixXd B = MatrixXd::Zero(n, 1);
  B(0, 0) = 1.0;
  MatrixXd C(1, n);
  const double d0 = num(0);
  for (int i = 0; i < n; ++i) C(0, i) = num(i + 1) - d0 * den(i + 1);
  const MatrixXd D = MatrixXd::Constant(1, 1, d0);
  return StateSpace(A, B, C, D);
}

StateSpace series(const StateSpace& g1, const StateSpace& g2) {
  if (g2.inputs() != g1.outputs()) {
    throw std::invalid_argument("series: dimension mismatch");
  }
  const int n1 = g1.states(), n2 = g2.states();
  MatrixXd A = MatrixXd::Zero(n1 + n2, n1 + n2);
  A.topLeftCorner(n1, n1) = g1.A;
  A.bottomLeftCorner(n2, n1) = g2.B * g1.C;
  A.bottomRightCorner(n2, n2) = g2.A;
  MatrixXd B(n1 + n2, g1.inputs());
  B.topRows(n1) = g1.B;
  B.bottomRows(n2) = g2.B * g1.D;
  MatrixXd C(g2.outputs(), n1 + n2);
  C.leftCols(n1) = g2.D * g1.C;
  C.rightCols(n2) = g2.C;
  const MatrixXd D = g2.D * g1.D;
  return StateSpace(A, B, C, D, g1.input_labels, g2.output_labels);
}

StateSpace parallel(const StateSpace& g1, const StateSpace& g2) {
  if (g1.inputs() != g2.inputs() || g1.outputs() != g2.outputs()) {
    throw std::invalid_argument("parallel: dimension mismatch");
  }
  const int n1 = g1.states(), n2 = g2.states();
  MatrixXd A = MatrixXd::Zero(n1 + n2, n1 + n2);
  A.topLeftCorner(n1, n1) = g1.A;
  A.bottomRightCorner(n2, n2) = g2.A;
  MatrixXd B(n1 + n2, g1.inputs());
  B.topRows(n1) = g1.B;
  B.bottomRows(n2) = g2.B;
  MatrixXd C(g1.outputs(), n1 + n2);
  C.leftCols(n1) = g1.C;
  C.rightCols(n2) = g2.C;
  return StateSpace(A, B, C, g1.D + g2.D, g1.input_labels, g1.output_labels);
}

StateSpace append(const StateSpace& g1, const StateSpace& g2) {
  const int n1 = g1.states(), n2 = g2.states();
  MatrixXd A = MatrixXd::Zero(n1 + n2, n1 + n2);
  A.topLeftCorner(n1, n1) = g1.A;
  A.bottomRightCorner(n2, n2) = g2.A;
  MatrixXd B = MatrixXd::Zero(n1 + n2, g1.inputs() + g2.inputs());
  B.topLeftCorner(n1, g1.inputs()) = g1.B;
  B.bottomRightCorner(n2, g2.inputs()) = g2.B;
  MatrixXd C = MatrixXd::Zero(g1.outputs() + g2.outputs(), n1 + n2);
  C.topLeftCorner(g1.outputs(), n1) = g1.C;
  C.bottomRightCorner(g2.outputs(), n2) = g2.C;
  MatrixXd D = MatrixXd::Zero(g1.outputs() + g2.outputs(),
                              g1.inputs() + g2.inputs());
  D.topLeftCorner(g1.outputs(), g1.inputs()) = g1.D;
  D.bottomRightCorner(g2.outputs(), g2.inputs()) = g2.D;
  std::vector<std::string> in = g1.input_labels, out = g1.output_labels;
  in.insert(in.end(), g2.input_labels.begin(), g2.input_labels.end());
  out.insert(out.end(), g2.output_labels.begin(), g2.output_labels.end());
  return StateSpace(A, B, C, D, in, out);
}

StateSpace feedback(const StateSpace& g, const StateSpace& h,
                    FeedbackSign sign) {
  if (h.inputs() != g.outputs() || h.outputs() != g.inputs()) {
    throw std::invalid_argument("feedback: dimension mismatch");
  }
  const double s = sign == FeedbackSign::kNegative ? -1.0 : 1.0;
  const int p = g.outputs();
  const MatrixXd E = MatrixXd::Identity(p, p) - s * g.D * h.D;
  Eigen::FullPivLU<MatrixXd> lu(E);
  if (!lu.isInvertible()) {
    throw std::invalid_argument("feedback: algebraic loop (ill-posed)");
  }
  const MatrixXd Einv = lu.solve(MatrixXd::Identity(p, p));

  const int n1 = g.states(), n2 = h.states();
  // y = Einv (Cg xg + s Dg Ch xh + Dg u)
  MatrixXd Cy(p, n1 + n2);
  Cy.leftCols(n1) = Einv * g.C;
  Cy.rightCols(n2) = Einv * (s * g.D * h.C);
  const MatrixXd Dy = Einv * g.D;

  MatrixXd A = MatrixXd::Zero(n1 + n2, n1 + n2);
  MatrixXd B = MatrixXd::Zero(n1 + n2, g.inputs());
  // xg' = Ag xg + Bg u + s Bg (Ch xh + Dh y)
  A.topLeftCorner(n1, n1) = g.A + s * g.B * h.D * Cy.leftCols(n1);
  A.topRightCorner(n1, n2) = s * g.B * (h.C + h.D * Cy.rightCols(n2));
  B.topRows(n1) = g.B + s * g.B * h.D * Dy;
  // xh' = Ah xh + Bh y
  A.bottomLeftCorner(n2, n1) = h.B * Cy.leftCols(n1);
  A.bottomRightCorner(n2, n2) = h.A + h.B * Cy.rightCols(n2);
  B.bottomRows(n2) = h.B * Dy;

  return StateSpace(A, B, Cy, Dy, g.input_labels, g.output_labels);
}

std::vector<double> make_log_grid(const GridSpec& spec) {
  if (!(spec.lo > 0.0) || !(spec.hi > spec.lo) || spec.points_per_decade < 1) {
    throw std::invalid_argument("make_log_grid: invalid grid spec");
  }
  const double lo = std::log10(spec.lo), hi = std::log10(spec.hi);
  const int count =
      static_cast<int>(std::ceil((hi - lo) * spec.points_per_decade)) + 1;
  std::vector<double> grid(count);
  for (int i = 0; i < count; ++i) {
    grid[i] = std::pow(10.0, lo + (hi - lo) * i / (count - 1));
  }
  return grid;
}

MatrixXcd eval_response(const StateSpace& g, double omega) {
  const int n = g.states();
  if (n == 0) return g.D.cast<std::complex<double>>();
  MatrixXcd M = MatrixXcd::Identity(n, n) * std::complex<double>(0.0, omega);
  M -= g.A.cast<std::complex<double>>();
  Eigen::PartialPivLU<MatrixXcd> lu(M);
  return g.C.cast<std::complex<double>>() *
             lu.solve(g.B.cast<std::complex<double>>()) +
         g.D.cast<std::complex<double>>();
}

FreqResponse freq_response(const StateSpace& g,
                           const std::vector<double>& omega) {
  for (std::size_t i = 1; i < omega.size(); ++i) {
    if (!(omega[i] > omega[i - 1]) || !(omega[i - 1] > 0.0)) {
      throw std::invalid_argument(
          "freq_response: omega grid must be positive and strictly increasing");
    }
  }
  FreqResponse fr;
  fr.omega = omega;
  fr.values.reserve(omega.size());
  fr.valid.assign(omega.size(), true);
  fr.input_labels = g.input_labels;
  fr.output_labels = g.output_labels;

  // Imaginary-axis poles make individual grid points singular.
  const VectorXcd p = g.poles();
  const double pole_tol = 1e-9;
  for (std::size_t k = 0; k < omega.size(); ++k) {
    bool singular = false;
    for (int i = 0; i < p.size(); ++i) {
      if (std::abs(p(i).real()) <= pole_tol * std::max(1.0, std::abs(p(i))) &&
          std::abs(std::abs(p(i).imag()) - omega[k]) <=
              1e-9 * std::max(1.0, omega[k])) {
        singular = true;
        break;
      }
    }
    if (singular) {
      fr.valid[k] = false;
      fr.values.push_back(MatrixXcd::Constant(
          g.outputs(), g.inputs(),
          std::complex<double>(std::nan(""), std::nan(""))));
      continue;
    }
    fr.values.push_back(eval_response(g, omega[k]));
  }
  return fr;
}

std::vector<double> phase_deg_unwrapped(const FreqResponse& fr, int out_idx,
                                        int in_idx) {
  std::vector<double> phase(fr.omega.size());
  double offset = 0.0;
  double prev = 0.0;
  for (std::size_t k = 0; k < fr.omega.size(); ++k) {
    const std::complex<double> v = fr.values[k](out_idx, in_idx);
    double ph = std::atan2(v.imag(), v.real()) * 180.0 / M_PI;
    if (k > 0) {
      while (ph + offset - prev > 180.0) offset -= 360.0;
      while (ph + offset - prev < -180.0) offset += 360.0;
    }
    prev = ph + offset;
    phase[k] = prev;
  }
  return phase;
}

bool is_stable(const StateSpace& g, double margin) {
  if (g.states() == 0) return true;
  return g.poles().real().maxCoeff() < -margin;
}

namespace {

// Bisect a bracketed downward crossing of `f` through `level` on [wl, wr].
double refine_crossing(const std::function<double(double)>& f, double level,
                       double wl, double wr) {
  for (int it = 0; it < 200 && (wr - wl) > 1e-4 * wl; ++it) {
    const double mid = std::sqrt(wl * wr);
    if (f(mid) >= level) {
      wl = mid;
    } else {
      wr = mid;
    }
  }
  return std::sqrt(wl * wr);
}

std::optional<double> first_downward_crossing(
    const std::function<double(double)>& mag, const std::vector<double>& grid,
    double level) {
  double prev = mag(grid.front());
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double cur = mag(grid[k]);
    if (prev >= level && cur < level) {
      return refine_crossing(mag, level, grid[k - 1], grid[k]);
    }
    prev = cur;
  }
  return std::nullopt;
}

}  // namespace

std::optional<double> bandwidth_3db(const StateSpace& g, const GridSpec& grid) {
  if (g.inputs() != 1 || g.outputs() != 1) {
    throw std::invalid_argument("bandwidth_3db: system must be SISO");
  }
  if (!is_stable(g, 0.0)) {
    throw std::invalid_argument("bandwidth_3db: system must be stable");
  }
  const double dc = std::abs(g.dc_gain()(0, 0));
  if (!(dc > 0.0)) {
    throw std::invalid_argument("bandwidth_3db: zero DC gain");
  }
  const auto mag = [&](double w) { return std::abs(eval_response(g, w)(0, 0)); };
  return first_downward_crossing(mag, make_log_grid(grid), dc / std::sqrt(2.0));
}

std::optional<double> bandwidth_3db_of(
    const std::function<double(double)>& mag, const std::vector<double>& grid) {
  if (grid.size() < 2) throw std::invalid_argument("bandwidth_3db_of: short grid");
  const double ref = mag(grid.front());
  if (!(ref > 0.0) || !std::isfinite(ref)) return std::nullopt;
  return first_downward_crossing(mag, grid, ref / std::sqrt(2.0));
}

std::optional<double> crossover_of(const std::function<double(double)>& mag,
                                   const std::vector<double>& grid) {
  if (grid.size() < 2) throw std::invalid_argument("crossover_of: short grid");
  return first_downward_crossing(mag, grid, 1.0);
}

double hinf_norm(const StateSpace& g, double rel_tol, const GridSpec& band) {
  if (!is_stable(g, 0.0)) {
    throw std::invalid_argument("hinf_norm: system must be stable");
  }
  const auto sigma_max = [&](double w) {
    return eval_response(g, w).jacobiSvd().singularValues()(0);
  };
  const std::vector<double> grid =
      make_log_grid({band.lo, band.hi, std::max(band.points_per_decade, 400)});
  double best = 0.0;
  std::size_t best_k = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double s = sigma_max(grid[k]);
    if (s > best) {
      best = s;
      best_k = k;
    }
  }
  // DC and the w->inf feedthrough are candidates the log grid cannot reach.
  if (g.states() > 0) {
    Eigen::FullPivLU<MatrixXd> lu(g.A);
    if (lu.isInvertible()) {
      const double s0 = (g.D - g.C * lu.solve(g.B)).jacobiSvd().singularValues()(0);
      best = std::max(best, s0);
    }
  }
  if (g.D.size() > 0) {
    best = std::max(best, g.D.jacobiSvd().singularValues()(0));
  }

  // Golden-section refinement on log(w) around the grid maximum.
  const double lo = grid[best_k == 0 ? 0 : best_k - 1];
  const double hi = grid[std::min(best_k + 1, grid.size() - 1)];
  double a = std::log(lo), b = std::log(hi);
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = sigma_max(std::exp(x1)), f2 = sigma_max(std::exp(x2));
  for (int it = 0; it < 200 && (b - a) > 0.25 * rel_tol; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = sigma_max(std::exp(x2));
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = sigma_max(std::exp(x1));
    }
  }
  return std::max(best, std::max(f1, f2));
}

std::string freq_response_csv(const FreqResponse& fr) {
  std::string out = "omega_rad_s";
  for (std::size_t j = 0; j < fr.input_labels.size(); ++j) {
    for (std::size_t i = 0; i < fr.output_labels.size(); ++i) {
      out += ",re_" + fr.output_labels[i] + "_" + fr.input_labels[j];
      out += ",im_" + fr.output_labels[i] + "_" + fr.input_labels[j];
    }
  }
  out += "\n";
  for (std::size_t k = 0; k < fr.omega.size(); ++k) {
    format_double(out, fr.omega[k]);
    for (int j = 0; j < fr.values[k].cols(); ++j) {
      for (int i = 0; i < fr.values[k].rows(); ++i) {
        out += ",";
        format_double(out, fr.values[k](i, j).real());
        out += ",";
        format_double(out, fr.values[k](i, j).imag());
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace loopsynth
