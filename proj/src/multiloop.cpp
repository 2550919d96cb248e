#include "loopsynth/multiloop.hpp"

#include <cmath>
#include <stdexcept>

namespace loopsynth {

namespace {

StateSpace input_channel(const StateSpace& K, int idx) {
  MatrixXd B = MatrixXd::Zero(K.states(), 1);
  B.col(0) = K.B.col(idx);
  MatrixXd D = MatrixXd::Zero(K.outputs(), 1);
  D.col(0) = K.D.col(idx);
  return StateSpace(K.A, B, K.C, D);
}

// State-space inverse of a biproper SISO system.
StateSpace ss_inverse(const StateSpace& g) {
  const double d = g.D(0, 0);
  if (d == 0.0) {
    throw std::invalid_argument("ss_inverse: zero feedthrough");
  }
  const double dinv = 1.0 / d;
  const MatrixXd A = g.A - g.B * dinv * g.C;
  const MatrixXd B = g.B * dinv;
  const MatrixXd C = -dinv * g.C;
  const MatrixXd D = MatrixXd::Constant(1, 1, dinv);
  return StateSpace(A, B, C, D);
}

StateSpace first_order_plant_section(double L, double R) {
  MatrixXd A(1, 1), B(1, 1), C(1, 1), D(1, 1);
  A << -R / L;
  B << 1.0 / L;
  C << 1.0;
  D << 0.0;
  return StateSpace(A, B, C, D);
}

StateSpace integrator_section(double C_farad) {
  MatrixXd A(1, 1), B(1, 1), C(1, 1), D(1, 1);
  A << 0.0;
  B << 1.0 / C_farad;
  C << 1.0;
  D << 0.0;
  return StateSpace(A, B, C, D);
}

}  // namespace

IcovDecomposition decompose_icov(const StateSpace& K, double delta) {
  if (K.inputs() != 3 || K.outputs() != 1) {
    throw std::invalid_argument(
        "decompose_icov: controller must have 3 inputs and 1 output");
  }
  IcovDecomposition d;
  d.K1 = input_channel(K, 0);
  d.K2 = input_channel(K, 1);
  d.K3 = input_channel(K, 2);
  d.K_i_equiv = d.K2;

  // Regularize the K2 feedthrough before inversion; the synthesized central
  // controller is often strictly proper on this channel.
  StateSpace K2r = d.K2;
  const double feed = K2r.D(0, 0);
  if (std::abs(feed) < delta) {
    K2r.D(0, 0) = feed >= 0.0 ? delta : -delta;
  }
  try {
    d.K_v_equiv = series(ss_inverse(K2r), d.K1);
  } catch (const std::exception&) {
    d.K_v_equiv.reset();
  }
  return d;
}

StateSpace inner_loop_gain(const IcovDecomposition& d,
                           const GridFormingParams& p) {
  return series(d.K2, first_order_plant_section(p.L_i, p.R_i));
}

StateSpace outer_loop_gain(const IcovDecomposition& d,
                           const GridFormingParams& p) {
  if (!d.K_v_equiv) {
    throw std::invalid_argument(
        "outer_loop_gain: K2 channel not invertible, K_v_equiv unavailable");
  }
  return series(*d.K_v_equiv, integrator_section(p.C));
}

BandwidthReport bandwidth_ratio(const IcovDecomposition& d,
                                const GridFormingParams& p,
                                const StateSpace& closed_loop,
                                const GridSpec& grid) {
  BandwidthReport report;
  report.stable = is_stable(closed_loop, 0.0);

  const std::vector<double> omega = make_log_grid(grid);
  const StateSpace li = inner_loop_gain(d, p);
  const auto closed_mag = [](const StateSpace& l) {
    return [&l](double w) {
      const std::complex<double> lv = eval_response(l, w)(0, 0);
      return std::abs(lv / (1.0 + lv));
    };
  };
  const auto open_mag = [](const StateSpace& l) {
    return [&l](double w) { return std::abs(eval_response(l, w)(0, 0)); };
  };

  report.omega_i = bandwidth_3db_of(closed_mag(li), omega);
  report.crossover_i = crossover_of(open_mag(li), omega);
  if (d.K_v_equiv) {
    const StateSpace lv = outer_loop_gain(d, p);
    report.omega_v = bandwidth_3db_of(closed_mag(lv), omega);
    report.crossover_v = crossover_of(open_mag(lv), omega);
  }
  if (report.omega_i && report.omega_v && *report.omega_v > 0.0) {
    report.ratio = *report.omega_i / *report.omega_v;
  }
  return report;
}

}  // namespace loopsynth
