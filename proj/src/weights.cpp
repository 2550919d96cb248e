#include "loopsynth/weights.hpp"

#include <stdexcept>

namespace loopsynth {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

RationalTF w_s1_first_order(const SensWeightParams& p) {
  require(p.M_s >= 1.0, "w_s1_first_order: M_s must be >= 1");
  require(p.omega_b > 0.0, "w_s1_first_order: omega_b must be positive");
  require(p.eps > 0.0 && p.eps <= 1.0, "w_s1_first_order: eps out of range");
  VectorXd num(2), den(2);
  num << 1.0 / p.M_s, p.omega_b;
  den << 1.0, p.eps * p.omega_b;
  return RationalTF(num, den);
}

RationalTF w_u(const CtrlWeightParams& p) {
  require(p.M_u >= 1.0, "w_u: M_u must be >= 1");
  require(p.omega_bc > 0.0, "w_u: omega_bc must be positive");
  require(p.eps1 > 0.0 && p.eps1 <= 1.0, "w_u: eps1 out of range");
  VectorXd num(2), den(2);
  num << 1.0, p.omega_bc / p.M_u;
  den << p.eps1, p.omega_bc;
  return RationalTF(num, den);
}

RationalTF resonant_section(const ResonantSectionParams& p) {
  require(p.omega_0 > 0.0, "resonant_section: omega_0 must be positive");
  require(p.zeta_num > 0.0 && p.zeta_den > 0.0,
          "resonant_section: dampings must be positive");
  VectorXd num(3), den(3);
  num << 1.0, 2.0 * p.zeta_num * p.omega_0, p.omega_0 * p.omega_0;
  den << 1.0, 2.0 * p.zeta_den * p.omega_0, p.omega_0 * p.omega_0;
  return RationalTF(num, den);
}

RationalTF w_d_static(double v_max) {
  require(v_max > 0.0, "w_d_static: v_max must be positive");
  return RationalTF::constant(1.0 / v_max);
}

RationalTF w_d_lowpass(double omega_p) {
  require(omega_p > 0.0, "w_d_lowpass: omega_p must be positive");
  return first_order_lag(1.0, omega_p);
}

RationalTF static_gain_tf(double k) { return RationalTF::constant(k); }

RationalTF first_order_lag(double dc_gain, double omega_p) {
  require(omega_p > 0.0, "first_order_lag: omega_p must be positive");
  VectorXd num(1), den(2);
  num << dc_gain * omega_p;
  den << 1.0, omega_p;
  return RationalTF(num, den);
}

RationalTF cascade(const RationalTF& w, int k, int max_order) {
  require(k >= 1, "cascade: power must be >= 1");
  if (w.order() * k > max_order) {
    throw std::invalid_argument("cascade: resulting order exceeds the guard");
  }
  RationalTF out = w;
  for (int i = 1; i < k; ++i) out = out * w;
  return out;
}

}  // namespace loopsynth
