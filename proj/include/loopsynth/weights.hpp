#pragma once

#include "loopsynth/lti.hpp"

namespace loopsynth {

/// Parameters of the biproper sensitivity weight (s/M_s + w_b)/(s + eps*w_b):
/// DC gain 1/eps, high-frequency gain 1/M_s, w_b the lower bandwidth bound.
struct SensWeightParams {
  double M_s = 2.0;
  double omega_b = 2.0 * M_PI * 100.0;  ///< rad/s
  double eps = 1e-3;
};

/// Parameters of the control-effort weight (s + w_bc/M_u)/(eps1*s + w_bc):
/// DC gain 1/M_u, high-frequency gain 1/eps1, w_bc the upper bandwidth bound.
struct CtrlWeightParams {
  double M_u = 2.0;
  double omega_bc = 1e4;  ///< rad/s
  double eps1 = 1e-3;
};

/// Biquad section (s^2 + 2*z_num*w0*s + w0^2)/(s^2 + 2*z_den*w0*s + w0^2):
/// unity gain at DC and infinity, gain z_num/z_den at w0 (peak when
/// z_num > z_den, notch when reversed).
struct ResonantSectionParams {
  double omega_0 = 2.0 * M_PI * 60.0;  ///< rad/s
  double zeta_num = 1.0;
  double zeta_den = 1e-3;
};

RationalTF w_s1_first_order(const SensWeightParams& p);
RationalTF w_u(const CtrlWeightParams& p);
RationalTF resonant_section(const ResonantSectionParams& p);

/// Static disturbance normalization 1/v_max.
RationalTF w_d_static(double v_max);
/// Unity-DC first-order roll-off 1/(s/omega_p + 1).
RationalTF w_d_lowpass(double omega_p);

RationalTF static_gain_tf(double k);
/// dc_gain/(s/omega_p + 1).
RationalTF first_order_lag(double dc_gain, double omega_p);

/// w^k by repeated polynomial convolution. Guards against runaway degree.
RationalTF cascade(const RationalTF& w, int k, int max_order = 40);

}  // namespace loopsynth
