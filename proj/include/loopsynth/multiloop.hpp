#pragma once

#include <optional>

#include "loopsynth/lti.hpp"
#include "loopsynth/plants.hpp"

namespace loopsynth {

/// Channel-wise split of the three-input synthesized controller
/// u = K1 (v_star - v) + K2 i + K3 i_inv, plus the classical equivalents
/// K_i = K2 and K_v = K1/K2.
struct IcovDecomposition {
  StateSpace K1, K2, K3;
  StateSpace K_i_equiv;                 ///< = K2
  std::optional<StateSpace> K_v_equiv;  ///< K1 * K2^-1; absent if K2 not invertible
};

/// Splits K (3 inputs, 1 output) into its input channels by zeroing the other
/// B/D columns. K2 is inverted as the state-space inverse of the
/// delta-regularized channel (feedthrough forced to magnitude >= delta).
IcovDecomposition decompose_icov(const StateSpace& K, double delta = 1e-4);

/// l_i(s) = K2(s) * 1/(s L_i + R_i).
StateSpace inner_loop_gain(const IcovDecomposition& d, const GridFormingParams& p);
/// l_v(s) = (K1/K2)(s) * 1/(s C); requires K_v_equiv.
StateSpace outer_loop_gain(const IcovDecomposition& d, const GridFormingParams& p);

struct BandwidthReport {
  std::optional<double> omega_i;  ///< rad/s, -3 dB bandwidth of l_i/(1+l_i)
  std::optional<double> omega_v;  ///< rad/s, -3 dB bandwidth of l_v/(1+l_v)
  std::optional<double> ratio;    ///< omega_i / omega_v
  bool stable = false;            ///< eigenvalue verdict of the closed loop
  std::optional<double> crossover_i;  ///< |l_i| unity crossing (secondary stat)
  std::optional<double> crossover_v;
};

/// Evaluates the per-loop closed maps |l/(1+l)| pointwise on the grid; this
/// stays well defined even when the assembled realization carries hidden
/// modes from the K2 inversion.
BandwidthReport bandwidth_ratio(const IcovDecomposition& d,
                                const GridFormingParams& p,
                                const StateSpace& closed_loop,
                                const GridSpec& grid = {});

}  // namespace loopsynth
