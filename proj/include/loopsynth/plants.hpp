#pragma once

#include "loopsynth/generalized_plant.hpp"
#include "loopsynth/lti.hpp"

namespace loopsynth {

/// Series L filter between the converter voltage and the AC source.
struct LFilterParams {
  double L = 2e-3;        ///< henry
  double R = 0.5;         ///< ohm
  double v_ac_max = 120;  ///< volt, disturbance amplitude bound
};

/// LCL ladder: converter-side L1/R1, shunt C, grid-side L2/R2.
struct LCLParams {
  double L1 = 1e-3;   ///< henry
  double L2 = 1e-3;   ///< henry
  double C = 10e-6;   ///< farad
  double R1 = 0.1;    ///< ohm
  double R2 = 0.1;    ///< ohm
  double v_ac_max = 120;
};

/// Grid-forming inverter: converter inductor L_i/R_i feeding a capacitor C,
/// grid branch L_g/R_g into a constant-impedance load Z_L, plus a constant
/// current load i_d.
struct GridFormingParams {
  double L_i = 1e-3;  ///< henry
  double R_i = 0.1;   ///< ohm
  double L_g = 1e-3;  ///< henry
  double R_g = 0.1;   ///< ohm
  double C = 24e-6;   ///< farad
  double Z_L = 36.0;  ///< ohm
};

/// One state (inductor current); inputs [u, v_ac], output [i];
/// L di/dt = u - v_ac - R i.
StateSpace l_filter_plant(const LFilterParams& p);

/// 1/sqrt(L1 L2 C / (L1 + L2)).
double lcl_resonance(const LCLParams& p);
/// Same formula applied to the grid-forming L_i/L_g/C branch.
double grid_forming_resonance(const GridFormingParams& p);

/// Three states [i1, i2, v_c]; inputs [u, v_ac]; output grid-side current i2.
StateSpace lcl_current_plant(const LCLParams& p);

/// The voltage-control generalized plant: states [i_inv, i, v], exogenous
/// w = [v_star, i_d], control u, regulated z = [v_star - v, v_inv], measured
/// y = [v_star - v, i, i_inv].
GeneralizedPlant grid_forming_plant(const GridFormingParams& p);

}  // namespace loopsynth
