#include "loopsynth/plants.hpp"

#include <cmath>
#include <stdexcept>

namespace loopsynth {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

GeneralizedPlant::GeneralizedPlant(StateSpace system, int w, int u, int z,
                                   int y)
    : sys(std::move(system)), n_w(w), n_u(u), n_z(z), n_y(y) {
  if (n_w < 0 || n_u < 0 || n_z < 0 || n_y < 0 ||
      n_w + n_u != sys.inputs() || n_z + n_y != sys.outputs()) {
    throw std::invalid_argument("GeneralizedPlant: partition mismatch");
  }
}

StateSpace l_filter_plant(const LFilterParams& p) {
  require(p.L > 0.0, "l_filter_plant: L must be positive");
  require(p.R >= 0.0, "l_filter_plant: R must be nonnegative");
  require(p.v_ac_max > 0.0, "l_filter_plant: v_ac_max must be positive");
  MatrixXd A(1, 1), B(1, 2), C(1, 1), D(1, 2);
  A << -p.R / p.L;
  B << 1.0 / p.L, -1.0 / p.L;
  C << 1.0;
  D << 0.0, 0.0;
  return StateSpace(A, B, C, D, {"u", "v_ac"}, {"i"});
}

double lcl_resonance(const LCLParams& p) {
  require(p.L1 > 0.0 && p.L2 > 0.0 && p.C > 0.0,
          "lcl_resonance: L1, L2, C must be positive");
  return 1.0 / std::sqrt(p.L1 * p.L2 * p.C / (p.L1 + p.L2));
}

double grid_forming_resonance(const GridFormingParams& p) {
  return lcl_resonance({p.L_i, p.L_g, p.C, p.R_i, p.R_g, 1.0});
}

StateSpace lcl_current_plant(const LCLParams& p) {
  require(p.L1 > 0.0 && p.L2 > 0.0 && p.C > 0.0,
          "lcl_current_plant: L1, L2, C must be positive");
  require(p.R1 >= 0.0 && p.R2 >= 0.0,
          "lcl_current_plant: resistances must be nonnegative");
  // States [i1, i2, v_c]:
  //   L1 i1' = u - R1 i1 - v_c
  //   L2 i2' = v_c - R2 i2 - v_ac
  //   C  v_c' = i1 - i2
  MatrixXd A(3, 3), B(3, 2), C(1, 3), D(1, 2);
  A << -p.R1 / p.L1, 0.0, -1.0 / p.L1,
       0.0, -p.R2 / p.L2, 1.0 / p.L2,
       1.0 / p.C, -1.0 / p.C, 0.0;
  B << 1.0 / p.L1, 0.0,
       0.0, -1.0 / p.L2,
       0.0, 0.0;
  C << 0.0, 1.0, 0.0;
  D << 0.0, 0.0;
  return StateSpace(A, B, C, D, {"u", "v_ac"}, {"i"});
}

GeneralizedPlant grid_forming_plant(const GridFormingParams& p) {
  require(p.L_i > 0.0 && p.L_g > 0.0 && p.C > 0.0,
          "grid_forming_plant: inductances and capacitance must be positive");
  require(p.R_i >= 0.0 && p.R_g >= 0.0,
          "grid_forming_plant: resistances must be nonnegative");
  require(p.Z_L > 0.0, "grid_forming_plant: Z_L must be positive");

  // States x = [i_inv, i, v]:
  //   L_i i_inv' = u - R_i i_inv                      (u := v_inv - v)
  //   L_g i'     = v - (R_g + Z_L) i - Z_L i_d
  //   C   v'     = i_inv - i
  MatrixXd A(3, 3);
  A << -p.R_i / p.L_i, 0.0, 0.0,
       0.0, -(p.R_g + p.Z_L) / p.L_g, 1.0 / p.L_g,
       1.0 / p.C, -1.0 / p.C, 0.0;
  MatrixXd B(3, 3);  // [v_star, i_d | u]
  B << 0.0, 0.0, 1.0 / p.L_i,
       0.0, -p.Z_L / p.L_g, 0.0,
       0.0, 0.0, 0.0;
  // Outputs [z1 = v_star - v, z2 = v_inv = u + v | y1 = v_star - v, y2 = i,
  // y3 = i_inv]
  MatrixXd C(5, 3);
  C << 0.0, 0.0, -1.0,
       0.0, 0.0, 1.0,
       0.0, 0.0, -1.0,
       0.0, 1.0, 0.0,
       1.0, 0.0, 0.0;
  MatrixXd D(5, 3);
  D << 1.0, 0.0, 0.0,
       0.0, 0.0, 1.0,
       1.0, 0.0, 0.0,
       0.0, 0.0, 0.0,
       0.0, 0.0, 0.0;
  StateSpace sys(A, B, C, D, {"v_star", "i_d", "u"},
                 {"z_err", "z_vinv", "y_err", "y_i", "y_iinv"});
  return GeneralizedPlant(std::move(sys), 2, 1, 2, 3);
}

}  // namespace loopsynth
