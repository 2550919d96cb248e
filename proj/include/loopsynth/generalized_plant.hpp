#pragma once

#include "loopsynth/lti.hpp"

namespace loopsynth {

/// Partitioned LTI plant with inputs ordered [w | u] (exogenous, control) and
/// outputs ordered [z | y] (regulated, measured).
struct GeneralizedPlant {
  StateSpace sys;
  int n_w = 0;
  int n_u = 0;
  int n_z = 0;
  int n_y = 0;

  GeneralizedPlant() = default;
  GeneralizedPlant(StateSpace system, int w, int u, int z, int y);

  int states() const { return sys.states(); }

  MatrixXd A() const { return sys.A; }
  MatrixXd B1() const { return sys.B.leftCols(n_w); }
  MatrixXd B2() const { return sys.B.rightCols(n_u); }
  MatrixXd C1() const { return sys.C.topRows(n_z); }
  MatrixXd C2() const { return sys.C.bottomRows(n_y); }
  MatrixXd D11() const { return sys.D.topLeftCorner(n_z, n_w); }
  MatrixXd D12() const { return sys.D.topRightCorner(n_z, n_u); }
  MatrixXd D21() const { return sys.D.bottomLeftCorner(n_y, n_w); }
  MatrixXd D22() const { return sys.D.bottomRightCorner(n_y, n_u); }
};

}  // namespace loopsynth
