#pragma once

#include <optional>
#include <string>
#include <vector>

#include "loopsynth/lti.hpp"

namespace loopsynth {

/// Piecewise signal primitive: a constant level or a sinusoid. A "step" is a
/// constant that begins at its segment start.
struct SignalSpec {
  enum class Kind { kConstant, kSinusoid };
  Kind kind = Kind::kConstant;
  double value = 0.0;      ///< constant level
  double amplitude = 0.0;  ///< sinusoid amplitude
  double omega = 0.0;      ///< sinusoid frequency, rad/s
  double phase = 0.0;      ///< sinusoid phase, rad

  static SignalSpec constant(double v);
  static SignalSpec sinusoid(double amplitude, double omega, double phase = 0);
  double eval(double t) const;
  double peak() const;
};

struct ScenarioSegment {
  double t_start = 0.0;
  SignalSpec reference;
  SignalSpec disturbance;
};

/// Time-ordered reference/disturbance schedule. dt <= 0 selects the
/// automatic step min(1e-5, 1/(20 |lambda_max|)).
struct Scenario {
  std::vector<ScenarioSegment> segments;
  double t_end = 0.5;
  double dt = 0.0;
  double divergence_factor = 1e6;
  std::string reference_label = "v_star";
  std::string disturbance_label = "i_d";
  std::size_t max_samples = 40000;  ///< stored trace resolution
  VectorXd x0;                      ///< initial state; empty = zero
};

struct ScenarioTrace {
  std::vector<double> t;
  std::vector<std::string> names;
  std::vector<std::vector<double>> signals;
  bool diverged = false;
  std::optional<double> divergence_time;

  const std::vector<double>& series(const std::string& name) const;
  bool has_series(const std::string& name) const;
};

/// Classical fixed-step 4th-order integration of the two-input closed loop
/// driven by the scenario schedule. Divergence is declared when any state
/// magnitude exceeds divergence_factor times the largest source amplitude.
/// Throws when the requested dt is larger than 1/(10 |lambda_max|).
ScenarioTrace simulate(const StateSpace& closed_loop, const Scenario& sc);

/// Mean |error| over the trailing window of the trace. The window must lie
/// inside the final segment; the trace must not have diverged.
double steady_state_error(const ScenarioTrace& trace, double window);

enum class StabilityVerdict { kConverged, kOscillatory, kDiverged };
const char* to_string(StabilityVerdict v);

/// Diverged per the state bound; oscillatory when the trailing-window
/// peak-to-peak error exceeds 5% of the reference scale; else converged.
StabilityVerdict classify_stability(const ScenarioTrace& trace);

/// Trace serialization: t_s then one column per named signal.
std::string trace_csv(const ScenarioTrace& trace);

}  // namespace loopsynth
