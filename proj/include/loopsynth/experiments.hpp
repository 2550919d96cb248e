#pragma once

#include <optional>
#include <string>
#include <vector>

#include "loopsynth/config_io.hpp"
#include "loopsynth/multiloop.hpp"
#include "loopsynth/sim.hpp"
#include "loopsynth/synth.hpp"

namespace loopsynth {

struct ExperimentConfig {
  std::string plant_file;
  std::string weights_file;
  std::string scenario_file;
  std::string out_dir = "out";
  std::string case_name;  ///< synth/minratio: which weight case (default: first)
  GridSpec grid{1e-2, 1e7, 200};
  HinfOptions hinf{};
  double pi_omega_bw = 2.0 * M_PI * 100.0;
  double wd_pole_lo = 10.0;   ///< minratio sweep range, rad/s
  double wd_pole_hi = 1e5;
  int wd_points = 11;
};

/// Physical (unweighted) closed loop for simulation, outputs
/// [error, i, i_inv, u, v], inputs [v_star, i_d].
StateSpace grid_forming_closed_loop(const GridFormingParams& p,
                                    const StateSpace& K);

/// Physical closed loop of a [u,d]->y plant under error feedback, outputs
/// [error, i, u], inputs [reference, disturbance] with the given labels.
StateSpace tracking_closed_loop(const StateSpace& plant, const StateSpace& K,
                                const std::string& ref_label,
                                const std::string& dist_label);

struct SynthReport {
  std::string case_name;
  double gamma = 0.0;
  double certified_norm = 0.0;
  int controller_order = 0;
  std::vector<std::string> files_written;
};
SynthReport run_synth(const ExperimentConfig& cfg);

struct ControllerMetrics {
  std::string name;
  double sse_tracking = 0.0;  ///< steady error before the disturbance step
  double sse_final = 0.0;     ///< steady error in the final segment
  double overshoot_pct = 0.0; ///< first reference step
  double u_peak = 0.0;
};
struct CompareLReport {
  std::vector<ControllerMetrics> controllers;
  std::vector<std::string> files_written;
};
CompareLReport run_compare_l(const ExperimentConfig& cfg);

struct SweepRow {
  std::string name;
  std::string status = "ok";  ///< "ok" or the per-case failure description
  double gamma = 0.0;
  double certified_norm = 0.0;
  std::optional<double> omega_i, omega_v, ratio;
  bool stable_eig = false;
  std::string sim_verdict;
};
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg);

struct MinratioPoint {
  double wd_pole = 0.0;
  std::string status = "ok";
  double gamma = 0.0;
  std::optional<double> ratio;
  bool stable_eig = false;
  std::string sim_verdict;
};
struct MinratioReport {
  std::vector<MinratioPoint> points;
  std::optional<double> min_stable_ratio;
  std::optional<double> pole_at_min;
};
MinratioReport run_minratio(const ExperimentConfig& cfg);

/// Built-in oracle self-test (closed-form Riccati, sensitivity identity,
/// integrator convergence, Schur reassembly). Returns true when all pass.
bool run_seed_check(std::string* log = nullptr);

}  // namespace loopsynth
