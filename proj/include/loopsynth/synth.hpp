#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "loopsynth/generalized_plant.hpp"
#include "loopsynth/lti.hpp"

namespace loopsynth {

/// Raised when no gamma in the search range admits a stabilizing controller.
struct SynthesisInfeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when the achieved closed-loop norm exceeds the claimed gamma by
/// more than the allowed slack. Never silently accepted.
struct CertificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Per-channel weighting assignment. nullopt leaves a channel untouched
/// (unity pass-through).
struct WeightAssignment {
  std::vector<std::optional<RationalTF>> z_weights;  ///< size n_z
  std::vector<std::optional<RationalTF>> w_weights;  ///< size n_w
};

/// Series-composes input weights on the exogenous channels and output weights
/// on the regulated channels. The partition sizes are unchanged; the state
/// dimension grows by the sum of the weight orders.
GeneralizedPlant augment_with_weights(const GeneralizedPlant& P,
                                      const WeightAssignment& W);

/// Classic mixed-sensitivity naming for plants shaped z = [error, effort],
/// w = [reference, disturbance]: W_s on the error output, W_u on the effort
/// output, W_d filtering the disturbance input.
struct MixedSensitivityWeights {
  RationalTF W_s;
  std::optional<RationalTF> W_u;
  std::optional<RationalTF> W_d;
};
GeneralizedPlant augment_mixed_sensitivity(const GeneralizedPlant& P,
                                           const MixedSensitivityWeights& W);

/// Wraps a plant with inputs [u, d] and one output y into the tracking
/// generalized plant: w = [r, d], z = [r - y, u], y_meas = [r - y].
GeneralizedPlant make_tracking_plant(const StateSpace& plant);

struct BisectionEntry {
  double gamma = 0.0;
  bool feasible = false;
};

struct HinfOptions {
  double gamma_lo = 1e-2;
  double gamma_hi = 1e4;
  double rel_tol = 1e-3;        ///< gamma bisection relative tolerance
  double reg_delta = 1e-4;      ///< static weight added to rank-deficient D12/D21
  double cert_rel_slack = 0.01; ///< certified norm must be <= gamma*(1+slack)
  GridSpec cert_band{1e-3, 1e9, 400};
  bool certify = true;
  NumericConfig numerics{};
};

struct SynthesisResult {
  StateSpace K;
  double gamma = 0.0;
  std::vector<BisectionEntry> iterations;
  double certified_norm = 0.0;  ///< hinf norm of the weighted closed loop
  bool d12_regularized = false;
  bool d21_regularized = false;
  GeneralizedPlant synthesis_plant;  ///< regularized plant the gamma bound refers to
};

/// Central controller of the two-Riccati output-feedback solution at the
/// smallest feasible gamma found by log-bisection. Feasibility at a trial
/// gamma = both Riccati equations admit stabilizing PSD solutions and
/// rho(XY) < gamma^2. The returned gamma is re-certified post hoc against
/// hinf_norm of the closed loop.
SynthesisResult hinf_synthesize(const GeneralizedPlant& P,
                                const HinfOptions& opt = {});

/// Closed loop w -> z of the plant with u = K y (lower LFT).
StateSpace lft_lower(const GeneralizedPlant& P, const StateSpace& K);

/// Inverse-based PI design G_c = (omega_bw/s) G_p^-1 for a strictly proper
/// first-order plant; for G_p = 1/(sL+R) this is omega_bw*L + omega_bw*R/s.
RationalTF pi_inverse_design(const RationalTF& G_p, double omega_bw);

struct SensitivitySet {
  StateSpace S;
  StateSpace T;
  StateSpace GdS;
};
/// The three closed-loop maps S = 1/(1+GK), T = GK/(1+GK), G_d S.
SensitivitySet sensitivity_set(const StateSpace& G, const StateSpace& K,
                               const StateSpace& G_d);

}  // namespace loopsynth
