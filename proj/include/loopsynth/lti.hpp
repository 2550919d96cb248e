#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "loopsynth/matkernel.hpp"

namespace loopsynth {

using Eigen::MatrixXcd;

/// SISO rational transfer function, coefficient vectors in descending powers
/// of s. Construction trims leading zeros and requires a nonzero denominator
/// leading coefficient.
struct RationalTF {
  VectorXd num;
  VectorXd den;

  RationalTF();
  RationalTF(VectorXd num_coeffs, VectorXd den_coeffs);

  static RationalTF constant(double k);

  int order() const { return static_cast<int>(den.size()) - 1; }
  int num_degree() const { return static_cast<int>(num.size()) - 1; }
  bool is_proper() const { return num.size() <= den.size(); }
  bool is_strictly_proper() const { return num.size() < den.size(); }

  std::complex<double> eval(std::complex<double> s) const;
  VectorXcd poles() const;
  bool is_stable(double margin = 0.0) const;

  friend RationalTF operator*(const RationalTF& a, const RationalTF& b);
};

/// Roots of a real polynomial (descending coefficients) via the companion
/// matrix. Leading zeros are trimmed; a constant polynomial has no roots.
VectorXcd polynomial_roots(const VectorXd& coeffs);

/// Dense continuous-time state-space realization xdot = Ax + Bu, y = Cx + Du.
struct StateSpace {
  MatrixXd A, B, C, D;
  std::vector<std::string> input_labels;
  std::vector<std::string> output_labels;

  StateSpace();
  StateSpace(MatrixXd A_in, MatrixXd B_in, MatrixXd C_in, MatrixXd D_in,
             std::vector<std::string> inputs = {},
             std::vector<std::string> outputs = {});

  static StateSpace static_gain(const MatrixXd& gain);
  static StateSpace identity(int channels);

  int states() const { return static_cast<int>(A.rows()); }
  int inputs() const { return static_cast<int>(B.cols()); }
  int outputs() const { return static_cast<int>(C.rows()); }

  /// C(-A)^-1 B + D; requires invertible A (no poles at the origin).
  MatrixXd dc_gain() const;
  VectorXcd poles() const;
};

/// Controllable-canonical realization of a proper transfer function.
StateSpace tf_to_ss(const RationalTF& g);

/// y = g2(g1(u)); transfer matrix G2(s) * G1(s).
StateSpace series(const StateSpace& g1, const StateSpace& g2);
StateSpace parallel(const StateSpace& g1, const StateSpace& g2);
/// Block-diagonal aggregate diag(g1, g2).
StateSpace append(const StateSpace& g1, const StateSpace& g2);

enum class FeedbackSign { kNegative, kPositive };

/// Closed loop u -> y of g with feedback through h: y = g(u + sign * h(y)).
/// Negative sign gives the usual g / (I + g h). Throws on an algebraic loop
/// (I - sign * Dg * Dh singular).
StateSpace feedback(const StateSpace& g, const StateSpace& h,
                    FeedbackSign sign = FeedbackSign::kNegative);

/// Logarithmic frequency grid specification.
struct GridSpec {
  double lo = 1e-2;   ///< rad/s
  double hi = 1e7;    ///< rad/s
  int points_per_decade = 200;
};
std::vector<double> make_log_grid(const GridSpec& spec);

/// Complex response per output-input pair per frequency. An entry is flagged
/// invalid when jw coincides with an imaginary-axis pole within tolerance.
struct FreqResponse {
  std::vector<double> omega;
  std::vector<MatrixXcd> values;  ///< one p x m matrix per frequency
  std::vector<bool> valid;
  std::vector<std::string> input_labels, output_labels;
};

FreqResponse freq_response(const StateSpace& g, const std::vector<double>& omega);
/// Single-frequency resolvent evaluation C (jw I - A)^-1 B + D.
MatrixXcd eval_response(const StateSpace& g, double omega);

/// Unwrapped phase in degrees for one channel of a response.
std::vector<double> phase_deg_unwrapped(const FreqResponse& fr, int out_idx,
                                        int in_idx);

bool is_stable(const StateSpace& g, double margin = 0.0);

/// Lowest w where |g(jw)| first crosses |g(j0)|/sqrt(2) from above; grid
/// bracket refined by bisection to 1e-4 relative. nullopt = no crossing on
/// the grid ("beyond grid"). Throws for unstable or non-SISO g and |g(0)|=0.
std::optional<double> bandwidth_3db(const StateSpace& g,
                                    const GridSpec& grid = {});

/// Same crossing search for an arbitrary positive magnitude function; the
/// reference level is mag at the lowest grid point. Used for loop-gain
/// closed-form maps |l/(1+l)| that lack a well-posed realization at DC.
std::optional<double> bandwidth_3db_of(const std::function<double(double)>& mag,
                                       const std::vector<double>& grid);

/// First w where mag crosses 1 from above (gain crossover), same refinement.
std::optional<double> crossover_of(const std::function<double(double)>& mag,
                                   const std::vector<double>& grid);

/// H-infinity norm of a stable system: sup_w sigma_max(g(jw)) via a dense
/// log-grid scan (>= 400 points/decade) refined by golden-section search
/// around the maximum; certified within rel_tol by the local refinement.
double hinf_norm(const StateSpace& g, double rel_tol = 1e-4,
                 const GridSpec& band = {1e-3, 1e9, 400});

/// Serialize to CSV: omega_rad_s, then re/im columns per channel.
std::string freq_response_csv(const FreqResponse& fr);

}  // namespace loopsynth
