#include "loopsynth/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace loopsynth {

SignalSpec SignalSpec::constant(double v) {
  SignalSpec s;
  s.kind = Kind::kConstant;
  s.value = v;
  return s;
}

SignalSpec SignalSpec::sinusoid(double amplitude, double omega, double phase) {
  SignalSpec s;
  s.kind = Kind::kSinusoid;
  s.amplitude = amplitude;
  s.omega = omega;
  s.phase = phase;
  return s;
}

double SignalSpec::eval(double t) const {
  if (kind == Kind::kConstant) return value;
  return amplitude * std::sin(omega * t + phase);
}

double SignalSpec::peak() const {
  return kind == Kind::kConstant ? std::abs(value) : std::abs(amplitude);
}

const std::vector<double>& ScenarioTrace::series(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) return signals[i];
  }
  throw std::out_of_range("ScenarioTrace: no series named " + name);
}

bool ScenarioTrace::has_series(const std::string& name) const {
  return std::find(names.begin(), names.end(), name) != names.end();
}

namespace {

void validate_scenario(const Scenario& sc) {
  if (sc.segments.empty()) {
    throw std::invalid_argument("simulate: scenario has no segments");
  }
  for (std::size_t i = 1; i < sc.segments.size(); ++i) {
    if (sc.segments[i].t_start <= sc.segments[i - 1].t_start) {
      throw std::invalid_argument("simulate: segments must be time-ordered");
    }
  }
  if (!(sc.t_end > sc.segments.back().t_start)) {
    throw std::invalid_argument("simulate: t_end before the last segment");
  }
}

}  // namespace

ScenarioTrace simulate(const StateSpace& closed_loop, const Scenario& sc) {
  validate_scenario(sc);
  if (closed_loop.inputs() != 2) {
    throw std::invalid_argument(
        "simulate: closed loop must have inputs [reference, disturbance]");
  }
  if (closed_loop.input_labels[0] != sc.reference_label ||
      closed_loop.input_labels[1] != sc.disturbance_label) {
    throw std::invalid_argument(
        "simulate: closed-loop input labels do not match the scenario");
  }

  double lambda_max = 0.0;
  if (closed_loop.states() > 0) {
    lambda_max = closed_loop.poles().cwiseAbs().maxCoeff();
  }
  double dt = sc.dt;
  if (dt > 0.0) {
    if (lambda_max > 0.0 && dt > 1.0 / (10.0 * lambda_max)) {
      throw std::invalid_argument(
          "simulate: dt under-resolves the fastest closed-loop mode");
    }
  } else {
    dt = 1e-5;
    if (lambda_max > 0.0) dt = std::min(dt, 1.0 / (20.0 * lambda_max));
  }
  const std::size_t steps = static_cast<std::size_t>(std::ceil(sc.t_end / dt));
  if (steps > 400000000ull) {
    throw std::runtime_error(
        "simulate: required step count is impractically large (stiff loop)");
  }

  double amp = 0.0;
  for (const auto& seg : sc.segments) {
    amp = std::max({amp, seg.reference.peak(), seg.disturbance.peak()});
  }
  const double bound = sc.divergence_factor * std::max(amp, 1.0);

  const std::size_t stride = std::max<std::size_t>(1, steps / sc.max_samples);

  const int n = closed_loop.states();
  const int p = closed_loop.outputs();
  VectorXd x = VectorXd::Zero(n);
  if (sc.x0.size() > 0) {
    if (sc.x0.size() != n) {
      throw std::invalid_argument("simulate: x0 dimension mismatch");
    }
    x = sc.x0;
  }
  Eigen::Vector2d w;

  ScenarioTrace trace;
  trace.names = closed_loop.output_labels;
  trace.names.push_back(sc.reference_label);
  trace.names.push_back(sc.disturbance_label);
  trace.signals.assign(trace.names.size(), {});

  std::size_t seg_idx = 0;
  const auto input_at = [&](double t) {
    while (seg_idx + 1 < sc.segments.size() &&
           t >= sc.segments[seg_idx + 1].t_start) {
      ++seg_idx;
    }
    // RK4 evaluates slightly ahead of the current segment boundary tracker;
    // scan forward without committing seg_idx.
    std::size_t k = seg_idx;
    while (k + 1 < sc.segments.size() && t >= sc.segments[k + 1].t_start) ++k;
    return Eigen::Vector2d(sc.segments[k].reference.eval(t),
                           sc.segments[k].disturbance.eval(t));
  };

  const auto record = [&](double t) {
    w = input_at(t);
    const VectorXd y = closed_loop.C * x + closed_loop.D * w;
    trace.t.push_back(t);
    for (int i = 0; i < p; ++i) trace.signals[i].push_back(y(i));
    trace.signals[p].push_back(w(0));
    trace.signals[p + 1].push_back(w(1));
  };

  const MatrixXd& A = closed_loop.A;
  const MatrixXd& B = closed_loop.B;
  record(0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = k * dt;
    const Eigen::Vector2d w0 = input_at(t);
    const Eigen::Vector2d wh = input_at(t + 0.5 * dt);
    const Eigen::Vector2d w1 = input_at(t + dt);
    const VectorXd k1 = A * x + B * w0;
    const VectorXd k2 = A * (x + 0.5 * dt * k1) + B * wh;
    const VectorXd k3 = A * (x + 0.5 * dt * k2) + B * wh;
    const VectorXd k4 = A * (x + dt * k3) + B * w1;
    x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const double t_next = (k + 1) * dt;
    if (n > 0 && (!x.allFinite() || x.cwiseAbs().maxCoeff() > bound)) {
      trace.diverged = true;
      trace.divergence_time = t_next;
      if (!x.allFinite()) x.setZero();
      record(t_next);
      break;
    }
    if ((k + 1) % stride == 0 || k + 1 == steps) record(t_next);
  }
  return trace;
}

double steady_state_error(const ScenarioTrace& trace, double window) {
  if (trace.diverged) {
    throw std::invalid_argument("steady_state_error: trace diverged");
  }
  if (trace.t.empty()) {
    throw std::invalid_argument("steady_state_error: empty trace");
  }
  const double t_end = trace.t.back();
  if (!(window > 0.0) || window >= t_end) {
    throw std::invalid_argument("steady_state_error: bad window");
  }
  const std::vector<double>& err = trace.series("error");
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < trace.t.size(); ++k) {
    if (trace.t[k] >= t_end - window) {
      acc += std::abs(err[k]);
      ++count;
    }
  }
  return acc / static_cast<double>(count);
}

const char* to_string(StabilityVerdict v) {
  switch (v) {
    case StabilityVerdict::kConverged: return "converged";
    case StabilityVerdict::kOscillatory: return "oscillatory";
    case StabilityVerdict::kDiverged: return "diverged";
  }
  return "unknown";
}

StabilityVerdict classify_stability(const ScenarioTrace& trace) {
  if (trace.diverged) return StabilityVerdict::kDiverged;
  if (trace.t.empty()) return StabilityVerdict::kConverged;
  const std::vector<double>& err = trace.series("error");
  const std::vector<double>& ref = trace.signals[trace.signals.size() - 2];

  // Trailing quarter of the trace, after transients had time to settle.
  const double t_tail = trace.t.back() - 0.25 * trace.t.back();
  double emin = 0.0, emax = 0.0, ref_scale = 0.0;
  bool first = true;
  for (std::size_t k = 0; k < trace.t.size(); ++k) {
    if (trace.t[k] < t_tail) continue;
    ref_scale = std::max(ref_scale, std::abs(ref[k]));
    if (first) {
      emin = emax = err[k];
      first = false;
    } else {
      emin = std::min(emin, err[k]);
      emax = std::max(emax, err[k]);
    }
  }
  if (ref_scale <= 0.0) ref_scale = 1.0;
  return (emax - emin) > 0.05 * ref_scale ? StabilityVerdict::kOscillatory
                                          : StabilityVerdict::kConverged;
}

std::string trace_csv(const ScenarioTrace& trace) {
  std::string out = "t_s";
  for (const auto& n : trace.names) out += "," + n;
  out += "\n";
  char buf[40];
  for (std::size_t k = 0; k < trace.t.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%.12g", trace.t[k]);
    out += buf;
    for (const auto& s : trace.signals) {
      std::snprintf(buf, sizeof(buf), ",%.12g", s[k]);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

}  // namespace loopsynth
