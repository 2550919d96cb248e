#include "loopsynth/experiments.hpp"

#include "loopsynth/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace loopsynth {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
  return v ? fmt(*v) : "nan";
}

std::string join_path(const std::string& dir, const std::string& file) {
  if (dir.empty()) return file;
  return dir + "/" + file;
}

GridFormingParams require_grid_forming(const PlantConfig& pc) {
  if (!std::holds_alternative<GridFormingParams>(pc.params)) {
    throw ConfigError("this command needs a grid_forming plant file");
  }
  return std::get<GridFormingParams>(pc.params);
}

StateSpace build_siso_plant(const PlantConfig& pc) {
  if (std::holds_alternative<LFilterParams>(pc.params)) {
    return l_filter_plant(std::get<LFilterParams>(pc.params));
  }
  if (std::holds_alternative<LCLParams>(pc.params)) {
    return lcl_current_plant(std::get<LCLParams>(pc.params));
  }
  throw ConfigError("this command needs an l_filter or lcl plant file");
}

WeightContext weight_context_for(const PlantConfig& pc) {
  WeightContext ctx;
  if (std::holds_alternative<GridFormingParams>(pc.params)) {
    ctx.omega_lcl = grid_forming_resonance(std::get<GridFormingParams>(pc.params));
  } else if (std::holds_alternative<LCLParams>(pc.params)) {
    ctx.omega_lcl = lcl_resonance(std::get<LCLParams>(pc.params));
  }
  return ctx;
}

const WeightCase& pick_case(const std::vector<WeightCase>& cases,
                            const std::string& name) {
  if (cases.empty()) throw ConfigError("weight file has no cases");
  if (name.empty()) return cases.front();
  for (const auto& c : cases) {
    if (c.name == name) return c;
  }
  throw ConfigError("weight case not found: " + name);
}

GeneralizedPlant assemble_synthesis_plant(const PlantConfig& pc,
                                          const WeightCase& wc) {
  if (std::holds_alternative<GridFormingParams>(pc.params)) {
    return augment_mixed_sensitivity(
        grid_forming_plant(std::get<GridFormingParams>(pc.params)),
        {wc.W_s, wc.W_u, wc.W_d});
  }
  return augment_mixed_sensitivity(make_tracking_plant(build_siso_plant(pc)),
                                   {wc.W_s, wc.W_u, wc.W_d});
}

double mean_abs_between(const ScenarioTrace& trace, const std::string& name,
                        double t0, double t1) {
  const auto& s = trace.series(name);
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < trace.t.size(); ++k) {
    if (trace.t[k] >= t0 && trace.t[k] < t1) {
      acc += std::abs(s[k]);
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("mean_abs_between: empty window");
  return acc / static_cast<double>(count);
}

double max_abs(const ScenarioTrace& trace, const std::string& name) {
  const auto& s = trace.series(name);
  double m = 0.0;
  for (double v : s) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

StateSpace grid_forming_closed_loop(const GridFormingParams& p,
                                    const StateSpace& K) {
  const GeneralizedPlant gp = grid_forming_plant(p);
  // Extend the regulated block to the full signal set [error, i, i_inv, u, v]
  // while keeping the measured block.
  MatrixXd C(8, 3), D(8, 3);
  C.row(0) = gp.sys.C.row(0);            // error = v_star - v
  C.row(1) << 0, 1, 0;                   // i
  C.row(2) << 1, 0, 0;                   // i_inv
  C.row(3).setZero();                    // u
  C.row(4) << 0, 0, 1;                   // v
  C.bottomRows(3) = gp.sys.C.bottomRows(3);
  D.row(0) = gp.sys.D.row(0);
  D.row(1).setZero();
  D.row(2).setZero();
  D.row(3) << 0, 0, 1;
  D.row(4).setZero();
  D.bottomRows(3) = gp.sys.D.bottomRows(3);
  StateSpace sys(gp.sys.A, gp.sys.B, C, D, {"v_star", "i_d", "u"},
                 {"error", "i", "i_inv", "u", "v", "y_err", "y_i", "y_iinv"});
  const GeneralizedPlant sim_plant(std::move(sys), 2, 1, 5, 3);
  return lft_lower(sim_plant, K);
}

StateSpace tracking_closed_loop(const StateSpace& plant, const StateSpace& K,
                                const std::string& ref_label,
                                const std::string& dist_label) {
  if (plant.inputs() != 2 || plant.outputs() != 1) {
    throw std::invalid_argument("tracking_closed_loop: plant must be [u,d]->y");
  }
  const int n = plant.states();
  MatrixXd B(n, 3);
  B.col(0).setZero();
  B.col(1) = plant.B.col(1);
  B.col(2) = plant.B.col(0);
  MatrixXd C(4, n), D(4, 3);
  C.row(0) = -plant.C;  // error
  C.row(1) = plant.C;   // i
  C.row(2).setZero();   // u
  C.row(3) = -plant.C;  // measured error
  D.row(0) << 1.0, -plant.D(0, 1), -plant.D(0, 0);
  D.row(1) << 0.0, plant.D(0, 1), plant.D(0, 0);
  D.row(2) << 0.0, 0.0, 1.0;
  D.row(3) = D.row(0);
  StateSpace sys(plant.A, B, C, D, {ref_label, dist_label, "u"},
                 {"error", "i", "u", "y_err"});
  const GeneralizedPlant sim_plant(std::move(sys), 2, 1, 3, 1);
  return lft_lower(sim_plant, K);
}

SynthReport run_synth(const ExperimentConfig& cfg) {
  const PlantConfig pc = load_plant_file(cfg.plant_file);
  const auto cases = load_weight_cases(cfg.weights_file, weight_context_for(pc));
  const WeightCase& wc = pick_case(cases, cfg.case_name);

  const GeneralizedPlant P = assemble_synthesis_plant(pc, wc);
  const SynthesisResult res = hinf_synthesize(P, cfg.hinf);

  SynthReport report;
  report.case_name = wc.name;
  report.gamma = res.gamma;
  report.certified_norm = res.certified_norm;
  report.controller_order = res.K.states();

  const auto grid = make_log_grid(cfg.grid);
  const auto save = [&](const std::string& file, const std::string& content) {
    const std::string path = join_path(cfg.out_dir, file);
    write_text_file(path, content);
    report.files_written.push_back(path);
  };

  save("controller_" + wc.name + ".json", synthesis_result_json(res));
  save("bode_K_" + wc.name + ".csv",
       freq_response_csv(freq_response(res.K, grid)));

  if (std::holds_alternative<GridFormingParams>(pc.params)) {
    const auto p = std::get<GridFormingParams>(pc.params);
    const StateSpace cl = grid_forming_closed_loop(p, res.K);
    // S: v_star -> error, T: v_star -> v.
    StateSpace S(cl.A, cl.B.col(0), cl.C.row(0), cl.D.block(0, 0, 1, 1));
    StateSpace T(cl.A, cl.B.col(0), cl.C.row(4), cl.D.block(4, 0, 1, 1));
    save("bode_S_" + wc.name + ".csv", freq_response_csv(freq_response(S, grid)));
    save("bode_T_" + wc.name + ".csv", freq_response_csv(freq_response(T, grid)));
    const IcovDecomposition dec = decompose_icov(res.K, cfg.hinf.reg_delta);
    StateSpace li = inner_loop_gain(dec, p);
    li.output_labels = {"l_i"};
    save("bode_loop_inner_" + wc.name + ".csv",
         freq_response_csv(freq_response(li, grid)));
    if (dec.K_v_equiv) {
      StateSpace lv = outer_loop_gain(dec, p);
      lv.output_labels = {"l_v"};
      save("bode_loop_outer_" + wc.name + ".csv",
           freq_response_csv(freq_response(lv, grid)));
    }
  } else {
    const StateSpace G = build_siso_plant(pc);
    StateSpace Gu(G.A, G.B.col(0), G.C, G.D.col(0));
    StateSpace Gd(G.A, G.B.col(1), G.C, G.D.col(1));
    const SensitivitySet sens = sensitivity_set(Gu, res.K, Gd);
    StateSpace L = series(res.K, Gu);
    save("bode_S_" + wc.name + ".csv",
         freq_response_csv(freq_response(sens.S, grid)));
    save("bode_T_" + wc.name + ".csv",
         freq_response_csv(freq_response(sens.T, grid)));
    save("bode_loop_" + wc.name + ".csv",
         freq_response_csv(freq_response(L, grid)));
  }

  std::string txt;
  txt += "case: " + wc.name + "\n";
  txt += "gamma: " + fmt(res.gamma) + "\n";
  txt += "certified_norm: " + fmt(res.certified_norm) + "\n";
  txt += "controller_order: " + std::to_string(res.K.states()) + "\n";
  txt += "bisection_steps: " + std::to_string(res.iterations.size()) + "\n";
  save("synth_" + wc.name + ".txt", txt);
  return report;
}

CompareLReport run_compare_l(const ExperimentConfig& cfg) {
  const PlantConfig pc = load_plant_file(cfg.plant_file);
  if (!std::holds_alternative<LFilterParams>(pc.params)) {
    throw ConfigError("compare-l needs an l_filter plant file");
  }
  const LFilterParams lp = std::get<LFilterParams>(pc.params);
  const StateSpace G = l_filter_plant(lp);
  const auto cases = load_weight_cases(cfg.weights_file, weight_context_for(pc));
  const Scenario sc = load_scenario_file(cfg.scenario_file);

  const WeightCase& w1 = pick_case(cases, "ws1_first_order");
  const WeightCase& w2 = pick_case(cases, "ws1_second_order");

  // Reference PI from the inverse-based rule on the u->i channel.
  VectorXd num(1), den(2);
  num << 1.0;
  den << lp.L, lp.R;
  const RationalTF Gp(num, den);
  const StateSpace K_pi = tf_to_ss(pi_inverse_design(Gp, cfg.pi_omega_bw));

  const GeneralizedPlant P_track = make_tracking_plant(G);
  const SynthesisResult r1 =
      hinf_synthesize(augment_mixed_sensitivity(P_track, {w1.W_s, w1.W_u, w1.W_d}),
                      cfg.hinf);
  const SynthesisResult r2 =
      hinf_synthesize(augment_mixed_sensitivity(P_track, {w2.W_s, w2.W_u, w2.W_d}),
                      cfg.hinf);

  CompareLReport report;
  const double t_dist = sc.segments.back().t_start;
  const double t_step2 = sc.segments.size() > 1 ? sc.segments[1].t_start : t_dist;

  const auto evaluate = [&](const std::string& name, const StateSpace& K) {
    const StateSpace cl =
        tracking_closed_loop(G, K, sc.reference_label, sc.disturbance_label);
    const ScenarioTrace trace = simulate(cl, sc);

    ControllerMetrics m;
    m.name = name;
    const double win = 0.1 * (t_dist - t_step2);
    m.sse_tracking = mean_abs_between(trace, "error", t_dist - win, t_dist);
    m.sse_final = steady_state_error(trace, 0.1 * (sc.t_end - t_dist));
    // Overshoot over the first reference step.
    const auto& i_series = trace.series("i");
    double peak = 0.0;
    for (std::size_t k = 0; k < trace.t.size(); ++k) {
      if (trace.t[k] < t_step2) peak = std::max(peak, i_series[k]);
    }
    const double i_ss =
        mean_abs_between(trace, "i", t_step2 - 0.1 * t_step2, t_step2);
    m.overshoot_pct = i_ss > 0.0 ? 100.0 * (peak - i_ss) / i_ss : 0.0;
    m.u_peak = max_abs(trace, "u");
    report.controllers.push_back(m);

    const std::string path = join_path(cfg.out_dir, "trace_" + name + ".csv");
    write_text_file(path, trace_csv(trace));
    report.files_written.push_back(path);
  };

  evaluate("pi", K_pi);
  evaluate("hinf_ws1", r1.K);
  evaluate("hinf_ws1_sq", r2.K);

  std::string csv =
      "controller,sse_tracking_A,sse_final_A,overshoot_pct,u_peak_V\n";
  for (const auto& m : report.controllers) {
    csv += m.name + "," + fmt(m.sse_tracking) + "," + fmt(m.sse_final) + "," +
           fmt(m.overshoot_pct) + "," + fmt(m.u_peak) + "\n";
  }
  const std::string path = join_path(cfg.out_dir, "compare_l.csv");
  write_text_file(path, csv);
  report.files_written.push_back(path);
  return report;
}

namespace {

SweepRow sweep_one_case(const GridFormingParams& p, const WeightCase& wc,
                        const Scenario& sc, const ExperimentConfig& cfg) {
  SweepRow row;
  row.name = wc.name;
  try {
    const GeneralizedPlant P = augment_mixed_sensitivity(
        grid_forming_plant(p), {wc.W_s, wc.W_u, wc.W_d});
    const SynthesisResult res = hinf_synthesize(P, cfg.hinf);
    row.gamma = res.gamma;
    row.certified_norm = res.certified_norm;

    const StateSpace cl = grid_forming_closed_loop(p, res.K);
    const IcovDecomposition dec = decompose_icov(res.K, cfg.hinf.reg_delta);
    const BandwidthReport bw = bandwidth_ratio(dec, p, cl, cfg.grid);
    row.omega_i = bw.omega_i;
    row.omega_v = bw.omega_v;
    row.ratio = bw.ratio;
    row.stable_eig = bw.stable;

    try {
      const ScenarioTrace trace = simulate(cl, sc);
      row.sim_verdict = to_string(classify_stability(trace));
    } catch (const std::exception& e) {
      row.sim_verdict = std::string("error: ") + e.what();
    }
  } catch (const std::exception& e) {
    row.status = e.what();
  }
  return row;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string csv =
      "case,status,gamma,certified_norm,omega_i_rad_s,omega_v_rad_s,ratio,"
      "stable_eig,sim_verdict\n";
  for (const auto& r : rows) {
    csv += r.name + "," + (r.status == "ok" ? "ok" : "failed") + "," +
           fmt(r.gamma) + "," + fmt(r.certified_norm) + "," +
           fmt_opt(r.omega_i) + "," + fmt_opt(r.omega_v) + "," +
           fmt_opt(r.ratio) + "," + (r.stable_eig ? "yes" : "no") + "," +
           (r.sim_verdict.empty() ? "none" : r.sim_verdict) + "\n";
  }
  return csv;
}

}  // namespace

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
  const PlantConfig pc = load_plant_file(cfg.plant_file);
  const GridFormingParams p = require_grid_forming(pc);
  const auto cases = load_weight_cases(cfg.weights_file, weight_context_for(pc));
  const Scenario sc = load_scenario_file(cfg.scenario_file);

  std::vector<SweepRow> rows;
  for (const auto& wc : cases) rows.push_back(sweep_one_case(p, wc, sc, cfg));
  write_text_file(join_path(cfg.out_dir, "sweep.csv"), sweep_csv(rows));
  return rows;
}

MinratioReport run_minratio(const ExperimentConfig& cfg) {
  const PlantConfig pc = load_plant_file(cfg.plant_file);
  const GridFormingParams p = require_grid_forming(pc);
  const auto cases = load_weight_cases(cfg.weights_file, weight_context_for(pc));
  const Scenario sc = load_scenario_file(cfg.scenario_file);
  const WeightCase& base = pick_case(cases, cfg.case_name);

  if (!(cfg.wd_pole_lo > 0.0) || !(cfg.wd_pole_hi >= cfg.wd_pole_lo) ||
      cfg.wd_points < 1) {
    throw ConfigError("minratio: invalid W_d pole sweep range");
  }

  MinratioReport report;
  for (int k = 0; k < cfg.wd_points; ++k) {
    const double frac =
        cfg.wd_points == 1 ? 0.0
                           : static_cast<double>(k) / (cfg.wd_points - 1);
    const double pole =
        cfg.wd_pole_lo * std::pow(cfg.wd_pole_hi / cfg.wd_pole_lo, frac);
    WeightCase wc = base;
    wc.name = "pole_" + fmt(pole);
    wc.W_d = w_d_lowpass(pole);
    const SweepRow row = sweep_one_case(p, wc, sc, cfg);

    MinratioPoint pt;
    pt.wd_pole = pole;
    pt.status = row.status;
    pt.gamma = row.gamma;
    pt.ratio = row.ratio;
    pt.stable_eig = row.stable_eig;
    pt.sim_verdict = row.sim_verdict;
    report.points.push_back(pt);

    if (row.status == "ok" && row.stable_eig &&
        row.sim_verdict == "converged" && row.ratio) {
      if (!report.min_stable_ratio || *row.ratio < *report.min_stable_ratio) {
        report.min_stable_ratio = row.ratio;
        report.pole_at_min = pole;
      }
    }
  }

  std::string csv =
      "wd_pole_rad_s,status,gamma,ratio,stable_eig,sim_verdict\n";
  for (const auto& pt : report.points) {
    csv += fmt(pt.wd_pole) + "," + (pt.status == "ok" ? "ok" : "failed") +
           "," + fmt(pt.gamma) + "," + fmt_opt(pt.ratio) + "," +
           (pt.stable_eig ? "yes" : "no") + "," +
           (pt.sim_verdict.empty() ? "none" : pt.sim_verdict) + "\n";
  }
  std::string summary;
  if (report.min_stable_ratio) {
    summary = "min_stable_ratio," + fmt(*report.min_stable_ratio) + ",at_pole," +
              fmt(*report.pole_at_min) + "\n";
  } else {
    summary = "min_stable_ratio,none,at_pole,none\n";
  }
  write_text_file(join_path(cfg.out_dir, "minratio.csv"), csv);
  write_text_file(join_path(cfg.out_dir, "minratio_summary.csv"), summary);
  return report;
}

bool run_seed_check(std::string* log) {
  std::ostringstream out;
  bool all_ok = true;
  const auto check = [&](const char* name, bool ok) {
    out << (ok ? "PASS" : "FAIL") << "  " << name << "\n";
    all_ok = all_ok && ok;
  };

  {
    // Scalar Riccati -x^2 + 1 = 0, stabilizing root x = 1.
    const MatrixXd A = MatrixXd::Zero(1, 1), B = MatrixXd::Ones(1, 1);
    const MatrixXd X = care(A, B, MatrixXd::Ones(1, 1), MatrixXd::Ones(1, 1));
    check("care scalar closed form", std::abs(X(0, 0) - 1.0) < 1e-10);
  }
  {
    // S + T = 1 on a sample loop.
    const StateSpace G = tf_to_ss(RationalTF((VectorXd(1) << 2.0).finished(),
                                             (VectorXd(3) << 1, 2, 2).finished()));
    const StateSpace K = tf_to_ss(RationalTF((VectorXd(2) << 5, 20).finished(),
                                             (VectorXd(2) << 1, 0.01).finished()));
    const SensitivitySet sens = sensitivity_set(G, K, G);
    bool ok = true;
    for (double w : make_log_grid({1e-2, 1e4, 20})) {
      const auto s = eval_response(sens.S, w)(0, 0);
      const auto t = eval_response(sens.T, w)(0, 0);
      ok = ok && std::abs(s + t - 1.0) < 1e-10;
    }
    check("sensitivity identity S+T=1", ok);
  }
  {
    // RK4 propagator on xdot = -x over 1 s against exp(-1).
    double x = 1.0;
    const double dt = 1e-3;
    for (int k = 0; k < 1000; ++k) {
      const double k1 = -x;
      const double k2 = -(x + 0.5 * dt * k1);
      const double k3 = -(x + 0.5 * dt * k2);
      const double k4 = -(x + dt * k3);
      x += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    check("rk4 scalar decay", std::abs(x - std::exp(-1.0)) < 1e-6);
  }
  {
    // Schur reassembly on a fixed pseudo-random 5x5.
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    MatrixXd M(5, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) M(i, j) = dist(rng);
    const SchurResult s = schur_ordered(M, SpectrumHalf::kNegativeReal);
    const double resid = (s.Q * s.T * s.Q.transpose() - M).norm() / M.norm();
    const double orth = (s.Q.transpose() * s.Q -
                         MatrixXd::Identity(5, 5)).norm();
    check("schur reassembly", resid < 1e-8 && orth < 1e-10 * 5);
  }

  if (log) *log = out.str();
  return all_ok;
}

}  // namespace loopsynth
