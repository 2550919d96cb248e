#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "loopsynth/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitCertification = 4;

loopsynth::GridSpec parse_grid(const std::string& spec) {
  loopsynth::GridSpec g;
  double lo, hi;
  int ppd;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &lo, &hi, &ppd) != 3 ||
      !(lo > 0.0) || !(hi > lo) || ppd < 1) {
    throw loopsynth::ConfigError("--grid expects lo:hi:points_per_decade");
  }
  g.lo = lo;
  g.hi = hi;
  g.points_per_decade = ppd;
  return g;
}

void parse_wd_range(const std::string& spec, loopsynth::ExperimentConfig* cfg) {
  double lo, hi;
  int n;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &lo, &hi, &n) != 3 ||
      !(lo > 0.0) || !(hi >= lo) || n < 1) {
    throw loopsynth::ConfigError("--wd-range expects lo:hi:points");
  }
  cfg->wd_pole_lo = lo;
  cfg->wd_pole_hi = hi;
  cfg->wd_points = n;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "loopsynth: H-infinity mixed-sensitivity synthesis for power-converter "
      "plants, ICOV decomposition and bandwidth-ratio studies"};
  app.require_subcommand(0, 1);

  loopsynth::ExperimentConfig cfg;
  std::string grid_spec, wd_range_spec;
  bool seed_check = false;

  app.add_flag("--seed-check", seed_check, "run the built-in oracle self-tests");

  const auto add_common = [&](CLI::App* cmd, bool needs_scenario) {
    cmd->add_option("--plant", cfg.plant_file, "plant parameter file (JSON)")
        ->required();
    cmd->add_option("--weights", cfg.weights_file, "weight-case file (JSON)")
        ->required();
    if (needs_scenario) {
      cmd->add_option("--scenario", cfg.scenario_file, "scenario file (JSON)")
          ->required();
    }
    cmd->add_option("--out", cfg.out_dir, "output directory");
    cmd->add_option("--grid", grid_spec, "frequency grid lo:hi:ppd");
  };

  CLI::App* synth = app.add_subcommand("synth", "synthesize one weight case");
  add_common(synth, false);
  synth->add_option("--case", cfg.case_name, "weight case name");

  CLI::App* compare_l =
      app.add_subcommand("compare-l", "PI vs H-infinity on the L-filter plant");
  add_common(compare_l, true);

  CLI::App* sweep =
      app.add_subcommand("sweep", "synthesize every weight case and tabulate");
  add_common(sweep, true);

  CLI::App* minratio =
      app.add_subcommand("minratio", "sweep the W_d pole for the minimal ratio");
  add_common(minratio, true);
  minratio->add_option("--case", cfg.case_name, "base weight case name");
  minratio->add_option("--wd-range", wd_range_spec, "W_d pole sweep lo:hi:points");

  CLI11_PARSE(app, argc, argv);

  try {
    if (seed_check) {
      std::string log;
      const bool ok = loopsynth::run_seed_check(&log);
      std::cout << log;
      std::cout << (ok ? "seed-check: all oracles PASS\n"
                       : "seed-check: FAILURES detected\n");
      return ok ? kExitOk : kExitError;
    }
    if (!grid_spec.empty()) cfg.grid = parse_grid(grid_spec);
    if (!wd_range_spec.empty()) parse_wd_range(wd_range_spec, &cfg);

    if (synth->parsed()) {
      const auto report = loopsynth::run_synth(cfg);
      std::cout << "case " << report.case_name << ": gamma = " << report.gamma
                << ", certified norm = " << report.certified_norm
                << ", controller order = " << report.controller_order << "\n";
      for (const auto& f : report.files_written) std::cout << "wrote " << f << "\n";
      return kExitOk;
    }
    if (compare_l->parsed()) {
      const auto report = loopsynth::run_compare_l(cfg);
      std::printf("%-12s %14s %14s %12s %10s\n", "controller", "sse_track[A]",
                  "sse_final[A]", "overshoot%", "u_peak[V]");
      for (const auto& m : report.controllers) {
        std::printf("%-12s %14.6g %14.6g %12.4g %10.4g\n", m.name.c_str(),
                    m.sse_tracking, m.sse_final, m.overshoot_pct, m.u_peak);
      }
      return kExitOk;
    }
    if (sweep->parsed()) {
      const auto rows = loopsynth::run_sweep(cfg);
      std::printf("%-8s %-8s %10s %12s %12s %10s %6s %s\n", "case", "status",
                  "gamma", "omega_i", "omega_v", "ratio", "stable", "sim");
      for (const auto& r : rows) {
        std::printf("%-8s %-8s %10.5g %12.5g %12.5g %10.4g %6s %s\n",
                    r.name.c_str(), r.status == "ok" ? "ok" : "failed",
                    r.gamma, r.omega_i.value_or(0.0), r.omega_v.value_or(0.0),
                    r.ratio.value_or(0.0), r.stable_eig ? "yes" : "no",
                    r.sim_verdict.c_str());
      }
      return kExitOk;
    }
    if (minratio->parsed()) {
      const auto report = loopsynth::run_minratio(cfg);
      for (const auto& pt : report.points) {
        std::printf("W_d pole %10.4g: gamma %10.5g ratio %10.4g stable %-3s %s\n",
                    pt.wd_pole, pt.gamma, pt.ratio.value_or(0.0),
                    pt.stable_eig ? "yes" : "no", pt.sim_verdict.c_str());
      }
      if (report.min_stable_ratio) {
        std::cout << "minimal stable ratio " << *report.min_stable_ratio
                  << " at W_d pole " << *report.pole_at_min << " rad/s\n";
      } else {
        std::cout << "no stable point in the sweep\n";
      }
      return kExitOk;
    }
    std::cout << app.help();
    return kExitOk;
  } catch (const loopsynth::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const loopsynth::SynthesisInfeasible& e) {
    std::cerr << "synthesis infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const loopsynth::CertificationError& e) {
    std::cerr << "certification failure: " << e.what() << "\n";
    return kExitCertification;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
