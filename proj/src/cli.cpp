#include "crtsim/cli.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "crtsim/calibrate.hpp"
#include "crtsim/config_io.hpp"
#include "crtsim/decision.hpp"
#include "crtsim/kernels.hpp"
#include "crtsim/separate.hpp"
#include "crtsim/simulate.hpp"
#include "crtsim/trial.hpp"

namespace crtsim {

namespace {

struct CommonArgs {
  std::string kernel = "auto";
};

std::string default_calibrated_path(const std::string& in) {
  const std::string suffix = ".cal.ini";
  if (in.size() >= suffix.size() && in.compare(in.size() - suffix.size(), suffix.size(), suffix) == 0)
    return in;  // idempotent re-emission overwrites in place
  if (in.size() >= 4 && in.compare(in.size() - 4, 4, ".ini") == 0)
    return in.substr(0, in.size() - 4) + suffix;
  return in + suffix;
}

void write_manifest_for(const std::string& command, const std::string& config_blob,
                        std::uint64_t seed, const std::string& started,
                        const std::vector<std::string>& output_paths,
                        const std::string& manifest_path) {
  std::vector<std::pair<std::string, std::string>> outputs;
  for (const auto& p : output_paths) outputs.emplace_back(p, digest_hex(read_text_file(p)));
  write_text_file(manifest_path, manifest_json(command, digest_hex(config_blob), seed,
                                               outputs, started, utc_timestamp()));
}

bool parse_design_kind(const std::string& s, DesignKind& out) {
  if (s == "ar") out = DesignKind::Ar;
  else if (s == "separate") out = DesignKind::Separate;
  else if (s == "er") out = DesignKind::Er;
  else return false;
  return true;
}

// "lo:hi:step" or comma-separated values; family names map to 0/1.
std::vector<double> parse_grid(const std::string& spec, SweepAxis axis) {
  std::vector<double> grid;
  auto parse_token = [&](const std::string& tok) -> double {
    if (axis == SweepAxis::GeneratorFamily) {
      Family fam;
      if (parse_family(tok, fam)) return fam == Family::Weibull ? 0.0 : 1.0;
    }
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("bad grid token '" + tok + "'");
    return v;
  };
  if (spec.find(':') != std::string::npos) {
    double lo, hi, step;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0.0)
      throw std::invalid_argument("grid range must be lo:hi:step with step > 0");
    for (double v = lo; v <= hi + 1e-9 * step; v += step) grid.push_back(v);
    return grid;
  }
  std::istringstream in(spec);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    if (!tok.empty()) grid.push_back(parse_token(tok));
  }
  if (grid.empty()) throw std::invalid_argument("empty grid");
  return grid;
}

ScenarioSpec load_calibrated_scenario(const std::string& path) {
  ScenarioSpec sc = read_scenario_file(path);
  if (!sc.calibrated)
    throw CalibrationError("scenario '" + path +
                           "' is not calibrated; run `crtsim calibrate` first");
  return sc;
}

int cmd_calibrate(const std::string& scenario_path, std::string out_path) {
  const std::string started = utc_timestamp();
  const std::string input_blob = read_text_file(scenario_path);
  ScenarioSpec sc = parse_scenario_string(input_blob, scenario_path);
  calibrate_scenario(sc);
  if (out_path.empty()) out_path = default_calibrated_path(scenario_path);
  write_scenario_file(out_path, sc);

  std::ostringstream report;
  report << "calibrated scenario '" << sc.name << "' (" << family_name(sc.family) << ")\n";
  bool all_ok = true;
  for (int arm = 0; arm < kNumArms; ++arm) {
    const auto cir = generator_cir(sc.arms[arm], sc.nu, sc.nu);
    const auto half = generator_cir(sc.arms[arm], sc.nu / 2.0, sc.nu);
    report << "  " << arm_name(arm) << ": targets (" << sc.targets[arm].cir[0] << ", "
           << sc.targets[arm].cir[1] << ")  achieved (" << cir[0] << ", " << cir[1]
           << ")  half (" << half[0] << ", " << half[1] << ")  residual "
           << sc.residual[arm] << "\n";
    all_ok = all_ok && sc.residual[arm] < 1e-6;
  }
  report << "written: " << out_path << "\n";
  std::cout << report.str();
  write_manifest_for("calibrate", input_blob, 0, started, {out_path},
                     out_path + ".manifest.json");
  if (!all_ok) {
    std::cerr << "error: calibration residual above tolerance\n";
    return kExitCalibration;
  }
  return kExitOk;
}

int cmd_simulate(const std::string& scenario_path, const std::string& design_str,
                 int reps, std::uint64_t seed, int workers, const std::string& out_path,
                 const std::string& design_cfg_path) {
  const std::string started = utc_timestamp();
  if (reps < 1) throw CLI::ValidationError("--reps", "must be positive");
  DesignKind kind;
  if (!parse_design_kind(design_str, kind))
    throw CLI::ValidationError("--design", "must be ar, separate or er");
  ScenarioSpec sc = load_calibrated_scenario(scenario_path);
  DesignConfig cfg = design_cfg_path.empty() ? DesignConfig{} : read_design_file(design_cfg_path);

  SimOptions opts;
  opts.design = kind;
  opts.n_reps = reps;
  opts.master_seed = seed;
  opts.workers = workers;
  opts.progress = [reps](int done, int total) {
    std::fprintf(stderr, "\rreplicates %d/%d", done, total);
    if (done == total) std::fprintf(stderr, "\n");
  };
  const auto oc = run_replicates(sc, cfg, opts);
  if (oc.n_failed > 0)
    std::cerr << "warning: " << oc.n_failed << " replicates failed and were excluded\n";
  const std::string table = oc_csv({oc});
  if (out_path.empty()) {
    std::cout << table;
  } else {
    write_text_file(out_path, table);
    write_manifest_for("simulate", read_text_file(scenario_path), seed, started, {out_path},
                       out_path + ".manifest.json");
  }
  return kExitOk;
}

int cmd_conduct(const std::string& data_path, const std::string& design_cfg_path,
                bool final_analysis, const std::string& chain_out, std::uint64_t seed) {
  DesignConfig cfg = design_cfg_path.empty() ? DesignConfig{} : read_design_file(design_cfg_path);
  const auto records = read_patient_csv(data_path);
  if (records.empty()) throw ParseError(data_path + ": no records");

  McmcConfig mc = cfg.mcmc;
  mc.seed = seed;
  const auto draws = sample_posterior(records, cfg.prior, mc);
  if (!chain_out.empty()) write_chain_dump(chain_out, draws);
  const auto stats = decision_stats(draws, cfg.weights, cfg.tau, cfg.nu);

  std::ostringstream out;
  out << "records: " << records.size() << "  posterior draws: " << stats.n_draws << "\n";
  for (int w = 0; w < 2; ++w) {
    const char* sub = w == kSubgroupRe ? "re" : "se";
    const auto cands = candidate_doses(w);
    const auto adm = admissible_set(w, stats, cfg);
    out << "subgroup " << sub << ":\n";
    out << "  admissible:";
    if (adm.empty()) out << " (empty - terminate enrollment)";
    for (int d : adm) out << " " << (d == 0 ? "low" : d == 1 ? "standard" : "high");
    out << "\n";
    for (int i = 0; i < 2; ++i) {
      const int d = cands[i];
      const auto series = utility_series(w, d, draws, cfg.weights, cfg.nu);
      const double ess = effective_sample_size(series);
      const auto& arm = stats.arm[arm_index(w, d)];
      const double mcse = arm.sd_utility / std::sqrt(std::max(1.0, ess));
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "  utility %-8s = %8.4f (mcse %.4f)  exceed dp %.4f nc %.4f\n",
                    d == 0 ? "low" : d == 1 ? "standard" : "high", arm.mean_utility, mcse,
                    arm.exceed_frac[0], arm.exceed_frac[1]);
      out << buf;
    }
    if (!adm.empty()) {
      out << "  randomization:";
      for (const auto& [d, p] : randomization_probabilities(w, adm, stats, cfg)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, " %s %.4f", d == 0 ? "low" : d == 1 ? "standard" : "high",
                      p);
        out << buf;
      }
      out << "\n";
    }
    if (final_analysis) {
      const auto sel = final_selection(w, adm, stats, cfg);
      out << "  final selection: "
          << (sel ? (*sel == 0 ? "low" : *sel == 1 ? "standard" : "high") : "none") << "\n";
    }
  }
  std::cout << out.str();
  return kExitOk;
}

int cmd_sensitivity(const std::string& scenario_path, const std::string& design_cfg_path,
                    const std::string& design_str, const std::string& axis_str,
                    const std::string& grid_str, int reps, std::uint64_t seed, int workers,
                    const std::string& out_prefix) {
  const std::string started = utc_timestamp();
  if (reps < 1) throw CLI::ValidationError("--reps", "must be positive");
  DesignKind kind;
  if (!parse_design_kind(design_str, kind))
    throw CLI::ValidationError("--design", "must be ar, separate or er");
  SweepAxis axis;
  if (!parse_axis(axis_str, axis))
    throw CLI::ValidationError("--axis",
                               "must be sample_size, re_proportion, generator_family or weights");
  const auto grid = parse_grid(grid_str, axis);
  ScenarioSpec sc = load_calibrated_scenario(scenario_path);
  DesignConfig cfg = design_cfg_path.empty() ? DesignConfig{} : read_design_file(design_cfg_path);

  SimOptions opts;
  opts.design = kind;
  opts.n_reps = reps;
  opts.master_seed = seed;
  opts.workers = workers;
  int point_index = 0;
  opts.progress = [&point_index, &grid, reps](int done, int total) {
    std::fprintf(stderr, "\rgrid point %d/%zu: replicates %d/%d", point_index + 1,
                 grid.size(), done, total);
    if (done == total) std::fprintf(stderr, "\n");
  };

  std::vector<SweepPoint> points;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    point_index = static_cast<int>(i);
    auto pts = sensitivity_sweep(sc, cfg, axis, {grid[i]}, opts);
    points.push_back(std::move(pts.front()));
  }

  const std::string table = sweep_csv(axis, points);
  const std::string plot = sweep_plot_csv(points);
  if (out_prefix.empty()) {
    std::cout << table;
  } else {
    const std::string sweep_path = out_prefix + "_sweep.csv";
    const std::string plot_path = out_prefix + "_plot.csv";
    write_text_file(sweep_path, table);
    write_text_file(plot_path, plot);
    write_manifest_for("sensitivity", read_text_file(scenario_path), seed, started,
                       {sweep_path, plot_path}, out_prefix + ".manifest.json");
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"competing-risk adaptive phase II trial engine and simulator"};
  app.require_subcommand(1);

  std::string kernel = "auto";
  app.add_option("--kernel", kernel, "kernel backend: auto, scalar or avx2")
      ->default_val("auto");

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "calibrate scenario generators to CIR targets");
  std::string cal_scenario, cal_out;
  cal->add_option("--scenario", cal_scenario, "scenario file")->required();
  cal->add_option("--out", cal_out, "output path (default: <scenario>.cal.ini)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "simulate replicate trials and emit OC table");
  std::string sim_scenario, sim_design = "ar", sim_out, sim_cfg;
  int sim_reps = 0, sim_workers = 0;
  std::uint64_t sim_seed = 1;
  sim->add_option("--scenario", sim_scenario, "calibrated scenario file")->required();
  sim->add_option("--design", sim_design, "ar, separate or er")->default_val("ar");
  sim->add_option("--reps", sim_reps, "number of replicate trials")->required();
  sim->add_option("--seed", sim_seed, "master seed")->default_val(1);
  sim->add_option("--workers", sim_workers, "worker threads (0 = hardware)")->default_val(0);
  sim->add_option("--out", sim_out, "output CSV path (default: stdout)");
  sim->add_option("--config", sim_cfg, "design config file");

  // conduct
  auto* con = app.add_subcommand("conduct", "batch decision support on accumulated data");
  std::string con_data, con_cfg, con_chain;
  bool con_final = false;
  std::uint64_t con_seed = 1;
  con->add_option("--data", con_data, "patient record CSV")->required();
  con->add_option("--config", con_cfg, "design config file");
  con->add_flag("--final", con_final, "also report the final dose selection");
  con->add_option("--chain-out", con_chain, "write the posterior chain dump here");
  con->add_option("--seed", con_seed, "sampler seed")->default_val(1);

  // sensitivity
  auto* sen = app.add_subcommand("sensitivity", "operating characteristics across a sweep");
  std::string sen_scenario, sen_cfg, sen_design = "ar", sen_axis, sen_grid, sen_out;
  int sen_reps = 0, sen_workers = 0;
  std::uint64_t sen_seed = 1;
  sen->add_option("--scenario", sen_scenario, "calibrated scenario file")->required();
  sen->add_option("--config", sen_cfg, "design config file");
  sen->add_option("--design", sen_design, "ar, separate or er")->default_val("ar");
  sen->add_option("--axis", sen_axis, "sample_size, re_proportion, generator_family, weights")
      ->required();
  sen->add_option("--grid", sen_grid, "comma list or lo:hi:step")->required();
  sen->add_option("--reps", sen_reps, "replicates per grid point")->required();
  sen->add_option("--seed", sen_seed, "master seed")->default_val(1);
  sen->add_option("--workers", sen_workers, "worker threads (0 = hardware)")->default_val(0);
  sen->add_option("--out", sen_out, "output prefix (default: stdout table)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      app.exit(e);
      return kExitOk;
    }
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  }

  if (!kernels::select_backend_by_name(kernel)) {
    std::cerr << "error: kernel backend '" << kernel << "' unknown or unsupported\n";
    return kExitParse;
  }

  try {
    if (*cal) return cmd_calibrate(cal_scenario, cal_out);
    if (*sim)
      return cmd_simulate(sim_scenario, sim_design, sim_reps, sim_seed, sim_workers, sim_out,
                          sim_cfg);
    if (*con) return cmd_conduct(con_data, con_cfg, con_final, con_chain, con_seed);
    if (*sen)
      return cmd_sensitivity(sen_scenario, sen_cfg, sen_design, sen_axis, sen_grid, sen_reps,
                             sen_seed, sen_workers, sen_out);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const CalibrationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCalibration;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitParse;
}

}  // namespace crtsim
