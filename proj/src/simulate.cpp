#include "crtsim/simulate.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "crtsim/calibrate.hpp"

namespace crtsim {

std::uint64_t replicate_seed(std::uint64_t master_seed, int replicate) {
  return derive_seed(master_seed, 10'000'000ULL + static_cast<std::uint64_t>(replicate));
}

OperatingCharacteristics run_replicates(const ScenarioSpec& scenario,
                                        const DesignConfig& cfg, const SimOptions& opts) {
  if (opts.n_reps < 1) throw std::invalid_argument("n_reps must be positive");
  if (!scenario.calibrated)
    throw std::invalid_argument("scenario must be calibrated before simulation");
  cfg.validate();

  TrialOptions topts = opts.trial;
  topts.design = opts.design;

  struct Slot {
    TrialResult result;
    bool ok = false;
  };
  std::vector<Slot> slots(opts.n_reps);

  int workers = opts.workers > 0 ? opts.workers
                                 : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, opts.n_reps));

  std::atomic<int> next{0};
  std::atomic<int> done{0};
  auto work = [&]() {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= opts.n_reps) break;
      try {
        slots[r].result = run_trial(scenario, cfg, topts, replicate_seed(opts.master_seed, r));
        slots[r].ok = true;
      } catch (...) {
        slots[r].ok = false;
      }
      const int d = done.fetch_add(1) + 1;
      if (opts.progress && (d % 25 == 0 || d == opts.n_reps)) opts.progress(d, opts.n_reps);
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  OperatingCharacteristics oc;
  oc.design = design_name(opts.design);
  oc.scenario = scenario.name;
  oc.n_reps = opts.n_reps;
  oc.master_seed = opts.master_seed;

  int n_ok = 0;
  std::array<double, kNumArms> sel_count{};
  std::array<double, 2> none_count{}, stop_count{};
  for (int r = 0; r < opts.n_reps; ++r) {  // fixed reduction order
    if (!slots[r].ok) {
      ++oc.n_failed;
      continue;
    }
    ++n_ok;
    const TrialResult& tr = slots[r].result;
    for (int w = 0; w < 2; ++w) {
      if (tr.selection[w] >= 0)
        sel_count[arm_index(w, tr.selection[w])] += 1.0;
      else
        none_count[w] += 1.0;
      stop_count[w] += tr.early_stop[w];
    }
    for (int arm = 0; arm < kNumArms; ++arm) {
      oc.mean_treated[arm] += tr.n_treated[arm];
      oc.mean_dp[arm] += tr.events[arm][0];
      oc.mean_nc[arm] += tr.events[arm][1];
    }
  }
  if (n_ok == 0) throw std::runtime_error("all replicates failed");
  const double dn = static_cast<double>(n_ok);
  for (int arm = 0; arm < kNumArms; ++arm) {
    oc.sel_pct[arm] = 100.0 * sel_count[arm] / dn;
    oc.mean_treated[arm] /= dn;
    oc.mean_dp[arm] /= dn;
    oc.mean_nc[arm] /= dn;
  }
  for (int w = 0; w < 2; ++w) {
    oc.none_pct[w] = 100.0 * none_count[w] / dn;
    oc.early_stop_pct[w] = 100.0 * stop_count[w] / dn;
  }
  return oc;
}

const std::array<std::array<double, 5>, 9> kWeightPresets = {{
    {0, 5, 5, 10, 100},
    {0, 5, 20, 30, 100},
    {0, 5, 10, 20, 100},
    {0, 0, 5, 5, 100},
    {0, 0, 20, 20, 100},
    {0, 0, 10, 10, 100},
    {5, 0, 10, 5, 100},
    {5, 0, 30, 20, 100},
    {5, 0, 20, 10, 100},
}};

bool parse_axis(const std::string& s, SweepAxis& out) {
  if (s == "sample_size") {
    out = SweepAxis::SampleSize;
    return true;
  }
  if (s == "re_proportion") {
    out = SweepAxis::ReProportion;
    return true;
  }
  if (s == "generator_family") {
    out = SweepAxis::GeneratorFamily;
    return true;
  }
  if (s == "weights") {
    out = SweepAxis::Weights;
    return true;
  }
  return false;
}

std::string axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::SampleSize: return "sample_size";
    case SweepAxis::ReProportion: return "re_proportion";
    case SweepAxis::GeneratorFamily: return "generator_family";
    case SweepAxis::Weights: return "weights";
  }
  return "?";
}

std::vector<SweepPoint> sensitivity_sweep(const ScenarioSpec& scenario,
                                          const DesignConfig& cfg, SweepAxis axis,
                                          const std::vector<double>& grid,
                                          const SimOptions& opts) {
  if (grid.empty()) throw std::invalid_argument("sweep grid must be non-empty");
  std::vector<SweepPoint> out;
  out.reserve(grid.size());
  for (double v : grid) {
    ScenarioSpec sc = scenario;
    DesignConfig dc = cfg;
    SweepPoint pt;
    pt.value = v;
    switch (axis) {
      case SweepAxis::SampleSize: {
        const double n = v;
        const int cohorts = static_cast<int>(std::lround(n / cfg.cohort_size));
        if (cohorts < cfg.n1 || std::abs(cohorts * cfg.cohort_size - n) > 1e-9)
          throw std::invalid_argument("sample size must be a multiple of cohort_size and "
                                      "cover the equal-randomization phase");
        dc.n_cohorts_total = cohorts;
        pt.label = std::to_string(static_cast<int>(n));
        break;
      }
      case SweepAxis::ReProportion: {
        if (!(v >= 0.0) || !(v <= 1.0))
          throw std::invalid_argument("re_proportion grid values must lie in [0,1]");
        sc.p_re = v;
        pt.label = std::to_string(v);
        break;
      }
      case SweepAxis::GeneratorFamily: {
        if (v != 0.0 && v != 1.0)
          throw std::invalid_argument("generator_family grid values must be 0 or 1");
        sc.family = v == 0.0 ? Family::Weibull : Family::LogLogistic;
        calibrate_scenario(sc);  // recalibrate under the new family
        pt.label = family_name(sc.family);
        break;
      }
      case SweepAxis::Weights: {
        const int row = static_cast<int>(v);
        if (row < 1 || row > static_cast<int>(kWeightPresets.size()) || row != v)
          throw std::invalid_argument("weights grid values must be preset rows 1..9");
        dc.weights.o = kWeightPresets[row - 1];
        pt.label = "weights" + std::to_string(row);
        break;
      }
    }
    pt.oc = run_replicates(sc, dc, opts);
    out.push_back(std::move(pt));
  }
  return out;
}

}  // namespace crtsim
