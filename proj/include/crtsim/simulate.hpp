#pragma once
// Replicate farm and operating-characteristic aggregation. Replicates are
// independent trials with seeds derived from (master_seed, replicate index),
// so results are invariant to worker count and completion order; aggregation
// always reduces in replicate order.

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "crtsim/trial.hpp"

namespace crtsim {

struct OperatingCharacteristics {
  std::string design;
  std::string scenario;
  int n_reps = 0;
  std::uint64_t master_seed = 0;
  std::array<double, kNumArms> sel_pct{};        // per-arm selection %
  std::array<double, 2> none_pct{};              // per-subgroup no-selection %
  std::array<double, 2> early_stop_pct{};        // per-subgroup early-stop %
  std::array<double, kNumArms> mean_treated{};
  std::array<double, kNumArms> mean_dp{};
  std::array<double, kNumArms> mean_nc{};
  int n_failed = 0;  // replicates that raised; excluded from the averages
};

struct SimOptions {
  DesignKind design = DesignKind::Ar;
  int n_reps = 100;
  std::uint64_t master_seed = 1;
  int workers = 0;  // 0 = hardware concurrency
  TrialOptions trial;
  std::function<void(int done, int total)> progress;  // optional, called coarsely
};

std::uint64_t replicate_seed(std::uint64_t master_seed, int replicate);

OperatingCharacteristics run_replicates(const ScenarioSpec& scenario,
                                        const DesignConfig& cfg, const SimOptions& opts);

// Sensitivity sweep axes. Grid values: total sample size for SampleSize
// (multiples of cohort_size), the RE proportion for ReProportion, 0/1 for
// GeneratorFamily (Weibull / log-logistic, recalibrated), and the 1-based
// preset row for Weights.
enum class SweepAxis { SampleSize, ReProportion, GeneratorFamily, Weights };

bool parse_axis(const std::string& s, SweepAxis& out);
std::string axis_name(SweepAxis axis);

// The nine desirability-weight presets used by the sensitivity study.
extern const std::array<std::array<double, 5>, 9> kWeightPresets;

struct SweepPoint {
  double value = 0.0;
  std::string label;
  OperatingCharacteristics oc;
};

std::vector<SweepPoint> sensitivity_sweep(const ScenarioSpec& scenario,
                                          const DesignConfig& cfg, SweepAxis axis,
                                          const std::vector<double>& grid,
                                          const SimOptions& opts);

}  // namespace crtsim
