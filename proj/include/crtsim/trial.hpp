#pragma once
// Single-trial state machine: calendar-based cohort accrual, equal then
// adaptive randomization, interim admissibility monitoring with per-subgroup
// early termination, final analysis on complete follow-up, and a full audit
// trail of every interim decision.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "crtsim/generators.hpp"
#include "crtsim/separate.hpp"
#include "crtsim/types.hpp"

namespace crtsim {

struct LatentPatient {
  int w = 0;
  int d = 0;
  double enroll_time = 0.0;
  LatentEvent event;  // latent truth, never visible to the design
};

struct SubgroupInterim {
  bool open = true;        // enrollment status entering the analysis
  bool closed_now = false; // admissible set came back empty at this analysis
  std::vector<int> admissible;
  std::array<double, 2> utility{};    // posterior mean utility, candidate order
  std::array<double, 2> rand_prob{};  // randomization probabilities, candidate order
  std::array<std::array<double, 2>, 2> exceed{};  // [candidate][cause]
};

struct InterimRecord {
  int cohort_index = 0;
  double calendar_time = 0.0;
  bool is_final = false;
  std::array<SubgroupInterim, 2> sub;
};

struct TrialResult {
  std::array<int, 2> selection{-1, -1};  // per subgroup; -1 = none
  std::array<bool, 2> early_stop{false, false};
  int n_enrolled = 0;
  std::array<double, kNumArms> n_treated{};
  std::array<std::array<double, 2>, kNumArms> events{};  // [arm][cause]
  std::vector<InterimRecord> history;
  std::uint64_t seed = 0;

  std::string to_json() const;
};

struct TrialOptions {
  DesignKind design = DesignKind::Ar;
  SeparateConvention separate_convention = kDefaultSeparateConvention;
  bool separate_renormalize = kDefaultSeparateRenormalize;
};

struct TrialState {
  std::uint64_t seed = 0;
  Rng rng;
  std::vector<LatentPatient> patients;
  std::array<bool, 2> open{true, true};
  std::array<bool, 2> early_stop{false, false};
  int cohort_index = 0;
  int analysis_count = 0;
  std::vector<InterimRecord> history;

  explicit TrialState(std::uint64_t s) : seed(s), rng(derive_seed(s, 0)) {}
};

// Records observable at calendar time t_now: events before each patient's
// horizon min(elapsed, nu) are seen, everyone else is censored there.
// Patients with zero elapsed follow-up are excluded.
ObservedData observable_data(const std::vector<LatentPatient>& patients, double t_now,
                             double nu);

// One cohort: run the interim analysis if past the equal-randomization phase,
// then draw cohort_size patients from the stream, skipping closed subgroups.
void enroll_cohort(TrialState& state, const ScenarioSpec& scenario,
                   const DesignConfig& cfg, const TrialOptions& opts);

// Completes follow-up, runs the final analysis and fills the result.
TrialResult finalize_trial(TrialState& state, const ScenarioSpec& scenario,
                           const DesignConfig& cfg, const TrialOptions& opts);

TrialResult run_trial(const ScenarioSpec& scenario, const DesignConfig& cfg,
                      const TrialOptions& opts, std::uint64_t seed);
TrialResult run_trial(const ScenarioSpec& scenario, const DesignConfig& cfg,
                      DesignKind design, std::uint64_t seed);

// Posterior decision quantities at one analysis under the given design.
DecisionStats analyze_data(const ObservedData& data, const DesignConfig& cfg,
                           const TrialOptions& opts, std::uint64_t trial_seed,
                           int analysis_index);

}  // namespace crtsim
