#pragma once
// Domain types shared by the model, sampler, decision engine and trial engine.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace crtsim {

// Subgroups: w = 0 radiation-resistant (RE), w = 1 radiation-sensitive (SE).
// Doses: d = 0 low, d = 1 standard, d = 2 high.
// RE patients choose between {standard, high}; SE between {low, standard}.
inline constexpr int kSubgroupRe = 0;
inline constexpr int kSubgroupSe = 1;
inline constexpr int kDoseLow = 0;
inline constexpr int kDoseStandard = 1;
inline constexpr int kDoseHigh = 2;

inline bool dose_allowed(int w, int d) {
  if (w == kSubgroupRe) return d == kDoseStandard || d == kDoseHigh;
  if (w == kSubgroupSe) return d == kDoseLow || d == kDoseStandard;
  return false;
}

// Candidate dose pair for a subgroup, in fixed (reference-ish, escalated) order.
inline std::array<int, 2> candidate_doses(int w) {
  if (w == kSubgroupRe) return {kDoseStandard, kDoseHigh};
  if (w == kSubgroupSe) return {kDoseLow, kDoseStandard};
  throw std::invalid_argument("subgroup must be 0 (RE) or 1 (SE)");
}

// The four treatment arms, indexed consistently everywhere (files, kernels,
// operating characteristics): RE/standard, RE/high, SE/low, SE/standard.
enum class Arm : int { ReStandard = 0, ReHigh = 1, SeLow = 2, SeStandard = 3 };
inline constexpr int kNumArms = 4;

inline int arm_index(int w, int d) {
  if (w == kSubgroupRe && d == kDoseStandard) return 0;
  if (w == kSubgroupRe && d == kDoseHigh) return 1;
  if (w == kSubgroupSe && d == kDoseLow) return 2;
  if (w == kSubgroupSe && d == kDoseStandard) return 3;
  throw std::invalid_argument("invalid (subgroup, dose) pair");
}

inline int arm_subgroup(int arm) { return arm < 2 ? kSubgroupRe : kSubgroupSe; }
inline int arm_dose(int arm) {
  static constexpr int d[kNumArms] = {kDoseStandard, kDoseHigh, kDoseLow, kDoseStandard};
  return d[arm];
}
inline std::string arm_name(int arm) {
  static const char* names[kNumArms] = {"re_standard", "re_high", "se_low", "se_standard"};
  return names[arm];
}

// One subject as the design sees it: subgroup, dose, observation time and the
// first-event indicators. delta1 flags disease progression (cause 1), delta2
// flags normal tissue complications (cause 2); both zero means censored.
struct PatientRecord {
  int w = 0;
  int d = 0;
  double x = 0.0;
  int delta1 = 0;
  int delta2 = 0;
  double enroll_time = 0.0;
};

// Throws std::invalid_argument naming the offending field.
void validate_record(const PatientRecord& rec);

// Weibull shapes/rates plus log hazard-ratio coefficients for both causes.
// gamma[k] = {gamma_k1 (SE standard), gamma_k2 (RE standard), gamma_k3 (RE high)},
// with the low dose as the reference level.
struct ModelParams {
  std::array<double, 2> alpha{1.0, 1.0};
  std::array<double, 2> beta{1.0, 1.0};
  std::array<std::array<double, 3>, 2> gamma{{{0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}};

  bool in_support() const {
    return alpha[0] > 0.0 && alpha[1] > 0.0 && beta[0] > 0.0 && beta[1] > 0.0;
  }
};

// The ten sampled coordinates in their fixed sweep/report order.
inline constexpr int kNumCoords = 10;
inline const char* coord_name(int j) {
  static const char* names[kNumCoords] = {
      "alpha1", "alpha2", "beta1", "beta2",
      "gamma11", "gamma12", "gamma13", "gamma21", "gamma22", "gamma23"};
  return names[j];
}
inline double get_coord(const ModelParams& p, int j) {
  switch (j) {
    case 0: return p.alpha[0];
    case 1: return p.alpha[1];
    case 2: return p.beta[0];
    case 3: return p.beta[1];
    default: return p.gamma[(j - 4) / 3][(j - 4) % 3];
  }
}
inline void set_coord(ModelParams& p, int j, double v) {
  switch (j) {
    case 0: p.alpha[0] = v; return;
    case 1: p.alpha[1] = v; return;
    case 2: p.beta[0] = v; return;
    case 3: p.beta[1] = v; return;
    default: p.gamma[(j - 4) / 3][(j - 4) % 3] = v; return;
  }
}

// Gamma(a, b) prior (shape/scale: mean a*b, variance a*b^2) on the Weibull
// shapes and rates; Normal(0, c^2) on the log hazard-ratio coefficients.
// The shape/scale convention is asserted by tests; do not switch to rate.
struct PriorConfig {
  double a = 1.0;
  double b = 1.0;
  double c = 10.0;

  void validate() const {
    if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0))
      throw std::invalid_argument("prior hyperparameters must be positive");
  }
};

// Desirability weights for the five outcomes: O1 DP early, O2 NC early,
// O3 DP late, O4 NC late, O5 event-free through the whole follow-up.
struct UtilityWeights {
  std::array<double, 5> o{0.0, 5.0, 10.0, 20.0, 100.0};

  void validate() const {
    for (double v : o)
      if (!(v >= 0.0) || !(v <= 100.0))
        throw std::invalid_argument("desirability weights must lie in [0, 100]");
    for (int s = 0; s < 4; ++s)
      if (o[4] < o[s])
        throw std::invalid_argument("event-free weight must dominate the event weights");
  }
};

struct McmcConfig {
  int n_iter = 4000;
  int n_burn = 2000;
  int thin = 1;
  ModelParams init;
  std::uint64_t seed = 1;
  double target_accept = 0.3;
  int adapt_window = 50;

  void validate() const {
    if (n_iter <= 0 || n_burn < 0 || n_burn >= n_iter)
      throw std::invalid_argument("require 0 <= n_burn < n_iter");
    if (thin < 1) throw std::invalid_argument("thin must be >= 1");
    if (!(target_accept > 0.0) || !(target_accept < 1.0))
      throw std::invalid_argument("target_accept must lie in (0,1)");
    if (adapt_window < 1) throw std::invalid_argument("adapt_window must be >= 1");
    if (!init.in_support())
      throw std::invalid_argument("init must have positive alpha and beta");
  }
};

// All design constants. Defaults are the reference configuration: 5-patient
// cohorts, 4 equal-randomization cohorts out of 20, tau = 0.4, q = 0.95,
// mu0 = mu1 = 0.5, follow-up normalized to 1.
struct DesignConfig {
  double nu = 1.0;
  int n1 = 4;
  int cohort_size = 5;
  int n_cohorts_total = 20;
  std::array<double, 2> tau{0.4, 0.4};
  std::array<double, 2> q{0.95, 0.95};
  double mu0 = 0.5;  // RE final-selection cut-off
  double mu1 = 0.5;  // SE final-selection cut-off
  double cohort_interval = 0.25;  // calendar spacing between cohorts
  UtilityWeights weights;
  PriorConfig prior;
  McmcConfig mcmc;

  void validate() const {
    if (!(nu > 0.0)) throw std::invalid_argument("nu must be positive");
    if (n1 < 1 || cohort_size < 1 || n_cohorts_total < 1)
      throw std::invalid_argument("cohort counts must be positive");
    if (n1 > n_cohorts_total)
      throw std::invalid_argument("n1 must not exceed n_cohorts_total");
    for (int k = 0; k < 2; ++k) {
      if (!(tau[k] > 0.0) || !(tau[k] < 1.0)) throw std::invalid_argument("tau must lie in (0,1)");
      if (!(q[k] > 0.0) || !(q[k] < 1.0)) throw std::invalid_argument("q must lie in (0,1)");
    }
    if (!(mu0 > 0.0) || !(mu0 < 1.0) || !(mu1 > 0.0) || !(mu1 < 1.0))
      throw std::invalid_argument("mu cut-offs must lie in (0,1)");
    if (!(cohort_interval > 0.0))
      throw std::invalid_argument("cohort_interval must be positive");
    weights.validate();
    prior.validate();
    mcmc.validate();
  }
};

enum class DesignKind { Ar, Separate, Er };

inline std::string design_name(DesignKind k) {
  switch (k) {
    case DesignKind::Ar: return "ar";
    case DesignKind::Separate: return "separate";
    case DesignKind::Er: return "er";
  }
  return "?";
}

}  // namespace crtsim
