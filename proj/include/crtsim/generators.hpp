#pragma once
// Data-generating distributions for virtual patients: independent latent
// cause-specific event times with Weibull or log-logistic marginals. The
// observed outcome is the earlier latent time; independence with matching
// marginals reproduces the intended cause-specific hazards exactly.

#include <array>
#include <limits>
#include <string>

#include "crtsim/rng.hpp"
#include "crtsim/types.hpp"

namespace crtsim {

enum class Family { Weibull, LogLogistic };

std::string family_name(Family f);
bool parse_family(const std::string& s, Family& out);

// One latent marginal. For Weibull: S(t) = exp(-rate * t^shape). For
// log-logistic: S(t) = 1 / (1 + rate * t^shape). rate == 0 means no events.
struct CauseGen {
  double shape = 1.0;
  double rate = 0.0;
};

struct ArmGenerator {
  Family family = Family::Weibull;
  std::array<CauseGen, 2> cause;

  double survival(int k, double t) const;    // latent marginal S_k(t)
  double hazard(int k, double t) const;      // latent marginal hazard, t > 0
  double inv_cdf(int k, double u) const;     // quantile of the latent marginal
};

// Quadrature event quantities of a generator on the engine grid.
std::array<double, 5> generator_event_probs(const ArmGenerator& gen, double nu);
std::array<double, 2> generator_cir(const ArmGenerator& gen, double t_upper, double nu);
double generator_true_utility(const ArmGenerator& gen, const UtilityWeights& weights,
                              double nu);

// First latent event: cause 1 or 2, or cause 0 with t = +inf when neither
// latent distribution produces an event. Consumes exactly two uniforms.
struct LatentEvent {
  double t = std::numeric_limits<double>::infinity();
  int cause = 0;
};

LatentEvent draw_event(const ArmGenerator& gen, Rng& rng);

// The design-visible view of a latent outcome at follow-up horizon fu.
PatientRecord observe(const LatentEvent& ev, int w, int d, double fu, double enroll_time);

// Per-arm target cumulative incidence rates (disease progression, normal
// tissue complications) plus the calibrated generators.
struct ArmTargets {
  std::array<double, 2> cir{0.0, 0.0};
};

struct ScenarioSpec {
  std::string name = "scenario";
  Family family = Family::Weibull;
  double nu = 1.0;
  double half_fraction = 0.5;  // fraction of within-follow-up events in (0, nu/2]
  double p_re = 0.5;           // probability an arriving patient is RE
  std::array<ArmTargets, kNumArms> targets;
  std::array<ArmGenerator, kNumArms> arms;
  std::array<double, kNumArms> residual{0.0, 0.0, 0.0, 0.0};
  bool calibrated = false;

  void validate_targets() const;
};

}  // namespace crtsim
