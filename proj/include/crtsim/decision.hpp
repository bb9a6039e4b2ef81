#pragma once
// Everything the design decides on: five-outcome event probabilities, true
// and posterior-mean utilities, cumulative incidence, admissible sets,
// adaptive randomization probabilities, and final dose selection.
//
// Integrals run on the shared split Gauss-Legendre grid. The per-draw
// posterior summaries stream through the batched kernels; the single-draw
// functions below are the plain reference path.

#include <array>
#include <optional>
#include <vector>

#include "crtsim/mcmc.hpp"
#include "crtsim/types.hpp"

namespace crtsim {

// P(E1..E5): cause-specific events in (0, nu/2], in (nu/2, nu], and the
// event-free outcome. Sums to 1 up to quadrature error.
std::array<double, 5> event_probabilities(int w, int d, const ModelParams& theta,
                                          double nu);

// U(d | w, theta) = sum_s P(E_s) O_s, in [0, 100] for weights in [0, 100].
double true_utility(int w, int d, const ModelParams& theta,
                    const UtilityWeights& weights, double nu);

// P_k(d | w, theta): probability cause k occurs first within [0, nu].
// Identical quadrature as event_probabilities; equals P(E_k) + P(E_{k+2}).
double cumulative_incidence(int k, int w, int d, const ModelParams& theta, double nu);

// Monte-Carlo posterior mean of true_utility over the draws. Rejects empty draws.
double posterior_mean_utility(int w, int d, const PosteriorDraws& draws,
                              const UtilityWeights& weights, double nu);

// Per-draw utilities of one arm (for standard-error reporting).
std::vector<double> utility_series(int w, int d, const PosteriorDraws& draws,
                                   const UtilityWeights& weights, double nu);

// One pass over the posterior draws producing every decision quantity for all
// four arms: posterior mean/SD of utility, the per-cause exceedance fractions
// Pr(P_k > tau_k | M), and the per-subgroup utility comparison fractions.
struct ArmPosterior {
  double mean_utility = 0.0;
  double sd_utility = 0.0;
  std::array<double, 2> exceed_frac{0.0, 0.0};
};

struct DecisionStats {
  std::array<ArmPosterior, kNumArms> arm;
  // Pr(U(high) > U(standard)) for RE; Pr(U(low) > U(standard)) for SE.
  std::array<double, 2> compare_frac{0.0, 0.0};
  std::size_t n_draws = 0;
};

DecisionStats decision_stats(const PosteriorDraws& draws, const UtilityWeights& weights,
                             const std::array<double, 2>& tau, double nu);

// Doses d of subgroup w whose exceedance fractions stay below the cut-offs
// for both causes. May be empty. Candidate order follows candidate_doses(w).
std::vector<int> admissible_set(int w, const DecisionStats& stats, const DesignConfig& cfg);
std::vector<int> admissible_set(int w, const PosteriorDraws& draws, const DesignConfig& cfg);

// Posterior-mean-utility-proportional probabilities over the admissible set;
// a singleton gets probability 1. Rejects an empty admissible set.
std::vector<std::pair<int, double>> randomization_probabilities(
    int w, const std::vector<int>& admissible, const DecisionStats& stats,
    const DesignConfig& cfg);
std::vector<std::pair<int, double>> randomization_probabilities(
    int w, const std::vector<int>& admissible, const PosteriorDraws& draws,
    const DesignConfig& cfg);

// Final rule: empty set -> nothing; singleton -> that dose; otherwise compare
// utilities draw by draw against the mu cut-off, ties breaking toward the
// standard dose.
std::optional<int> final_selection(int w, const std::vector<int>& admissible,
                                   const DecisionStats& stats, const DesignConfig& cfg);
std::optional<int> final_selection(int w, const std::vector<int>& admissible,
                                   const PosteriorDraws& draws, const DesignConfig& cfg);

}  // namespace crtsim
