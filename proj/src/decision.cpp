#include "crtsim/decision.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "crtsim/hazard_model.hpp"
#include "crtsim/kernels.hpp"
#include "crtsim/quadrature.hpp"

namespace crtsim {

std::array<double, 5> event_probabilities(int w, int d, const ModelParams& theta,
                                          double nu) {
  if (!theta.in_support()) throw std::invalid_argument("theta outside support");
  const QuadGrid& grid = default_grid(nu);
  const double r1 = theta.beta[0] * std::exp(log_hazard_ratio(1, w, d, theta));
  const double r2 = theta.beta[1] * std::exp(log_hazard_ratio(2, w, d, theta));
  const double a1 = theta.alpha[0], a2 = theta.alpha[1];
  std::array<double, 5> e{0.0, 0.0, 0.0, 0.0, 0.0};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid.x[j];
    const double p1 = std::exp(a1 * grid.logx[j]);
    const double p2 = std::exp(a2 * grid.logx[j]);
    const double surv = std::exp(-(r1 * p1 + r2 * p2));
    const double ws = grid.wgt[j] * surv / x;
    const int late = j < static_cast<std::size_t>(grid.n_half) ? 0 : 2;
    e[late + 0] += ws * a1 * r1 * p1;
    e[late + 1] += ws * a2 * r2 * p2;
  }
  e[4] = std::exp(-(r1 * std::pow(nu, a1) + r2 * std::pow(nu, a2)));
  return e;
}

double true_utility(int w, int d, const ModelParams& theta,
                    const UtilityWeights& weights, double nu) {
  const auto e = event_probabilities(w, d, theta, nu);
  double u = 0.0;
  for (int s = 0; s < 5; ++s) u += weights.o[s] * e[s];
  return u;
}

double cumulative_incidence(int k, int w, int d, const ModelParams& theta, double nu) {
  if (k != 1 && k != 2) throw std::invalid_argument("cause must be 1 or 2");
  const auto e = event_probabilities(w, d, theta, nu);
  return e[k - 1] + e[k + 1];
}

namespace {

// Streams the posterior draws through the batched kernel in blocks and
// accumulates all decision quantities in one pass.
DecisionStats accumulate_stats(const PosteriorDraws& draws, const UtilityWeights& weights,
                               const std::array<double, 2>& tau, double nu,
                               std::vector<double>* series, int series_arm) {
  if (draws.draws.empty()) throw std::invalid_argument("posterior draws must be non-empty");
  weights.validate();
  const QuadGrid& grid = default_grid(nu);
  const std::size_t n = draws.draws.size();
  constexpr std::size_t kBlock = 512;
  std::vector<double> buf(kBlock * kNumArms * 5);

  std::array<double, kNumArms> sum_u{}, sum_u2{};
  std::array<std::array<double, 2>, kNumArms> exceed{{}};
  std::array<double, 2> compare{};

  for (std::size_t base = 0; base < n; base += kBlock) {
    const std::size_t count = std::min(kBlock, n - base);
    kernels::arm_event_probs(draws.draws.data() + base, count, grid, buf.data());
    for (std::size_t t = 0; t < count; ++t) {
      std::array<double, kNumArms> u;
      for (int arm = 0; arm < kNumArms; ++arm) {
        const double* e = buf.data() + (t * kNumArms + arm) * 5;
        double uu = 0.0;
        for (int s = 0; s < 5; ++s) uu += weights.o[s] * e[s];
        u[arm] = uu;
        sum_u[arm] += uu;
        sum_u2[arm] += uu * uu;
        const double cir1 = e[0] + e[2];
        const double cir2 = e[1] + e[3];
        exceed[arm][0] += cir1 > tau[0];
        exceed[arm][1] += cir2 > tau[1];
        if (series && arm == series_arm) series->push_back(uu);
      }
      compare[kSubgroupRe] += u[1] > u[0];  // high vs standard
      compare[kSubgroupSe] += u[2] > u[3];  // low vs standard
    }
  }

  DecisionStats st;
  st.n_draws = n;
  const double dn = static_cast<double>(n);
  for (int arm = 0; arm < kNumArms; ++arm) {
    const double mean = sum_u[arm] / dn;
    const double var = std::max(0.0, sum_u2[arm] / dn - mean * mean);
    st.arm[arm] = {mean, std::sqrt(var), {exceed[arm][0] / dn, exceed[arm][1] / dn}};
  }
  st.compare_frac = {compare[0] / dn, compare[1] / dn};
  return st;
}

}  // namespace

DecisionStats decision_stats(const PosteriorDraws& draws, const UtilityWeights& weights,
                             const std::array<double, 2>& tau, double nu) {
  return accumulate_stats(draws, weights, tau, nu, nullptr, -1);
}

double posterior_mean_utility(int w, int d, const PosteriorDraws& draws,
                              const UtilityWeights& weights, double nu) {
  const auto st = decision_stats(draws, weights, {0.5, 0.5}, nu);
  return st.arm[arm_index(w, d)].mean_utility;
}

std::vector<double> utility_series(int w, int d, const PosteriorDraws& draws,
                                   const UtilityWeights& weights, double nu) {
  std::vector<double> series;
  series.reserve(draws.draws.size());
  accumulate_stats(draws, weights, {0.5, 0.5}, nu, &series, arm_index(w, d));
  return series;
}

std::vector<int> admissible_set(int w, const DecisionStats& stats, const DesignConfig& cfg) {
  std::vector<int> adm;
  for (int d : candidate_doses(w)) {
    const auto& arm = stats.arm[arm_index(w, d)];
    if (arm.exceed_frac[0] < cfg.q[0] && arm.exceed_frac[1] < cfg.q[1]) adm.push_back(d);
  }
  return adm;
}

std::vector<int> admissible_set(int w, const PosteriorDraws& draws, const DesignConfig& cfg) {
  return admissible_set(w, decision_stats(draws, cfg.weights, cfg.tau, cfg.nu), cfg);
}

std::vector<std::pair<int, double>> randomization_probabilities(
    int w, const std::vector<int>& admissible, const DecisionStats& stats,
    const DesignConfig& cfg) {
  (void)cfg;
  if (admissible.empty())
    throw std::invalid_argument("randomization requires a non-empty admissible set");
  if (admissible.size() == 1) return {{admissible[0], 1.0}};
  const double u0 = stats.arm[arm_index(w, admissible[0])].mean_utility;
  const double u1 = stats.arm[arm_index(w, admissible[1])].mean_utility;
  const double total = u0 + u1;
  if (!(total > 0.0)) return {{admissible[0], 0.5}, {admissible[1], 0.5}};
  return {{admissible[0], u0 / total}, {admissible[1], u1 / total}};
}

std::vector<std::pair<int, double>> randomization_probabilities(
    int w, const std::vector<int>& admissible, const PosteriorDraws& draws,
    const DesignConfig& cfg) {
  return randomization_probabilities(
      w, admissible, decision_stats(draws, cfg.weights, cfg.tau, cfg.nu), cfg);
}

std::optional<int> final_selection(int w, const std::vector<int>& admissible,
                                   const DecisionStats& stats, const DesignConfig& cfg) {
  if (admissible.empty()) return std::nullopt;
  if (admissible.size() == 1) return admissible[0];
  const double frac = stats.compare_frac[w];
  if (w == kSubgroupRe) return frac > cfg.mu0 ? kDoseHigh : kDoseStandard;
  return frac > cfg.mu1 ? kDoseLow : kDoseStandard;
}

std::optional<int> final_selection(int w, const std::vector<int>& admissible,
                                   const PosteriorDraws& draws, const DesignConfig& cfg) {
  return final_selection(w, admissible, decision_stats(draws, cfg.weights, cfg.tau, cfg.nu),
                         cfg);
}

}  // namespace crtsim
