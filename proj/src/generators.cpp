#include "crtsim/generators.hpp"

#include <cmath>
#include <stdexcept>

#include "crtsim/quadrature.hpp"

namespace crtsim {

std::string family_name(Family f) {
  return f == Family::Weibull ? "weibull" : "loglogistic";
}

bool parse_family(const std::string& s, Family& out) {
  if (s == "weibull") {
    out = Family::Weibull;
    return true;
  }
  if (s == "loglogistic" || s == "log-logistic") {
    out = Family::LogLogistic;
    return true;
  }
  return false;
}

double ArmGenerator::survival(int k, double t) const {
  const CauseGen& g = cause[k - 1];
  if (g.rate == 0.0) return 1.0;
  const double z = g.rate * std::pow(t, g.shape);
  return family == Family::Weibull ? std::exp(-z) : 1.0 / (1.0 + z);
}

double ArmGenerator::hazard(int k, double t) const {
  if (!(t > 0.0)) throw std::invalid_argument("hazard requires t > 0");
  const CauseGen& g = cause[k - 1];
  if (g.rate == 0.0) return 0.0;
  const double z = g.rate * std::pow(t, g.shape);
  const double base = g.shape * z / t;  // shape * rate * t^(shape-1)
  return family == Family::Weibull ? base : base / (1.0 + z);
}

double ArmGenerator::inv_cdf(int k, double u) const {
  const CauseGen& g = cause[k - 1];
  if (g.rate == 0.0) return std::numeric_limits<double>::infinity();
  if (!(u >= 0.0) || !(u < 1.0)) throw std::invalid_argument("u must lie in [0,1)");
  double z;  // solves F(t) = u with z = rate * t^shape
  if (family == Family::Weibull) {
    z = -std::log1p(-u);
  } else {
    z = u / (1.0 - u);
  }
  return std::pow(z / g.rate, 1.0 / g.shape);
}

std::array<double, 5> generator_event_probs(const ArmGenerator& gen, double nu) {
  const QuadGrid& grid = default_grid(nu);
  std::array<double, 5> e{0.0, 0.0, 0.0, 0.0, 0.0};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double x = grid.x[j];
    const double s = gen.survival(1, x) * gen.survival(2, x);
    const int late = j < static_cast<std::size_t>(grid.n_half) ? 0 : 2;
    e[late + 0] += grid.wgt[j] * s * gen.hazard(1, x);
    e[late + 1] += grid.wgt[j] * s * gen.hazard(2, x);
  }
  e[4] = gen.survival(1, nu) * gen.survival(2, nu);
  return e;
}

std::array<double, 2> generator_cir(const ArmGenerator& gen, double t_upper, double nu) {
  const QuadGrid& grid = default_grid(nu);
  // t_upper must be nu/2 or nu: the calibration constraints live on the grid's
  // half boundary.
  const bool half_only = t_upper < 0.75 * nu;
  std::array<double, 2> cir{0.0, 0.0};
  const std::size_t stop = half_only ? static_cast<std::size_t>(grid.n_half) : grid.size();
  for (std::size_t j = 0; j < stop; ++j) {
    const double x = grid.x[j];
    const double s = gen.survival(1, x) * gen.survival(2, x);
    cir[0] += grid.wgt[j] * s * gen.hazard(1, x);
    cir[1] += grid.wgt[j] * s * gen.hazard(2, x);
  }
  return cir;
}

double generator_true_utility(const ArmGenerator& gen, const UtilityWeights& weights,
                              double nu) {
  const auto e = generator_event_probs(gen, nu);
  double u = 0.0;
  for (int s = 0; s < 5; ++s) u += weights.o[s] * e[s];
  return u;
}

LatentEvent draw_event(const ArmGenerator& gen, Rng& rng) {
  // Both uniforms are always consumed so the stream layout is stable.
  const double u1 = rng.uniform();
  const double u2 = rng.uniform();
  const double y1 = gen.inv_cdf(1, u1);
  const double y2 = gen.inv_cdf(2, u2);
  LatentEvent ev;
  if (y1 <= y2 && std::isfinite(y1)) {
    ev.t = y1;
    ev.cause = 1;
  } else if (std::isfinite(y2)) {
    ev.t = y2;
    ev.cause = 2;
  }
  return ev;
}

PatientRecord observe(const LatentEvent& ev, int w, int d, double fu, double enroll_time) {
  if (!(fu > 0.0)) throw std::invalid_argument("follow-up horizon must be positive");
  PatientRecord rec;
  rec.w = w;
  rec.d = d;
  rec.enroll_time = enroll_time;
  if (ev.cause != 0 && ev.t <= fu) {
    rec.x = std::max(ev.t, 1e-300);  // guard against underflowed latent times
    rec.delta1 = ev.cause == 1;
    rec.delta2 = ev.cause == 2;
  } else {
    rec.x = fu;
  }
  return rec;
}

void ScenarioSpec::validate_targets() const {
  if (!(nu > 0.0)) throw std::invalid_argument("scenario nu must be positive");
  if (!(half_fraction > 0.0) || !(half_fraction < 1.0))
    throw std::invalid_argument("half_fraction must lie in (0,1)");
  if (!(p_re >= 0.0) || !(p_re <= 1.0))
    throw std::invalid_argument("p_re must lie in [0,1]");
  // Structural ranges only; the feasibility rule cir_dp + cir_nc < 1 is
  // enforced by the calibrator, which owns the infeasible-target diagnostics.
  for (int arm = 0; arm < kNumArms; ++arm) {
    const auto& t = targets[arm];
    for (int k = 0; k < 2; ++k)
      if (!(t.cir[k] >= 0.0) || !(t.cir[k] < 1.0))
        throw std::invalid_argument("arm " + arm_name(arm) + ": CIR targets must lie in [0,1)");
  }
}

}  // namespace crtsim
