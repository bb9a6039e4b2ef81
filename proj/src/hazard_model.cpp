#include "crtsim/hazard_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace crtsim {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kHalfLog2Pi = 0.91893853320467274178;

void check_cause(int k) {
  if (k != 1 && k != 2) throw std::invalid_argument("cause must be 1 or 2");
}
}  // namespace

void validate_record(const PatientRecord& rec) {
  if (!dose_allowed(rec.w, rec.d))
    throw std::invalid_argument("record has disallowed (subgroup, dose) pair (w=" +
                                std::to_string(rec.w) + ", d=" + std::to_string(rec.d) + ")");
  if (!(rec.x > 0.0))
    throw std::invalid_argument("record observation time must be positive");
  if ((rec.delta1 != 0 && rec.delta1 != 1) || (rec.delta2 != 0 && rec.delta2 != 1))
    throw std::invalid_argument("event indicators must be 0 or 1");
  if (rec.delta1 + rec.delta2 > 1)
    throw std::invalid_argument("at most one first event per record");
}

double log_hazard_ratio(int k, int w, int d, const ModelParams& theta) {
  check_cause(k);
  if (!dose_allowed(w, d))
    throw std::invalid_argument("disallowed (subgroup, dose) pair");
  const auto& g = theta.gamma[k - 1];
  return g[0] * d * w + (g[1] * (d == 1) + g[2] * (d == 2)) * (1 - w);
}

double hazard(int k, double x, int w, int d, const ModelParams& theta) {
  if (!(x > 0.0)) throw std::invalid_argument("hazard requires x > 0");
  const double h = log_hazard_ratio(k, w, d, theta);
  const double a = theta.alpha[k - 1];
  const double b = theta.beta[k - 1];
  return a * b * std::pow(x, a - 1.0) * std::exp(h);
}

double survival(int k, double x, int w, int d, const ModelParams& theta) {
  if (!(x >= 0.0)) throw std::invalid_argument("survival requires x >= 0");
  const double h = log_hazard_ratio(k, w, d, theta);
  const double a = theta.alpha[k - 1];
  const double b = theta.beta[k - 1];
  return std::exp(-b * std::pow(x, a) * std::exp(h));
}

double log_likelihood(std::span<const PatientRecord> data, const ModelParams& theta) {
  double ll = 0.0;
  for (const auto& rec : data) {
    validate_record(rec);
    const double lx = std::log(rec.x);
    for (int k = 1; k <= 2; ++k) {
      const double h = log_hazard_ratio(k, rec.w, rec.d, theta);
      const double a = theta.alpha[k - 1];
      const double b = theta.beta[k - 1];
      const int delta = k == 1 ? rec.delta1 : rec.delta2;
      if (delta) ll += std::log(a) + std::log(b) + (a - 1.0) * lx + h;
      ll -= b * std::exp(a * lx) * std::exp(h);  // log S_k
    }
  }
  return ll;
}

namespace {
// Gamma(a, b) with mean a*b and variance a*b^2 (shape/scale).
double gamma_logpdf(double x, double a, double b) {
  if (!(x > 0.0)) return kNegInf;
  return (a - 1.0) * std::log(x) - x / b - std::lgamma(a) - a * std::log(b);
}

double normal_logpdf(double x, double sd) {
  const double z = x / sd;
  return -0.5 * z * z - std::log(sd) - kHalfLog2Pi;
}
}  // namespace

double log_prior(const ModelParams& theta, const PriorConfig& prior) {
  prior.validate();
  double lp = 0.0;
  for (int k = 0; k < 2; ++k) {
    lp += gamma_logpdf(theta.alpha[k], prior.a, prior.b);
    lp += gamma_logpdf(theta.beta[k], prior.a, prior.b);
    for (int l = 0; l < 3; ++l) lp += normal_logpdf(theta.gamma[k][l], prior.c);
  }
  return lp;
}

double log_posterior(std::span<const PatientRecord> data, const ModelParams& theta,
                     const PriorConfig& prior) {
  const double lp = log_prior(theta, prior);
  if (lp == kNegInf) return kNegInf;
  return log_likelihood(data, theta) + lp;
}

}  // namespace crtsim
