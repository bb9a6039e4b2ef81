#pragma once
// The competing-risk probability model: cause-specific Weibull hazards with a
// subgroup/dose hazard-ratio term, likelihood, priors and log-posterior, all
// as pure functions. This is the reference path; the sampler and decision
// engine build faster routes on top and are cross-checked against it.

#include <span>

#include "crtsim/types.hpp"

namespace crtsim {

// h_k(w, d) = gamma_k1*d*w + (gamma_k2*I(d=1) + gamma_k3*I(d=2))*(1-w),
// with the low dose as the reference level. Rejects (w=0,d=0) and (w=1,d=2).
double log_hazard_ratio(int k, int w, int d, const ModelParams& theta);

// lambda_k(x) = alpha_k beta_k x^(alpha_k - 1) exp(h_k). Requires x > 0.
double hazard(int k, double x, int w, int d, const ModelParams& theta);

// S_k(x) = exp(-beta_k x^alpha_k exp(h_k)). Defined for x >= 0; S_k(0) = 1.
double survival(int k, double x, int w, int d, const ModelParams& theta);

// sum_i sum_k [ delta_ki log lambda_k(x_i) + log S_k(x_i) ]. Empty data -> 0.
// Validates every record.
double log_likelihood(std::span<const PatientRecord> data, const ModelParams& theta);

// Gamma(a,b) (shape/scale) log-densities on the four alpha/beta plus
// Normal(0, c^2) on the six gamma coefficients; -inf outside the support.
double log_prior(const ModelParams& theta, const PriorConfig& prior);

// log_likelihood + log_prior, up to the normalizing constant.
double log_posterior(std::span<const PatientRecord> data, const ModelParams& theta,
                     const PriorConfig& prior);

}  // namespace crtsim
