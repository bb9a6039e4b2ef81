#pragma once
// Shared helpers for unit and acceptance tests.

#include <cmath>
#include <vector>

#include "crtsim/generators.hpp"
#include "crtsim/hazard_model.hpp"
#include "crtsim/rng.hpp"
#include "crtsim/types.hpp"

namespace crtsim::testing {

// Model-consistent dataset at fixed parameters: subgroups Bernoulli(0.5),
// doses uniform over each subgroup's pair, administrative censoring at nu.
inline std::vector<PatientRecord> model_dataset(const ModelParams& theta, int n,
                                                std::uint64_t seed, double nu) {
  Rng rng(seed);
  std::vector<PatientRecord> data;
  data.reserve(n);
  for (int i = 0; i < n; ++i) {
    const int w = rng.uniform() < 0.5 ? kSubgroupRe : kSubgroupSe;
    const auto cands = candidate_doses(w);
    const int d = rng.uniform() < 0.5 ? cands[0] : cands[1];
    ArmGenerator gen;
    gen.family = Family::Weibull;
    for (int k = 0; k < 2; ++k) {
      gen.cause[k].shape = theta.alpha[k];
      gen.cause[k].rate = theta.beta[k] * std::exp(log_hazard_ratio(k + 1, w, d, theta));
    }
    const LatentEvent ev = draw_event(gen, rng);
    data.push_back(observe(ev, w, d, nu, 0.0));
  }
  return data;
}

}  // namespace crtsim::testing
