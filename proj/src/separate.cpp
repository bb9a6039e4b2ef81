#include "crtsim/separate.hpp"

#include <cmath>
#include <stdexcept>

namespace crtsim {

std::vector<PatientRecord> separate_cause_records(const ObservedData& data, int k,
                                                  SeparateConvention conv) {
  if (k != 1 && k != 2) throw std::invalid_argument("cause must be 1 or 2");
  if (!data.fu.empty() && data.fu.size() != data.records.size())
    throw std::invalid_argument("fu must be empty or match records");
  std::vector<PatientRecord> out;
  out.reserve(data.records.size());
  for (std::size_t i = 0; i < data.records.size(); ++i) {
    PatientRecord rec = data.records[i];
    const int mine = k == 1 ? rec.delta1 : rec.delta2;
    const int other = k == 1 ? rec.delta2 : rec.delta1;
    if (other && conv == SeparateConvention::IgnoreCompetitor) {
      // Competing event discarded: the patient counts as event-free for this
      // cause through their scheduled follow-up horizon.
      rec.x = data.fu.empty() ? rec.x : data.fu[i];
    }
    rec.delta1 = k == 1 ? mine : 0;
    rec.delta2 = k == 2 ? mine : 0;
    out.push_back(rec);
  }
  return out;
}

SeparateDraws separate_design_posterior(const ObservedData& data, const PriorConfig& prior,
                                        const McmcConfig& cfg, std::uint64_t seed1,
                                        std::uint64_t seed2, SeparateConvention conv) {
  SeparateDraws out;
  for (int k = 1; k <= 2; ++k) {
    McmcConfig c = cfg;
    c.seed = k == 1 ? seed1 : seed2;
    const auto recs = separate_cause_records(data, k, conv);
    out.cause[k - 1] = sample_posterior(recs, prior, c,
                                        k == 1 ? CauseMask::Cause1Only : CauseMask::Cause2Only);
  }
  if (out.cause[0].draws.size() != out.cause[1].draws.size())
    throw std::runtime_error("separate chains must have equal length");
  return out;
}

namespace {

// Marginal CDF of cause k at horizon t for one arm, from that cause's chain.
inline double marginal_cdf(const ModelParams& p, int k, int arm, double t) {
  double h;
  switch (arm) {
    case 0: h = p.gamma[k][1]; break;
    case 1: h = p.gamma[k][2]; break;
    case 2: h = 0.0; break;
    default: h = p.gamma[k][0]; break;
  }
  return -std::expm1(-p.beta[k] * std::pow(t, p.alpha[k]) * std::exp(h));
}

}  // namespace

DecisionStats separate_decision_stats(const SeparateDraws& draws,
                                      const UtilityWeights& weights,
                                      const std::array<double, 2>& tau, double nu,
                                      bool renormalize) {
  weights.validate();
  const std::size_t n = draws.cause[0].draws.size();
  if (n == 0 || draws.cause[1].draws.size() != n)
    throw std::invalid_argument("separate draws must be non-empty and paired");

  std::array<double, kNumArms> sum_u{}, sum_u2{};
  std::array<std::array<double, 2>, kNumArms> exceed{{}};
  std::array<double, 2> compare{};

  for (std::size_t t = 0; t < n; ++t) {
    const ModelParams& p1 = draws.cause[0].draws[t];
    const ModelParams& p2 = draws.cause[1].draws[t];
    std::array<double, kNumArms> u;
    for (int arm = 0; arm < kNumArms; ++arm) {
      const double f1h = marginal_cdf(p1, 0, arm, nu / 2.0);
      const double f1f = marginal_cdf(p1, 0, arm, nu);
      const double f2h = marginal_cdf(p2, 1, arm, nu / 2.0);
      const double f2f = marginal_cdf(p2, 1, arm, nu);
      double q[5] = {f1h, f2h, f1f - f1h, f2f - f2h, (1.0 - f1f) * (1.0 - f2f)};
      if (renormalize) {
        const double s = q[0] + q[1] + q[2] + q[3] + q[4];
        if (s > 0.0)
          for (double& v : q) v /= s;
      }
      double uu = 0.0;
      for (int s = 0; s < 5; ++s) uu += weights.o[s] * q[s];
      u[arm] = uu;
      sum_u[arm] += uu;
      sum_u2[arm] += uu * uu;
      exceed[arm][0] += f1f > tau[0];
      exceed[arm][1] += f2f > tau[1];
    }
    compare[kSubgroupRe] += u[1] > u[0];
    compare[kSubgroupSe] += u[2] > u[3];
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

}  // namespace crtsim
