#include <cmath>

#include "crtsim/kernels.hpp"

// Scalar reference kernels. These define the semantics the SIMD variants are
// tested against.

namespace crtsim::kernels {

namespace {

double power_sum_scalar(const double* logx, std::size_t n, double a) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(a * logx[i]);
  return s;
}

// Log hazard-ratio of cause k at each arm, given the gamma block.
inline double arm_hr(const ModelParams& p, int k, int arm) {
  switch (arm) {
    case 0: return p.gamma[k][1];  // RE, standard
    case 1: return p.gamma[k][2];  // RE, high
    case 2: return 0.0;            // SE, low (reference level)
    default: return p.gamma[k][0]; // SE, standard
  }
}

void arm_event_probs_scalar(const ModelParams* draws, std::size_t n,
                            const QuadGrid& grid, double* out) {
  const std::size_t m = grid.size();
  const std::size_t half = static_cast<std::size_t>(grid.n_half);
  // Node powers are shared across the four arms of one draw.
  std::vector<double> pow1(m), pow2(m);
  for (std::size_t t = 0; t < n; ++t) {
    const ModelParams& p = draws[t];
    for (std::size_t j = 0; j < m; ++j) {
      pow1[j] = std::exp(p.alpha[0] * grid.logx[j]);
      pow2[j] = std::exp(p.alpha[1] * grid.logx[j]);
    }
    const double nu_pow1 = std::pow(grid.nu, p.alpha[0]);
    const double nu_pow2 = std::pow(grid.nu, p.alpha[1]);
    for (int arm = 0; arm < kNumArms; ++arm) {
      const double r1 = p.beta[0] * std::exp(arm_hr(p, 0, arm));
      const double r2 = p.beta[1] * std::exp(arm_hr(p, 1, arm));
      double e[5] = {0.0, 0.0, 0.0, 0.0, 0.0};
      for (std::size_t j = 0; j < m; ++j) {
        const double surv = std::exp(-(r1 * pow1[j] + r2 * pow2[j]));
        const double lam1 = p.alpha[0] * r1 * pow1[j] / grid.x[j];
        const double lam2 = p.alpha[1] * r2 * pow2[j] / grid.x[j];
        const double ws = grid.wgt[j] * surv;
        const int late = j < half ? 0 : 2;
        e[late + 0] += ws * lam1;
        e[late + 1] += ws * lam2;
      }
      e[4] = std::exp(-(r1 * nu_pow1 + r2 * nu_pow2));
      double* o = out + (t * kNumArms + arm) * 5;
      for (int s = 0; s < 5; ++s) o[s] = e[s];
    }
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{power_sum_scalar, arm_event_probs_scalar};
  return table;
}

}  // namespace crtsim::kernels
