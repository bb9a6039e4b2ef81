#include "crtsim/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "crtsim/hazard_model.hpp"
#include "crtsim/kernels.hpp"
#include "crtsim/rng.hpp"

namespace crtsim {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Records partitioned by arm; per cause, the event-count and log-time
// summaries that make the likelihood O(#arms) given the power sums.
struct CompiledData {
  std::array<std::vector<double>, kNumArms> logx;
  std::array<std::array<double, kNumArms>, 2> event_count{};
  std::array<double, 2> n_events{};
  std::array<double, 2> sum_logx_events{};
  std::size_t n_records = 0;
};

CompiledData compile(std::span<const PatientRecord> data) {
  CompiledData cd;
  cd.n_records = data.size();
  for (const auto& rec : data) {
    validate_record(rec);
    const int arm = arm_index(rec.w, rec.d);
    const double lx = std::log(rec.x);
    cd.logx[arm].push_back(lx);
    const int delta[2] = {rec.delta1, rec.delta2};
    for (int k = 0; k < 2; ++k) {
      if (delta[k]) {
        cd.event_count[k][arm] += 1.0;
        cd.n_events[k] += 1.0;
        cd.sum_logx_events[k] += lx;
      }
    }
  }
  return cd;
}

// Log hazard-ratio per arm given one cause's gamma block, matching kernels.
inline double arm_hr(const std::array<double, 3>& g, int arm) {
  switch (arm) {
    case 0: return g[1];
    case 1: return g[2];
    case 2: return 0.0;
    default: return g[0];
  }
}

// Cause-k log-likelihood given power sums T[arm] = sum x_i^alpha over arm.
double cause_loglik(const CompiledData& cd, int k, double alpha, double beta,
                    const std::array<double, 3>& g,
                    const std::array<double, kNumArms>& T) {
  double ll = cd.n_events[k] * (std::log(alpha) + std::log(beta)) +
              (alpha - 1.0) * cd.sum_logx_events[k];
  for (int arm = 0; arm < kNumArms; ++arm) {
    const double h = arm_hr(g, arm);
    ll += cd.event_count[k][arm] * h;
    ll -= beta * std::exp(h) * T[arm];
  }
  return ll;
}

double gamma_logpdf(double x, double a, double b) {
  if (!(x > 0.0)) return kNegInf;
  return (a - 1.0) * std::log(x) - x / b - std::lgamma(a) - a * std::log(b);
}

struct CoordSpec {
  int cause;       // 0 or 1
  int kind;        // 0 = alpha, 1 = beta, 2 = gamma
  int gamma_index; // 0..2 when kind == 2
};

constexpr CoordSpec kCoords[kNumCoords] = {
    {0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0},
    {0, 2, 0}, {0, 2, 1}, {0, 2, 2}, {1, 2, 0}, {1, 2, 1}, {1, 2, 2}};

}  // namespace

PosteriorDraws sample_posterior(std::span<const PatientRecord> data,
                                const PriorConfig& prior, const McmcConfig& cfg,
                                CauseMask mask) {
  prior.validate();
  cfg.validate();
  const CompiledData cd = compile(data);

  const bool cause_active[2] = {mask != CauseMask::Cause2Only,
                                mask != CauseMask::Cause1Only};

  ModelParams theta = cfg.init;
  Rng rng(cfg.seed);

  // Power-sum caches at the current shapes.
  std::array<std::array<double, kNumArms>, 2> T{};
  for (int k = 0; k < 2; ++k)
    for (int arm = 0; arm < kNumArms; ++arm)
      T[k][arm] = kernels::power_sum(cd.logx[arm].data(), cd.logx[arm].size(),
                                     theta.alpha[k]);
  std::array<double, 2> ll{};
  for (int k = 0; k < 2; ++k)
    ll[k] = cause_active[k]
                ? cause_loglik(cd, k, theta.alpha[k], theta.beta[k], theta.gamma[k], T[k])
                : 0.0;

  // Per-coordinate proposal scales (log sigma), adapted during burn-in.
  std::array<double, kNumCoords> log_sigma;
  for (int j = 0; j < kNumCoords; ++j) log_sigma[j] = kCoords[j].kind == 2 ? 0.0 : std::log(0.5);
  std::array<int, kNumCoords> window_accepts{};
  std::array<long, kNumCoords> post_accepts{};
  std::array<long, kNumCoords> post_attempts{};
  int adapt_batch = 0;

  PosteriorDraws out;
  out.seed = cfg.seed;
  out.draws.reserve(static_cast<std::size_t>((cfg.n_iter - cfg.n_burn) / cfg.thin));

  std::array<double, kNumArms> T_prop;

  for (int iter = 1; iter <= cfg.n_iter; ++iter) {
    const bool in_burn = iter <= cfg.n_burn;
    for (int j = 0; j < kNumCoords; ++j) {
      const CoordSpec& cs = kCoords[j];
      const int k = cs.cause;
      if (!cause_active[k]) continue;
      const double sigma = std::exp(log_sigma[j]);
      const double z = rng.normal();
      bool accepted = false;

      if (cs.kind == 0) {
        // Shape: log random walk; power sums recomputed at the proposal.
        const double a_cur = theta.alpha[k];
        const double a_prop = std::exp(std::log(a_cur) + sigma * z);
        for (int arm = 0; arm < kNumArms; ++arm)
          T_prop[arm] = kernels::power_sum(cd.logx[arm].data(), cd.logx[arm].size(), a_prop);
        const double ll_prop =
            cause_loglik(cd, k, a_prop, theta.beta[k], theta.gamma[k], T_prop);
        const double log_r = ll_prop + gamma_logpdf(a_prop, prior.a, prior.b) + std::log(a_prop)
                           - ll[k] - gamma_logpdf(a_cur, prior.a, prior.b) - std::log(a_cur);
        if (std::log(rng.uniform_pos()) < log_r) {
          theta.alpha[k] = a_prop;
          T[k] = T_prop;
          ll[k] = ll_prop;
          accepted = true;
        }
      } else if (cs.kind == 1) {
        const double b_cur = theta.beta[k];
        const double b_prop = std::exp(std::log(b_cur) + sigma * z);
        const double ll_prop =
            cause_loglik(cd, k, theta.alpha[k], b_prop, theta.gamma[k], T[k]);
        const double log_r = ll_prop + gamma_logpdf(b_prop, prior.a, prior.b) + std::log(b_prop)
                           - ll[k] - gamma_logpdf(b_cur, prior.a, prior.b) - std::log(b_cur);
        if (std::log(rng.uniform_pos()) < log_r) {
          theta.beta[k] = b_prop;
          ll[k] = ll_prop;
          accepted = true;
        }
      } else {
        const int l = cs.gamma_index;
        const double g_cur = theta.gamma[k][l];
        const double g_prop = g_cur + sigma * z;
        auto g_new = theta.gamma[k];
        g_new[l] = g_prop;
        const double ll_prop = cause_loglik(cd, k, theta.alpha[k], theta.beta[k], g_new, T[k]);
        const double zp = g_prop / prior.c, zc = g_cur / prior.c;
        const double log_r = ll_prop - 0.5 * zp * zp - (ll[k] - 0.5 * zc * zc);
        if (std::log(rng.uniform_pos()) < log_r) {
          theta.gamma[k][l] = g_prop;
          ll[k] = ll_prop;
          accepted = true;
        }
      }

      if (in_burn) {
        window_accepts[j] += accepted;
      } else {
        post_attempts[j] += 1;
        post_accepts[j] += accepted;
      }
    }

    if (in_burn && iter % cfg.adapt_window == 0) {
      ++adapt_batch;
      const double gain = 1.0 / std::sqrt(static_cast<double>(adapt_batch));
      for (int j = 0; j < kNumCoords; ++j) {
        if (!cause_active[kCoords[j].cause]) continue;
        const double rate = static_cast<double>(window_accepts[j]) / cfg.adapt_window;
        log_sigma[j] += gain * (rate - cfg.target_accept);
        log_sigma[j] = std::clamp(log_sigma[j], -8.0, 3.0);
        window_accepts[j] = 0;
      }
    }

    if (!in_burn && (iter - cfg.n_burn) % cfg.thin == 0) out.draws.push_back(theta);
  }

  for (int j = 0; j < kNumCoords; ++j)
    out.accept_rates[j] = post_attempts[j] > 0
                              ? static_cast<double>(post_accepts[j]) / post_attempts[j]
                              : 0.0;
  return out;
}

double effective_sample_size(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 2) return static_cast<double>(n);
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);

  auto acov = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i)
      s += (series[i] - mean) * (series[i + lag] - mean);
    return s / static_cast<double>(n);
  };

  const double c0 = acov(0);
  if (!(c0 > 0.0)) return static_cast<double>(n);  // constant chain convention

  // Geyer: sum adjacent autocovariance pairs while they stay positive.
  double sum_pairs = 0.0;
  const std::size_t max_lag = std::min<std::size_t>(n - 1, 4000);
  for (std::size_t m = 0; 2 * m + 1 <= max_lag; ++m) {
    const double pair = acov(2 * m) + acov(2 * m + 1);
    if (pair <= 0.0) break;
    sum_pairs += pair;
  }
  const double tau = std::max(1.0, 2.0 * sum_pairs / c0 - 1.0);
  return static_cast<double>(n) / tau;
}

ChainDiagnostics diagnostics(const PosteriorDraws& draws) {
  if (draws.draws.empty()) throw std::invalid_argument("diagnostics: empty draws");
  ChainDiagnostics d;
  d.n_draws = draws.draws.size();
  for (int j = 0; j < kNumCoords; ++j) {
    const std::vector<double> series = draws.coord_series(j);
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(series.size());
    double ss = 0.0;
    for (double v : series) ss += (v - mean) * (v - mean);
    const double sd = series.size() > 1 ? std::sqrt(ss / (series.size() - 1.0)) : 0.0;
    d.coord[j] = {mean, sd, effective_sample_size(series), draws.accept_rates[j]};
  }
  return d;
}

void write_chain_dump(const std::string& path, const PosteriorDraws& draws) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open chain dump file: " + path);
  for (int j = 0; j < kNumCoords; ++j) f << (j ? " " : "") << coord_name(j);
  f << "\n";
  f.precision(17);
  for (const auto& p : draws.draws) {
    for (int j = 0; j < kNumCoords; ++j) f << (j ? " " : "") << get_coord(p, j);
    f << "\n";
  }
}

}  // namespace crtsim
