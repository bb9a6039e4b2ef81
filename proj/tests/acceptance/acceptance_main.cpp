// Acceptance suite: one binary, one criterion per invocation (1..7), printing
// a [pass]/[FAIL] line per sub-check and a final CRITERION verdict. Exit
// status 0 iff the criterion passes.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "crtsim/calibrate.hpp"
#include "crtsim/decision.hpp"
#include "crtsim/simulate.hpp"
#include "../test_helpers.hpp"

using namespace crtsim;

namespace {

bool g_all_ok = true;

void check(bool ok, const char* fmt, ...) {
  va_list args;
  va_start(args, fmt);
  char buf[512];
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  std::printf("  [%s] %s\n", ok ? "pass" : "FAIL", buf);
  g_all_ok = g_all_ok && ok;
}

int verdict(int criterion, const char* title) {
  std::printf("CRITERION %d (%s): %s\n", criterion, title, g_all_ok ? "PASS" : "FAIL");
  return g_all_ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// Reference table: per scenario, per arm (RE/std, RE/high, SE/low, SE/std):
// target CIR pairs and the published true-utility row.
// ---------------------------------------------------------------------------
struct ScenarioRow {
  std::array<std::array<double, 2>, kNumArms> cir;
  std::array<double, kNumArms> utility;
};

const std::array<ScenarioRow, 7> kScenarios = {{
    {{{{0.2, 0.2}, {0.1, 0.3}, {0.3, 0.1}, {0.2, 0.2}}}, {63.5, 64.3, 62.8, 63.6}},
    {{{{0.3, 0.1}, {0.05, 0.2}, {0.25, 0.2}, {0.1, 0.3}}}, {62.8, 77.7, 58.8, 64.2}},
    {{{{0.3, 0.1}, {0.2, 0.6}, {0.6, 0.1}, {0.2, 0.6}}}, {62.3, 29.6, 34.7, 29.6}},
    {{{{0.3, 0.1}, {0.2, 0.6}, {0.25, 0.1}, {0.2, 0.6}}}, {62.5, 29.8, 67.3, 29.8}},
    {{{{0.3, 0.1}, {0.05, 0.2}, {0.6, 0.1}, {0.2, 0.2}}}, {62.6, 77.7, 35.2, 63.4}},
    {{{{0.5, 0.1}, {0.1, 0.15}, {0.1, 0.05}, {0.08, 0.35}}}, {44.3, 77.3, 86.0, 61.8}},
    {{{{0.15, 0.1}, {0.1, 0.15}, {0.5, 0.05}, {0.1, 0.35}}}, {77.3, 77.0, 48.4, 60.0}},
}};

ScenarioSpec make_scenario(int index) {
  ScenarioSpec sc;
  sc.name = "scenario" + std::to_string(index + 1);
  for (int arm = 0; arm < kNumArms; ++arm) sc.targets[arm].cir = kScenarios[index].cir[arm];
  calibrate_scenario(sc);
  return sc;
}

// Upper-tail regularized incomplete gamma Q(a, x) (series / continued
// fraction), for chi-square p-values.
double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) return 1.0;
  if (x == 0.0) return 1.0;
  const double gln = std::lgamma(a);
  if (x < a + 1.0) {  // series for P, return 1 - P
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-14) break;
    }
    return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
  }
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-14) break;
  }
  return std::exp(-x + a * std::log(x) - gln) * h;
}

ModelParams draw_prior(const PriorConfig& prior, Rng& rng) {
  ModelParams p;
  for (int k = 0; k < 2; ++k) {
    p.alpha[k] = rng.gamma(prior.a, prior.b);
    p.beta[k] = rng.gamma(prior.a, prior.b);
    for (int l = 0; l < 3; ++l) p.gamma[k][l] = prior.c * rng.normal();
  }
  return p;
}

// ---------------------------------------------------------------------------
int criterion1() {
  std::printf("true-utility reproduction: calibrated generators vs the published "
              "utility rows (tolerance 0.15)\n");
  UtilityWeights weights;
  int failures = 0;
  for (int s = 0; s < 7; ++s) {
    const auto sc = make_scenario(s);
    for (int arm = 0; arm < kNumArms; ++arm) {
      const double u = generator_true_utility(sc.arms[arm], weights, sc.nu);
      const double target = kScenarios[s].utility[arm];
      const bool ok = std::abs(u - target) <= 0.15 + 1e-9;
      failures += !ok;
      check(ok, "scenario %d %-11s computed %7.3f published %5.1f (diff %+0.3f)", s + 1,
            arm_name(arm).c_str(), u, target, u - target);
    }
  }
  if (failures > 0) {
    std::printf(
        "  note: under exact half-split calibration the utility is the identity\n"
        "        U = 100 - 95*CIR_dp - 87.5*CIR_nc, a function of the CIR targets\n"
        "        alone. The published rows are internally inconsistent with that\n"
        "        identity: identical targets carry different published values\n"
        "        (e.g. (0.6,0.1) -> 34.7 in scenario 3 but 35.2 in scenario 5;\n"
        "        (0.2,0.6) -> 29.6 vs 29.8 in scenarios 3/4), so no deterministic\n"
        "        calibration can match every row within 0.15. The engine matches\n"
        "        the identity to quadrature accuracy; rows that disagree with\n"
        "        their own targets fail here and are documented as a known\n"
        "        discrepancy in the reference table.\n");
  }
  return verdict(1, "true-utility reproduction");
}

// ---------------------------------------------------------------------------
int criterion2() {
  std::printf("calibration fidelity: quadrature residuals < 1e-6 and a 1e6-draw "
              "Monte-Carlo oracle within 0.002\n");
  Rng rng(987654321);
  for (int s = 0; s < 7; ++s) {
    const auto sc = make_scenario(s);
    for (int arm = 0; arm < kNumArms; ++arm) {
      const auto& target = kScenarios[s].cir[arm];
      const auto full = generator_cir(sc.arms[arm], sc.nu, sc.nu);
      const auto half = generator_cir(sc.arms[arm], sc.nu / 2.0, sc.nu);
      double resid = 0.0;
      for (int k = 0; k < 2; ++k) {
        resid = std::max(resid, std::abs(full[k] - target[k]));
        resid = std::max(resid, std::abs(half[k] - 0.5 * target[k]));
      }
      check(resid < 1e-6, "scenario %d %-11s quadrature residual %.2e", s + 1,
            arm_name(arm).c_str(), resid);

      const int n = 1000000;
      int hits[2] = {0, 0};
      for (int i = 0; i < n; ++i) {
        const auto ev = draw_event(sc.arms[arm], rng);
        if (ev.cause != 0 && ev.t <= sc.nu) ++hits[ev.cause - 1];
      }
      for (int k = 0; k < 2; ++k) {
        const double empirical = static_cast<double>(hits[k]) / n;
        check(std::abs(empirical - target[k]) < 0.002,
              "scenario %d %-11s cause %d monte-carlo %.4f target %.4f", s + 1,
              arm_name(arm).c_str(), k + 1, empirical, target[k]);
      }
    }
  }
  return verdict(2, "calibration fidelity");
}

// ---------------------------------------------------------------------------
int criterion3() {
  std::printf("closed-form oracle: exponential cumulative incidence vs quadrature, "
              "1000 random draws, relative error < 1e-8\n");
  Rng rng(31415926);
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    ModelParams p;
    p.alpha = {1.0, 1.0};
    p.beta = {0.02 + 2.0 * rng.uniform(), 0.02 + 2.0 * rng.uniform()};
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 3; ++l) p.gamma[k][l] = -1.2 + 2.4 * rng.uniform();
    const int w = rep % 2;
    const int d = candidate_doses(w)[(rep / 2) % 2];
    const double r1 = p.beta[0] * std::exp(log_hazard_ratio(1, w, d, p));
    const double r2 = p.beta[1] * std::exp(log_hazard_ratio(2, w, d, p));
    for (int k : {1, 2}) {
      const double rk = k == 1 ? r1 : r2;
      const double closed = rk / (r1 + r2) * (1.0 - std::exp(-(r1 + r2)));
      const double quad = cumulative_incidence(k, w, d, p, 1.0);
      worst = std::max(worst, std::abs(quad - closed) / closed);
    }
  }
  check(worst < 1e-8, "worst relative error %.3e over 1000 draws", worst);
  return verdict(3, "closed-form incidence oracle");
}

// ---------------------------------------------------------------------------
int criterion4() {
  std::printf("posterior correctness: prior recovery, simulation-based calibration, "
              "and truth recovery at n = 2000\n");
  const PriorConfig prior;

  // (i) no-data chain recovers the prior means within 3 MCSE
  {
    McmcConfig cfg;
    cfg.n_iter = 12000;
    cfg.n_burn = 4000;
    cfg.seed = 11;
    const auto draws = sample_posterior({}, prior, cfg);
    const auto diag = diagnostics(draws);
    for (int j = 0; j < kNumCoords; ++j) {
      const auto& c = diag.coord[j];
      const double mcse = c.sd / std::sqrt(std::max(1.0, c.ess));
      const double target = j < 4 ? 1.0 : 0.0;
      check(std::abs(c.mean - target) < 3.0 * mcse,
            "prior recovery %-8s mean %8.4f target %.1f mcse %.4f ess %6.0f", coord_name(j),
            c.mean, target, mcse, c.ess);
    }
  }

  // (ii) simulation-based calibration: 200 replications at n = 50
  {
    const int reps = 200;
    const int bins = 9;
    std::array<std::array<int, 9>, kNumCoords> counts{};
    Rng rng(220022);
    for (int rep = 0; rep < reps; ++rep) {
      const ModelParams truth = draw_prior(prior, rng);
      const auto data = testing::model_dataset(truth, 50, derive_seed(5000, rep), 1.0);
      McmcConfig cfg;
      cfg.n_iter = 4000;
      cfg.n_burn = 2000;
      cfg.thin = 25;  // 80 retained draws -> ranks 0..80 in 9 bins of 9
      cfg.init = truth;
      cfg.seed = derive_seed(6000, rep);
      const auto draws = sample_posterior(data, prior, cfg);
      for (int j = 0; j < kNumCoords; ++j) {
        const double t = get_coord(truth, j);
        int rank = 0;
        for (const auto& p : draws.draws) rank += get_coord(p, j) < t;
        counts[j][std::min(rank / 9, bins - 1)] += 1;
      }
    }
    for (int j = 0; j < kNumCoords; ++j) {
      const double expect = static_cast<double>(reps) / bins;
      double chi2 = 0.0;
      for (int b = 0; b < bins; ++b) {
        const double d = counts[j][b] - expect;
        chi2 += d * d / expect;
      }
      const double p = gamma_q(0.5 * (bins - 1), 0.5 * chi2);
      check(p > 0.01, "sbc %-8s chi2 %6.2f p %.4f", coord_name(j), chi2, p);
    }
  }

  // (iii) n = 2000 fit recovers the generating parameters within 3 posterior SDs
  {
    ModelParams truth;
    truth.alpha = {1.2, 0.9};
    truth.beta = {0.5, 0.35};
    truth.gamma[0] = {0.3, -0.2, 0.4};
    truth.gamma[1] = {-0.25, 0.15, 0.6};
    const auto data = testing::model_dataset(truth, 2000, 424242, 1.0);
    McmcConfig cfg;
    cfg.n_iter = 8000;
    cfg.n_burn = 3000;
    cfg.seed = 33;
    const auto draws = sample_posterior(data, prior, cfg);
    const auto diag = diagnostics(draws);
    for (int j = 0; j < kNumCoords; ++j) {
      const auto& c = diag.coord[j];
      const double target = get_coord(truth, j);
      check(std::abs(c.mean - target) < 3.0 * c.sd,
            "recovery %-8s mean %8.4f truth %7.4f sd %.4f", coord_name(j), c.mean, target,
            c.sd);
    }
  }
  return verdict(4, "posterior correctness");
}

// ---------------------------------------------------------------------------
int criterion5() {
  std::printf("desk-scale operating characteristics at 500 replicates (defaults)\n");
  const DesignConfig cfg;
  SimOptions opts;
  opts.n_reps = 500;
  opts.master_seed = 88001;
  opts.design = DesignKind::Ar;
  opts.progress = [](int done, int total) {
    std::fprintf(stderr, "\r  replicates %d/%d", done, total);
    if (done == total) std::fprintf(stderr, "\n");
  };

  {
    const auto oc = run_replicates(make_scenario(3), cfg, opts);  // scenario 4
    check(oc.sel_pct[0] >= 85.0 && oc.sel_pct[0] <= 100.0,
          "scenario 4 AR: RE standard selected %.1f%% (band 85..100, published 93.9)",
          oc.sel_pct[0]);
    check(oc.n_failed == 0, "scenario 4 AR: %d failed replicates", oc.n_failed);
  }
  {
    const auto oc = run_replicates(make_scenario(1), cfg, opts);  // scenario 2
    check(oc.sel_pct[1] >= 65.0 && oc.sel_pct[1] <= 90.0,
          "scenario 2 AR: RE high selected %.1f%% (band 65..90, published 79.2)",
          oc.sel_pct[1]);
    check(oc.n_failed == 0, "scenario 2 AR: %d failed replicates", oc.n_failed);
  }
  {
    const auto oc = run_replicates(make_scenario(2), cfg, opts);  // scenario 3
    check(oc.early_stop_pct[1] >= 20.0 && oc.early_stop_pct[1] <= 50.0,
          "scenario 3 AR: SE early stop %.1f%% (band 20..50, published 33.3)",
          oc.early_stop_pct[1]);
    check(oc.n_failed == 0, "scenario 3 AR: %d failed replicates", oc.n_failed);
  }
  {
    const auto oc = run_replicates(make_scenario(0), cfg, opts);  // scenario 1
    for (int arm = 0; arm < kNumArms; ++arm)
      check(oc.mean_treated[arm] >= 20.0 && oc.mean_treated[arm] <= 30.0,
            "scenario 1 AR: %-11s mean treated %.2f (band 25 +/- 5)",
            arm_name(arm).c_str(), oc.mean_treated[arm]);
    check(oc.n_failed == 0, "scenario 1 AR: %d failed replicates", oc.n_failed);
  }
  return verdict(5, "desk-scale operating characteristics");
}

// ---------------------------------------------------------------------------
int criterion6() {
  std::printf("design-comparison direction checks at 500 replicates\n");
  const DesignConfig cfg;
  SimOptions opts;
  opts.n_reps = 500;
  opts.master_seed = 88002;
  opts.progress = [](int done, int total) {
    std::fprintf(stderr, "\r  replicates %d/%d", done, total);
    if (done == total) std::fprintf(stderr, "\n");
  };

  const auto s2 = make_scenario(1);
  opts.design = DesignKind::Ar;
  const auto s2_ar = run_replicates(s2, cfg, opts);
  opts.design = DesignKind::Er;
  const auto s2_er = run_replicates(s2, cfg, opts);
  // RE optimal dose in scenario 2 is high (utility 77.7 vs 62.8)
  const double ar_ratio = s2_ar.mean_treated[1] / s2_ar.mean_treated[0];
  const double er_ratio = s2_er.mean_treated[1] / s2_er.mean_treated[0];
  check(ar_ratio >= 1.3 * er_ratio,
        "scenario 2 RE optimal/non-optimal allocation: AR %.2f vs ER %.2f (need >= 1.3x, "
        "published 2.07 vs 1.01)",
        ar_ratio, er_ratio);

  const auto s1 = make_scenario(0);
  opts.design = DesignKind::Ar;
  const auto s1_ar = run_replicates(s1, cfg, opts);
  opts.design = DesignKind::Separate;
  const auto s1_sep = run_replicates(s1, cfg, opts);
  check(s1_sep.sel_pct[0] > s1_ar.sel_pct[0],
        "scenario 1 RE standard selection: separate %.1f%% vs AR %.1f%% (published 54 vs "
        "47.7)",
        s1_sep.sel_pct[0], s1_ar.sel_pct[0]);
  return verdict(6, "design-comparison directions");
}

// ---------------------------------------------------------------------------
int criterion7() {
  std::printf("engine invariants across randomized configurations\n");
  Rng rng(777001);

  // event-probability partition on random parameters (smooth regime)
  {
    double worst = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
      ModelParams p;
      p.alpha = {1.0 + 3.0 * rng.uniform(), 1.0 + 3.0 * rng.uniform()};
      p.beta = {0.01 + 3.0 * rng.uniform(), 0.01 + 3.0 * rng.uniform()};
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 3; ++l) p.gamma[k][l] = rng.normal();
      const int w = rep % 2;
      const int d = candidate_doses(w)[(rep / 2) % 2];
      const auto e = event_probabilities(w, d, p, 1.0);
      worst = std::max(worst, std::abs(e[0] + e[1] + e[2] + e[3] + e[4] - 1.0));
    }
    check(worst < 1e-8, "event-probability partition: worst |sum - 1| = %.3e", worst);
  }

  int legality_violations = 0, cap_violations = 0, closure_violations = 0;
  int randprob_violations = 0, determinism_violations = 0, failures = 0;
  for (int conf = 0; conf < 100; ++conf) {
    ScenarioSpec sc;
    sc.name = "prop" + std::to_string(conf);
    sc.p_re = 0.2 + 0.6 * rng.uniform();
    for (int arm = 0; arm < kNumArms; ++arm) {
      const double total = 0.05 + 0.8 * rng.uniform();
      const double split = rng.uniform();
      sc.targets[arm].cir = {total * split, total * (1.0 - split)};
    }
    DesignConfig cfg;
    cfg.cohort_size = 2 + static_cast<int>(rng.uniform() * 5.0);
    cfg.n_cohorts_total = 4 + static_cast<int>(rng.uniform() * 7.0);
    cfg.n1 = 1 + static_cast<int>(rng.uniform() * 3.0);
    cfg.n1 = std::min(cfg.n1, cfg.n_cohorts_total - 1);
    cfg.tau = {0.25 + 0.25 * rng.uniform(), 0.25 + 0.25 * rng.uniform()};
    cfg.q = {0.8 + 0.17 * rng.uniform(), 0.8 + 0.17 * rng.uniform()};
    cfg.mcmc.n_iter = 300;
    cfg.mcmc.n_burn = 150;
    const DesignKind kind = conf % 3 == 0   ? DesignKind::Ar
                            : conf % 3 == 1 ? DesignKind::Er
                                            : DesignKind::Separate;
    try {
      calibrate_scenario(sc);
      const std::uint64_t seed = derive_seed(424243, conf);
      const auto a = run_trial(sc, cfg, kind, seed);
      const auto b = run_trial(sc, cfg, kind, seed);
      determinism_violations += a.to_json() != b.to_json();

      double treated = 0.0;
      for (int arm = 0; arm < kNumArms; ++arm) treated += a.n_treated[arm];
      cap_violations += treated > cfg.cohort_size * cfg.n_cohorts_total;
      cap_violations += a.n_enrolled != static_cast<int>(treated);

      // dose legality is structural (arm indexing rejects illegal pairs),
      // and selections must come from the subgroup's candidate set
      for (int w = 0; w < 2; ++w)
        if (a.selection[w] >= 0) legality_violations += !dose_allowed(w, a.selection[w]);

      std::array<bool, 2> open{true, true};
      for (const auto& recd : a.history) {
        for (int w = 0; w < 2; ++w) {
          if (!open[w] && recd.sub[w].open) ++closure_violations;
          if (recd.sub[w].closed_now) open[w] = false;
          if (recd.sub[w].open && recd.sub[w].admissible.size() == 2) {
            const double sum = recd.sub[w].rand_prob[0] + recd.sub[w].rand_prob[1];
            if (std::abs(sum - 1.0) > 1e-9 || recd.sub[w].rand_prob[0] < 0.0 ||
                recd.sub[w].rand_prob[1] < 0.0)
              ++randprob_violations;
          }
        }
      }
    } catch (const std::exception& e) {
      ++failures;
      std::printf("  config %d raised: %s\n", conf, e.what());
    }
  }
  check(failures == 0, "randomized configs: %d unexpected failures", failures);
  check(legality_violations == 0, "dose legality violations: %d", legality_violations);
  check(cap_violations == 0, "sample-size cap violations: %d", cap_violations);
  check(closure_violations == 0, "enrollment closure violations: %d", closure_violations);
  check(randprob_violations == 0, "randomization distribution violations: %d",
        randprob_violations);
  check(determinism_violations == 0, "determinism violations: %d", determinism_violations);
  return verdict(7, "engine invariants");
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <criterion 1..7>\n", argv[0]);
    return 2;
  }
  const int criterion = std::atoi(argv[1]);
  switch (criterion) {
    case 1: return criterion1();
    case 2: return criterion2();
    case 3: return criterion3();
    case 4: return criterion4();
    case 5: return criterion5();
    case 6: return criterion6();
    case 7: return criterion7();
    default:
      std::fprintf(stderr, "unknown criterion %d\n", criterion);
      return 2;
  }
}
