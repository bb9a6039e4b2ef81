#include <doctest.h>

#include <cmath>

#include "crtsim/calibrate.hpp"
#include "crtsim/decision.hpp"
#include "crtsim/rng.hpp"

using namespace crtsim;

namespace {

// View a calibrated arm through the model parameterization at the reference
// arm (SE, low dose): shapes/rates carry over, hazard ratios vanish.
ModelParams as_model(const ArmGenerator& gen) {
  ModelParams p;
  for (int k = 0; k < 2; ++k) {
    p.alpha[k] = gen.cause[k].shape;
    p.beta[k] = gen.cause[k].rate;
  }
  return p;
}

ScenarioSpec scenario1() {
  ScenarioSpec sc;
  sc.name = "scenario1";
  sc.targets[0].cir = {0.2, 0.2};
  sc.targets[1].cir = {0.1, 0.3};
  sc.targets[2].cir = {0.3, 0.1};
  sc.targets[3].cir = {0.2, 0.2};
  return sc;
}

}  // namespace

TEST_CASE("calibration hits the target incidence and its half split") {
  const auto r = calibrate_arm({0.2, 0.2}, 0.5, Family::Weibull, 1.0);
  CHECK(r.residual < 1e-9);
  const auto full = generator_cir(r.gen, 1.0, 1.0);
  const auto half = generator_cir(r.gen, 0.5, 1.0);
  CHECK(full[0] == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(full[1] == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(half[0] == doctest::Approx(0.1).epsilon(1e-6));
  CHECK(half[1] == doctest::Approx(0.1).epsilon(1e-6));

  // symmetric targets give symmetric parameters
  CHECK(r.gen.cause[0].shape == doctest::Approx(r.gen.cause[1].shape).epsilon(1e-8));
  CHECK(r.gen.cause[0].rate == doctest::Approx(r.gen.cause[1].rate).epsilon(1e-8));
}

TEST_CASE("calibration: asymmetric targets against a Monte-Carlo oracle") {
  const auto r = calibrate_arm({0.3, 0.1}, 0.5, Family::Weibull, 1.0);
  CHECK(r.residual < 1e-9);
  Rng rng(12345);
  const int n = 100000;
  int hit[2] = {0, 0};
  for (int i = 0; i < n; ++i) {
    const auto ev = draw_event(r.gen, rng);
    if (ev.cause != 0 && ev.t <= 1.0) ++hit[ev.cause - 1];
  }
  CHECK(static_cast<double>(hit[0]) / n == doctest::Approx(0.3).epsilon(0.02));
  CHECK(static_cast<double>(hit[1]) / n == doctest::Approx(0.1).epsilon(0.05));
}

TEST_CASE("calibration rejects infeasible targets and handles zero targets") {
  CHECK_THROWS_AS(calibrate_arm({0.6, 0.5}, 0.5, Family::Weibull, 1.0), CalibrationError);

  const auto r = calibrate_arm({0.0, 0.0}, 0.5, Family::Weibull, 1.0);
  CHECK(r.gen.cause[0].rate == 0.0);
  const auto e = generator_event_probs(r.gen, 1.0);
  CHECK(e[4] == doctest::Approx(1.0));

  Rng rng(5);
  const auto ev = draw_event(r.gen, rng);
  CHECK(ev.cause == 0);
  const auto rec = observe(ev, 1, 0, 1.0, 0.0);
  CHECK(rec.x == 1.0);
  CHECK(rec.delta1 == 0);
  CHECK(rec.delta2 == 0);

  // one-sided targets
  const auto r2 = calibrate_arm({0.25, 0.0}, 0.5, Family::Weibull, 1.0);
  const auto full2 = generator_cir(r2.gen, 1.0, 1.0);
  CHECK(full2[0] == doctest::Approx(0.25).epsilon(1e-6));
  CHECK(full2[1] == 0.0);
}

TEST_CASE("log-logistic calibration satisfies the same constraints") {
  const auto r = calibrate_arm({0.3, 0.2}, 0.5, Family::LogLogistic, 1.0);
  CHECK(r.residual < 1e-9);
  const auto full = generator_cir(r.gen, 1.0, 1.0);
  const auto half = generator_cir(r.gen, 0.5, 1.0);
  CHECK(full[0] == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(half[0] == doctest::Approx(0.15).epsilon(1e-6));
  CHECK(full[1] == doctest::Approx(0.2).epsilon(1e-6));
  CHECK(half[1] == doctest::Approx(0.1).epsilon(1e-6));

  // inverse CDF really is the marginal quantile function
  Rng rng(77);
  int within = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i)
    within += r.gen.inv_cdf(1, rng.uniform()) <= 1.0;
  const double marginal = 1.0 - r.gen.survival(1, 1.0);
  CHECK(static_cast<double>(within) / n == doctest::Approx(marginal).epsilon(0.02));
}

TEST_CASE("nonstandard half fraction calibrates too") {
  const auto r = calibrate_arm({0.4, 0.1}, 0.7, Family::Weibull, 1.0);
  const auto half = generator_cir(r.gen, 0.5, 1.0);
  CHECK(half[0] == doctest::Approx(0.28).epsilon(1e-6));
  CHECK(half[1] == doctest::Approx(0.07).epsilon(1e-6));
}

TEST_CASE("scenario 1 arms reproduce the half-split probabilities and utilities") {
  ScenarioSpec sc = scenario1();
  calibrate_scenario(sc);
  REQUIRE(sc.calibrated);
  for (int arm = 0; arm < kNumArms; ++arm) CHECK(sc.residual[arm] < 1e-6);

  const auto e = generator_event_probs(sc.arms[0], 1.0);  // RE standard: (0.2, 0.2)
  CHECK(e[0] == doctest::Approx(0.1).epsilon(1e-6));
  CHECK(e[1] == doctest::Approx(0.1).epsilon(1e-6));
  CHECK(e[2] == doctest::Approx(0.1).epsilon(1e-6));
  CHECK(e[3] == doctest::Approx(0.1).epsilon(1e-6));
  CHECK(e[4] == doctest::Approx(0.6).epsilon(1e-6));

  UtilityWeights w;
  CHECK(generator_true_utility(sc.arms[0], w, 1.0) == doctest::Approx(63.5).epsilon(1e-5));

  // model-side view agrees with the generator view
  const auto em = event_probabilities(1, 0, as_model(sc.arms[0]), 1.0);
  for (int s = 0; s < 5; ++s) CHECK(em[s] == doctest::Approx(e[s]).epsilon(1e-9));

  // utility identity under an exact half split:
  // U = O5 + sum_k cir_k * ((O_k + O_{k+2})/2 - O5)
  for (int arm = 0; arm < kNumArms; ++arm) {
    const auto cir = sc.targets[arm].cir;
    const double identity = w.o[4] + cir[0] * (0.5 * (w.o[0] + w.o[2]) - w.o[4]) +
                            cir[1] * (0.5 * (w.o[1] + w.o[3]) - w.o[4]);
    CHECK(generator_true_utility(sc.arms[arm], w, 1.0) ==
          doctest::Approx(identity).epsilon(1e-6));
  }
}

TEST_CASE("scenario 5 high-dose RE utility lands on the published value") {
  auto r = calibrate_arm({0.05, 0.2}, 0.5, Family::Weibull, 1.0);
  UtilityWeights w;
  CHECK(generator_true_utility(r.gen, w, 1.0) == doctest::Approx(77.7).epsilon(0.0013));
}

TEST_CASE("observe truncates and censors correctly") {
  LatentEvent ev{0.7, 2};
  const auto rec1 = observe(ev, 0, 2, 1.0, 3.5);
  CHECK(rec1.x == doctest::Approx(0.7));
  CHECK(rec1.delta2 == 1);
  CHECK(rec1.enroll_time == 3.5);

  const auto rec2 = observe(ev, 0, 2, 0.5, 0.0);  // censored before the event
  CHECK(rec2.x == doctest::Approx(0.5));
  CHECK(rec2.delta1 == 0);
  CHECK(rec2.delta2 == 0);
}
