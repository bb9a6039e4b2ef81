#include <doctest.h>

#include <cmath>

#include "crtsim/calibrate.hpp"
#include "crtsim/trial.hpp"

using namespace crtsim;

namespace {

DesignConfig fast_cfg() {
  DesignConfig cfg;
  cfg.mcmc.n_iter = 500;
  cfg.mcmc.n_burn = 250;
  return cfg;
}

ScenarioSpec calibrated_scenario(std::array<std::array<double, 2>, kNumArms> cirs) {
  ScenarioSpec sc;
  for (int arm = 0; arm < kNumArms; ++arm) sc.targets[arm].cir = cirs[arm];
  calibrate_scenario(sc);
  return sc;
}

ScenarioSpec zero_hazard_scenario() {
  return calibrated_scenario({{{0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}}});
}

}  // namespace

TEST_CASE("observable data censors at the analysis horizon") {
  std::vector<LatentPatient> pts;
  pts.push_back({0, 1, 0.0, {0.9, 1}});   // event after current follow-up
  pts.push_back({0, 2, 0.0, {0.2, 2}});   // event already seen
  pts.push_back({1, 0, 0.5, {}});         // enrolled this instant: excluded
  const auto data = observable_data(pts, 0.5, 1.0);
  REQUIRE(data.records.size() == 2);
  CHECK(data.records[0].x == doctest::Approx(0.5));
  CHECK(data.records[0].delta1 == 0);
  CHECK(data.records[1].x == doctest::Approx(0.2));
  CHECK(data.records[1].delta2 == 1);

  // follow-up horizon never exceeds nu
  const auto late = observable_data(pts, 4.0, 1.0);
  REQUIRE(late.records.size() == 3);
  CHECK(late.records[0].x == doctest::Approx(0.9));  // event within nu now visible
  CHECK(late.records[0].delta1 == 1);
  CHECK(late.fu[0] == doctest::Approx(1.0));
}

TEST_CASE("first cohort randomizes equally with no posterior fit") {
  const auto sc = zero_hazard_scenario();
  const auto cfg = fast_cfg();
  TrialOptions opts;
  TrialState state(42);
  enroll_cohort(state, sc, cfg, opts);
  CHECK(state.history.empty());  // no interim during the equal phase
  CHECK(state.cohort_index == 1);
  CHECK(state.patients.size() == static_cast<std::size_t>(cfg.cohort_size));
  for (const auto& p : state.patients) CHECK(dose_allowed(p.w, p.d));
}

TEST_CASE("interim with a singleton admissible set assigns deterministically") {
  // Overwhelming early NC events at the RE high dose force A0 = {standard}.
  auto sc = zero_hazard_scenario();
  const auto cfg = fast_cfg();
  TrialOptions opts;
  TrialState state(7);
  for (int i = 0; i < 30; ++i) state.patients.push_back({0, 2, 0.0, {0.05, 2}});
  for (int i = 0; i < 10; ++i) state.patients.push_back({0, 1, 0.0, {}});
  for (int i = 0; i < 10; ++i) state.patients.push_back({1, 0, 0.0, {}});
  for (int i = 0; i < 10; ++i) state.patients.push_back({1, 1, 0.0, {}});
  state.cohort_index = cfg.n1;  // next cohort runs an interim at t = n1 * interval

  const std::size_t before = state.patients.size();
  enroll_cohort(state, sc, cfg, opts);
  REQUIRE(state.history.size() == 1);
  const auto& interim = state.history[0];
  CHECK(interim.sub[0].admissible == std::vector<int>{kDoseStandard});
  for (std::size_t i = before; i < state.patients.size(); ++i)
    if (state.patients[i].w == kSubgroupRe) CHECK(state.patients[i].d == kDoseStandard);
}

TEST_CASE("an empty admissible set closes the subgroup for good") {
  auto sc = zero_hazard_scenario();
  const auto cfg = fast_cfg();
  TrialOptions opts;
  TrialState state(11);
  // both SE arms packed with early events of both causes
  for (int i = 0; i < 20; ++i) state.patients.push_back({1, 0, 0.0, {0.05, 1}});
  for (int i = 0; i < 20; ++i) state.patients.push_back({1, 0, 0.0, {0.08, 2}});
  for (int i = 0; i < 20; ++i) state.patients.push_back({1, 1, 0.0, {0.05, 1}});
  for (int i = 0; i < 20; ++i) state.patients.push_back({1, 1, 0.0, {0.08, 2}});
  state.cohort_index = cfg.n1;

  enroll_cohort(state, sc, cfg, opts);
  CHECK(state.history[0].sub[1].closed_now);
  CHECK(!state.open[1]);
  CHECK(state.early_stop[1]);
  for (std::size_t i = 80; i < state.patients.size(); ++i)
    CHECK(state.patients[i].w == kSubgroupRe);

  // closure is monotone: further cohorts never reopen SE
  while (state.cohort_index < cfg.n_cohorts_total) enroll_cohort(state, sc, cfg, opts);
  for (const auto& rec : state.history)
    if (!rec.sub[1].open) CHECK(!rec.sub[1].closed_now);
  CHECK(!state.open[1]);
}

TEST_CASE("zero-hazard scenario: full enrollment, no stops, everything admissible") {
  const auto sc = zero_hazard_scenario();
  const auto cfg = fast_cfg();
  const auto result = run_trial(sc, cfg, DesignKind::Ar, 314);
  CHECK(result.n_enrolled == cfg.cohort_size * cfg.n_cohorts_total);
  CHECK(!result.early_stop[0]);
  CHECK(!result.early_stop[1]);
  CHECK(result.selection[0] >= 0);
  CHECK(result.selection[1] >= 0);
  for (const auto& rec : result.history) {
    CHECK(rec.sub[0].admissible.size() == 2);
    CHECK(rec.sub[1].admissible.size() == 2);
  }
  // no events anywhere
  for (int arm = 0; arm < kNumArms; ++arm) {
    CHECK(result.events[arm][0] == 0.0);
    CHECK(result.events[arm][1] == 0.0);
  }
}

TEST_CASE("trials are deterministic byte for byte") {
  const auto sc = calibrated_scenario({{{0.2, 0.2}, {0.1, 0.3}, {0.3, 0.1}, {0.2, 0.2}}});
  const auto cfg = fast_cfg();
  for (DesignKind kind : {DesignKind::Ar, DesignKind::Er, DesignKind::Separate}) {
    const auto a = run_trial(sc, cfg, kind, 2025);
    const auto b = run_trial(sc, cfg, kind, 2025);
    CHECK(a.to_json() == b.to_json());
    const auto c = run_trial(sc, cfg, kind, 2026);
    CHECK(a.to_json() != c.to_json());
  }
}

TEST_CASE("trial invariants: legality, cap, monotone closure, recorded probabilities") {
  const auto sc = calibrated_scenario({{{0.3, 0.1}, {0.2, 0.6}, {0.6, 0.1}, {0.2, 0.6}}});
  DesignConfig cfg = fast_cfg();
  cfg.n_cohorts_total = 10;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto res = run_trial(sc, cfg, DesignKind::Ar, seed);
    CHECK(res.n_enrolled <= cfg.cohort_size * cfg.n_cohorts_total);
    double treated = 0.0;
    for (int arm = 0; arm < kNumArms; ++arm) treated += res.n_treated[arm];
    CHECK(treated == doctest::Approx(res.n_enrolled));
    std::array<bool, 2> open{true, true};
    for (const auto& rec : res.history) {
      for (int w = 0; w < 2; ++w) {
        if (!open[w]) CHECK(!rec.sub[w].open);  // never reopens
        if (rec.sub[w].closed_now) open[w] = false;
        if (rec.sub[w].open && rec.sub[w].admissible.size() == 2) {
          CHECK(rec.sub[w].rand_prob[0] + rec.sub[w].rand_prob[1] ==
                doctest::Approx(1.0).epsilon(1e-12));
          CHECK(rec.sub[w].rand_prob[0] >= 0.0);
        }
      }
    }
  }
}

TEST_CASE("er design fixes two-dose randomization at one half") {
  const auto sc = calibrated_scenario({{{0.2, 0.2}, {0.1, 0.3}, {0.3, 0.1}, {0.2, 0.2}}});
  const auto cfg = fast_cfg();
  const auto res = run_trial(sc, cfg, DesignKind::Er, 99);
  bool saw_pair = false;
  for (const auto& rec : res.history)
    for (int w = 0; w < 2; ++w)
      if (rec.sub[w].open && rec.sub[w].admissible.size() == 2) {
        saw_pair = true;
        CHECK(rec.sub[w].rand_prob[0] == doctest::Approx(0.5));
        CHECK(rec.sub[w].rand_prob[1] == doctest::Approx(0.5));
      }
  CHECK(saw_pair);
}
