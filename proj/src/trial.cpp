#include "crtsim/trial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

#include "crtsim/decision.hpp"

namespace crtsim {

ObservedData observable_data(const std::vector<LatentPatient>& patients, double t_now,
                             double nu) {
  ObservedData out;
  out.records.reserve(patients.size());
  out.fu.reserve(patients.size());
  for (const auto& p : patients) {
    const double elapsed = t_now - p.enroll_time;
    if (!(elapsed > 0.0)) continue;  // enrolled this instant: nothing observable
    const double fu = std::min(elapsed, nu);
    out.records.push_back(observe(p.event, p.w, p.d, fu, p.enroll_time));
    out.fu.push_back(fu);
  }
  return out;
}

DecisionStats analyze_data(const ObservedData& data, const DesignConfig& cfg,
                           const TrialOptions& opts, std::uint64_t trial_seed,
                           int analysis_index) {
  if (opts.design == DesignKind::Separate) {
    const auto draws = separate_design_posterior(
        data, cfg.prior, cfg.mcmc,
        derive_seed(trial_seed, 2000 + 2 * static_cast<std::uint64_t>(analysis_index)),
        derive_seed(trial_seed, 2000 + 2 * static_cast<std::uint64_t>(analysis_index) + 1),
        opts.separate_convention);
    return separate_decision_stats(draws, cfg.weights, cfg.tau, cfg.nu,
                                   opts.separate_renormalize);
  }
  McmcConfig mc = cfg.mcmc;
  mc.seed = derive_seed(trial_seed, 1000 + static_cast<std::uint64_t>(analysis_index));
  const auto draws = sample_posterior(data.records, cfg.prior, mc);
  return decision_stats(draws, cfg.weights, cfg.tau, cfg.nu);
}

namespace {

// Interim bookkeeping for one subgroup given fresh posterior stats.
SubgroupInterim evaluate_subgroup(int w, bool open, const DecisionStats& stats,
                                  const DesignConfig& cfg, const TrialOptions& opts) {
  SubgroupInterim si;
  si.open = open;
  const auto cands = candidate_doses(w);
  for (int i = 0; i < 2; ++i) {
    const auto& arm = stats.arm[arm_index(w, cands[i])];
    si.utility[i] = arm.mean_utility;
    si.exceed[i] = arm.exceed_frac;
  }
  if (!open) return si;
  si.admissible = admissible_set(w, stats, cfg);
  if (si.admissible.empty()) {
    si.closed_now = true;
    return si;
  }
  auto probs = randomization_probabilities(w, si.admissible, stats, cfg);
  if (opts.design == DesignKind::Er && probs.size() == 2) {
    probs[0].second = 0.5;
    probs[1].second = 0.5;
  }
  for (const auto& [dose, prob] : probs)
    for (int i = 0; i < 2; ++i)
      if (cands[i] == dose) si.rand_prob[i] = prob;
  return si;
}

}  // namespace

void enroll_cohort(TrialState& state, const ScenarioSpec& scenario,
                   const DesignConfig& cfg, const TrialOptions& opts) {
  if (!scenario.calibrated)
    throw std::invalid_argument("scenario must be calibrated before simulation");
  if (state.cohort_index >= cfg.n_cohorts_total)
    throw std::logic_error("all cohorts already enrolled");
  const double t_now = state.cohort_index * cfg.cohort_interval;

  InterimRecord rec;
  bool have_interim = false;
  if (state.cohort_index >= cfg.n1 && (state.open[0] || state.open[1])) {
    const auto data = observable_data(state.patients, t_now, cfg.nu);
    const auto stats = analyze_data(data, cfg, opts, state.seed, state.analysis_count);
    ++state.analysis_count;
    rec.cohort_index = state.cohort_index;
    rec.calendar_time = t_now;
    for (int w = 0; w < 2; ++w) {
      rec.sub[w] = evaluate_subgroup(w, state.open[w], stats, cfg, opts);
      if (rec.sub[w].closed_now) {
        state.open[w] = false;
        state.early_stop[w] = true;
      }
    }
    state.history.push_back(rec);
    have_interim = true;
  }

  for (int slot = 0; slot < cfg.cohort_size; ++slot) {
    const double uw = state.rng.uniform();
    const int w = uw < scenario.p_re ? kSubgroupRe : kSubgroupSe;
    if (!state.open[w]) continue;  // skipped, not replaced
    const auto cands = candidate_doses(w);
    int dose;
    if (!have_interim) {
      dose = state.rng.uniform() < 0.5 ? cands[0] : cands[1];
    } else {
      const auto& si = rec.sub[w];
      if (si.admissible.size() == 1) {
        dose = si.admissible[0];
      } else {
        // Two admissible doses: draw from the recorded probabilities.
        const double p_first = si.rand_prob[0];
        dose = state.rng.uniform() < p_first ? cands[0] : cands[1];
      }
    }
    LatentPatient p;
    p.w = w;
    p.d = dose;
    p.enroll_time = t_now;
    p.event = draw_event(scenario.arms[arm_index(w, dose)], state.rng);
    state.patients.push_back(p);
  }
  ++state.cohort_index;
}

TrialResult finalize_trial(TrialState& state, const ScenarioSpec& scenario,
                           const DesignConfig& cfg, const TrialOptions& opts) {
  (void)scenario;  // latent outcomes already live in state.patients
  TrialResult res;
  res.seed = state.seed;
  res.early_stop = state.early_stop;

  double last_enroll = 0.0;
  for (const auto& p : state.patients) last_enroll = std::max(last_enroll, p.enroll_time);
  const double t_final = last_enroll + cfg.nu;

  const auto data = observable_data(state.patients, t_final, cfg.nu);
  const auto stats = analyze_data(data, cfg, opts, state.seed, state.analysis_count);
  ++state.analysis_count;

  InterimRecord rec;
  rec.cohort_index = state.cohort_index;
  rec.calendar_time = t_final;
  rec.is_final = true;
  for (int w = 0; w < 2; ++w) {
    rec.sub[w] = evaluate_subgroup(w, state.open[w], stats, cfg, opts);
    if (!state.open[w]) continue;  // terminated subgroups select nothing
    const auto sel = final_selection(w, rec.sub[w].admissible, stats, cfg);
    res.selection[w] = sel ? *sel : -1;
  }
  state.history.push_back(rec);

  res.history = state.history;
  res.n_enrolled = static_cast<int>(state.patients.size());
  for (const auto& p : state.patients) {
    const int arm = arm_index(p.w, p.d);
    res.n_treated[arm] += 1.0;
    if (p.event.cause != 0 && p.event.t <= cfg.nu)
      res.events[arm][p.event.cause - 1] += 1.0;
  }
  return res;
}

TrialResult run_trial(const ScenarioSpec& scenario, const DesignConfig& cfg,
                      const TrialOptions& opts, std::uint64_t seed) {
  cfg.validate();
  scenario.validate_targets();
  TrialState state(seed);
  while (state.cohort_index < cfg.n_cohorts_total && (state.open[0] || state.open[1]))
    enroll_cohort(state, scenario, cfg, opts);
  return finalize_trial(state, scenario, cfg, opts);
}

TrialResult run_trial(const ScenarioSpec& scenario, const DesignConfig& cfg,
                      DesignKind design, std::uint64_t seed) {
  TrialOptions opts;
  opts.design = design;
  return run_trial(scenario, cfg, opts, seed);
}

std::string TrialResult::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["selection"] = {selection[0], selection[1]};
  j["early_stop"] = {early_stop[0], early_stop[1]};
  j["n_enrolled"] = n_enrolled;
  for (int arm = 0; arm < kNumArms; ++arm) {
    nlohmann::json a;
    a["n_treated"] = n_treated[arm];
    a["events_dp"] = events[arm][0];
    a["events_nc"] = events[arm][1];
    j["arms"][arm_name(arm)] = a;
  }
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& rec : history) {
    nlohmann::json r;
    r["cohort"] = rec.cohort_index;
    r["time"] = rec.calendar_time;
    r["final"] = rec.is_final;
    for (int w = 0; w < 2; ++w) {
      nlohmann::json s;
      s["open"] = rec.sub[w].open;
      s["closed_now"] = rec.sub[w].closed_now;
      s["admissible"] = rec.sub[w].admissible;
      s["utility"] = rec.sub[w].utility;
      s["rand_prob"] = rec.sub[w].rand_prob;
      s["exceed"] = {rec.sub[w].exceed[0], rec.sub[w].exceed[1]};
      r[w == kSubgroupRe ? "re" : "se"] = s;
    }
    hist.push_back(r);
  }
  j["history"] = hist;
  return j.dump();
}

}  // namespace crtsim
