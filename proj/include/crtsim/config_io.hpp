#pragma once
// File formats: INI-style scenario and design configs (diff-able, re-emitted
// byte-identically), patient-record CSV, operating-characteristic CSV tables
// with fixed 4-decimal formatting, sensitivity plot data, and run manifests.

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "crtsim/generators.hpp"
#include "crtsim/simulate.hpp"
#include "crtsim/types.hpp"

namespace crtsim {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- scenario files ---------------------------------------------------------
ScenarioSpec parse_scenario_string(const std::string& text, const std::string& origin);
ScenarioSpec read_scenario_file(const std::string& path);
std::string scenario_to_string(const ScenarioSpec& scenario);
void write_scenario_file(const std::string& path, const ScenarioSpec& scenario);

// --- design config files ----------------------------------------------------
DesignConfig parse_design_string(const std::string& text, const std::string& origin);
DesignConfig read_design_file(const std::string& path);
std::string design_to_string(const DesignConfig& cfg);

// --- patient record CSV -----------------------------------------------------
// Header: w,d,x,delta1,delta2[,enroll_time]. Errors carry 1-based row numbers.
std::vector<PatientRecord> parse_patient_csv(const std::string& text,
                                             const std::string& origin);
std::vector<PatientRecord> read_patient_csv(const std::string& path);

// --- operating characteristic tables ----------------------------------------
// Columns: design,scenario,subgroup,dose,selection_pct,mean_n_treated,mean_dp,
// mean_nc,early_stop_pct,n_reps,seed. Each subgroup contributes its two arm
// rows plus a "none" row so selection percentages partition to 100.
std::string oc_csv(const std::vector<OperatingCharacteristics>& ocs);

// Sweep table (axis/value columns prepended) and the plot-data file with two
// columns (x, y) per series: selection percentage and within-subgroup
// allocation proportion for each arm.
std::string sweep_csv(SweepAxis axis, const std::vector<SweepPoint>& points);
std::string sweep_plot_csv(const std::vector<SweepPoint>& points);

// --- misc -------------------------------------------------------------------
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

std::uint64_t fnv1a64(const std::string& bytes);
std::string digest_hex(const std::string& bytes);

// JSON manifest describing one CLI run; output tables reference the digest.
std::string manifest_json(const std::string& command, const std::string& config_digest,
                          std::uint64_t master_seed,
                          const std::vector<std::pair<std::string, std::string>>& outputs,
                          const std::string& started, const std::string& finished);

std::string utc_timestamp();

}  // namespace crtsim
