#include "crtsim/config_io.hpp"

#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace crtsim {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

struct IniEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

std::vector<IniEntry> parse_ini(const std::string& text, const std::string& origin) {
  std::vector<IniEntry> entries;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError(origin + ":" + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    entries.push_back({section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno});
  }
  return entries;
}

double to_double(const IniEntry& e, const std::string& origin) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(e.value, &pos);
    if (pos != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ParseError(origin + ":" + std::to_string(e.line) + ": key '" + e.key +
                     "' expects a number, got '" + e.value + "'");
  }
}

int to_int(const IniEntry& e, const std::string& origin) {
  const double v = to_double(e, origin);
  const int i = static_cast<int>(v);
  if (i != v)
    throw ParseError(origin + ":" + std::to_string(e.line) + ": key '" + e.key +
                     "' expects an integer");
  return i;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt4(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

int arm_from_section(const std::string& section) {
  for (int arm = 0; arm < kNumArms; ++arm)
    if (section == "arm " + arm_name(arm)) return arm;
  return -1;
}

const char* dose_label(int d) {
  switch (d) {
    case kDoseLow: return "low";
    case kDoseStandard: return "standard";
    case kDoseHigh: return "high";
  }
  return "none";
}

}  // namespace

ScenarioSpec parse_scenario_string(const std::string& text, const std::string& origin) {
  ScenarioSpec sc;
  std::array<std::array<bool, 2>, kNumArms> have_cir{};
  std::array<int, kNumArms> have_params{};
  bool calibrated_flag = false;

  for (const auto& e : parse_ini(text, origin)) {
    if (e.section == "scenario") {
      if (e.key == "name") sc.name = e.value;
      else if (e.key == "family") {
        if (!parse_family(e.value, sc.family))
          throw ParseError(origin + ":" + std::to_string(e.line) + ": unknown family '" +
                           e.value + "'");
      } else if (e.key == "nu") sc.nu = to_double(e, origin);
      else if (e.key == "half_fraction") sc.half_fraction = to_double(e, origin);
      else if (e.key == "re_proportion") sc.p_re = to_double(e, origin);
      else if (e.key == "calibrated") calibrated_flag = to_int(e, origin) != 0;
      else
        throw ParseError(origin + ":" + std::to_string(e.line) + ": unknown scenario key '" +
                         e.key + "'");
      continue;
    }
    const int arm = arm_from_section(e.section);
    if (arm < 0)
      throw ParseError(origin + ":" + std::to_string(e.line) + ": unknown section [" +
                       e.section + "]");
    auto& gen = sc.arms[arm];
    if (e.key == "cir_dp") { sc.targets[arm].cir[0] = to_double(e, origin); have_cir[arm][0] = true; }
    else if (e.key == "cir_nc") { sc.targets[arm].cir[1] = to_double(e, origin); have_cir[arm][1] = true; }
    else if (e.key == "shape_dp") { gen.cause[0].shape = to_double(e, origin); ++have_params[arm]; }
    else if (e.key == "rate_dp") { gen.cause[0].rate = to_double(e, origin); ++have_params[arm]; }
    else if (e.key == "shape_nc") { gen.cause[1].shape = to_double(e, origin); ++have_params[arm]; }
    else if (e.key == "rate_nc") { gen.cause[1].rate = to_double(e, origin); ++have_params[arm]; }
    else if (e.key == "residual") sc.residual[arm] = to_double(e, origin);
    else
      throw ParseError(origin + ":" + std::to_string(e.line) + ": unknown arm key '" + e.key +
                       "'");
  }

  for (int arm = 0; arm < kNumArms; ++arm) {
    if (!have_cir[arm][0] || !have_cir[arm][1])
      throw ParseError(origin + ": arm " + arm_name(arm) + " is missing cir_dp/cir_nc");
    sc.arms[arm].family = sc.family;
    if (calibrated_flag && have_params[arm] != 4)
      throw ParseError(origin + ": arm " + arm_name(arm) +
                       " marked calibrated but missing generator parameters");
  }
  sc.calibrated = calibrated_flag;
  // Structural checks only; target feasibility (cir_dp + cir_nc < 1) is the
  // calibrator's contract so it can fail with the calibration exit status.
  for (int arm = 0; arm < kNumArms; ++arm)
    for (int k = 0; k < 2; ++k) {
      const double v = sc.targets[arm].cir[k];
      if (!(v >= 0.0) || !(v < 1.0))
        throw ParseError(origin + ": arm " + arm_name(arm) + ": CIR targets must lie in [0,1)");
    }
  if (!(sc.nu > 0.0) || !(sc.half_fraction > 0.0) || !(sc.half_fraction < 1.0) ||
      !(sc.p_re >= 0.0) || !(sc.p_re <= 1.0))
    throw ParseError(origin + ": nu, half_fraction or re_proportion out of range");
  return sc;
}

ScenarioSpec read_scenario_file(const std::string& path) {
  return parse_scenario_string(read_text_file(path), path);
}

std::string scenario_to_string(const ScenarioSpec& scenario) {
  std::ostringstream out;
  out << "[scenario]\n";
  out << "name = " << scenario.name << "\n";
  out << "family = " << family_name(scenario.family) << "\n";
  out << "nu = " << fmt17(scenario.nu) << "\n";
  out << "half_fraction = " << fmt17(scenario.half_fraction) << "\n";
  out << "re_proportion = " << fmt17(scenario.p_re) << "\n";
  out << "calibrated = " << (scenario.calibrated ? 1 : 0) << "\n";
  for (int arm = 0; arm < kNumArms; ++arm) {
    out << "\n[arm " << arm_name(arm) << "]\n";
    out << "cir_dp = " << fmt17(scenario.targets[arm].cir[0]) << "\n";
    out << "cir_nc = " << fmt17(scenario.targets[arm].cir[1]) << "\n";
    if (scenario.calibrated) {
      const auto& gen = scenario.arms[arm];
      out << "shape_dp = " << fmt17(gen.cause[0].shape) << "\n";
      out << "rate_dp = " << fmt17(gen.cause[0].rate) << "\n";
      out << "shape_nc = " << fmt17(gen.cause[1].shape) << "\n";
      out << "rate_nc = " << fmt17(gen.cause[1].rate) << "\n";
      out << "residual = " << fmt17(scenario.residual[arm]) << "\n";
    }
  }
  return out.str();
}

void write_scenario_file(const std::string& path, const ScenarioSpec& scenario) {
  write_text_file(path, scenario_to_string(scenario));
}

DesignConfig parse_design_string(const std::string& text, const std::string& origin) {
  DesignConfig cfg;
  for (const auto& e : parse_ini(text, origin)) {
    if (e.section == "design") {
      if (e.key == "nu") cfg.nu = to_double(e, origin);
      else if (e.key == "n1") cfg.n1 = to_int(e, origin);
      else if (e.key == "cohort_size") cfg.cohort_size = to_int(e, origin);
      else if (e.key == "n_cohorts_total") cfg.n_cohorts_total = to_int(e, origin);
      else if (e.key == "tau_dp") cfg.tau[0] = to_double(e, origin);
      else if (e.key == "tau_nc") cfg.tau[1] = to_double(e, origin);
      else if (e.key == "q_dp") cfg.q[0] = to_double(e, origin);
      else if (e.key == "q_nc") cfg.q[1] = to_double(e, origin);
      else if (e.key == "mu_re") cfg.mu0 = to_double(e, origin);
      else if (e.key == "mu_se") cfg.mu1 = to_double(e, origin);
      else if (e.key == "cohort_interval") cfg.cohort_interval = to_double(e, origin);
      else
        throw ParseError(origin + ":" + std::to_string(e.line) + ": unknown design key '" +
                         e.key + "'");
    } else if (e.section == "weights") {
      if (e.key.size() == 2 && e.key[0] == 'o' && e.key[1] >= '1' && e.key[1] <= '5')
        cfg.weights.o[e.key[1] - '1'] = to_double(e, origin);
      else
        throw ParseError(origin + ":" + std::to_string(e.line) + ": unknown weights key '" +
                         e.key + "'");
    } else if (e.section == "prior") {
      if (e.key == "a") cfg.prior.a = to_double(e, origin);
      else if (e.key == "b") cfg.prior.b = to_double(e, origin);
      else if (e.key == "c") cfg.prior.c = to_double(e, origin);
      else
        throw ParseError(origin + ":" + std::to_string(e.line) + ": unknown prior key '" +
                         e.key + "'");
    } else if (e.section == "mcmc") {
      if (e.key == "n_iter") cfg.mcmc.n_iter = to_int(e, origin);
      else if (e.key == "n_burn") cfg.mcmc.n_burn = to_int(e, origin);
      else if (e.key == "thin") cfg.mcmc.thin = to_int(e, origin);
      else if (e.key == "target_accept") cfg.mcmc.target_accept = to_double(e, origin);
      else if (e.key == "adapt_window") cfg.mcmc.adapt_window = to_int(e, origin);
      else
        throw ParseError(origin + ":" + std::to_string(e.line) + ": unknown mcmc key '" +
                         e.key + "'");
    } else {
      throw ParseError(origin + ":" + std::to_string(e.line) + ": unknown section [" +
                       e.section + "]");
    }
  }
  cfg.validate();
  return cfg;
}

DesignConfig read_design_file(const std::string& path) {
  return parse_design_string(read_text_file(path), path);
}

std::string design_to_string(const DesignConfig& cfg) {
  std::ostringstream out;
  out << "[design]\n";
  out << "nu = " << fmt17(cfg.nu) << "\n";
  out << "n1 = " << cfg.n1 << "\n";
  out << "cohort_size = " << cfg.cohort_size << "\n";
  out << "n_cohorts_total = " << cfg.n_cohorts_total << "\n";
  out << "tau_dp = " << fmt17(cfg.tau[0]) << "\n";
  out << "tau_nc = " << fmt17(cfg.tau[1]) << "\n";
  out << "q_dp = " << fmt17(cfg.q[0]) << "\n";
  out << "q_nc = " << fmt17(cfg.q[1]) << "\n";
  out << "mu_re = " << fmt17(cfg.mu0) << "\n";
  out << "mu_se = " << fmt17(cfg.mu1) << "\n";
  out << "cohort_interval = " << fmt17(cfg.cohort_interval) << "\n";
  out << "\n[weights]\n";
  for (int s = 0; s < 5; ++s)
    out << "o" << s + 1 << " = " << fmt17(cfg.weights.o[s]) << "\n";
  out << "\n[prior]\n";
  out << "a = " << fmt17(cfg.prior.a) << "\n";
  out << "b = " << fmt17(cfg.prior.b) << "\n";
  out << "c = " << fmt17(cfg.prior.c) << "\n";
  out << "\n[mcmc]\n";
  out << "n_iter = " << cfg.mcmc.n_iter << "\n";
  out << "n_burn = " << cfg.mcmc.n_burn << "\n";
  out << "thin = " << cfg.mcmc.thin << "\n";
  out << "target_accept = " << fmt17(cfg.mcmc.target_accept) << "\n";
  out << "adapt_window = " << cfg.mcmc.adapt_window << "\n";
  return out.str();
}

std::vector<PatientRecord> parse_patient_csv(const std::string& text,
                                             const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::vector<PatientRecord> out;
  bool header_seen = false;
  bool has_enroll = false;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) fields.push_back(trim(cell));
    if (!header_seen) {
      if (fields.size() < 5 || fields[0] != "w" || fields[1] != "d" || fields[2] != "x" ||
          fields[3] != "delta1" || fields[4] != "delta2")
        throw ParseError(origin + ":" + std::to_string(lineno) +
                         ": expected header w,d,x,delta1,delta2[,enroll_time]");
      has_enroll = fields.size() >= 6 && fields[5] == "enroll_time";
      header_seen = true;
      continue;
    }
    const std::size_t expect = has_enroll ? 6 : 5;
    if (fields.size() != expect)
      throw ParseError(origin + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(expect) + " fields, got " +
                       std::to_string(fields.size()));
    PatientRecord rec;
    try {
      rec.w = std::stoi(fields[0]);
      rec.d = std::stoi(fields[1]);
      rec.x = std::stod(fields[2]);
      rec.delta1 = std::stoi(fields[3]);
      rec.delta2 = std::stoi(fields[4]);
      if (has_enroll) rec.enroll_time = std::stod(fields[5]);
    } catch (...) {
      throw ParseError(origin + ":" + std::to_string(lineno) + ": malformed numeric field");
    }
    try {
      validate_record(rec);
    } catch (const std::exception& ex) {
      throw ParseError(origin + ":" + std::to_string(lineno) + ": " + ex.what());
    }
    out.push_back(rec);
  }
  if (!header_seen) throw ParseError(origin + ": empty patient file");
  return out;
}

std::vector<PatientRecord> read_patient_csv(const std::string& path) {
  return parse_patient_csv(read_text_file(path), path);
}

namespace {

void oc_rows(std::ostringstream& out, const std::string& prefix,
             const OperatingCharacteristics& oc) {
  for (int w = 0; w < 2; ++w) {
    const char* sub = w == kSubgroupRe ? "re" : "se";
    for (int d : candidate_doses(w)) {
      const int arm = arm_index(w, d);
      out << prefix << oc.design << "," << oc.scenario << "," << sub << "," << dose_label(d)
          << "," << fmt4(oc.sel_pct[arm]) << "," << fmt4(oc.mean_treated[arm]) << ","
          << fmt4(oc.mean_dp[arm]) << "," << fmt4(oc.mean_nc[arm]) << ","
          << fmt4(oc.early_stop_pct[w]) << "," << oc.n_reps << "," << oc.master_seed << "\n";
    }
    out << prefix << oc.design << "," << oc.scenario << "," << sub << ",none,"
        << fmt4(oc.none_pct[w]) << "," << fmt4(0.0) << "," << fmt4(0.0) << "," << fmt4(0.0)
        << "," << fmt4(oc.early_stop_pct[w]) << "," << oc.n_reps << "," << oc.master_seed
        << "\n";
  }
}

}  // namespace

std::string oc_csv(const std::vector<OperatingCharacteristics>& ocs) {
  std::ostringstream out;
  out << "design,scenario,subgroup,dose,selection_pct,mean_n_treated,mean_dp,mean_nc,"
         "early_stop_pct,n_reps,seed\n";
  for (const auto& oc : ocs) oc_rows(out, "", oc);
  return out.str();
}

std::string sweep_csv(SweepAxis axis, const std::vector<SweepPoint>& points) {
  std::ostringstream out;
  out << "axis,value,design,scenario,subgroup,dose,selection_pct,mean_n_treated,mean_dp,"
         "mean_nc,early_stop_pct,n_reps,seed\n";
  for (const auto& pt : points)
    oc_rows(out, axis_name(axis) + "," + pt.label + ",", pt.oc);
  return out.str();
}

std::string sweep_plot_csv(const std::vector<SweepPoint>& points) {
  std::ostringstream out;
  for (int arm = 0; arm < kNumArms; ++arm)
    out << (arm ? "," : "") << arm_name(arm) << "_sel_x," << arm_name(arm) << "_sel_y";
  for (int arm = 0; arm < kNumArms; ++arm)
    out << "," << arm_name(arm) << "_alloc_x," << arm_name(arm) << "_alloc_y";
  out << "\n";
  for (const auto& pt : points) {
    const auto& oc = pt.oc;
    std::array<double, 2> sub_total{};
    for (int arm = 0; arm < kNumArms; ++arm)
      sub_total[arm_subgroup(arm)] += oc.mean_treated[arm];
    for (int arm = 0; arm < kNumArms; ++arm)
      out << (arm ? "," : "") << pt.label << "," << fmt4(oc.sel_pct[arm]);
    for (int arm = 0; arm < kNumArms; ++arm) {
      const double total = sub_total[arm_subgroup(arm)];
      const double prop = total > 0.0 ? oc.mean_treated[arm] / total : 0.0;
      out << "," << pt.label << "," << fmt4(prop);
    }
    out << "\n";
  }
  return out.str();
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open file for writing: " + path);
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string digest_hex(const std::string& bytes) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016" PRIx64, fnv1a64(bytes));
  return buf;
}

std::string manifest_json(const std::string& command, const std::string& config_digest,
                          std::uint64_t master_seed,
                          const std::vector<std::pair<std::string, std::string>>& outputs,
                          const std::string& started, const std::string& finished) {
  nlohmann::json j;
  j["command"] = command;
  j["version"] = "0.1.0";
  j["config_digest"] = config_digest;
  j["master_seed"] = master_seed;
  j["started"] = started;
  j["finished"] = finished;
  j["outputs"] = nlohmann::json::array();
  for (const auto& [path, digest] : outputs)
    j["outputs"].push_back({{"path", path}, {"digest", digest}});
  return j.dump(2) + "\n";
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace crtsim
