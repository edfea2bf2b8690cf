#pragma once

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stirap/experiments.hpp"
#include "stirap/units.hpp"

namespace stirap {

using json = nlohmann::ordered_json;

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One fully resolved invocation: scenario plus output options. All
/// frequencies inside `scenario` are angular; the MHz-over-2pi values of the
/// configuration file exist only at this parsing boundary.
struct RunConfig {
  ScenarioSpec scenario;
  std::string initial_name = "default";
  std::filesystem::path output_dir = ".";
  bool csv = true;
  bool plot = false;
};

namespace detail {

inline const std::set<std::string>& allowed_keys(ScenarioKind kind) {
  static const std::set<std::string> common = {
      "family", "omega0_mhz", "T_us", "sigma_us", "sigma_over_T",
      "delta_t_us", "dt_over_T", "delta_mhz", "phase_a_rad", "protocol",
      "initial_state", "step_count", "auto_step_density", "method",
      "record_stride", "output_dir", "csv", "plot", "workers"};
  static const std::set<std::string> sweep = [] {
    std::set<std::string> s = common;
    s.insert({"t_min_us", "t_max_us", "t_count", "protocols"});
    s.erase("T_us");
    s.erase("sigma_us");
    s.erase("delta_t_us");
    return s;
  }();
  static const std::set<std::string> grid = [] {
    std::set<std::string> s = common;
    s.insert({"sigma_min_us", "sigma_max_us", "sigma_count", "delta_t_count",
              "delta_t_max_over_sigma", "corr_sigma_us", "corr_delta_t_us"});
    s.erase("T_us");
    s.erase("sigma_us");
    s.erase("sigma_over_T");
    s.erase("delta_t_us");
    s.erase("dt_over_T");
    return s;
  }();
  static const std::set<std::string> preview = [] {
    std::set<std::string> s = common;
    s.insert({"preview_points"});
    return s;
  }();
  switch (kind) {
    case ScenarioKind::EfficiencyVsDuration: return sweep;
    case ScenarioKind::RobustnessGrid: return grid;
    case ScenarioKind::PulsePreview: return preview;
    default: return common;
  }
}

inline PulseFamily parse_family(const std::string& name) {
  if (name == "gaussian") return PulseFamily::Gaussian;
  if (name == "exponential") return PulseFamily::Exponential;
  if (name == "trigonometric") return PulseFamily::Trigonometric;
  throw config_error("family: unknown value '" + name +
                     "' (expected gaussian|exponential|trigonometric)");
}

inline Protocol parse_protocol(const std::string& name) {
  if (name == "stirap") return Protocol::Stirap;
  if (name == "sa_stirap" || name == "sa") return Protocol::SaStirap;
  if (name == "exact_cd" || name == "exact-cd") return Protocol::StirapPlusExactCD;
  throw config_error("protocol: unknown value '" + name +
                     "' (expected stirap|sa_stirap|exact_cd)");
}

inline IntegrationMethod parse_method(const std::string& name) {
  if (name == "midpoint_exponential") return IntegrationMethod::MidpointExponential;
  if (name == "rk4") return IntegrationMethod::RK4;
  throw config_error("method: unknown value '" + name +
                     "' (expected midpoint_exponential|rk4)");
}

template <typename T>
T get_as(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw config_error(key + ": has the wrong type");
  }
}

}  // namespace detail

/// Parses one scenario configuration. `overrides` (typically built from
/// command-line flags) wins over the file values key by key. Unknown keys are
/// hard errors, as are missing required keys and values violating a pulse or
/// correction invariant.
inline RunConfig parse_config(ScenarioKind kind, json values,
                              const json& overrides = json::object()) {
  if (!values.is_object()) throw config_error("config root must be an object");
  for (const auto& [key, value] : overrides.items()) values[key] = value;

  const auto& allowed = detail::allowed_keys(kind);
  std::vector<std::string> unknown;
  for (const auto& [key, value] : values.items())
    if (!allowed.contains(key)) unknown.push_back(key);
  if (!unknown.empty()) {
    std::string message = "unknown config keys:";
    for (const auto& key : unknown) message += " " + key;
    throw config_error(message);
  }

  std::vector<std::string> missing;
  auto require = [&](const char* key) {
    if (!values.contains(key)) missing.push_back(key);
  };
  require("family");
  require("omega0_mhz");
  const bool needs_pulse_shape = kind == ScenarioKind::PopulationTrace ||
                                 kind == ScenarioKind::PulsePreview;
  if (needs_pulse_shape) require("T_us");
  const PulseFamily family =
      values.contains("family")
          ? detail::parse_family(detail::get_as<std::string>(values, "family"))
          : PulseFamily::Gaussian;
  if (needs_pulse_shape && family != PulseFamily::Trigonometric &&
      !values.contains("sigma_us") && !values.contains("sigma_over_T"))
    missing.push_back("sigma_us|sigma_over_T");
  if (needs_pulse_shape && family == PulseFamily::Gaussian &&
      !values.contains("delta_t_us") && !values.contains("dt_over_T"))
    missing.push_back("delta_t_us|dt_over_T");
  if (kind == ScenarioKind::EfficiencyVsDuration &&
      family != PulseFamily::Trigonometric && !values.contains("sigma_over_T"))
    missing.push_back("sigma_over_T");
  if (kind == ScenarioKind::EfficiencyVsDuration &&
      family == PulseFamily::Gaussian && !values.contains("dt_over_T"))
    missing.push_back("dt_over_T");
  if (kind == ScenarioKind::RobustnessGrid) require("delta_mhz");
  if (!missing.empty()) {
    std::string message = "missing required config keys:";
    for (const auto& key : missing) message += " " + key;
    throw config_error(message);
  }

  RunConfig config;
  ScenarioSpec& spec = config.scenario;
  spec.kind = kind;
  spec.pulse.family = family;

  const double omega0_mhz = detail::get_as<double>(values, "omega0_mhz");
  if (!(omega0_mhz > 0.0)) throw config_error("omega0_mhz: violates omega0 > 0");
  spec.pulse.omega0 = mhz_to_rad_per_us(omega0_mhz);

  if (values.contains("T_us")) {
    spec.pulse.T = detail::get_as<double>(values, "T_us");
    if (!(spec.pulse.T > 0.0)) throw config_error("T_us: violates T > 0");
  } else {
    spec.pulse.T = 1.0;  // placeholder; sweep and grid set T per point
  }

  if (values.contains("sigma_us") && values.contains("sigma_over_T"))
    throw config_error("sigma_us and sigma_over_T are mutually exclusive");
  if (values.contains("delta_t_us") && values.contains("dt_over_T"))
    throw config_error("delta_t_us and dt_over_T are mutually exclusive");
  if (values.contains("sigma_us"))
    spec.pulse.sigma = detail::get_as<double>(values, "sigma_us");
  else if (values.contains("sigma_over_T"))
    spec.pulse.sigma = detail::get_as<double>(values, "sigma_over_T") * spec.pulse.T;
  if (values.contains("delta_t_us"))
    spec.pulse.delta_t = detail::get_as<double>(values, "delta_t_us");
  else if (values.contains("dt_over_T"))
    spec.pulse.delta_t = detail::get_as<double>(values, "dt_over_T") * spec.pulse.T;
  if (family != PulseFamily::Trigonometric && needs_pulse_shape &&
      !(spec.pulse.sigma > 0.0))
    throw config_error("sigma_us: violates sigma > 0");
  if (spec.pulse.delta_t < 0.0)
    throw config_error("delta_t_us: violates delta_t >= 0");

  if (values.contains("protocol"))
    spec.protocol = detail::parse_protocol(detail::get_as<std::string>(values, "protocol"));

  if (values.contains("delta_mhz")) {
    CorrectionParams correction;
    correction.delta = mhz_to_rad_per_us(detail::get_as<double>(values, "delta_mhz"));
    if (values.contains("phase_a_rad"))
      correction.phase_a = detail::get_as<double>(values, "phase_a_rad");
    if (correction.delta == 0.0)
      throw config_error("delta_mhz: violates delta != 0");
    spec.correction = correction;
  } else if (values.contains("phase_a_rad")) {
    throw config_error("phase_a_rad requires delta_mhz");
  }
  if (spec.protocol == Protocol::SaStirap && !spec.correction)
    throw config_error("protocol sa_stirap requires delta_mhz (delta != 0)");

  if (values.contains("initial_state")) {
    config.initial_name = detail::get_as<std::string>(values, "initial_state");
    if (config.initial_name == "m1")
      spec.initial_state = ket_minus();
    else if (config.initial_name == "p1")
      spec.initial_state = ket_plus();
    else if (config.initial_name == "intermediate")
      spec.initial_state = ket_intermediate();
    else if (config.initial_name == "dark0")
      spec.initial_dark0 = true;  // resolved against the per-run pulse
    else if (config.initial_name != "default")
      throw config_error("initial_state: unknown value '" + config.initial_name +
                         "' (expected default|m1|p1|intermediate|dark0)");
  }

  if (values.contains("step_count")) {
    spec.propagation.step_count = detail::get_as<int>(values, "step_count");
    if (spec.propagation.step_count < 1)
      throw config_error("step_count: violates step_count >= 1");
  }
  if (values.contains("record_stride")) {
    spec.propagation.record_stride = detail::get_as<int>(values, "record_stride");
    if (spec.propagation.record_stride < 1)
      throw config_error("record_stride: violates record_stride >= 1");
  }
  if (values.contains("method"))
    spec.propagation.method =
        detail::parse_method(detail::get_as<std::string>(values, "method"));
  if (values.contains("auto_step_density"))
    spec.auto_step_density = detail::get_as<bool>(values, "auto_step_density");
  if (values.contains("workers")) {
    spec.workers = detail::get_as<int>(values, "workers");
    if (spec.workers < 0) throw config_error("workers: violates workers >= 0");
  }

  if (kind == ScenarioKind::EfficiencyVsDuration) {
    SweepSpec sweep;
    if (values.contains("t_min_us")) sweep.t_min_us = detail::get_as<double>(values, "t_min_us");
    if (values.contains("t_max_us")) sweep.t_max_us = detail::get_as<double>(values, "t_max_us");
    if (values.contains("t_count")) sweep.t_count = detail::get_as<int>(values, "t_count");
    if (sweep.t_count < 1) throw config_error("t_count: violates t_count >= 1");
    if (!(sweep.t_min_us > 0.0)) throw config_error("t_min_us: violates T > 0");
    if (!(sweep.t_max_us >= sweep.t_min_us))
      throw config_error("t_max_us: violates t_max_us >= t_min_us");
    if (values.contains("sigma_over_T"))
      sweep.sigma_over_T = detail::get_as<double>(values, "sigma_over_T");
    if (values.contains("dt_over_T"))
      sweep.dt_over_T = detail::get_as<double>(values, "dt_over_T");
    if (values.contains("protocols")) {
      sweep.protocols.clear();
      for (const auto& name : detail::get_as<std::vector<std::string>>(values, "protocols"))
        sweep.protocols.push_back(detail::parse_protocol(name));
      if (sweep.protocols.empty()) throw config_error("protocols: must not be empty");
    }
    for (Protocol protocol : sweep.protocols)
      if (protocol == Protocol::SaStirap && !spec.correction)
        throw config_error("protocols includes sa_stirap: requires delta_mhz");
    spec.sweep = sweep;
  }

  if (kind == ScenarioKind::RobustnessGrid) {
    if (spec.pulse.family != PulseFamily::Gaussian)
      throw config_error("family: robustness grid requires gaussian");
    GridSpec grid;
    if (values.contains("sigma_min_us")) grid.sigma_min_us = detail::get_as<double>(values, "sigma_min_us");
    if (values.contains("sigma_max_us")) grid.sigma_max_us = detail::get_as<double>(values, "sigma_max_us");
    if (values.contains("sigma_count")) grid.sigma_count = detail::get_as<int>(values, "sigma_count");
    if (values.contains("delta_t_count")) grid.delta_t_count = detail::get_as<int>(values, "delta_t_count");
    if (values.contains("delta_t_max_over_sigma"))
      grid.delta_t_max_over_sigma = detail::get_as<double>(values, "delta_t_max_over_sigma");
    if (values.contains("corr_sigma_us")) grid.corr_sigma_us = detail::get_as<double>(values, "corr_sigma_us");
    if (values.contains("corr_delta_t_us")) grid.corr_delta_t_us = detail::get_as<double>(values, "corr_delta_t_us");
    if (!(grid.sigma_min_us > 0.0)) throw config_error("sigma_min_us: violates sigma > 0");
    if (!(grid.sigma_max_us >= grid.sigma_min_us))
      throw config_error("sigma_max_us: violates sigma_max_us >= sigma_min_us");
    if (grid.sigma_count < 1) throw config_error("sigma_count: violates sigma_count >= 1");
    if (grid.delta_t_count < 1) throw config_error("delta_t_count: violates delta_t_count >= 1");
    if (grid.delta_t_max_over_sigma < 0.0)
      throw config_error("delta_t_max_over_sigma: violates ratio >= 0");
    if (!(grid.corr_sigma_us > 0.0)) throw config_error("corr_sigma_us: violates sigma > 0");
    if (grid.corr_delta_t_us < 0.0) throw config_error("corr_delta_t_us: violates delta_t >= 0");
    spec.grid = grid;
  }

  if (kind == ScenarioKind::PulsePreview && values.contains("preview_points")) {
    spec.preview_points = detail::get_as<int>(values, "preview_points");
    if (spec.preview_points < 2)
      throw config_error("preview_points: violates preview_points >= 2");
  }

  if (values.contains("output_dir"))
    config.output_dir = detail::get_as<std::string>(values, "output_dir");
  if (values.contains("csv")) config.csv = detail::get_as<bool>(values, "csv");
  if (values.contains("plot")) config.plot = detail::get_as<bool>(values, "plot");

  if (needs_pulse_shape) spec.pulse.validate();
  return config;
}

/// Reads and parses a configuration file. An empty (or whitespace-only) file
/// is treated as an empty object so the caller still gets the full list of
/// missing required keys.
inline RunConfig parse_config_file(ScenarioKind kind,
                                   const std::filesystem::path& path,
                                   const json& overrides = json::object()) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  if (text.find_first_not_of(" \t\r\n") == std::string::npos)
    return parse_config(kind, json::object(), overrides);
  json values;
  try {
    values = json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw config_error("config file " + path.string() + ": " + e.what());
  }
  return parse_config(kind, values, overrides);
}

/// Emits the fully resolved configuration as a JSON object that parses back
/// to an identical RunConfig. Frequencies are converted back to MHz-over-2pi;
/// internal angular units never appear here.
inline json resolved_json(const RunConfig& config) {
  const ScenarioSpec& spec = config.scenario;
  json j;
  j["family"] = to_string(spec.pulse.family);
  j["omega0_mhz"] = rad_per_us_to_mhz(spec.pulse.omega0);
  const bool needs_pulse_shape = spec.kind == ScenarioKind::PopulationTrace ||
                                 spec.kind == ScenarioKind::PulsePreview;
  if (needs_pulse_shape) {
    j["T_us"] = spec.pulse.T;
    if (spec.pulse.family != PulseFamily::Trigonometric)
      j["sigma_us"] = spec.pulse.sigma;
    if (spec.pulse.family == PulseFamily::Gaussian)
      j["delta_t_us"] = spec.pulse.delta_t;
  }
  if (spec.correction) {
    j["delta_mhz"] = rad_per_us_to_mhz(spec.correction->delta);
    j["phase_a_rad"] = spec.correction->phase_a;
  }
  j["protocol"] = to_string(spec.protocol);
  j["initial_state"] = config.initial_name;
  j["step_count"] = spec.propagation.step_count;
  j["record_stride"] = spec.propagation.record_stride;
  j["method"] = to_string(spec.propagation.method);
  j["auto_step_density"] = spec.auto_step_density;
  j["workers"] = spec.workers;
  if (spec.kind == ScenarioKind::EfficiencyVsDuration) {
    const SweepSpec& sweep = spec.sweep.value();
    j["t_min_us"] = sweep.t_min_us;
    j["t_max_us"] = sweep.t_max_us;
    j["t_count"] = sweep.t_count;
    j["sigma_over_T"] = sweep.sigma_over_T;
    j["dt_over_T"] = sweep.dt_over_T;
    json protocols = json::array();
    for (Protocol protocol : sweep.protocols) protocols.push_back(to_string(protocol));
    j["protocols"] = protocols;
  }
  if (spec.kind == ScenarioKind::RobustnessGrid) {
    const GridSpec& grid = spec.grid.value();
    j["sigma_min_us"] = grid.sigma_min_us;
    j["sigma_max_us"] = grid.sigma_max_us;
    j["sigma_count"] = grid.sigma_count;
    j["delta_t_count"] = grid.delta_t_count;
    j["delta_t_max_over_sigma"] = grid.delta_t_max_over_sigma;
    j["corr_sigma_us"] = grid.corr_sigma_us;
    j["corr_delta_t_us"] = grid.corr_delta_t_us;
  }
  if (spec.kind == ScenarioKind::PulsePreview)
    j["preview_points"] = spec.preview_points;
  j["output_dir"] = config.output_dir.string();
  j["csv"] = config.csv;
  j["plot"] = config.plot;
  return j;
}

}  // namespace stirap
