// Command-line front end: parses a JSON scenario configuration (plus override
// flags), runs the selected experiment, and writes CSV data files and SVG
// plots. CSV is the data contract; plots are a convenience.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "stirap/config.hpp"
#include "stirap/output.hpp"
#include "stirap/version.hpp"

namespace {

struct FlagValues {
  std::string config_path;
  std::string family, protocol, initial, method, protocols;
  double omega0_mhz = 0, T_us = 0, sigma_us = 0, sigma_over_T = 0;
  double delta_t_us = 0, dt_over_T = 0, delta_mhz = 0, phase_a_rad = 0;
  double t_min_us = 0, t_max_us = 0;
  double sigma_min_us = 0, sigma_max_us = 0, delta_t_max_over_sigma = 0;
  double corr_sigma_us = 0, corr_delta_t_us = 0;
  int t_count = 0, sigma_count = 0, delta_t_count = 0;
  int steps = 0, record_stride = 0, workers = -1, points = 0;
  std::string output_dir;
  bool plot = false, no_csv = false, exact_steps = false;
};

// Only flags the user actually passed become overrides; everything else is
// left to the config file and the defaults.
stirap::json overrides_from(const CLI::App& cmd, const FlagValues& flags) {
  stirap::json j = stirap::json::object();
  auto passed = [&](const std::string& name) {
    const CLI::Option* option = cmd.get_option_no_throw(name);
    return option != nullptr && option->count() > 0;
  };
  if (passed("--family")) j["family"] = flags.family;
  if (passed("--omega0-mhz")) j["omega0_mhz"] = flags.omega0_mhz;
  if (passed("--T-us")) j["T_us"] = flags.T_us;
  if (passed("--sigma-us")) j["sigma_us"] = flags.sigma_us;
  if (passed("--sigma-over-T")) j["sigma_over_T"] = flags.sigma_over_T;
  if (passed("--delta-t-us")) j["delta_t_us"] = flags.delta_t_us;
  if (passed("--dt-over-T")) j["dt_over_T"] = flags.dt_over_T;
  if (passed("--delta-mhz")) j["delta_mhz"] = flags.delta_mhz;
  if (passed("--phase-a-rad")) j["phase_a_rad"] = flags.phase_a_rad;
  if (passed("--protocol")) j["protocol"] = flags.protocol;
  if (passed("--initial")) j["initial_state"] = flags.initial;
  if (passed("--steps")) j["step_count"] = flags.steps;
  if (passed("--record-stride")) j["record_stride"] = flags.record_stride;
  if (passed("--method")) j["method"] = flags.method;
  if (passed("--exact-steps")) j["auto_step_density"] = false;
  if (passed("--workers")) j["workers"] = flags.workers;
  if (passed("--output-dir")) j["output_dir"] = flags.output_dir;
  if (passed("--plot")) j["plot"] = true;
  if (passed("--no-csv")) j["csv"] = false;
  if (passed("--t-min-us")) j["t_min_us"] = flags.t_min_us;
  if (passed("--t-max-us")) j["t_max_us"] = flags.t_max_us;
  if (passed("--t-count")) j["t_count"] = flags.t_count;
  if (passed("--protocols")) {
    stirap::json list = stirap::json::array();
    std::string item;
    for (char c : flags.protocols + ",") {
      if (c == ',') {
        if (!item.empty()) list.push_back(item);
        item.clear();
      } else {
        item += c;
      }
    }
    j["protocols"] = list;
  }
  if (passed("--sigma-min-us")) j["sigma_min_us"] = flags.sigma_min_us;
  if (passed("--sigma-max-us")) j["sigma_max_us"] = flags.sigma_max_us;
  if (passed("--sigma-count")) j["sigma_count"] = flags.sigma_count;
  if (passed("--delta-t-count")) j["delta_t_count"] = flags.delta_t_count;
  if (passed("--delta-t-max-over-sigma"))
    j["delta_t_max_over_sigma"] = flags.delta_t_max_over_sigma;
  if (passed("--corr-sigma-us")) j["corr_sigma_us"] = flags.corr_sigma_us;
  if (passed("--corr-delta-t-us")) j["corr_delta_t_us"] = flags.corr_delta_t_us;
  if (passed("--points")) j["preview_points"] = flags.points;
  return j;
}

void add_common_flags(CLI::App* cmd, FlagValues& flags) {
  cmd->add_option("--config", flags.config_path, "JSON configuration file");
  cmd->add_option("--family", flags.family, "gaussian|exponential|trigonometric");
  cmd->add_option("--omega0-mhz", flags.omega0_mhz, "peak Rabi frequency / 2pi (MHz)");
  cmd->add_option("--T-us", flags.T_us, "protocol duration (us)");
  cmd->add_option("--sigma-us", flags.sigma_us, "width parameter (us)");
  cmd->add_option("--sigma-over-T", flags.sigma_over_T, "width as a fraction of T");
  cmd->add_option("--delta-t-us", flags.delta_t_us, "half pulse delay (us)");
  cmd->add_option("--dt-over-T", flags.dt_over_T, "half delay as a fraction of T");
  cmd->add_option("--delta-mhz", flags.delta_mhz, "correction detuning / 2pi (MHz)");
  cmd->add_option("--phase-a-rad", flags.phase_a_rad, "phase of omega_a (rad)");
  cmd->add_option("--protocol", flags.protocol, "stirap|sa|exact-cd");
  cmd->add_option("--initial", flags.initial, "default|m1|p1|intermediate|dark0");
  cmd->add_option("--steps", flags.steps, "integration step count (floor)");
  cmd->add_option("--record-stride", flags.record_stride, "record every N steps");
  cmd->add_option("--method", flags.method, "midpoint_exponential|rk4");
  cmd->add_flag("--exact-steps", flags.exact_steps,
                "use --steps exactly instead of the converged density");
  cmd->add_option("--workers", flags.workers, "worker threads (0 = all cores)");
  cmd->add_option("--output-dir", flags.output_dir, "directory for output files");
  cmd->add_flag("--plot", flags.plot, "also write an SVG plot");
  cmd->add_flag("--no-csv", flags.no_csv, "skip CSV output");
}

stirap::RunConfig load(stirap::ScenarioKind kind, const CLI::App& cmd,
                       const FlagValues& flags) {
  const stirap::json overrides = overrides_from(cmd, flags);
  if (!flags.config_path.empty())
    return stirap::parse_config_file(kind, flags.config_path, overrides);
  return stirap::parse_config(kind, stirap::json::object(), overrides);
}

void report_outputs(const std::vector<std::filesystem::path>& paths) {
  for (const auto& p : paths) std::cout << "wrote " << p.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"three-level STIRAP / superadiabatic STIRAP simulator"};
  app.set_version_flag("--version", stirap::version);
  app.require_subcommand(1);

  FlagValues flags;
  CLI::App* trace = app.add_subcommand("trace", "propagate one protocol and record populations");
  CLI::App* sweep = app.add_subcommand("sweep", "transfer efficiency vs protocol duration");
  CLI::App* grid = app.add_subcommand("grid", "robustness grid over (sigma, delta_t)");
  CLI::App* pulses = app.add_subcommand("pulses", "tabulate pulse envelopes and corrections");
  for (CLI::App* cmd : {trace, sweep, grid, pulses}) add_common_flags(cmd, flags);
  sweep->add_option("--t-min-us", flags.t_min_us, "smallest duration (us)");
  sweep->add_option("--t-max-us", flags.t_max_us, "largest duration (us)");
  sweep->add_option("--t-count", flags.t_count, "number of durations");
  sweep->add_option("--protocols", flags.protocols, "comma-separated protocol list");
  grid->add_option("--sigma-min-us", flags.sigma_min_us, "smallest sigma (us)");
  grid->add_option("--sigma-max-us", flags.sigma_max_us, "largest sigma (us)");
  grid->add_option("--sigma-count", flags.sigma_count, "number of sigma values");
  grid->add_option("--delta-t-count", flags.delta_t_count, "number of delay values");
  grid->add_option("--delta-t-max-over-sigma", flags.delta_t_max_over_sigma,
                   "largest delta_t as a multiple of sigma");
  grid->add_option("--corr-sigma-us", flags.corr_sigma_us, "correction reference sigma (us)");
  grid->add_option("--corr-delta-t-us", flags.corr_delta_t_us,
                   "correction reference delta_t (us)");
  pulses->add_option("--points", flags.points, "number of sample times");

  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<std::filesystem::path> written;
    if (trace->parsed()) {
      const stirap::RunConfig config = load(stirap::ScenarioKind::PopulationTrace, *trace, flags);
      const stirap::TraceRecord record = stirap::run_population_trace(config.scenario);
      std::printf("efficiency=%.9f max_intermediate=%.9f\n", record.efficiency,
                  stirap::max_intermediate_population(record));
      if (config.csv) {
        auto paths = stirap::emit_csv(record, config);
        written.insert(written.end(), paths.begin(), paths.end());
      }
      if (config.plot) written.push_back(stirap::emit_plot(record, config));
    } else if (sweep->parsed()) {
      const stirap::RunConfig config = load(stirap::ScenarioKind::EfficiencyVsDuration, *sweep, flags);
      const stirap::SweepRecord record = stirap::run_efficiency_sweep(config.scenario);
      for (const auto& series : record.series) {
        double best = 0.0;
        for (double e : series.efficiency) best = std::max(best, e);
        std::printf("%s: points=%zu max_efficiency=%.9f\n", to_string(series.protocol),
                    series.efficiency.size(), best);
      }
      if (config.csv) {
        auto paths = stirap::emit_csv(record, config);
        written.insert(written.end(), paths.begin(), paths.end());
      }
      if (config.plot) written.push_back(stirap::emit_plot(record, config));
    } else if (grid->parsed()) {
      const stirap::RunConfig config = load(stirap::ScenarioKind::RobustnessGrid, *grid, flags);
      const stirap::SweepRecord record = stirap::run_robustness_grid(config.scenario);
      for (const auto& series : record.series) {
        int bright = 0;
        for (double e : series.efficiency)
          if (e >= 0.9) ++bright;
        std::printf("%s: cells=%zu cells_above_0.9=%d\n", to_string(series.protocol),
                    series.efficiency.size(), bright);
      }
      if (config.csv) {
        auto paths = stirap::emit_csv(record, config);
        written.insert(written.end(), paths.begin(), paths.end());
      }
      if (config.plot) written.push_back(stirap::emit_plot(record, config));
    } else if (pulses->parsed()) {
      const stirap::RunConfig config = load(stirap::ScenarioKind::PulsePreview, *pulses, flags);
      const stirap::PreviewRecord record = stirap::run_pulse_preview(config.scenario);
      std::printf("samples=%zu\n", record.times.size());
      if (config.csv) {
        auto paths = stirap::emit_csv(record, config);
        written.insert(written.end(), paths.begin(), paths.end());
      }
      if (config.plot) written.push_back(stirap::emit_plot(record, config));
    }
    report_outputs(written);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
