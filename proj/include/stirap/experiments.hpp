#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "stirap/propagator.hpp"
#include "stirap/units.hpp"

namespace stirap {

enum class Protocol { Stirap, SaStirap, StirapPlusExactCD };
enum class ScenarioKind { PopulationTrace, EfficiencyVsDuration, RobustnessGrid, PulsePreview };

inline const char* to_string(Protocol p) {
  switch (p) {
    case Protocol::Stirap: return "stirap";
    case Protocol::SaStirap: return "sa_stirap";
    case Protocol::StirapPlusExactCD: return "exact_cd";
  }
  return "?";
}

inline const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::PopulationTrace: return "trace";
    case ScenarioKind::EfficiencyVsDuration: return "sweep";
    case ScenarioKind::RobustnessGrid: return "grid";
    case ScenarioKind::PulsePreview: return "pulses";
  }
  return "?";
}

/// Duration sweep: T values are uniform over [t_min_us, t_max_us] and the
/// width parameters scale with T through the two ratios.
struct SweepSpec {
  double t_min_us = 0.5;
  double t_max_us = 6.0;
  int t_count = 24;
  double dt_over_T = 0.1;
  double sigma_over_T = 1.0 / 6.0;
  std::vector<Protocol> protocols = {Protocol::Stirap, Protocol::SaStirap};
};

/// (sigma, delta_t) robustness grid. delta_t runs from 0 to
/// delta_t_max_over_sigma * sigma for each sigma, every cell uses
/// T = 6 sigma + 2 delta_t, and the superadiabatic correction is the one
/// optimized for (corr_sigma_us, corr_delta_t_us), center-aligned per cell.
struct GridSpec {
  double sigma_min_us = 0.2;
  double sigma_max_us = 1.0;
  int sigma_count = 9;
  int delta_t_count = 9;
  double delta_t_max_over_sigma = 2.0;
  double corr_sigma_us = 0.6;
  double corr_delta_t_us = 0.6;
};

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::PopulationTrace;
  PulseParams pulse;
  std::optional<CorrectionParams> correction;
  Protocol protocol = Protocol::Stirap;
  std::optional<SweepSpec> sweep;
  std::optional<GridSpec> grid;
  std::optional<Vector3c> initial_state;  // absent: family-dependent default
  bool initial_dark0 = false;             // start in the dark state at t = 0
  PropagationConfig propagation;
  bool auto_step_density = true;  // raise step_count to the converged density
  int workers = 0;                // 0: hardware concurrency
  int preview_points = 501;
};

struct SweepSeries {
  Protocol protocol = Protocol::Stirap;
  std::vector<double> efficiency;
  std::vector<double> max_intermediate;
};

/// Results of a sweep or grid run. Points are stored flattened in row-major
/// order of `shape`; `point_axes[a][k]` is the coordinate of point k on axis
/// a. Rerunning the same spec reproduces the record bit for bit.
struct SweepRecord {
  std::vector<std::string> axis_names;
  std::vector<std::vector<double>> point_axes;
  std::vector<int> shape;
  std::vector<SweepSeries> series;
  std::vector<std::pair<std::string, std::string>> metadata;
};

/// Envelope samples for plotting, in rad/us on a uniform time grid.
struct PreviewRecord {
  std::vector<double> times;
  std::vector<double> omega_s;
  std::vector<double> omega_p;
  std::vector<double> abs_omega_a;
  std::vector<std::pair<std::string, std::string>> metadata;
};

inline Vector3c dark_state_at(const PulseParams& p, double t) {
  return eigenframe(p, t).dark;
}

/// Default initial state: |-1> for the Gaussian pair, which starts with the
/// Stokes field dominant. The exponential and trigonometric envelopes as
/// defined here start pump-dominant, so their transfers begin in the dark
/// state at t = 0 (close to -|+1>) instead.
inline Vector3c default_initial_state(const PulseParams& p) {
  if (p.family == PulseFamily::Gaussian) return ket_minus();
  return dark_state_at(p, 0.0);
}

inline Vector3c resolve_initial_state(const ScenarioSpec& spec,
                                      const PulseParams& pulse) {
  if (spec.initial_state) return *spec.initial_state;
  if (spec.initial_dark0) return dark_state_at(pulse, 0.0);
  return default_initial_state(pulse);
}

namespace detail {

/// Steps per us at which the midpoint rule is converged to the point that
/// doubling the count moves final populations by < 1e-8. Runs with detuned
/// correction fields oscillate at delta and need a density that grows with
/// it; the calibration constant carries a ~4x margin over measured error
/// constants for the scenarios in this repository.
inline int steps_per_us(double max_abs_delta) {
  if (max_abs_delta == 0.0) return 32000;
  const double f = rad_per_us_to_mhz(max_abs_delta);  // delta / 2pi
  const double density = 65000.0 * f * std::sqrt(f);
  return std::max(32000, static_cast<int>(std::ceil(density)));
}

/// Smallest denominator q <= max_q with |x - p/q| < tol, by continued
/// fractions; 0 when none exists. Used to land trajectory breakpoints on
/// integration-step boundaries.
inline long long rational_denominator(double x, long long max_q, double tol) {
  long long p_prev = 1, q_prev = 0, p_cur = static_cast<long long>(std::floor(x)),
            q_cur = 1;
  double remainder = x - std::floor(x);
  for (int iter = 0; iter < 64; ++iter) {
    if (std::abs(x - static_cast<double>(p_cur) / static_cast<double>(q_cur)) < tol)
      return q_cur;
    if (remainder < 1e-15) break;
    const double inverse = 1.0 / remainder;
    const long long a = static_cast<long long>(std::floor(inverse));
    remainder = inverse - std::floor(inverse);
    const long long p_next = a * p_cur + p_prev;
    const long long q_next = a * q_cur + q_prev;
    if (q_next > max_q || q_next <= 0) break;
    p_prev = p_cur;
    q_prev = q_cur;
    p_cur = p_next;
    q_cur = q_next;
  }
  return 0;
}

inline PropagationConfig production_config(const ScenarioSpec& spec,
                                           const HamiltonianTrajectory& traj) {
  PropagationConfig config = spec.propagation;
  if (spec.auto_step_density) {
    const int dense = static_cast<int>(
        std::ceil(traj.duration * steps_per_us(traj.max_abs_delta)));
    config.step_count = std::max({config.step_count, dense, 1000});
    // land interior jumps of the Hamiltonian on step boundaries; a jump
    // crossing a step interior degrades the midpoint rule to first order
    long long multiple = 1;
    for (double breakpoint : traj.breakpoints) {
      const long long q =
          rational_denominator(breakpoint / traj.duration, 100000, 1e-12);
      if (q > 0) multiple = std::lcm(multiple, q);
      if (multiple > 500000) {
        multiple = 1;
        break;
      }
    }
    if (multiple > 1)
      config.step_count = static_cast<int>(
          multiple * ((config.step_count + multiple - 1) / multiple));
    // keep roughly step_count / record_stride samples per trace
    const long target = std::max<long>(
        1, spec.propagation.step_count / spec.propagation.record_stride);
    config.record_stride = std::max<long>(config.record_stride,
                                          config.step_count / target);
  }
  return config;
}

inline HamiltonianTrajectory protocol_trajectory(const ScenarioSpec& spec,
                                                 const PulseParams& pulse,
                                                 Protocol protocol) {
  switch (protocol) {
    case Protocol::Stirap:
      return stirap_trajectory(pulse);
    case Protocol::SaStirap:
      if (!spec.correction)
        throw std::invalid_argument("sa_stirap requires correction parameters");
      return total_trajectory(pulse, *spec.correction);
    case Protocol::StirapPlusExactCD:
      return stirap_plus_exact_cd_trajectory(pulse);
  }
  throw std::invalid_argument("unknown protocol");
}

/// Runs fn(0..count-1) on up to `workers` threads. Results must be written to
/// per-index slots; indices are handed out in order but may complete in any
/// order. The first exception, if any, is rethrown on the calling thread.
template <typename Fn>
void parallel_for(int count, int workers, Fn&& fn) {
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, std::max(1, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

inline void append_common_metadata(std::vector<std::pair<std::string, std::string>>& meta,
                                   const ScenarioSpec& spec) {
  meta.emplace_back("family", to_string(spec.pulse.family));
  meta.emplace_back("omega0_rad_per_us", std::to_string(spec.pulse.omega0));
  if (spec.correction) {
    meta.emplace_back("delta_rad_per_us", std::to_string(spec.correction->delta));
    meta.emplace_back("phase_a_rad", std::to_string(spec.correction->phase_a));
  }
  meta.emplace_back("adiabaticity_figure", std::to_string(adiabaticity_figure(spec.pulse)));
  meta.emplace_back("adiabaticity_is_proxy",
                    adiabaticity_figure_is_proxy(spec.pulse) ? "true" : "false");
}

}  // namespace detail

/// Propagates the selected protocol over [0, T] and returns the full
/// population trace.
inline TraceRecord run_population_trace(const ScenarioSpec& spec) {
  if (spec.kind != ScenarioKind::PopulationTrace)
    throw std::invalid_argument("run_population_trace: wrong scenario kind");
  spec.pulse.validate();
  const HamiltonianTrajectory traj =
      detail::protocol_trajectory(spec, spec.pulse, spec.protocol);
  const Vector3c initial = resolve_initial_state(spec, spec.pulse);
  return propagate(traj, initial, detail::production_config(spec, traj));
}

/// Transfer efficiency and peak intermediate population as a function of the
/// protocol duration, one propagation per (T, protocol) pair.
inline SweepRecord run_efficiency_sweep(const ScenarioSpec& spec) {
  if (spec.kind != ScenarioKind::EfficiencyVsDuration)
    throw std::invalid_argument("run_efficiency_sweep: wrong scenario kind");
  const SweepSpec sweep = spec.sweep.value_or(SweepSpec{});
  if (sweep.t_count < 1 || !(sweep.t_max_us >= sweep.t_min_us))
    throw std::invalid_argument("sweep: empty duration range");
  if (sweep.protocols.empty())
    throw std::invalid_argument("sweep: no protocols listed");

  SweepRecord record;
  record.axis_names = {"T_us"};
  record.shape = {sweep.t_count};
  record.point_axes.resize(1);
  for (int i = 0; i < sweep.t_count; ++i) {
    const double t = sweep.t_count == 1
                         ? sweep.t_min_us
                         : sweep.t_min_us + (sweep.t_max_us - sweep.t_min_us) *
                                                i / (sweep.t_count - 1);
    record.point_axes[0].push_back(t);
  }
  for (Protocol protocol : sweep.protocols) {
    SweepSeries series;
    series.protocol = protocol;
    series.efficiency.assign(sweep.t_count, 0.0);
    series.max_intermediate.assign(sweep.t_count, 0.0);
    record.series.push_back(std::move(series));
  }

  const int points = sweep.t_count * static_cast<int>(sweep.protocols.size());
  detail::parallel_for(points, spec.workers, [&](int k) {
    const int proto_index = k / sweep.t_count;
    const int t_index = k % sweep.t_count;
    PulseParams pulse = spec.pulse;
    pulse.T = record.point_axes[0][t_index];
    pulse.sigma = sweep.sigma_over_T * pulse.T;
    pulse.delta_t = sweep.dt_over_T * pulse.T;
    const HamiltonianTrajectory traj =
        detail::protocol_trajectory(spec, pulse, sweep.protocols[proto_index]);
    const Vector3c initial = resolve_initial_state(spec, pulse);
    const TraceRecord trace =
        propagate(traj, initial, detail::production_config(spec, traj));
    record.series[proto_index].efficiency[t_index] = trace.efficiency;
    record.series[proto_index].max_intermediate[t_index] =
        max_intermediate_population(trace);
  });

  detail::append_common_metadata(record.metadata, spec);
  record.metadata.emplace_back("dt_over_T", std::to_string(sweep.dt_over_T));
  record.metadata.emplace_back("sigma_over_T", std::to_string(sweep.sigma_over_T));
  return record;
}

/// Robustness study: STIRAP and sa-STIRAP efficiency over the (sigma,
/// delta_t) grid with T = 6 sigma + 2 delta_t. The sa correction is computed
/// once, for the reference parameters, and center-aligned onto every cell.
inline SweepRecord run_robustness_grid(const ScenarioSpec& spec) {
  if (spec.kind != ScenarioKind::RobustnessGrid)
    throw std::invalid_argument("run_robustness_grid: wrong scenario kind");
  if (spec.pulse.family != PulseFamily::Gaussian)
    throw std::invalid_argument("robustness grid requires the Gaussian family");
  if (!spec.correction)
    throw std::invalid_argument("robustness grid requires correction parameters");
  const GridSpec grid = spec.grid.value_or(GridSpec{});
  if (grid.sigma_count < 1 || grid.delta_t_count < 1)
    throw std::invalid_argument("grid: empty parameter range");

  PulseParams reference = spec.pulse;
  reference.sigma = grid.corr_sigma_us;
  reference.delta_t = grid.corr_delta_t_us;
  reference.T = 6.0 * grid.corr_sigma_us + 2.0 * grid.corr_delta_t_us;

  const int cells = grid.sigma_count * grid.delta_t_count;
  SweepRecord record;
  record.axis_names = {"sigma_us", "delta_t_us"};
  record.shape = {grid.sigma_count, grid.delta_t_count};
  record.point_axes.assign(2, std::vector<double>(cells, 0.0));
  for (int i = 0; i < grid.sigma_count; ++i) {
    const double sigma =
        grid.sigma_count == 1
            ? grid.sigma_min_us
            : grid.sigma_min_us + (grid.sigma_max_us - grid.sigma_min_us) * i /
                                      (grid.sigma_count - 1);
    for (int j = 0; j < grid.delta_t_count; ++j) {
      const double ratio = grid.delta_t_count == 1
                               ? 0.0
                               : grid.delta_t_max_over_sigma * j /
                                     (grid.delta_t_count - 1);
      record.point_axes[0][i * grid.delta_t_count + j] = sigma;
      record.point_axes[1][i * grid.delta_t_count + j] = ratio * sigma;
    }
  }
  record.series.resize(2);
  record.series[0].protocol = Protocol::Stirap;
  record.series[1].protocol = Protocol::SaStirap;
  for (auto& series : record.series) {
    series.efficiency.assign(cells, 0.0);
    series.max_intermediate.assign(cells, 0.0);
  }

  detail::parallel_for(2 * cells, spec.workers, [&](int k) {
    const int series_index = k / cells;
    const int cell = k % cells;
    PulseParams pulse = spec.pulse;
    pulse.sigma = record.point_axes[0][cell];
    pulse.delta_t = record.point_axes[1][cell];
    pulse.T = 6.0 * pulse.sigma + 2.0 * pulse.delta_t;
    const HamiltonianTrajectory traj =
        series_index == 0
            ? stirap_trajectory(pulse)
            : shifted_correction_trajectory(pulse, reference, *spec.correction);
    const Vector3c initial = resolve_initial_state(spec, pulse);
    const TraceRecord trace =
        propagate(traj, initial, detail::production_config(spec, traj));
    record.series[series_index].efficiency[cell] = trace.efficiency;
    record.series[series_index].max_intermediate[cell] =
        max_intermediate_population(trace);
  });

  detail::append_common_metadata(record.metadata, spec);
  record.metadata.emplace_back("corr_sigma_us", std::to_string(grid.corr_sigma_us));
  record.metadata.emplace_back("corr_delta_t_us", std::to_string(grid.corr_delta_t_us));
  record.metadata.emplace_back("corr_T_us", std::to_string(reference.T));
  return record;
}

/// Envelope and correction magnitudes on a uniform grid, for plotting. The
/// correction column is zero when no correction parameters are supplied.
inline PreviewRecord run_pulse_preview(const ScenarioSpec& spec) {
  if (spec.kind != ScenarioKind::PulsePreview)
    throw std::invalid_argument("run_pulse_preview: wrong scenario kind");
  spec.pulse.validate();
  const int n = std::max(2, spec.preview_points);
  PreviewRecord record;
  record.times.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double t = spec.pulse.T * i / (n - 1);
    const EnvelopeSample e = sample_envelope(spec.pulse, t);
    record.times.push_back(t);
    record.omega_s.push_back(e.omega_s);
    record.omega_p.push_back(e.omega_p);
    if (spec.correction) {
      record.abs_omega_a.push_back(
          std::abs(sample_correction(spec.pulse, *spec.correction, t).omega_a));
    } else {
      record.abs_omega_a.push_back(0.0);
    }
  }
  detail::append_common_metadata(record.metadata, spec);
  return record;
}

}  // namespace stirap
