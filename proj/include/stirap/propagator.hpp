#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "stirap/hamiltonian.hpp"
#include "stirap/units.hpp"

namespace stirap {

enum class IntegrationMethod { MidpointExponential, RK4 };

inline const char* to_string(IntegrationMethod m) {
  return m == IntegrationMethod::MidpointExponential ? "midpoint_exponential"
                                                     : "rk4";
}

struct PropagationConfig {
  int step_count = 20000;
  IntegrationMethod method = IntegrationMethod::MidpointExponential;
  int record_stride = 20;
};

/// Time-resolved populations of one propagation. `populations[k]` holds
/// {p0, p-1, p+1} at `times[k]`; the first and last recorded times are always
/// 0 and T. `efficiency` is the final population of |+1>.
struct TraceRecord {
  std::vector<double> times;
  std::vector<std::array<double, 3>> populations;
  Vector3c final_state;
  double efficiency = 0.0;
};

inline double transfer_efficiency(const TraceRecord& r) {
  return std::norm(r.final_state(idx_plus));
}

inline double max_intermediate_population(const TraceRecord& r) {
  double max_p0 = 0.0;
  for (const auto& p : r.populations) max_p0 = std::max(max_p0, p[0]);
  return max_p0;
}

namespace detail {

/// exp(-i H dt) for Hermitian 3x3 H via spectral decomposition.
///
/// All trajectories without a counterdiabatic term have the arrowhead form
/// [[0, a, b], [a*, 0, 0], [b*, 0, 0]] whose spectral decomposition is
/// closed-form: eigenvalues {0, +-r} with r = sqrt(|a|^2 + |b|^2), and the
/// dynamics confined to span{|0>, (a*,b*)/r}. That path is taken whenever the
/// structural zeros hold exactly; otherwise a general Hermitian eigensolve is
/// used. Both branches are unitary to machine precision.
inline Matrix3c exp_minus_i_h_dt(const Matrix3c& h, double dt) {
  const bool arrowhead = h(1, 2) == complexd(0.0, 0.0) &&
                         h(0, 0) == complexd(0.0, 0.0) &&
                         h(1, 1) == complexd(0.0, 0.0) &&
                         h(2, 2) == complexd(0.0, 0.0);
  if (arrowhead) {
    const complexd a = h(0, 1);
    const complexd b = h(0, 2);
    const double r2 = std::norm(a) + std::norm(b);
    Matrix3c u = Matrix3c::Identity();
    if (r2 == 0.0) return u;
    const double r = std::sqrt(r2);
    const double c = std::cos(r * dt);
    const double s = std::sin(r * dt);
    const complexd v1 = std::conj(a) / r;  // lower components of the coupled
    const complexd v2 = std::conj(b) / r;  // bright direction
    const complexd is(0.0, s);
    u(0, 0) = c;
    u(0, 1) = -is * std::conj(v1);
    u(0, 2) = -is * std::conj(v2);
    u(1, 0) = -is * v1;
    u(2, 0) = -is * v2;
    u(1, 1) = 1.0 + (c - 1.0) * std::norm(v1);
    u(2, 2) = 1.0 + (c - 1.0) * std::norm(v2);
    u(1, 2) = (c - 1.0) * v1 * std::conj(v2);
    u(2, 1) = (c - 1.0) * v2 * std::conj(v1);
    return u;
  }
  Eigen::SelfAdjointEigenSolver<Matrix3c> es(h);
  const auto& w = es.eigenvalues();
  const auto& v = es.eigenvectors();
  Vector3c phases;
  for (int i = 0; i < 3; ++i) phases(i) = std::polar(1.0, -w(i) * dt);
  return v * phases.asDiagonal() * v.adjoint();
}

inline void check_finite(const Vector3c& psi, double t) {
  for (int i = 0; i < 3; ++i)
    if (!std::isfinite(psi(i).real()) || !std::isfinite(psi(i).imag()))
      throw std::runtime_error("propagation produced non-finite amplitudes at t = " +
                               std::to_string(t) + " us");
}

}  // namespace detail

/// Integrates the Schroedinger equation i d/dt psi = H(t) psi over
/// [0, duration].
///
/// MidpointExponential applies U_k = exp(-i H(t_k + dt/2) dt) per step, an
/// exactly unitary rule, and is the production method. RK4 integrates the
/// amplitudes directly and exists as an independent cross-check.
inline TraceRecord propagate(const HamiltonianTrajectory& traj,
                             const Vector3c& initial,
                             const PropagationConfig& config = {}) {
  if (!traj.evaluate) throw std::invalid_argument("propagate: empty trajectory");
  if (config.step_count < 1)
    throw std::invalid_argument("propagate: step_count must be positive");
  if (config.record_stride < 1)
    throw std::invalid_argument("propagate: record_stride must be positive");
  const double dt = traj.duration / config.step_count;
  if (traj.max_abs_delta != 0.0 && dt > 0.02 * two_pi / traj.max_abs_delta)
    throw std::invalid_argument(
        "propagate: step " + std::to_string(dt) +
        " us does not resolve the detuning phase; need step <= " +
        std::to_string(0.02 * two_pi / traj.max_abs_delta) + " us");
  if (std::abs(initial.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("propagate: initial state is not normalized");

  TraceRecord record;
  const int n = config.step_count;
  record.times.reserve(n / config.record_stride + 2);
  record.populations.reserve(n / config.record_stride + 2);
  Vector3c psi = initial;
  auto store = [&](int k) {
    record.times.push_back(k == n ? traj.duration : k * dt);
    record.populations.push_back(
        {std::norm(psi(0)), std::norm(psi(1)), std::norm(psi(2))});
  };
  store(0);

  if (config.method == IntegrationMethod::MidpointExponential) {
    for (int k = 0; k < n; ++k) {
      const double t_mid = (k + 0.5) * dt;
      psi = detail::exp_minus_i_h_dt(traj.evaluate(t_mid), dt) * psi;
      if ((k + 1) % config.record_stride == 0 || k + 1 == n) {
        detail::check_finite(psi, (k + 1) * dt);
        if (k + 1 != n) store(k + 1);
      }
    }
  } else {
    const complexd mi(0.0, -1.0);
    for (int k = 0; k < n; ++k) {
      const double t = k * dt;
      // k*dt + dt can overshoot the duration by one ulp on the last step
      const double t_end = std::min(t + dt, traj.duration);
      const Vector3c k1 = mi * (traj.evaluate(t) * psi);
      const Matrix3c h_mid = traj.evaluate(t + 0.5 * dt);
      const Vector3c k2 = mi * (h_mid * (psi + 0.5 * dt * k1));
      const Vector3c k3 = mi * (h_mid * (psi + 0.5 * dt * k2));
      const Vector3c k4 = mi * (traj.evaluate(t_end) * (psi + dt * k3));
      psi += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if ((k + 1) % config.record_stride == 0 || k + 1 == n) {
        detail::check_finite(psi, (k + 1) * dt);
        if (k + 1 != n) store(k + 1);
      }
    }
  }
  store(n);
  record.final_state = psi;
  record.efficiency = std::norm(psi(idx_plus));
  return record;
}

}  // namespace stirap
