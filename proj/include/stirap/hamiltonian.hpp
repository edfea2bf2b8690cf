#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <utility>

#include "stirap/pulses.hpp"

namespace stirap {

using Matrix3c = Eigen::Matrix3cd;
using Vector3c = Eigen::Vector3cd;

// Fixed basis order for every matrix and state vector in this library:
// index 0 = |0> (intermediate), 1 = |-1>, 2 = |+1>.
inline constexpr int idx_intermediate = 0;
inline constexpr int idx_minus = 1;
inline constexpr int idx_plus = 2;

inline Vector3c ket_intermediate() { return Vector3c(1, 0, 0); }
inline Vector3c ket_minus() { return Vector3c(0, 1, 0); }
inline Vector3c ket_plus() { return Vector3c(0, 0, 1); }

/// Bare STIRAP Hamiltonian: pump couples |0><->|-1|, Stokes |0><->|+1|,
/// both on two-photon resonance.
///   H_st = 1/2 [[0, Wp, Ws], [Wp, 0, 0], [Ws, 0, 0]]
inline Matrix3c h_stirap(const PulseParams& p, double t) {
  const EnvelopeSample e = sample_envelope(p, t);
  Matrix3c h = Matrix3c::Zero();
  h(0, 1) = h(1, 0) = 0.5 * e.omega_p;
  h(0, 2) = h(2, 0) = 0.5 * e.omega_s;
  return h;
}

/// Rotating-frame Hamiltonian of the two detuned correction fields,
///   H_sa = 1/2 [[0, Wa* e^{-i d t}, Wb e^{-i d t}],
///               [Wa e^{+i d t}, 0, 0],
///               [Wb* e^{+i d t}, 0, 0]].
/// The e^{+-i delta t} factors are kept as genuine time dependence and handed
/// to the propagator; no further rotating-wave approximation is applied.
inline Matrix3c h_sa_rotating(const PulseParams& p, const CorrectionParams& c,
                              double t) {
  const CorrectionSample s = sample_correction(p, c, t);
  const complexd phase = std::polar(1.0, -c.delta * t);
  Matrix3c h = Matrix3c::Zero();
  h(0, 1) = 0.5 * std::conj(s.omega_a) * phase;
  h(0, 2) = 0.5 * s.omega_b * phase;
  h(1, 0) = std::conj(h(0, 1));
  h(2, 0) = std::conj(h(0, 2));
  return h;
}

/// Mixing angle, tan(theta) = omega_p / omega_s. In [0, pi/2] for the
/// non-negative envelopes of the three families.
inline double mixing_angle(const PulseParams& p, double t) {
  const EnvelopeSample e = sample_envelope(p, t);
  if (e.omega_p == 0.0 && e.omega_s == 0.0) throw degenerate_envelope_error(t);
  return std::atan2(e.omega_p, e.omega_s);
}

/// d theta / dt from the analytic envelope derivatives. Equal to |omega_d|/2
/// up to sign.
inline double mixing_angle_rate(const PulseParams& p, double t) {
  const EnvelopeSample e = sample_envelope(p, t);
  const double norm2 = e.omega_p * e.omega_p + e.omega_s * e.omega_s;
  if (norm2 == 0.0) throw degenerate_envelope_error(t);
  return (e.d_omega_p * e.omega_s - e.omega_p * e.d_omega_s) / norm2;
}

/// Instantaneous eigenbasis of h_stirap at time t.
///
/// Phase convention: <-1|D> >= 0 and <0|B+-> > 0, all components real. This
/// fixes the gauge so that |d/dt n(t)> is well defined and the counterdiabatic
/// construction below can be checked against finite differences.
struct EigenFrame {
  Vector3c dark;          // eigenvalue 0
  Vector3c bright_minus;  // eigenvalue -1/2 sqrt(Wp^2 + Ws^2)
  Vector3c bright_plus;   // eigenvalue +1/2 sqrt(Wp^2 + Ws^2)
  double eigenvalues[3] = {0.0, 0.0, 0.0};  // {dark, minus, plus}, rad/us
  double theta = 0.0;
};

inline EigenFrame eigenframe(const PulseParams& p, double t) {
  const EnvelopeSample e = sample_envelope(p, t);
  const double norm2 = e.omega_p * e.omega_p + e.omega_s * e.omega_s;
  if (norm2 == 0.0) throw degenerate_envelope_error(t);
  const double split = 0.5 * std::sqrt(norm2);
  const double theta = std::atan2(e.omega_p, e.omega_s);
  const double sn = std::sin(theta);
  const double cs = std::cos(theta);
  const double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
  EigenFrame f;
  f.theta = theta;
  f.dark = Vector3c(0.0, cs, -sn);
  f.bright_minus = Vector3c(inv_sqrt2, -sn * inv_sqrt2, -cs * inv_sqrt2);
  f.bright_plus = Vector3c(inv_sqrt2, sn * inv_sqrt2, cs * inv_sqrt2);
  f.eigenvalues[0] = 0.0;
  f.eigenvalues[1] = -split;
  f.eigenvalues[2] = split;
  return f;
}

/// Exact transitionless-driving correction
///   H_cd = i sum_n [ |dn><n| - <n|dn> |n><n| ],
/// summed over the instantaneous eigenstates of h_stirap. Under the real
/// phase convention of eigenframe() the gauge term vanishes and the sum
/// collapses to a purely imaginary |-1><->|+1| coupling of magnitude
/// d theta/dt; the bright-bright contributions cancel because the eigenvector
/// directions depend on time only through theta.
inline Matrix3c h_cd_exact(const PulseParams& p, double t) {
  const double rate = mixing_angle_rate(p, t);
  Matrix3c h = Matrix3c::Zero();
  h(1, 2) = complexd(0.0, rate);
  h(2, 1) = complexd(0.0, -rate);
  return h;
}

enum class TrajectoryLabel { Stirap, SaCorrection, Total, ExactCD, StirapPlusExactCD };

inline const char* to_string(TrajectoryLabel l) {
  switch (l) {
    case TrajectoryLabel::Stirap: return "stirap";
    case TrajectoryLabel::SaCorrection: return "sa_correction";
    case TrajectoryLabel::Total: return "total";
    case TrajectoryLabel::ExactCD: return "exact_cd";
    case TrajectoryLabel::StirapPlusExactCD: return "stirap_plus_exact_cd";
  }
  return "?";
}

/// A time-dependent 3x3 Hermitian Hamiltonian on [0, duration]. Immutable
/// value; safe to share across threads. `max_abs_delta` carries the fastest
/// oscillation frequency so the propagator can enforce its step constraint;
/// `breakpoints` lists interior times where the matrix jumps (a truncated
/// correction switching on or off), letting step grids align to them.
struct HamiltonianTrajectory {
  TrajectoryLabel label = TrajectoryLabel::Stirap;
  double duration = 0.0;       // us
  double max_abs_delta = 0.0;  // rad/us, 0 when no detuned field is present
  std::function<Matrix3c(double)> evaluate;
  std::vector<double> breakpoints{};
};

inline HamiltonianTrajectory stirap_trajectory(const PulseParams& p) {
  p.validate();
  return {TrajectoryLabel::Stirap, p.T, 0.0,
          [p](double t) { return h_stirap(p, t); }};
}

inline HamiltonianTrajectory sa_trajectory(const PulseParams& p,
                                           const CorrectionParams& c) {
  p.validate();
  c.validate();
  return {TrajectoryLabel::SaCorrection, p.T, std::abs(c.delta),
          [p, c](double t) { return h_sa_rotating(p, c, t); }};
}

inline HamiltonianTrajectory total_trajectory(const PulseParams& p,
                                              const CorrectionParams& c) {
  p.validate();
  c.validate();
  // one envelope evaluation feeds both the bare and the correction parts;
  // this is the hot path of the sweep and grid experiments
  return {TrajectoryLabel::Total, p.T, std::abs(c.delta), [p, c](double t) {
            const EnvelopeSample e = sample_envelope(p, t);
            const CorrectionSample s = detail::correction_of(e, c, t);
            const complexd phase = std::polar(0.5, -c.delta * t);
            Matrix3c h = Matrix3c::Zero();
            h(0, 1) = 0.5 * e.omega_p + std::conj(s.omega_a) * phase;
            h(0, 2) = 0.5 * e.omega_s + s.omega_b * phase;
            h(1, 0) = std::conj(h(0, 1));
            h(2, 0) = std::conj(h(0, 2));
            return h;
          }};
}

inline HamiltonianTrajectory exact_cd_trajectory(const PulseParams& p) {
  p.validate();
  return {TrajectoryLabel::ExactCD, p.T, 0.0,
          [p](double t) { return h_cd_exact(p, t); }};
}

inline HamiltonianTrajectory stirap_plus_exact_cd_trajectory(const PulseParams& p) {
  p.validate();
  return {TrajectoryLabel::StirapPlusExactCD, p.T, 0.0, [p](double t) {
            return Matrix3c(h_stirap(p, t) + h_cd_exact(p, t));
          }};
}

/// Total Hamiltonian for a robustness-grid cell: the STIRAP pulses belong to
/// the cell, while the correction envelope is the one optimized for the
/// reference pulse pair, centered on this cell's protocol. The correction is
/// evaluated at t - T/2 + Tc/2 and vanishes where that falls outside [0, Tc]
/// (zero-padding for T > Tc; for T < Tc the tails are simply cut off). The
/// e^{+-i delta t} phases run with the cell's own time.
inline HamiltonianTrajectory shifted_correction_trajectory(
    const PulseParams& run, const PulseParams& reference,
    const CorrectionParams& c) {
  run.validate();
  reference.validate();
  c.validate();
  const double shift = 0.5 * reference.T - 0.5 * run.T;
  HamiltonianTrajectory traj{
      TrajectoryLabel::Total, run.T, std::abs(c.delta),
      [run, reference, c, shift](double t) {
        Matrix3c h = h_stirap(run, t);
        const double tau = t + shift;
        if (tau >= 0.0 && tau <= reference.T) {
          const CorrectionSample s = sample_correction(reference, c, tau);
          const complexd phase = std::polar(0.5, -c.delta * t);
          h(0, 1) += std::conj(s.omega_a) * phase;
          h(0, 2) += s.omega_b * phase;
          h(1, 0) = std::conj(h(0, 1));
          h(2, 0) = std::conj(h(0, 2));
        }
        return h;
      }};
  if (run.T > reference.T) {
    // the padded correction switches on and off inside the run
    traj.breakpoints = {-shift, reference.T - shift};
  }
  return traj;
}

}  // namespace stirap
