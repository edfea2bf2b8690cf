#pragma once

// Test-only oracles, kept independent of the library's evaluation paths:
// the closed-form |omega_d| expressions for the Gaussian and exponential
// envelope pairs, central finite differences, and a fully numeric
// counterdiabatic construction built on Eigen's iterative eigensolver.

#include <Eigen/Dense>
#include <cmath>

#include "stirap/hamiltonian.hpp"
#include "stirap/pulses.hpp"

namespace oracle {

// |omega_d| = (4 dt / s^2) sech[(4 dt / s^2)(t - T/2)] for the Gaussian pair
inline double gaussian_omega_d_magnitude(const stirap::PulseParams& p, double t) {
  const double k = 4.0 * p.delta_t / (p.sigma * p.sigma);
  return k / std::cosh(k * (t - 0.5 * p.T));
}

// |omega_d| = (1 / 2 s) sech[(t - T/2) / 2 s] for the exponential pair
inline double exponential_omega_d_magnitude(const stirap::PulseParams& p, double t) {
  const double k = 0.5 / p.sigma;
  return k / std::cosh(k * (t - 0.5 * p.T));
}

template <typename Fn>
double central_difference(Fn&& f, double t, double h) {
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

// Instantaneous eigenbasis from a generic numeric solver, rotated into the
// same gauge as stirap::eigenframe: <-1|dark> >= 0, <0|bright> > 0, with the
// residual complex phase removed against the largest component.
inline Eigen::Matrix3cd numeric_eigenvectors(const stirap::PulseParams& p, double t) {
  Eigen::SelfAdjointEigenSolver<stirap::Matrix3c> solver(stirap::h_stirap(p, t));
  Eigen::Matrix3cd v = solver.eigenvectors();  // columns ordered by eigenvalue
  // columns: 0 -> bright_minus, 1 -> dark, 2 -> bright_plus
  Eigen::Matrix3cd out;
  out.col(0) = v.col(1);
  out.col(1) = v.col(0);
  out.col(2) = v.col(2);
  for (int c = 0; c < 3; ++c) {
    const int anchor_row = c == 0 ? 1 : 0;  // <-1| for dark, <0| for bright
    const stirap::complexd a = out(anchor_row, c);
    out.col(c) *= std::conj(a) / std::abs(a);
  }
  return out;
}

// Full evaluation of the transitionless correction
//   H = i sum_n [ |dn><n| - <n|dn><n||n><n| ]
// with |dn> from central finite differences of the phase-aligned numeric
// eigenvectors.
inline stirap::Matrix3c numeric_h_cd(const stirap::PulseParams& p, double t, double h) {
  const Eigen::Matrix3cd plus = numeric_eigenvectors(p, t + h);
  const Eigen::Matrix3cd minus = numeric_eigenvectors(p, t - h);
  const Eigen::Matrix3cd center = numeric_eigenvectors(p, t);
  stirap::Matrix3c result = stirap::Matrix3c::Zero();
  const stirap::complexd i_unit(0.0, 1.0);
  for (int n = 0; n < 3; ++n) {
    const Eigen::Vector3cd dn = (plus.col(n) - minus.col(n)) / (2.0 * h);
    const stirap::complexd gauge = center.col(n).dot(dn);  // <n|dn>
    result += i_unit * (dn * center.col(n).adjoint() -
                        gauge * center.col(n) * center.col(n).adjoint());
  }
  return result;
}

}  // namespace oracle
