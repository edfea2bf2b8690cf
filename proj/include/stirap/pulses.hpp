#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace stirap {

using complexd = std::complex<double>;

/// Raman pulse envelope families for the three-level transfer protocols.
enum class PulseFamily { Gaussian, Exponential, Trigonometric };

inline const char* to_string(PulseFamily f) {
  switch (f) {
    case PulseFamily::Gaussian: return "gaussian";
    case PulseFamily::Exponential: return "exponential";
    case PulseFamily::Trigonometric: return "trigonometric";
  }
  return "?";
}

/// Thrown when both envelopes vanish (or their square sum underflows) at a
/// sampled time. This cannot happen inside [0, T] for the three families, so
/// it always indicates a malformed parameter set rather than a limit to take.
struct degenerate_envelope_error : std::domain_error {
  explicit degenerate_envelope_error(double t)
      : std::domain_error("degenerate pulse envelope: omega_p^2 + omega_s^2 "
                          "underflows at t = " + std::to_string(t) + " us") {}
};

/// Parameters of one pump/Stokes envelope pair. Frequencies are angular
/// (rad/us), times in us. `sigma` is unused for Trigonometric and `delta_t`
/// only enters the Gaussian family (half the delay between the pulse centers).
struct PulseParams {
  PulseFamily family = PulseFamily::Gaussian;
  double omega0 = 0.0;   // peak Rabi frequency, rad/us
  double T = 0.0;        // protocol duration, us
  double sigma = 0.0;    // width parameter, us
  double delta_t = 0.0;  // half pulse delay, us

  void validate() const {
    if (!(omega0 > 0.0)) throw std::invalid_argument("pulse: omega0 must be > 0");
    if (!(T > 0.0)) throw std::invalid_argument("pulse: T must be > 0");
    if (family != PulseFamily::Trigonometric && !(sigma > 0.0))
      throw std::invalid_argument("pulse: sigma must be > 0 for this family");
    if (family == PulseFamily::Gaussian && delta_t < 0.0)
      throw std::invalid_argument("pulse: delta_t must be >= 0");
  }
};

/// Instantaneous pump/Stokes Rabi frequencies and their analytic time
/// derivatives, all real. The envelopes are non-negative on [0, T].
struct EnvelopeSample {
  double omega_p = 0.0;    // rad/us
  double omega_s = 0.0;    // rad/us
  double d_omega_p = 0.0;  // rad/us^2
  double d_omega_s = 0.0;  // rad/us^2
};

/// Detuning and fixed relative phase defining the two correction fields.
struct CorrectionParams {
  double delta = 0.0;                       // common detuning, rad/us
  double phase_a = std::numbers::pi / 2.0;  // constant phase of omega_a

  void validate() const {
    if (delta == 0.0)
      throw std::invalid_argument("correction: delta must be nonzero");
  }
};

/// Complex correction Rabi frequencies. Both magnitudes equal
/// sqrt(2|delta||omega_d|); only the phases differ.
struct CorrectionSample {
  complexd omega_a;
  complexd omega_b;
};

namespace detail {

inline void check_time(const PulseParams& p, double t) {
  if (!(t >= 0.0 && t <= p.T))
    throw std::invalid_argument("pulse: t = " + std::to_string(t) +
                                " outside [0, " + std::to_string(p.T) + "] us");
}

}  // namespace detail

/// Evaluates the selected envelope pair and its derivatives at t in [0, T].
///
/// Gaussian: peaks omega0, centers T/2 -+ delta_t (Stokes earlier).
/// Exponential: logistic-square-root ramps crossing at T/2.
/// Trigonometric: omega_s = omega0 sin(pi t / 2T), omega_p = omega0 cos(pi t / 2T).
inline EnvelopeSample sample_envelope(const PulseParams& p, double t) {
  detail::check_time(p, t);
  EnvelopeSample e;
  switch (p.family) {
    case PulseFamily::Gaussian: {
      const double inv_s2 = 1.0 / (p.sigma * p.sigma);
      const double xs = t - 0.5 * p.T + p.delta_t;
      const double xp = t - 0.5 * p.T - p.delta_t;
      e.omega_s = p.omega0 * std::exp(-xs * xs * inv_s2);
      e.omega_p = p.omega0 * std::exp(-xp * xp * inv_s2);
      e.d_omega_s = -2.0 * xs * inv_s2 * e.omega_s;
      e.d_omega_p = -2.0 * xp * inv_s2 * e.omega_p;
      break;
    }
    case PulseFamily::Exponential: {
      const double x = (t - 0.5 * p.T) / p.sigma;
      const double em = std::exp(-x);
      const double ep = std::exp(x);
      e.omega_s = p.omega0 / std::sqrt(1.0 + em);
      e.omega_p = p.omega0 / std::sqrt(1.0 + ep);
      e.d_omega_s = 0.5 / p.sigma * em * p.omega0 / std::pow(1.0 + em, 1.5);
      e.d_omega_p = -0.5 / p.sigma * ep * p.omega0 / std::pow(1.0 + ep, 1.5);
      break;
    }
    case PulseFamily::Trigonometric: {
      const double phase = std::numbers::pi * t / (2.0 * p.T);
      const double rate = std::numbers::pi / (2.0 * p.T);
      const double sn = std::sin(phase);
      const double cs = std::cos(phase);
      e.omega_s = p.omega0 * sn;
      e.omega_p = p.omega0 * cs;
      e.d_omega_s = p.omega0 * rate * cs;
      e.d_omega_p = -p.omega0 * rate * sn;
      break;
    }
  }
  return e;
}

namespace detail {

inline complexd omega_d_of(const EnvelopeSample& e, double t) {
  const double norm2 = e.omega_p * e.omega_p + e.omega_s * e.omega_s;
  if (norm2 == 0.0) throw degenerate_envelope_error(t);
  const double rate = (e.d_omega_p * e.omega_s - e.omega_p * e.d_omega_s) / norm2;
  return complexd(0.0, -2.0 * rate);
}

inline CorrectionSample correction_of(const EnvelopeSample& e,
                                      const CorrectionParams& c, double t) {
  const double magnitude =
      std::sqrt(2.0 * std::abs(c.delta) * std::abs(omega_d_of(e, t)));
  return {std::polar(magnitude, c.phase_a), complexd(magnitude, 0.0)};
}

}  // namespace detail

/// Effective two-photon pulse
///   omega_d = -2i (d_omega_p omega_s - omega_p d_omega_s) / (omega_p^2 + omega_s^2),
/// evaluated from the analytic derivatives. Purely imaginary; the sign of the
/// imaginary part is opposite to the sign of the mixing-angle rate.
inline complexd omega_d(const PulseParams& p, double t) {
  return detail::omega_d_of(sample_envelope(p, t), t);
}

/// Correction pair emulating omega_d through two detuned fields:
///   omega_a = e^{i phase_a} sqrt(2 |delta| |omega_d|),  omega_b = sqrt(2 |delta| |omega_d|).
/// |delta| keeps the radical real for negative detunings; the sign of delta
/// enters only the e^{+-i delta t} phases of the rotating-frame Hamiltonian.
inline CorrectionSample sample_correction(const PulseParams& p,
                                          const CorrectionParams& c, double t) {
  return detail::correction_of(sample_envelope(p, t), c, t);
}

/// Global adiabaticity figure omega0 * delta_t (the delayed-pair criterion
/// asks for values well above 10). The delay is undefined for the other two
/// families, so omega0 * T is returned there as a proxy; callers that export
/// the figure should flag it via adiabaticity_figure_is_proxy().
inline double adiabaticity_figure(const PulseParams& p) {
  if (p.family == PulseFamily::Gaussian) return p.omega0 * p.delta_t;
  return p.omega0 * p.T;
}

inline bool adiabaticity_figure_is_proxy(const PulseParams& p) {
  return p.family != PulseFamily::Gaussian;
}

}  // namespace stirap
