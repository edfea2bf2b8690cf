#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "closed_forms.hpp"
#include "stirap/hamiltonian.hpp"
#include "stirap/units.hpp"

using namespace stirap;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

PulseParams gaussian_reference(double T = 2.0) {
  return {PulseFamily::Gaussian, mhz_to_rad_per_us(2.0), T, T / 6.0, T / 10.0};
}

PulseParams exponential_reference(double T = 2.0) {
  return {PulseFamily::Exponential, mhz_to_rad_per_us(1.2), T, T / 15.0, 0.0};
}

PulseParams trigonometric_reference(double T = 2.0) {
  return {PulseFamily::Trigonometric, mhz_to_rad_per_us(0.5), T, 0.0, 0.0};
}

double hermiticity_defect(const Matrix3c& h) {
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("h_stirap structure", "[hamiltonian]") {
  const PulseParams p = gaussian_reference();
  const double t = 0.5 * p.T;
  const Matrix3c h = h_stirap(p, t);
  const double expected = 0.5 * p.omega0 *
                          std::exp(-p.delta_t * p.delta_t / (p.sigma * p.sigma));
  CHECK_THAT(h(0, 1).real(), WithinRel(expected, 1e-14));
  CHECK_THAT(h(0, 2).real(), WithinRel(expected, 1e-14));
  CHECK(h(1, 2) == complexd(0.0, 0.0));
  CHECK(h(0, 0) == complexd(0.0, 0.0));

  // underflowed far-tail envelopes give the zero matrix
  const PulseParams tiny{PulseFamily::Gaussian, 1.0, 1.0, 1e-3, 0.01};
  CHECK(h_stirap(tiny, 0.0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dark state is annihilated by h_stirap on a 1000-point grid", "[hamiltonian]") {
  for (const PulseParams& p :
       {gaussian_reference(), exponential_reference(), trigonometric_reference()}) {
    double worst = 0.0;
    for (int k = 0; k <= 1000; ++k) {
      const double t = p.T * k / 1000.0;
      const Matrix3c h = h_stirap(p, t);
      const Vector3c dark = eigenframe(p, t).dark;
      worst = std::max(worst, (h * dark).norm() / h.norm());
    }
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("rotating-frame correction Hamiltonian", "[hamiltonian]") {
  const PulseParams p = gaussian_reference();
  const CorrectionParams c{mhz_to_rad_per_us(3.0)};

  SECTION("phases drop out at t = 0") {
    const Matrix3c h = h_sa_rotating(p, c, 0.0);
    const CorrectionSample s = sample_correction(p, c, 0.0);
    CHECK(h(0, 1) == 0.5 * std::conj(s.omega_a));
    CHECK(h(0, 2) == 0.5 * s.omega_b);
  }

  SECTION("Hermitian at 1000 random times") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> time(0.0, p.T);
    for (int k = 0; k < 1000; ++k) {
      const Matrix3c h = h_sa_rotating(p, c, time(rng));
      CHECK(hermiticity_defect(h) <= 1e-14 * std::max(1.0, h.norm()));
    }
  }

  SECTION("trigonometric corrections give a constant coupling magnitude") {
    const PulseParams trig = trigonometric_reference();
    const CorrectionParams trig_c{mhz_to_rad_per_us(20.0)};
    const double reference = std::abs(h_sa_rotating(trig, trig_c, 0.0)(0, 1));
    for (int k = 0; k <= 100; ++k) {
      const double t = trig.T * k / 100.0;
      CHECK_THAT(std::abs(h_sa_rotating(trig, trig_c, t)(0, 1)),
                 WithinRel(reference, 1e-12));
    }
  }
}

TEST_CASE("mixing angle limits and dark-state labels", "[hamiltonian]") {
  const PulseParams trig = trigonometric_reference();

  // omega_p = 0, omega_s > 0: theta = 0, dark = |-1>
  const double theta_end = mixing_angle(trig, trig.T);
  CHECK_THAT(theta_end, WithinAbs(0.0, 1e-15));
  CHECK((eigenframe(trig, trig.T).dark - ket_minus()).norm() < 1e-15);

  // omega_s = 0, omega_p > 0: theta = pi/2, dark = -|+1>
  const double theta_start = mixing_angle(trig, 0.0);
  CHECK(theta_start == std::numbers::pi / 2);
  CHECK((eigenframe(trig, 0.0).dark + ket_plus()).norm() < 1e-15);

  // equal envelopes: theta = pi/4
  CHECK_THAT(mixing_angle(trig, 0.5 * trig.T), WithinAbs(std::numbers::pi / 4, 1e-15));
}

TEST_CASE("eigenframe matches a generic numeric eigensolver", "[hamiltonian]") {
  std::mt19937 rng(2024);
  for (const PulseParams& p :
       {gaussian_reference(), exponential_reference(), trigonometric_reference()}) {
    std::uniform_real_distribution<double> time(0.0, p.T);
    for (int k = 0; k < 250; ++k) {
      const double t = time(rng);
      const EigenFrame f = eigenframe(p, t);
      const EnvelopeSample e = sample_envelope(p, t);
      const double split =
          0.5 * std::hypot(e.omega_p, e.omega_s);

      Eigen::SelfAdjointEigenSolver<Matrix3c> solver(h_stirap(p, t));
      const auto numeric = solver.eigenvalues();
      const double scale = std::max(1.0, split);
      CHECK(std::abs(numeric(0) + split) <= 1e-12 * scale);
      CHECK(std::abs(numeric(1)) <= 1e-12 * scale);
      CHECK(std::abs(numeric(2) - split) <= 1e-12 * scale);
      CHECK_THAT(f.eigenvalues[2], WithinRel(split, 1e-13));
      CHECK(f.eigenvalues[1] == -f.eigenvalues[2]);
      CHECK(f.eigenvalues[0] == 0.0);

      // orthonormality and the fixed phase convention
      Eigen::Matrix3cd basis;
      basis.col(0) = f.dark;
      basis.col(1) = f.bright_minus;
      basis.col(2) = f.bright_plus;
      CHECK((basis.adjoint() * basis - Matrix3c::Identity()).cwiseAbs().maxCoeff() <=
            1e-12);
      CHECK(f.dark(1).real() >= 0.0);
      CHECK(f.dark(1).imag() == 0.0);
      CHECK(f.bright_minus(0).real() > 0.0);
      CHECK(f.bright_plus(0).real() > 0.0);

      // residuals against h_stirap
      const Matrix3c h = h_stirap(p, t);
      CHECK((h * f.bright_plus - f.eigenvalues[2] * f.bright_plus).norm() <=
            1e-12 * scale);
      CHECK((h * f.bright_minus - f.eigenvalues[1] * f.bright_minus).norm() <=
            1e-12 * scale);
    }
  }
}

TEST_CASE("exact counterdiabatic term", "[hamiltonian]") {
  const PulseParams p = gaussian_reference();

  SECTION("never couples the dark state to |0>") {
    for (int k = 0; k <= 100; ++k) {
      const double t = p.T * k / 100.0;
      const Matrix3c h = h_cd_exact(p, t);
      const Vector3c dark = eigenframe(p, t).dark;
      CHECK(std::abs(ket_intermediate().dot(h * dark)) <= 1e-16);
    }
  }

  SECTION("coupling magnitude equals |theta_dot| = |omega_d| / 2") {
    for (int k = 0; k <= 100; ++k) {
      const double t = p.T * k / 100.0;
      const Matrix3c h = h_cd_exact(p, t);
      CHECK_THAT(std::abs(h(2, 1)), WithinRel(std::abs(mixing_angle_rate(p, t)), 1e-15));
      CHECK_THAT(std::abs(h(2, 1)), WithinRel(0.5 * std::abs(omega_d(p, t)), 1e-13));
    }
  }

  SECTION("coincident pulses have a vanishing correction") {
    PulseParams coincident = p;
    coincident.delta_t = 0.0;  // omega_p == omega_s for all t
    for (int k = 0; k <= 20; ++k) {
      const double t = p.T * k / 20.0;
      CHECK(h_cd_exact(coincident, t).cwiseAbs().maxCoeff() == 0.0);
    }
  }

  SECTION("agrees with the fully numeric eigenvector construction") {
    const double h_step = 1e-6;
    for (const PulseParams& params :
         {gaussian_reference(), exponential_reference(), trigonometric_reference()}) {
      for (int k = 1; k < 50; ++k) {
        const double t = params.T * k / 50.0;
        const Matrix3c analytic = h_cd_exact(params, t);
        const Matrix3c numeric = oracle::numeric_h_cd(params, t, h_step);
        const double scale = std::max(analytic.norm(), 1e-6);
        CHECK((analytic - numeric).norm() / scale < 1e-6);
      }
    }
  }
}

TEST_CASE("every trajectory label yields Hermitian matrices", "[hamiltonian]") {
  const PulseParams p = gaussian_reference();
  const CorrectionParams c{mhz_to_rad_per_us(3.0)};
  const HamiltonianTrajectory trajectories[] = {
      stirap_trajectory(p), sa_trajectory(p, c), total_trajectory(p, c),
      exact_cd_trajectory(p), stirap_plus_exact_cd_trajectory(p)};
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> time(0.0, p.T);
  for (const auto& traj : trajectories) {
    for (int k = 0; k < 200; ++k) {
      const Matrix3c h = traj.evaluate(time(rng));
      CHECK(hermiticity_defect(h) <= 1e-14 * std::max(1.0, h.norm()));
    }
  }
}

TEST_CASE("two-photon emulation identity |wa||wb| / 2|delta| = |omega_d|", "[hamiltonian]") {
  const CorrectionParams c{mhz_to_rad_per_us(3.0)};
  for (const PulseParams& p :
       {gaussian_reference(), exponential_reference(), trigonometric_reference()}) {
    for (int k = 0; k <= 200; ++k) {
      const double t = p.T * k / 200.0;
      const CorrectionSample s = sample_correction(p, c, t);
      const double emulated =
          std::abs(s.omega_a) * std::abs(s.omega_b) / (2.0 * std::abs(c.delta));
      CHECK_THAT(emulated, WithinRel(std::abs(omega_d(p, t)), 1e-14));
    }
  }
}

TEST_CASE("center-aligned correction trajectory", "[hamiltonian]") {
  const CorrectionParams c{mhz_to_rad_per_us(3.0)};
  PulseParams reference = gaussian_reference();
  reference.sigma = 0.6;
  reference.delta_t = 0.6;
  reference.T = 6.0 * 0.6 + 2.0 * 0.6;  // 4.8 us

  SECTION("at the reference parameters it reduces to the plain total") {
    const HamiltonianTrajectory aligned =
        shifted_correction_trajectory(reference, reference, c);
    const HamiltonianTrajectory plain = total_trajectory(reference, c);
    for (int k = 0; k <= 100; ++k) {
      const double t = reference.T * k / 100.0;
      CHECK((aligned.evaluate(t) - plain.evaluate(t)).cwiseAbs().maxCoeff() <= 1e-15);
    }
  }

  SECTION("zero-padding outside the correction window for longer runs") {
    PulseParams longer = reference;
    longer.sigma = 1.0;
    longer.delta_t = 2.0;
    longer.T = 6.0 * 1.0 + 2.0 * 2.0;  // 10 us, correction window is 2.6..7.4
    const HamiltonianTrajectory traj =
        shifted_correction_trajectory(longer, reference, c);
    const Matrix3c early = traj.evaluate(1.0);
    CHECK((early - h_stirap(longer, 1.0)).cwiseAbs().maxCoeff() == 0.0);
    const Matrix3c centered = traj.evaluate(5.0);
    CHECK((centered - h_stirap(longer, 5.0)).cwiseAbs().maxCoeff() > 0.0);
  }

  SECTION("truncation keeps a live correction at the edges of shorter runs") {
    PulseParams shorter = reference;
    shorter.sigma = 0.2;
    shorter.delta_t = 0.2;
    shorter.T = 6.0 * 0.2 + 2.0 * 0.2;  // 1.6 us < 4.8 us
    const HamiltonianTrajectory traj =
        shifted_correction_trajectory(shorter, reference, c);
    const Matrix3c at_start = traj.evaluate(0.0);
    CHECK((at_start - h_stirap(shorter, 0.0)).cwiseAbs().maxCoeff() > 0.0);
  }
}
