#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "siv/errors.hpp"
#include "siv/numerics.hpp"
#include "siv/optical.hpp"
#include "support/synthetic.hpp"

using namespace siv;
using siv::testing::grid;

namespace {

OpticalParams undamped() {
  OpticalParams p;
  p.t1 = 1e3;
  return p;
}

// resonant drive without decay
double rabi_population(double omega, double t) {
  const double s = std::sin(pi * omega * t);
  return s * s;
}

}  // namespace

TEST_SUITE("optical") {
  TEST_CASE("state conventions") {
    CHECK(excited_population(excited_state()) == 1.0);
    CHECK(excited_population(ground_state()) == 0.0);
    CHECK(excited_state().trace().real() == 1.0);
    OpticalParams p;
    CHECK(p.t2() == doctest::Approx(2.0 * p.t1));
    p.gamma_phi = 1e8;
    CHECK(1.0 / p.t2() == doctest::Approx(0.5 / p.t1 + 1e8));
  }

  TEST_CASE("free decay is exponential") {
    OpticalParams p;
    const Vector t = grid(0.0, 8e-9, 41);
    const std::vector<double> trace = fluorescence_decay(p, excited_state(), t);
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(trace[i] == doctest::Approx(std::exp(-t[i] / p.t1)).epsilon(1e-6));
  }

  TEST_CASE("free evolution with zero duration is the identity") {
    const Matrix2c rho = (Matrix2c() << 0.3, cplx(0.1, 0.2), cplx(0.1, -0.2), 0.7).finished();
    CHECK((evolve_lindblad(rho, OpticalParams{}, {0.5, 0.0}, 0.0) - rho).norm() == 0.0);
  }

  TEST_CASE("undamped Rabi oscillation matches sin^2") {
    const OpticalParams p = undamped();
    const double amp = 0.1;
    const double omega = p.rabi(amp);
    const double dt = 1.0 / (400.0 * omega);
    const SweepResult s = run_optical_rabi(p, amp, grid(0.0, 3.0 / omega, 31), dt);
    for (std::size_t i = 0; i < s.axis.size(); ++i) {
      CHECK(s.signal[i] == doctest::Approx(rabi_population(omega, s.axis[i])).epsilon(1e-6));
    }
  }

  TEST_CASE("integrator converges at fourth order") {
    OpticalParams p;
    p.gamma_phi = 2e8;
    p.detuning = 50e6;
    const OpticalDrive d{0.2, 0.4};
    const double t = 2e-9;
    const Matrix2c ref = evolve_lindblad(ground_state(), p, d, t, 1e-13);
    const double coarse = 0.9 * std::min(1.0 / (20.0 * p.rabi(d.amplitude)), p.t1 / 20.0);
    const double e1 = (evolve_lindblad(ground_state(), p, d, t, coarse) - ref).norm();
    const double e2 = (evolve_lindblad(ground_state(), p, d, t, coarse / 2.0) - ref).norm();
    CHECK(e1 / e2 > 12.0);
    CHECK(e1 / e2 < 20.0);
  }

  TEST_CASE("default step respects the resolution limits") {
    OpticalParams p;
    const OpticalDrive d{0.5, 0.0};
    const double t = 3.3e-9;
    const double dt = default_step(p, d, t);
    CHECK(dt <= 1.0 / (40.0 * p.rabi(d.amplitude)) * (1.0 + 1e-12));
    CHECK(dt <= p.t1 / 40.0);
    const double steps = t / dt;
    CHECK(steps == doctest::Approx(std::round(steps)).epsilon(1e-12));
    CHECK(default_step(p, {0.0, 0.0}, 1e-9) <= p.t1 / 40.0);
    CHECK(default_step(p, d, 0.0) == 0.0);
  }

  TEST_CASE("oversized steps are rejected") {
    OpticalParams p;
    const OpticalDrive d{0.5, 0.0};
    const double limit = 1.0 / (20.0 * p.rabi(d.amplitude));
    CHECK_THROWS_AS(evolve_lindblad(ground_state(), p, d, 1e-9, 1.5 * limit), StepTooLarge);
    CHECK_NOTHROW(evolve_lindblad(ground_state(), p, d, 1e-9, 0.9 * limit));
    p.detuning = 1e12;
    CHECK_THROWS_AS(evolve_lindblad(ground_state(), p, {0.0, 0.0}, 1e-9, 1e-12), StepTooLarge);
  }

  TEST_CASE("driven steady state") {
    OpticalParams p;
    p.gamma_phi = 3e8;
    const double amp = 0.3;
    const double omega = two_pi * p.rabi(amp);
    const double g1 = 1.0 / p.t1;
    const double g2 = 1.0 / p.t2();
    const double s = omega * omega / (g1 * g2);
    const Matrix2c rho = evolve_lindblad(ground_state(), p, {amp, 0.0}, 40e-9);
    CHECK(excited_population(rho) == doctest::Approx(0.5 * s / (1.0 + s)).epsilon(1e-6));
  }

  TEST_CASE("evolution stays physical") {
    OpticalParams p;
    p.gamma_phi = 1e8;
    p.detuning = 120e6;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matrix2c rho = ground_state();
    for (int k = 0; k < 30; ++k) {
      rho = evolve_lindblad(rho, p, {u(rng), two_pi * u(rng)}, 1e-9 * u(rng));
      CHECK(rho.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK((rho - rho.adjoint()).norm() < 1e-15);
      CHECK(rho.determinant().real() >= -1e-12);
      CHECK(excited_population(rho) >= -1e-12);
      CHECK(excited_population(rho) <= 1.0 + 1e-12);
    }
  }

  TEST_CASE("Rabi analysis recovers frequency and T2") {
    OpticalParams p;
    p.gamma_phi = 1.5e8;
    const double amp = 0.4;
    const double omega = p.rabi(amp);
    const SweepResult s = run_optical_rabi(p, amp, grid(0.0, 6e-9, 300), 1.0 / (400.0 * omega));
    const OpticalRabiAnalysis a = analyze_optical_rabi(s, p.t1);
    // damping shifts the observed frequency slightly below the bare Rabi rate
    CHECK(a.frequency == doctest::Approx(omega).epsilon(2e-3));
    CHECK(a.t2 == doctest::Approx(p.t2()).epsilon(0.03));
    CHECK(a.gamma2 == doctest::Approx(1.0 / (pi * a.t2)));
    CHECK_THROWS_AS(analyze_optical_rabi(s, 0.0), InvalidArgument);
  }

  TEST_CASE("phase control has a 2 pi period") {
    const OpticalParams p;
    const OpticalPulseTrain train = phase_control_train(p);
    REQUIRE(train.segments.size() == 2);
    CHECK(p.rabi(train.segments[0].amplitude) * train.segments[0].duration == doctest::Approx(0.25));
    CHECK(train.buffer == 0.8e-9);
    const SweepResult s = run_phase_control(p, train, grid(0.0, 4.0 * pi, 81));
    const SinusoidFit f = fit_sinusoid(s.axis, s.signal);
    CHECK(f.period == doctest::Approx(two_pi).epsilon(1e-6));
    CHECK(f.amplitude > 0.05);
    CHECK(f.rms_residual < 1e-6 * f.amplitude);
    // in phase gives the larger excited population
    CHECK(s.signal.front() > s.signal[20]);

    const OpticalParams ideal = undamped();
    const OpticalPulseTrain t2 = phase_control_train(ideal, 0.35e-9, 0.0);
    const SweepResult clean = run_phase_control(ideal, t2, {0.0, pi}, 1e-13);
    CHECK(clean.signal[0] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(clean.signal[1]) < 1e-9);

    // a common phase on both pulses is unobservable
    OpticalPulseTrain shifted = train;
    for (OpticalSegment& seg : shifted.segments) seg.phase += 1.1;
    const SweepResult s2 = run_phase_control(p, shifted, s.axis);
    for (std::size_t i = 0; i < s.signal.size(); ++i) CHECK(s2.signal[i] == doctest::Approx(s.signal[i]).epsilon(1e-10));

    OpticalPulseTrain bad = train;
    bad.segments.pop_back();
    CHECK_THROWS_AS(run_phase_control(p, bad, {0.0}), InvalidArgument);
    bad = train;
    bad.buffer = -1.0;
    CHECK_THROWS_AS(run_phase_control(p, bad, {0.0}), InvalidArgument);
    CHECK_THROWS_AS(phase_control_train(p, 0.0), InvalidArgument);
  }

  TEST_CASE("lifetime extraction") {
    const Vector t = grid(0.0, 10e-9, 120);
    Vector y(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) y[i] = 850.0 * std::exp(-t[i] / 1.7e-9) + 12.0;
    const LifetimeFit f = extract_lifetime(t, y);
    CHECK(f.t1 == doctest::Approx(1.7e-9).epsilon(1e-8));
    CHECK(f.amplitude == doctest::Approx(850.0).epsilon(1e-8));

    const Vector flat(t.size(), 3.0);
    CHECK_THROWS(extract_lifetime(t, flat));
  }

  TEST_CASE("lifetime ensemble") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(1.65e-9, 0.38e-9);
    Vector v(4000);
    for (double& x : v) x = n(rng);
    const LifetimeEnsemble e = aggregate_lifetimes(v);
    CHECK(e.mean == doctest::Approx(1.65e-9).epsilon(0.02));
    CHECK(e.sigma == doctest::Approx(0.38e-9).epsilon(0.05));
    CHECK_THROWS_AS(aggregate_lifetimes(Vector(5, 1.0)), InvalidArgument);
    const LifetimeEnsemble same = aggregate_lifetimes(Vector(20, 2e-9));
    CHECK(same.mean == 2e-9);
    CHECK(same.sigma == 0.0);
  }

  TEST_CASE("Fourier limit") {
    CHECK(fourier_limit(1.6535e-9) == doctest::Approx(96.25e6).epsilon(1e-3));
    CHECK(fourier_limit(1.0) == doctest::Approx(1.0 / two_pi));
    CHECK_THROWS_AS(fourier_limit(0.0), InvalidArgument);
  }

  TEST_CASE("parameter validation") {
    OpticalParams p;
    p.t1 = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p.t1 = 1e-9;
    p.gamma_phi = -1.0;
    CHECK_THROWS_AS(evolve_lindblad(ground_state(), p, {}, 1e-9), InvalidArgument);
    CHECK_THROWS_AS(evolve_lindblad(ground_state(), OpticalParams{}, {}, -1e-9), InvalidArgument);
  }
}
