#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "siv/errors.hpp"
#include "siv/models.hpp"
#include "siv/optical.hpp"
#include "siv/sequences.hpp"
#include "support/synthetic.hpp"

using namespace siv;
using siv::testing::grid;

namespace {

constexpr double a_par = 621.75e3;
constexpr double a_perp = 140.1e3;

ExperimentSetup setup(double par = a_par, double perp = a_perp) {
  ExperimentSetup s;
  s.params.larmor_n = 3.58579e6;
  s.params.hyperfine = {{par, perp}};
  return s;
}

}  // namespace

TEST_SUITE("sequences") {
  TEST_CASE("dd phase patterns") {
    for (int k = 0; k < 16; ++k) CHECK(dd_phase(DdKind::CPMG, k) == doctest::Approx(pi / 2));
    const double xy[8] = {0.0, pi / 2, 0.0, pi / 2, pi / 2, 0.0, pi / 2, 0.0};
    for (int k = 0; k < 16; ++k) CHECK(dd_phase(DdKind::XY, k) == doctest::Approx(xy[k % 8]));
  }

  TEST_CASE("rabi oscillation period") {
    const ExperimentSetup s = setup(0.0, 0.0);
    const double rabi = 8.878e6;
    const SweepResult r = run_rabi(s, rabi, grid(0.0, 4.0 / rabi, 161));
    for (std::size_t i = 0; i < r.axis.size(); ++i) {
      CHECK(r.signal[i] == doctest::Approx(std::pow(std::sin(pi * rabi * r.axis[i]), 2)).epsilon(1e-9));
    }
    const SinusoidFit f = fit_sinusoid(r.axis, r.signal);
    CHECK(f.period == doctest::Approx(1.0 / rabi).epsilon(1e-8));
    CHECK(r.axis_label == "duration_s");
  }

  TEST_CASE("electron ramsey resolves the longitudinal coupling") {
    ExperimentSetup s = setup();
    s.dephasing = {4e-6, 1.5};
    const SweepResult r = run_ramsey(s, 2e6, grid(0.0, 6e-6, 600));
    const FitResult f = fit(lookup_model("damped_sine_sum"), r.axis, r.signal);
    const double split = std::abs(f.params[1] - f.params[6]);
    CHECK(split == doctest::Approx(a_par).epsilon(0.01));
    CHECK(0.5 * (f.params[1] + f.params[6]) == doctest::Approx(2e6).epsilon(0.01));
  }

  TEST_CASE("nuclear ramsey frequencies differ by the longitudinal coupling") {
    const ExperimentSetup s = setup();
    const std::vector<double> taus = grid(0.0, 3e-6, 300);
    const SweepResult down = run_ramsey(s, 0.0, taus, RamseyTarget::nuclear, ElectronSpin::down);
    const SweepResult up = run_ramsey(s, 0.0, taus, RamseyTarget::nuclear, ElectronSpin::up);
    const double fd = 1.0 / fit_sinusoid(down.axis, down.signal).period;
    const double fu = 1.0 / fit_sinusoid(up.axis, up.signal).period;
    CHECK(std::abs(fu - fd) == doctest::Approx(a_par).epsilon(0.02));
    CHECK(0.5 * (fu + fd) == doctest::Approx(s.params.larmor_n).epsilon(0.02));
    CHECK(down.signal_label == "nuclear_population_up");
    CHECK(down.column("nuclear_sigma_z").size() == taus.size());
  }

  TEST_CASE("per-segment dephasing under ideal decoupling") {
    ExperimentSetup s = setup(0.0, 0.0);
    s.dephasing = {3e-6, 2.0};
    for (int n : {1, 2, 3, 8}) {
      const SweepResult r = run_dd(s, DdKind::CPMG, n, grid(0.0, 2e-6, 21));
      for (std::size_t i = 0; i < r.axis.size(); ++i) {
        const double c = std::exp(-2.0 * n * std::pow(0.5 * r.axis[i] / s.dephasing.t_c, 2.0));
        CHECK(r.signal[i] == doctest::Approx(0.5 * (1.0 + c)).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("decoupled coherence time grows as the square root of the pulse count") {
    ExperimentSetup s = setup(0.0, 0.0);
    s.dephasing = {5e-6, 2.0};
    Vector ns;
    Vector t2;
    for (int n : {1, 4, 16, 64}) {
      const double expected = s.dephasing.t_c * std::sqrt(2.0 * n);
      const SweepResult r = run_dd(s, DdKind::XY, n, grid(0.0, 3.0 * expected / n, 40));
      const FitResult f = fit(lookup_model("stretched_exp"), r.column("free_time_s"), r.signal);
      CHECK(f.params[1] == doctest::Approx(expected).epsilon(1e-6));
      ns.push_back(n);
      t2.push_back(f.params[1]);
    }
    const FitResult p = fit(lookup_model("power_scaling"), ns, t2);
    CHECK(p.params[1] == doctest::Approx(0.5).epsilon(0.03 / 0.5));
  }

  TEST_CASE("zero pulses reduce to ramsey") {
    ExperimentSetup s = setup();
    s.dephasing = {4e-6, 1.0};
    const std::vector<double> taus = grid(0.0, 2e-6, 11);
    const SweepResult a = run_dd(s, DdKind::XY, 0, taus);
    const SweepResult b = run_ramsey(s, 0.0, taus);
    for (std::size_t i = 0; i < taus.size(); ++i) CHECK(a.signal[i] == doctest::Approx(b.signal[i]).epsilon(1e-12));
  }

  TEST_CASE("spin lock hartmann-hahn matching") {
    const ExperimentSetup s = setup();
    const std::vector<double> omegas = grid(3.0e6, 5.0e6, 201);
    const SweepResult r = run_spin_lock_amplitude(s, 0.5 / (a_perp / 2.0), omegas);
    const auto it = std::min_element(r.signal.begin(), r.signal.end());
    const double matched = omegas[static_cast<std::size_t>(it - r.signal.begin())];
    // exchange is blocked for half the nuclear population
    CHECK(*it == doctest::Approx(0.5).epsilon(0.01));
    CHECK(matched == doctest::Approx(s.params.larmor_n).epsilon(0.01));
    // far from matching the lock holds the electron
    CHECK(r.signal.back() > 0.98);

    const SweepResult lock = run_spin_lock(s, matched, grid(0.0, 40e-6, 201));
    const SinusoidFit f = fit_sinusoid(lock.axis, lock.signal);
    CHECK(1.0 / f.period == doctest::Approx(a_perp / 2.0).epsilon(0.01));
    CHECK(std::abs(f.amplitude) == doctest::Approx(0.25).epsilon(0.02));
  }

  TEST_CASE("conditional rotation reaches a quarter turn near N = 42") {
    const ExperimentSetup s = setup();
    const double tau = s.larmor_period() / 2.0 - s.pi_duration;
    const std::vector<int> zeros = rotation_zero_crossings(s, tau, 400, 2);
    REQUIRE(zeros.size() == 2);
    CHECK(std::abs(zeros[0] - 42) <= 4);
    CHECK(std::abs(zeros[0] + zeros[1] - 169) <= 15);
    const std::vector<double> z = rotation_curve(s, tau, 200);
    CHECK(z.front() == doctest::Approx(1.0));
    // half turn
    const int half = (zeros[0] + zeros[1]) / 2;
    CHECK(z[static_cast<std::size_t>(half / 2)] < -0.9);

    const SweepResult r = run_nuclear_rotation(s, tau, {0, zeros[0], half});
    CHECK(r.column("nuclear_sigma_z")[0] == doctest::Approx(1.0));
    CHECK(std::abs(r.column("nuclear_sigma_z")[1]) < 0.1);
  }

  TEST_CASE("unconditional rotation needs many more pulses") {
    const ExperimentSetup s = setup();
    const std::vector<int> cond = rotation_zero_crossings(s, s.larmor_period() / 2.0 - s.pi_duration, 400, 1);
    const std::vector<int> uncond = rotation_zero_crossings(s, s.larmor_period() - s.pi_duration, 2000, 1);
    REQUIRE(cond.size() == 1);
    REQUIRE(uncond.size() == 1);
    CHECK(uncond[0] > 2 * cond[0]);
  }

  TEST_CASE("programs and the propagator cache") {
    const ExperimentSetup s = setup();
    SequenceProgram prog{"echo", "n", {Pulse{{s.pi_rabi(), 0.0, s.pi_duration}}, MarkReadout{}, Wait{1e-6}, MarkReadout{}}};
    RegisterState st = initialize_electron(1.0, 1);
    const std::vector<double> out = run_program(st, s.params, s.dephasing, prog);
    REQUIRE(out.size() == 2);
    // a single hyperfine-split pi pulse is not perfect but close
    CHECK(out[0] > 0.9);
    CHECK(out[1] == doctest::Approx(out[0]).epsilon(1e-12));

    RegisterState a = initialize_electron(0.9, 1);
    RegisterState b = a;
    Evolver ev(s.params, {2e-6, 1.0});
    ev.dd_block(a, 200e-9, 16, s.pi_duration);
    ev.dd_block(b, 200e-9, 8, s.pi_duration);
    ev.dd_block(b, 200e-9, 8, s.pi_duration);
    CHECK((a.rho - b.rho).norm() < 1e-12);
  }

  TEST_CASE("invalid sequences") {
    const ExperimentSetup s = setup();
    SequenceProgram no_readout{"x", "n", {Wait{1e-6}}};
    CHECK_THROWS_AS(no_readout.validate(), InvalidArgument);
    SequenceProgram negative{"x", "n", {Wait{-1e-6}, MarkReadout{}}};
    CHECK_THROWS_AS(negative.validate(), InvalidArgument);
    CHECK_THROWS_AS(run_dd(s, DdKind::XY, -1, {1e-7}), InvalidArgument);
    CHECK_THROWS_AS(run_rabi(s, -1.0, {1e-7}), InvalidArgument);
    ExperimentSetup bad = s;
    bad.f_ie = 0.3;
    CHECK_THROWS_AS(run_rabi(bad, 1e6, {1e-7}), InvalidArgument);
    CHECK_THROWS_AS(run_nuclear_rotation(s, 0.0, {2}), InvalidArgument);
  }
}
