#include <doctest.h>

#include <cmath>
#include <random>

#include "siv/errors.hpp"
#include "siv/models.hpp"
#include "siv/readout.hpp"
#include "support/synthetic.hpp"

using namespace siv;
using siv::testing::grid;

namespace {

// P(N <= k) for N ~ Poisson(mu), by direct summation of the mass function
double poisson_cdf(int k, double mu) {
  double term = std::exp(-mu);
  double sum = term;
  for (int i = 1; i <= k; ++i) {
    term *= mu / i;
    sum += term;
  }
  return sum;
}

double mean_counts(const PhotonRecord& r, bool skip_offres = true) {
  double s = 0.0;
  double n = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (skip_offres && r.offres[i]) continue;
    s += r.counts[i];
    n += 1.0;
  }
  return s / n;
}

Vector pulse_trace(const Vector& t, double a, double tp, double nss) {
  Vector y(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) y[i] = a * std::exp(-t[i] / tp) + nss;
  return y;
}

}  // namespace

TEST_SUITE("readout") {
  TEST_CASE("polarization rate") {
    PumpParams p;
    CHECK(polarization_rate(p) == doctest::Approx(96.251e6 / (2.0 * 816.285) / 2.0));
    CHECK(polarization_rate(p) == doctest::Approx(29.48e3).epsilon(1e-3));
    p.s = INFINITY;
    CHECK(polarization_rate(p) == doctest::Approx(96.251e6 / (2.0 * 816.285)));
    p.s = 1e9;
    CHECK(polarization_rate(p) == doctest::Approx(96.251e6 / (2.0 * 816.285)).epsilon(1e-8));
    p.eta = 0.0;
    CHECK_THROWS_AS(polarization_rate(p), InvalidArgument);
  }

  TEST_CASE("pumping rate fit recovers the cyclicity") {
    const double p_sat = 1.5;
    std::mt19937_64 rng(3);
    std::normal_distribution<double> noise(0.0, 0.01);
    Vector power = grid(0.1, 10.0, 30);
    Vector rate;
    for (double x : power) {
      PumpParams p;
      p.s = x / p_sat;
      rate.push_back(polarization_rate(p) * (1.0 + noise(rng)));
    }
    const FitResult f = fit(lookup_model("pol_rate"), power, rate);
    CHECK(f.params[0] == doctest::Approx(816.285).epsilon(0.02));
  }

  TEST_CASE("saturation broadening") {
    CHECK(saturation_linewidth(0.0, 100e6) == doctest::Approx(100e6));
    CHECK(saturation_linewidth(3.0, 100e6) == doctest::Approx(200e6));
    CHECK_THROWS_AS(saturation_linewidth(-1.0, 1.0), InvalidArgument);
    std::mt19937_64 rng(8);
    std::normal_distribution<double> noise(0.0, 0.005);
    const Vector power = grid(0.0, 20.0, 25);
    Vector width;
    for (double x : power) width.push_back(saturation_linewidth(x / 2.0, 114.98e6) * (1.0 + noise(rng)));
    const FitResult f = fit(lookup_model("saturation_law"), power, width);
    CHECK(f.params[0] == doctest::Approx(114.98e6).epsilon(0.01));
  }

  TEST_CASE("pulse metrics on exact data") {
    const Vector t = grid(0.0, 1e-6, 100);
    const PulseMetrics m = extract_pulse_metrics(t, pulse_trace(t, 80.0, 120e-9, 20.0));
    CHECK(m.fidelity == doctest::Approx(0.8).epsilon(1e-6));
    CHECK(m.t_p == doctest::Approx(120e-9).epsilon(1e-6));
    CHECK(m.steady_state == doctest::Approx(20.0).epsilon(1e-6));
  }

  TEST_CASE("pulse metrics under Poisson noise") {
    // summed-pulse count scale
    const Vector t = grid(0.0, 1e-6, 100);
    const Vector truth = pulse_trace(t, 400.0, 120e-9, 100.0);
    int within = 0;
    double mean = 0.0;
    for (int seed = 0; seed < 100; ++seed) {
      std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
      Vector y;
      for (double mu : truth) y.push_back(std::poisson_distribution<int>(mu)(rng));
      const double f = extract_pulse_metrics(t, y).fidelity;
      mean += f / 100.0;
      if (std::abs(f - 0.8) <= 0.02) ++within;
    }
    CHECK(within == 100);
    CHECK(mean == doctest::Approx(0.8).epsilon(0.005));
  }

  TEST_CASE("flat traces give zero fidelity") {
    const Vector t = grid(0.0, 1e-6, 50);
    const PulseMetrics m = extract_pulse_metrics(t, Vector(t.size(), 7.0));
    CHECK(m.fidelity == 0.0);
    CHECK(m.steady_state == doctest::Approx(7.0));
    CHECK_THROWS_AS(extract_pulse_metrics(grid(0.0, 1.0, 5), Vector(5, 1.0)), InvalidArgument);
    CHECK_THROWS_AS(extract_pulse_metrics(t, pulse_trace(t, 1.0, 1e-7, 0.0), 1e-30), FitFailed);
  }

  TEST_CASE("bounded per-pulse fits share decay and background") {
    const Vector t = grid(0.0, 1e-6, 80);
    std::vector<Vector> traces;
    for (double a : {40.0, 60.0, 80.0, 100.0}) traces.push_back(pulse_trace(t, a, 150e-9, 15.0));
    PulseMetrics all;
    const std::vector<PulseMetrics> m = extract_pulse_metrics_bounded(t, traces, &all);
    REQUIRE(m.size() == 4);
    CHECK(all.amplitude == doctest::Approx(70.0).epsilon(1e-6));
    CHECK(m[0].amplitude == doctest::Approx(40.0).epsilon(1e-4));
    CHECK(m[3].fidelity == doctest::Approx(100.0 / 115.0).epsilon(1e-4));
  }

  TEST_CASE("drift renormalization") {
    Vector rec;
    for (int i = 0; i < 50; ++i) rec.push_back(100.0 - 30.0 * (1.0 - std::exp(-i / 12.0)));
    const Vector out = renormalize_drift(rec);
    for (double v : out) CHECK(v == doctest::Approx(100.0).epsilon(1e-6));
    const Vector flat(10, 3.0);
    CHECK(renormalize_drift(flat) == flat);
  }

  TEST_CASE("window counts reproduce the configured means") {
    SsrConfig c;
    c.p_offres = 0.0;
    c.t_pol_n = 1e9;
    const PhotonRecord b = simulate_ssr(c, NuclearState::bright);
    const PhotonRecord d = simulate_ssr(c, NuclearState::dark);
    CHECK(std::abs(mean_counts(b) - 32.0) < 3.0 * std::sqrt(32.0 / c.shots));
    CHECK(std::abs(mean_counts(d) - 10.0) < 3.0 * std::sqrt(10.0 / c.shots));
  }

  TEST_CASE("dark mean with the off-resonant branch and flips on") {
    const SsrConfig c;
    const PhotonRecord d = simulate_ssr(c, NuclearState::dark);
    CHECK(std::abs(mean_counts(d) - 10.0) < 3.0 * std::sqrt(10.0 / c.shots));
    double off = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d.offres[i]) {
        off += 1.0;
        CHECK(d.counts[i] == 0);
      }
    }
    CHECK(std::abs(off / c.shots - 0.1) < 3.0 * std::sqrt(0.09 / c.shots));
  }

  TEST_CASE("bright-state survival over the readout window") {
    const SsrConfig c;
    const PhotonRecord b = simulate_ssr(c, NuclearState::bright);
    const double expected = -std::expm1(-c.window() / c.t_pol_n);
    CHECK(expected == doctest::Approx(0.07).epsilon(0.01 / 0.07));
    const double n = 0.9 * c.shots;
    CHECK(std::abs(bright_polarization_loss(b) - expected) < 3.0 * std::sqrt(expected * (1.0 - expected) / n));
  }

  TEST_CASE("misclassification matches the Poisson tails") {
    SsrConfig c;
    c.p_offres = 0.0;
    c.t_pol_n = 1e9;
    const PhotonRecord b = simulate_ssr(c, NuclearState::bright);
    const PhotonRecord d = simulate_ssr(c, NuclearState::dark);
    const Classification kb = classify_threshold(b, c.threshold);
    const Classification kd = classify_threshold(d, c.threshold);
    double miss_b = 0.0;
    double miss_d = 0.0;
    for (bool l : kb.labels) miss_b += l ? 0.0 : 1.0 / c.shots;
    for (bool l : kd.labels) miss_d += l ? 1.0 / c.shots : 0.0;
    const double pb = poisson_cdf(21, 32.0);
    const double pd = 1.0 - poisson_cdf(21, 10.0);
    CHECK(std::abs(miss_b - pb) < 3.0 * std::sqrt(pb * (1.0 - pb) / c.shots) + 1e-4);
    CHECK(std::abs(miss_d - pd) < 3.0 * std::sqrt(pd * (1.0 - pd) / c.shots) + 1e-4);
  }

  TEST_CASE("classification at the reference parameters") {
    const SsrConfig c;
    PhotonRecord r = simulate_ssr(c, NuclearState::bright);
    r.append(simulate_ssr(c, NuclearState::dark));
    const Classification k = classify_threshold(r, c.threshold);
    CHECK(k.fidelity_bright == doctest::Approx(0.925).epsilon(0.05 / 0.925));
    CHECK(k.fidelity_dark == doctest::Approx(0.91).epsilon(0.05 / 0.91));
    CHECK(k.recall_bright > 0.8);
    CHECK(k.recall_dark > 0.9);
    CHECK(k.equalizing_threshold > 5.0);
    CHECK(k.equalizing_threshold < 25.0);
  }

  TEST_CASE("perfect separation and monotonicity") {
    SsrConfig c;
    c.p_offres = 0.0;
    c.t_pol_n = 1e9;
    c.mean_bright = 100.0;
    c.mean_dark = 0.0;
    c.threshold = 50.0;
    c.shots = 2000;
    PhotonRecord r = simulate_ssr(c, NuclearState::bright);
    r.append(simulate_ssr(c, NuclearState::dark));
    const Classification k = classify_threshold(r, c.threshold);
    CHECK(k.fidelity_bright == 1.0);
    CHECK(k.fidelity_dark == 1.0);

    SsrConfig near;
    near.p_offres = 0.0;
    near.t_pol_n = 1e9;
    SsrConfig far = near;
    far.mean_bright = 40.0;
    PhotonRecord a = simulate_ssr(near, NuclearState::mixed);
    PhotonRecord b = simulate_ssr(far, NuclearState::mixed);
    const Classification ka = classify_threshold(a, 21.0);
    const Classification kb = classify_threshold(b, 21.0);
    CHECK(kb.fidelity_bright >= ka.fidelity_bright);
    CHECK(kb.fidelity_dark >= ka.fidelity_dark);
  }

  TEST_CASE("simulation is reproducible from the seed") {
    SsrConfig c;
    c.shots = 500;
    const PhotonRecord a = simulate_ssr(c, NuclearState::mixed);
    const PhotonRecord b = simulate_ssr(c, NuclearState::mixed);
    CHECK(a.counts == b.counts);
    CHECK(a.final_bright == b.final_bright);
    c.seed = 2;
    CHECK(simulate_ssr(c, NuclearState::mixed).counts != a.counts);
  }

  TEST_CASE("histogram fit of a three-Poisson mixture") {
    std::mt19937_64 rng(17);
    std::discrete_distribution<int> pick({0.1, 0.45, 0.45});
    std::poisson_distribution<int> ten(10.0);
    std::poisson_distribution<int> bright(32.0);
    std::vector<int> counts;
    for (int i = 0; i < 20000; ++i) {
      const int k = pick(rng);
      counts.push_back(k == 0 ? 0 : k == 1 ? ten(rng) : bright(rng));
    }
    const MixtureFit m = fit_photon_histogram(counts);
    CHECK(std::abs(m.means[0]) < 1.0);
    CHECK(std::abs(m.means[1] - 10.0) < 1.0);
    CHECK(std::abs(m.means[2] - 32.0) < 1.0);
    CHECK(m.weights[1] == doctest::Approx(0.45).epsilon(0.1));
  }

  TEST_CASE("single-component histogram leaves two empty components") {
    std::mt19937_64 rng(5);
    std::poisson_distribution<int> d(20.0);
    std::vector<int> counts;
    for (int i = 0; i < 5000; ++i) counts.push_back(d(rng));
    const MixtureFit m = fit_photon_histogram(counts);
    int heavy = 0;
    for (double w : m.weights) heavy += w > 0.05 ? 1 : 0;
    CHECK(heavy == 1);
  }

  TEST_CASE("histogram of the simulated readout") {
    const SsrConfig c;
    PhotonRecord r = simulate_ssr(c, NuclearState::bright);
    r.append(simulate_ssr(c, NuclearState::dark));
    const MixtureFit m = fit_photon_histogram(r.counts);
    CHECK(std::abs(m.means[1] - 10.0) < 1.0);
    CHECK(std::abs(m.means[2] - 32.0) < 1.0);
    CHECK_THROWS_AS(fit_photon_histogram(std::vector<int>(100, 3)), InvalidArgument);
    CHECK_THROWS_AS(fit_photon_histogram(std::vector<int>(1000, 3)), FitFailed);
  }

  TEST_CASE("configuration checks") {
    SsrConfig c;
    c.mean_dark = 40.0;
    CHECK_THROWS_AS(simulate_ssr(c, NuclearState::dark), InvalidArgument);
    c = SsrConfig{};
    c.p_offres = 1.0;
    CHECK_THROWS_AS(c.validate(), InvalidArgument);
    CHECK(SsrConfig{}.window() == doctest::Approx(2.9988e-3));
  }
}
