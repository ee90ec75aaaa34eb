#include "siv/optical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "siv/errors.hpp"
#include "siv/models.hpp"
#include "siv/numerics.hpp"

namespace siv {

namespace {

const Matrix2c& lowering() {
  static const Matrix2c m = (Matrix2c() << 0.0, 0.0, 1.0, 0.0).finished();
  return m;
}

struct Lindbladian {
  Matrix2c h;
  double gamma1;
  double gamma_phi;

  Matrix2c operator()(const Matrix2c& rho) const {
    const cplx i(0.0, 1.0);
    Matrix2c out = -i * (h * rho - rho * h);
    if (gamma1 > 0.0) {
      const Matrix2c& l = lowering();
      const Matrix2c ll = l.adjoint() * l;
      out += gamma1 * (l * rho * l.adjoint() - 0.5 * (ll * rho + rho * ll));
    }
    if (gamma_phi > 0.0) {
      const Matrix2c z = pauli::z();
      out += 0.5 * gamma_phi * (z * rho * z - rho);
    }
    return out;
  }
};

double rate_limit(const OpticalParams& p, const OpticalDrive& d, double fraction) {
  double lim = std::numeric_limits<double>::infinity();
  const double omega = std::abs(p.rabi(d.amplitude));
  const double scale = std::max(omega, std::abs(p.detuning));
  if (scale > 0.0) lim = std::min(lim, 1.0 / (fraction * scale));
  if (std::isfinite(p.t1)) lim = std::min(lim, p.t1 / fraction);
  return lim;
}

}  // namespace

double OpticalParams::t2() const {
  const double rate = 0.5 / t1 + gamma_phi;
  return rate > 0.0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
}

void OpticalParams::validate() const {
  if (!(t1 > 0.0)) throw InvalidArgument("OpticalParams: t1 must be positive");
  if (!(gamma_phi >= 0.0)) throw InvalidArgument("OpticalParams: gamma_phi must be non-negative");
}

Matrix2c ground_state() { return (Matrix2c() << 0.0, 0.0, 0.0, 1.0).finished(); }
Matrix2c excited_state() { return (Matrix2c() << 1.0, 0.0, 0.0, 0.0).finished(); }

double excited_population(const Matrix2c& rho) { return rho(0, 0).real(); }

double default_step(const OpticalParams& p, const OpticalDrive& d, double t) {
  const double base = rate_limit(p, d, 40.0);
  if (!(t > 0.0)) return 0.0;
  if (!std::isfinite(base)) return t;
  return t / std::ceil(t / base);
}

Matrix2c evolve_lindblad(const Matrix2c& rho, const OpticalParams& p, const OpticalDrive& d, double t, double dt) {
  p.validate();
  if (t < 0.0) throw InvalidArgument("evolve_lindblad: negative duration");
  if (t == 0.0) return rho;
  if (dt <= 0.0) {
    dt = default_step(p, d, t);
  } else {
    if (dt > rate_limit(p, d, 20.0) * (1.0 + 1e-12)) throw StepTooLarge("evolve_lindblad: step exceeds stability limit");
    dt = t / std::ceil(t / dt - 1e-9);
  }
  const double omega = p.rabi(d.amplitude);
  const Matrix2c axis = std::cos(d.phase) * pauli::x() + std::sin(d.phase) * pauli::y();
  const Lindbladian f{two_pi * (0.5 * p.detuning * pauli::z() + 0.5 * omega * axis), 1.0 / p.t1, p.gamma_phi};

  const long steps = std::lround(t / dt);
  Matrix2c r = rho;
  for (long k = 0; k < steps; ++k) {
    const Matrix2c k1 = f(r);
    const Matrix2c k2 = f(r + 0.5 * dt * k1);
    const Matrix2c k3 = f(r + 0.5 * dt * k2);
    const Matrix2c k4 = f(r + dt * k3);
    r += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return 0.5 * (r + r.adjoint());
}

SweepResult run_optical_rabi(const OpticalParams& p, double amplitude, const std::vector<double>& mod_times, double dt) {
  p.validate();
  SweepResult out;
  out.axis_label = "mod_time_s";
  out.signal_label = "excited_population";
  for (double t : mod_times) {
    out.axis.push_back(t);
    out.signal.push_back(excited_population(evolve_lindblad(ground_state(), p, {amplitude, 0.0}, t, dt)));
  }
  return out;
}

std::vector<double> fluorescence_decay(const OpticalParams& p, const Matrix2c& rho, const std::vector<double>& times) {
  std::vector<double> out;
  for (double t : times) out.push_back(excited_population(evolve_lindblad(rho, p, {0.0, 0.0}, t)));
  return out;
}

OpticalRabiAnalysis analyze_optical_rabi(const SweepResult& sweep, double t1) {
  if (!(t1 > 0.0)) throw InvalidArgument("analyze_optical_rabi: t1 must be positive");
  const ModelSpec model = models::rabi_beat(1);
  FitOptions opt;
  opt.throw_on_max_iterations = false;
  OpticalRabiAnalysis a;
  a.fit = fit(model, sweep.axis, sweep.signal, opt);
  a.frequency = a.fit.params[1];
  a.decay_rate = 1.0 / a.fit.params[3];
  const double inv_t2 = 2.0 * a.decay_rate - 1.0 / t1;
  a.t2 = inv_t2 > 0.0 ? 1.0 / inv_t2 : std::numeric_limits<double>::infinity();
  a.gamma2 = inv_t2 / pi;
  return a;
}

void OpticalPulseTrain::validate() const {
  if (buffer < 0.0) throw InvalidArgument("OpticalPulseTrain: negative buffer");
  for (const OpticalSegment& s : segments) {
    if (s.duration < 0.0) throw InvalidArgument("OpticalPulseTrain: negative duration");
  }
}

OpticalPulseTrain phase_control_train(const OpticalParams& p, double duration, double buffer) {
  if (!(duration > 0.0)) throw InvalidArgument("phase_control_train: duration must be positive");
  if (!(p.rabi_per_volt > 0.0)) throw InvalidArgument("phase_control_train: rabi_per_volt must be positive");
  // quarter period gives a pi/2 rotation
  const double amplitude = (0.25 / duration - p.rabi_offset) / p.rabi_per_volt;
  return {{{amplitude, 0.0, duration}, {amplitude, 0.0, duration}}, buffer};
}

SweepResult run_phase_control(const OpticalParams& p, const OpticalPulseTrain& train, const std::vector<double>& phases,
                              double dt) {
  p.validate();
  train.validate();
  if (train.segments.size() != 2) throw InvalidArgument("run_phase_control: needs exactly two segments");
  const OpticalSegment& a = train.segments[0];
  const OpticalSegment& b = train.segments[1];
  const Matrix2c first = evolve_lindblad(ground_state(), p, {a.amplitude, a.phase}, a.duration, dt);
  const Matrix2c buffered = evolve_lindblad(first, p, {0.0, 0.0}, train.buffer);
  SweepResult out;
  out.axis_label = "relative_phase_rad";
  out.signal_label = "excited_population";
  for (double phi : phases) {
    out.axis.push_back(phi);
    out.signal.push_back(excited_population(evolve_lindblad(buffered, p, {b.amplitude, b.phase + phi}, b.duration, dt)));
  }
  return out;
}

SinusoidFit fit_sinusoid(const Vector& x, const Vector& y) {
  ModelSpec m{"sinusoid",
              {{"amplitude", "signal", 0.0, std::numeric_limits<double>::infinity()},
               {"period", "axis", 0.0, std::numeric_limits<double>::infinity()},
               {"phase", "rad"},
               {"offset", "signal"}},
              [](const Vector& p, double v) { return p[0] * std::sin(two_pi * v / p[1] + p[2]) + p[3]; },
              nullptr};
  const ModelSpec single = models::rabi_beat(1);
  Vector g = single.initial_guess(x, y);
  const Vector init{std::max(g[0], 1e-12), 1.0 / g[1], g[2], g[4]};
  FitOptions opt;
  opt.throw_on_max_iterations = false;
  const FitResult f = least_squares(m, x, y, {}, init, opt);
  SinusoidFit s{f.params[0], f.params[1], f.params[2], f.params[3], 0.0};
  s.rms_residual = f.residual_norm / std::sqrt(static_cast<double>(x.size()));
  return s;
}

LifetimeFit extract_lifetime(const Vector& t, const Vector& trace) {
  const ModelSpec model = models::single_exp();
  const FitResult f = fit(model, t, trace);
  if (!(f.params[1] > 0.0) || !std::isfinite(f.params[1])) throw FitFailed("extract_lifetime: no decay found");
  return {f.params[1], f.params[0], f.sigma[1]};
}

LifetimeEnsemble aggregate_lifetimes(const Vector& t1_values, int bins) {
  if (t1_values.size() < 10) throw InvalidArgument("aggregate_lifetimes: need at least 10 values");
  const std::size_t n = t1_values.size();
  if (bins <= 0) bins = std::max(10, static_cast<int>(std::sqrt(static_cast<double>(n))));
  const auto [lo, hi] = std::minmax_element(t1_values.begin(), t1_values.end());
  const double width = (*hi - *lo) / bins;
  if (!(width > 0.0)) return {*lo, 0.0};
  Vector x(static_cast<std::size_t>(bins));
  Vector y(static_cast<std::size_t>(bins), 0.0);
  for (int b = 0; b < bins; ++b) x[static_cast<std::size_t>(b)] = *lo + (b + 0.5) * width;
  for (double v : t1_values) {
    const int b = std::min(bins - 1, static_cast<int>((v - *lo) / width));
    y[static_cast<std::size_t>(b)] += 1.0;
  }
  const ModelSpec model = models::gaussian();
  FitOptions opt;
  opt.throw_on_max_iterations = false;
  const FitResult f = fit(model, x, y, opt);
  return {f.params[1], std::abs(f.params[2])};
}

double fourier_limit(double t1) {
  if (!(t1 > 0.0)) throw InvalidArgument("fourier_limit: t1 must be positive");
  return 1.0 / (two_pi * t1);
}

}  // namespace siv
