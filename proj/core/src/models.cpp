#include "siv/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "siv/electronic.hpp"
#include "siv/errors.hpp"
#include "siv/numerics.hpp"

namespace siv {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double span(const Vector& x) {
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return std::max(*hi - *lo, 1e-300);
}

double min_of(const Vector& x) { return *std::min_element(x.begin(), x.end()); }

double sse(const Vector& coeffs, const std::vector<Vector>& cols, const Vector& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double v = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) v += coeffs[k] * cols[k][i];
    s += (v - y[i]) * (v - y[i]);
  }
  return s;
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return g;
}

double stretched(double x, double t, double beta) {
  if (x <= 0.0) return 1.0;
  return std::exp(-std::pow(x / t, beta));
}

struct DecayGuess {
  double a = 0.0;
  double t = 1.0;
  double beta = 1.0;
  double c = 0.0;
};

// variable projection on (T, beta) grids with (a, c) solved linearly
DecayGuess decay_grid(const Vector& x, const Vector& y, const std::vector<double>& betas) {
  const double s = span(x);
  DecayGuess best;
  double best_sse = inf;
  for (double beta : betas) {
    for (double t : log_grid(s / 200.0, s * 20.0, 60)) {
      Vector e(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) e[i] = stretched(x[i], t, beta);
      const std::vector<Vector> cols{e, Vector(x.size(), 1.0)};
      const Vector c = linear_fit(cols, y);
      const double v = sse(c, cols, y);
      if (v < best_sse) {
        best_sse = v;
        best = {c[0], t, beta, c[1]};
      }
    }
  }
  return best;
}

struct Tone {
  double amplitude;
  double frequency;
  double phase;
};

struct OscillationGuess {
  std::vector<Tone> tones;
  double t = 1.0;
  double beta = 1.0;
  double a_exp = 0.0;
  double c = 0.0;
};

// frequencies from the DFT, then (T, beta) grid with linear amplitudes
OscillationGuess oscillation_grid(const Vector& x, const Vector& y, std::size_t k, const std::vector<double>& betas,
                                  bool with_envelope_offset) {
  std::vector<double> freqs = dominant_frequencies(x, y, k);
  while (freqs.size() < k) freqs.push_back(freqs.empty() ? 1.0 / span(x) : 2.0 * freqs.back());
  const double s = span(x);
  OscillationGuess best;
  double best_sse = inf;
  std::vector<double> ts = log_grid(s / 20.0, s * 100.0, 40);
  for (double beta : betas) {
    for (double t : ts) {
      std::vector<Vector> cols;
      Vector e(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) e[i] = stretched(x[i], t, beta);
      for (double f : freqs) {
        Vector sn(x.size());
        Vector cs(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
          sn[i] = e[i] * std::sin(two_pi * f * x[i]);
          cs[i] = e[i] * std::cos(two_pi * f * x[i]);
        }
        cols.push_back(sn);
        cols.push_back(cs);
      }
      if (with_envelope_offset) cols.push_back(e);
      cols.emplace_back(x.size(), 1.0);
      const Vector c = linear_fit(cols, y);
      const double v = sse(c, cols, y);
      if (v < best_sse) {
        best_sse = v;
        best.tones.clear();
        for (std::size_t j = 0; j < freqs.size(); ++j) {
          const double as = c[2 * j];
          const double ac = c[2 * j + 1];
          best.tones.push_back({std::hypot(as, ac), freqs[j], std::atan2(ac, as)});
        }
        best.t = t;
        best.beta = beta;
        best.a_exp = with_envelope_offset ? c[2 * freqs.size()] : 0.0;
        best.c = c.back();
      }
    }
  }
  return best;
}

double normal_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(two_pi));
}

std::vector<std::size_t> histogram_peaks(const Vector& y, std::size_t max_peaks, double smooth) {
  const std::size_t n = y.size();
  Vector sm(n, 0.0);
  const int half = static_cast<int>(std::ceil(3.0 * smooth));
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    double norm = 0.0;
    for (int d = -half; d <= half; ++d) {
      const long j = static_cast<long>(i) + d;
      if (j < 0 || j >= static_cast<long>(n)) continue;
      const double w = smooth > 0.0 ? std::exp(-0.5 * d * d / (smooth * smooth)) : (d == 0 ? 1.0 : 0.0);
      acc += w * y[static_cast<std::size_t>(j)];
      norm += w;
    }
    sm[i] = acc / norm;
  }
  const double top = *std::max_element(sm.begin(), sm.end());
  std::vector<std::size_t> peaks;
  for (std::size_t i = 0; i < n; ++i) {
    const bool left = i == 0 || sm[i] > sm[i - 1];
    const bool right = i + 1 == n || sm[i] >= sm[i + 1];
    if (left && right && sm[i] > 0.02 * top) peaks.push_back(i);
  }
  std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return sm[a] > sm[b]; });
  std::vector<std::size_t> kept;
  for (std::size_t p : peaks) {
    bool far = true;
    for (std::size_t q : kept) far = far && (p > q ? p - q : q - p) >= 3;
    if (far) kept.push_back(p);
    if (kept.size() == max_peaks) break;
  }
  return kept;
}

Parameter amp(const std::string& name, const std::string& unit = "signal") { return {name, unit, -inf, inf}; }
Parameter positive(const std::string& name, const std::string& unit) { return {name, unit, 0.0, inf}; }

}  // namespace

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

Vector linear_fit(const std::vector<Vector>& columns, const Vector& y) {
  const Eigen::Index m = static_cast<Eigen::Index>(y.size());
  const Eigen::Index n = static_cast<Eigen::Index>(columns.size());
  Eigen::MatrixXd a(m, n);
  Eigen::VectorXd b(m);
  Eigen::VectorXd scale(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index i = 0; i < m; ++i) a(i, k) = columns[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
    const double nrm = a.col(k).norm();
    scale(k) = nrm > 0.0 ? 1.0 / nrm : 1.0;
    a.col(k) *= scale(k);
  }
  for (Eigen::Index i = 0; i < m; ++i) b(i) = y[static_cast<std::size_t>(i)];
  const Eigen::VectorXd sol = a.completeOrthogonalDecomposition().solve(b);
  Vector out(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = sol(k) * scale(k);
  return out;
}

std::vector<double> dominant_frequencies(const Vector& x, const Vector& y, std::size_t k) {
  const std::size_t n = x.size();
  if (n < 4 || k == 0) return {};
  Vector sorted = x;
  std::sort(sorted.begin(), sorted.end());
  Vector gaps;
  for (std::size_t i = 1; i < n; ++i) {
    if (sorted[i] > sorted[i - 1]) gaps.push_back(sorted[i] - sorted[i - 1]);
  }
  if (gaps.empty()) return {};
  std::nth_element(gaps.begin(), gaps.begin() + static_cast<long>(gaps.size() / 2), gaps.end());
  const double dx = gaps[gaps.size() / 2];
  const double s = span(x);
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);

  const double f_lo = 0.5 / s;
  const double f_hi = 0.5 / dx;
  const std::size_t grid = std::max<std::size_t>(64, 8 * n);
  Vector f(grid);
  Vector mag(grid);
  for (std::size_t j = 0; j < grid; ++j) {
    f[j] = f_lo + (f_hi - f_lo) * static_cast<double>(j) / static_cast<double>(grid - 1);
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ph = two_pi * f[j] * x[i];
      re += (y[i] - mean) * std::cos(ph);
      im -= (y[i] - mean) * std::sin(ph);
    }
    mag[j] = std::hypot(re, im);
  }
  std::vector<std::size_t> peaks;
  for (std::size_t j = 1; j + 1 < grid; ++j) {
    if (mag[j] > mag[j - 1] && mag[j] >= mag[j + 1]) peaks.push_back(j);
  }
  std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return mag[a] > mag[b]; });
  std::vector<double> out;
  const double resolution = 1.0 / s;
  for (std::size_t j : peaks) {
    // parabolic refinement on the grid
    const double a0 = mag[j - 1];
    const double a1 = mag[j];
    const double a2 = mag[j + 1];
    const double denom = a0 - 2.0 * a1 + a2;
    const double shift = denom != 0.0 ? 0.5 * (a0 - a2) / denom : 0.0;
    const double fj = f[j] + shift * (f[1] - f[0]);
    bool far = true;
    for (double g : out) far = far && std::abs(g - fj) >= resolution;
    if (far) out.push_back(fj);
    if (out.size() == k) break;
  }
  return out;
}

double envelope_decay_time(const Vector& x, const Vector& y, double offset) {
  const std::size_t segments = 16;
  const double lo = min_of(x);
  const double s = span(x);
  std::vector<double> ex(segments, 0.0);
  std::vector<double> ey(segments, -1.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t seg = std::min(segments - 1, static_cast<std::size_t>((x[i] - lo) / s * segments));
    const double v = std::abs(y[i] - offset);
    if (v > ey[seg]) {
      ey[seg] = v;
      ex[seg] = x[i];
    }
  }
  const double top = *std::max_element(ey.begin(), ey.end());
  Vector lx;
  Vector ly;
  for (std::size_t k = 0; k < segments; ++k) {
    if (ey[k] > 1e-3 * top) {
      lx.push_back(ex[k]);
      ly.push_back(std::log(ey[k]));
    }
  }
  if (lx.size() < 2) return s;
  const Vector c = linear_fit({lx, Vector(lx.size(), 1.0)}, ly);
  if (!(c[0] < 0.0)) return 100.0 * s;
  return std::clamp(-1.0 / c[0], s / 50.0, 100.0 * s);
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

namespace models {

ModelSpec linear() {
  ModelSpec m{"linear", {amp("slope"), amp("intercept")}, nullptr, nullptr};
  m.eval = [](const Vector& p, double x) { return p[0] * x + p[1]; };
  m.guess = [](const Vector& x, const Vector& y) { return linear_fit({x, Vector(x.size(), 1.0)}, y); };
  return m;
}

ModelSpec ramsey() {
  ModelSpec m{"ramsey",
              {positive("a_sin", "signal"), positive("frequency", "Hz"), amp("phase", "rad"), amp("a_exp"),
               positive("t2", "s"), {"beta", "", 0.2, 5.0}, amp("c")},
              nullptr,
              nullptr};
  m.eval = [](const Vector& p, double x) {
    return (p[0] * std::sin(two_pi * p[1] * x + p[2]) + p[3]) * stretched(x, p[4], p[5]) + p[6];
  };
  m.guess = [](const Vector& x, const Vector& y) {
    const OscillationGuess g = oscillation_grid(x, y, 1, {1.0, 2.0}, true);
    const Tone& t = g.tones.front();
    return Vector{t.amplitude, t.frequency, t.phase, g.a_exp, g.t, g.beta, g.c};
  };
  return m;
}

ModelSpec stretched_exp() {
  ModelSpec m{"stretched_exp", {amp("a"), positive("t", "s"), {"beta", "", 0.2, 5.0}, amp("c")}, nullptr, nullptr};
  m.eval = [](const Vector& p, double x) { return p[0] * stretched(x, p[1], p[2]) + p[3]; };
  m.guess = [](const Vector& x, const Vector& y) {
    const DecayGuess g = decay_grid(x, y, {0.5, 0.75, 1.0, 1.5, 2.0, 3.0});
    return Vector{g.a, g.t, g.beta, g.c};
  };
  return m;
}

ModelSpec damped_sine_sum(std::size_t k) {
  if (k == 0) throw InvalidArgument("damped_sine_sum: at least one component");
  ModelSpec m;
  m.name = k == 2 ? "damped_sine_sum" : "damped_sine_sum" + std::to_string(k);
  for (std::size_t i = 1; i <= k; ++i) {
    const std::string s = std::to_string(i);
    m.params.push_back(positive("a" + s, "signal"));
    m.params.push_back(positive("frequency" + s, "Hz"));
    m.params.push_back(amp("phase" + s, "rad"));
    m.params.push_back(positive("t" + s, "s"));
    m.params.push_back({"beta" + s, "", 0.2, 5.0});
  }
  m.params.push_back(amp("c"));
  m.eval = [k](const Vector& p, double x) {
    double v = p[5 * k];
    for (std::size_t i = 0; i < k; ++i) {
      const double* q = &p[5 * i];
      v += q[0] * std::sin(two_pi * q[1] * x + q[2]) * stretched(x, q[3], q[4]);
    }
    return v;
  };
  m.guess = [k](const Vector& x, const Vector& y) {
    const OscillationGuess g = oscillation_grid(x, y, k, {1.0, 2.0}, false);
    Vector p;
    for (const Tone& t : g.tones) {
      p.insert(p.end(), {t.amplitude, t.frequency, t.phase, g.t, g.beta});
    }
    p.push_back(g.c);
    return p;
  };
  return m;
}

ModelSpec power_scaling() {
  ModelSpec m{"power_scaling", {positive("prefactor", "s"), amp("gamma", "")}, nullptr, nullptr};
  m.eval = [](const Vector& p, double x) { return p[0] * std::pow(x, p[1]); };
  m.guess = [](const Vector& x, const Vector& y) {
    Vector lx;
    Vector ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] > 0.0 && y[i] > 0.0) {
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
      }
    }
    if (lx.size() < 2) return Vector{1.0, 0.5};
    const Vector c = linear_fit({lx, Vector(lx.size(), 1.0)}, ly);
    return Vector{std::exp(c[1]), c[0]};
  };
  return m;
}

ModelSpec lorentzian_pair() {
  ModelSpec m{"lorentzian_pair",
              {amp("a1"), amp("x1", "Hz"), positive("width1", "Hz"), amp("a2"), amp("x2", "Hz"),
               positive("width2", "Hz"), amp("c")},
              nullptr,
              nullptr};
  m.eval = [](const Vector& p, double x) {
    auto lor = [x](double a, double x0, double w) {
      const double h = 0.5 * w;
      return a * h * h / ((x - x0) * (x - x0) + h * h);
    };
    return lor(p[0], p[1], p[2]) + lor(p[3], p[4], p[5]) + p[6];
  };
  m.guess = [](const Vector& x, const Vector& y) {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    Vector ys(x.size());
    Vector xs(x.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      xs[i] = x[idx[i]];
      ys[i] = y[idx[i]];
    }
    const double c = std::min(ys.front(), ys.back());
    Vector shifted(ys.size());
    for (std::size_t i = 0; i < ys.size(); ++i) shifted[i] = ys[i] - c;
    std::vector<std::size_t> peaks = histogram_peaks(shifted, 2, 0.0);
    while (peaks.size() < 2) peaks.push_back(peaks.empty() ? ys.size() / 2 : (peaks.front() + ys.size() / 4) % ys.size());
    Vector p;
    for (std::size_t pk : peaks) {
      const double half = 0.5 * shifted[pk];
      std::size_t l = pk;
      std::size_t r = pk;
      while (l > 0 && shifted[l] > half) --l;
      while (r + 1 < ys.size() && shifted[r] > half) ++r;
      const double w = std::max(xs[r] - xs[l], span(xs) / static_cast<double>(xs.size()));
      p.insert(p.end(), {shifted[pk], xs[pk], w});
    }
    p.push_back(c);
    return p;
  };
  return m;
}

ModelSpec saturation_law() {
  ModelSpec m{"saturation_law", {positive("gamma0", "Hz"), positive("p_sat", "W")}, nullptr, nullptr};
  m.eval = [](const Vector& p, double x) { return p[0] * std::sqrt(1.0 + x / p[1]); };
  m.guess = [](const Vector& x, const Vector& y) {
    Vector y2(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) y2[i] = y[i] * y[i];
    const Vector c = linear_fit({Vector(x.size(), 1.0), x}, y2);
    const double g2 = std::max(c[0], 1e-300);
    const double slope = c[1] > 0.0 ? c[1] : g2 / span(x);
    return Vector{std::sqrt(g2), g2 / slope};
  };
  return m;
}

ModelSpec pol_rate(double gamma0) {
  ModelSpec m{"pol_rate", {positive("eta", ""), positive("p_sat", "W")}, nullptr, nullptr};
  m.eval = [gamma0](const Vector& p, double x) { return gamma0 / (2.0 * p[0]) * x / (x + p[1]); };
  m.guess = [gamma0](const Vector& x, const Vector& y) {
    Vector ix;
    Vector iy;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] > 0.0 && y[i] > 0.0) {
        ix.push_back(1.0 / x[i]);
        iy.push_back(1.0 / y[i]);
      }
    }
    if (ix.size() < 2) return Vector{1.0, 1.0};
    const Vector c = linear_fit({Vector(ix.size(), 1.0), ix}, iy);
    const double b0 = std::max(c[0], 1e-300);
    return Vector{b0 * gamma0 / 2.0, std::max(c[1] / b0, 1e-300)};
  };
  return m;
}

ModelSpec parabola() {
  ModelSpec m{"parabola", {amp("curvature"), amp("x0", "axis"), amp("y0")}, nullptr, nullptr};
  m.eval = [](const Vector& p, double x) { return p[0] * (x - p[1]) * (x - p[1]) + p[2]; };
  m.guess = [](const Vector& x, const Vector& y) {
    Vector x2(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) x2[i] = x[i] * x[i];
    const Vector c = linear_fit({x2, x, Vector(x.size(), 1.0)}, y);
    if (c[0] == 0.0) return Vector{0.0, 0.0, c[2]};
    const double x0 = -c[1] / (2.0 * c[0]);
    return Vector{c[0], x0, c[2] - c[1] * c[1] / (4.0 * c[0])};
  };
  return m;
}

ModelSpec orbach_offset(double delta_gs) {
  ModelSpec m{"orbach_offset", {amp("gamma0", "Hz"), amp("a", "Hz^-2"), positive("alpha", "")}, nullptr, nullptr};
  auto phonon = [delta_gs](double alpha, double t) {
    return delta_gs * delta_gs * delta_gs / std::expm1(delta_gs / (constants::boltzmann_over_h * alpha * t));
  };
  m.eval = [phonon](const Vector& p, double x) { return p[0] + p[1] * phonon(p[2], x); };
  m.guess = [phonon](const Vector& x, const Vector& y) {
    Vector best{0.0, 0.0, 1.0};
    double best_sse = inf;
    for (double alpha : log_grid(0.05, 20.0, 200)) {
      Vector col(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) col[i] = phonon(alpha, x[i]);
      const std::vector<Vector> cols{Vector(x.size(), 1.0), col};
      const Vector c = linear_fit(cols, y);
      const double v = sse(c, cols, y);
      if (v < best_sse) {
        best_sse = v;
        best = {c[0], c[1], alpha};
      }
    }
    return best;
  };
  return m;
}

ModelSpec power_law_offset() {
  ModelSpec m{"power_law_offset", {amp("a"), amp("b", ""), amp("c")}, nullptr, nullptr};
  m.eval = [](const Vector& p, double x) { return p[0] * std::pow(x, p[1]) + p[2]; };
  m.guess = [](const Vector& x, const Vector& y) {
    Vector best{1.0, 1.0, 0.0};
    double best_sse = inf;
    for (int i = -80; i <= 160; ++i) {
      const double b = 0.05 * i;
      if (i == 0) continue;
      Vector col(x.size());
      for (std::size_t j = 0; j < x.size(); ++j) col[j] = std::pow(x[j], b);
      const std::vector<Vector> cols{col, Vector(x.size(), 1.0)};
      const Vector c = linear_fit(cols, y);
      const double v = sse(c, cols, y);
      if (v < best_sse) {
        best_sse = v;
        best = {c[0], b, c[1]};
      }
    }
    return best;
  };
  return m;
}

namespace {

double log_linear_base(const Vector& x, const Vector& r, double amplitude) {
  // ln(r / amplitude) = x ln(F) through the origin
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double q = r[i] / amplitude;
    if (q > 1e-6 && x[i] > 0.0) {
      num += x[i] * std::log(q);
      den += x[i] * x[i];
    }
  }
  if (den == 0.0) return 0.99;
  return std::clamp(std::exp(num / den), 1e-6, 1.0 - 1e-9);
}

}  // namespace

ModelSpec rb_decay() {
  ModelSpec m{"rb_decay", {{"f_init", "", 0.0, 1.0}, {"f_g", "", 0.0, 1.5}}, nullptr, nullptr};
  m.eval = [](const Vector& p, double x) { return (p[0] - 0.5) * std::pow(p[1], x) + 0.5; };
  m.guess = [](const Vector& x, const Vector& y) {
    Vector lx;
    Vector ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double r = y[i] - 0.5;
      if (r > 1e-9) {
        lx.push_back(x[i]);
        ly.push_back(std::log(r));
      }
    }
    if (lx.size() < 2) return Vector{0.75, 0.99};
    const Vector c = linear_fit({lx, Vector(lx.size(), 1.0)}, ly);
    return Vector{std::clamp(0.5 + std::exp(c[1]), 0.5, 1.0 - 1e-9), std::clamp(std::exp(c[0]), 1e-6, 1.5 - 1e-9)};
  };
  return m;
}

ModelSpec rb_decay_fixed(double f_init) {
  ModelSpec m{"rb_decay_fixed", {{"f_g", "", 0.0, 1.5}}, nullptr, nullptr};
  m.eval = [f_init](const Vector& p, double x) { return (f_init - 0.5) * std::pow(p[0], x) + 0.5; };
  m.guess = [f_init](const Vector& x, const Vector& y) {
    Vector r(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) r[i] = y[i] - 0.5;
    return Vector{log_linear_base(x, r, f_init - 0.5)};
  };
  return m;
}

ModelSpec rb_decay_free() {
  ModelSpec m{"rb_decay_free", {amp("a"), {"f_g", "", 0.0, 1.5}, amp("c")}, nullptr, nullptr};
  m.eval = [](const Vector& p, double x) { return p[0] * std::pow(p[1], x) + p[2]; };
  m.guess = [](const Vector& x, const Vector& y) {
    Vector best{0.5, 0.99, 0.5};
    double best_sse = inf;
    for (double q : log_grid(1e-6, 0.9, 120)) {
      Vector col(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) col[i] = std::pow(1.0 - q, x[i]);
      const std::vector<Vector> cols{col, Vector(x.size(), 1.0)};
      const Vector c = linear_fit(cols, y);
      const double v = sse(c, cols, y);
      if (v < best_sse) {
        best_sse = v;
        best = {c[0], 1.0 - q, c[1]};
      }
    }
    return best;
  };
  return m;
}

ModelSpec rabi_beat(std::size_t k) {
  if (k == 0) throw InvalidArgument("rabi_beat: at least one component");
  ModelSpec m;
  m.name = k == 2 ? "rabi_beat" : "rabi_beat" + std::to_string(k);
  for (std::size_t i = 1; i <= k; ++i) {
    const std::string s = std::to_string(i);
    m.params.push_back(positive("a" + s, "signal"));
    m.params.push_back(positive("frequency" + s, "Hz"));
    m.params.push_back(amp("phase" + s, "rad"));
    m.params.push_back(positive("t" + s, "s"));
  }
  m.params.push_back(amp("c"));
  m.eval = [k](const Vector& p, double x) {
    double v = p[4 * k];
    for (std::size_t i = 0; i < k; ++i) {
      const double* q = &p[4 * i];
      v += q[0] * std::sin(two_pi * q[1] * x + q[2]) * std::exp(-x / q[3]);
    }
    return v;
  };
  m.guess = [k](const Vector& x, const Vector& y) {
    const OscillationGuess g = oscillation_grid(x, y, k, {1.0}, false);
    Vector p;
    for (const Tone& t : g.tones) p.insert(p.end(), {t.amplitude, t.frequency, t.phase, g.t});
    p.push_back(g.c);
    return p;
  };
  return m;
}

ModelSpec gamma2r_model() {
  ModelSpec m{"gamma2r_model", {amp("a", "Hz^2"), amp("b", ""), amp("c", "Hz")}, nullptr, nullptr};
  m.eval = [](const Vector& p, double x) { return p[0] / x + p[1] * x + p[2]; };
  m.guess = [](const Vector& x, const Vector& y) {
    Vector inv(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) inv[i] = 1.0 / x[i];
    return linear_fit({inv, x, Vector(x.size(), 1.0)}, y);
  };
  return m;
}

namespace {

ModelSpec exponential(const std::string& name) {
  ModelSpec m{name, {amp("a"), positive("t", "s"), amp("c")}, nullptr, nullptr};
  m.eval = [](const Vector& p, double x) { return p[0] * std::exp(-x / p[1]) + p[2]; };
  m.guess = [](const Vector& x, const Vector& y) {
    const DecayGuess g = decay_grid(x, y, {1.0});
    return Vector{g.a, g.t, g.c};
  };
  return m;
}

}  // namespace

ModelSpec exp_recovery() { return exponential("exp_recovery"); }
ModelSpec single_exp() { return exponential("single_exp"); }

ModelSpec gaussian() {
  ModelSpec m{"gaussian", {amp("a"), amp("mean", "axis"), positive("sigma", "axis")}, nullptr, nullptr};
  m.eval = [](const Vector& p, double x) {
    const double z = (x - p[1]) / p[2];
    return p[0] * std::exp(-0.5 * z * z);
  };
  m.guess = [](const Vector& x, const Vector& y) {
    double w = 0.0;
    double mu = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double yi = std::max(y[i], 0.0);
      w += yi;
      mu += yi * x[i];
    }
    if (w <= 0.0) return Vector{1.0, 0.0, span(x)};
    mu /= w;
    double var = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) var += std::max(y[i], 0.0) * (x[i] - mu) * (x[i] - mu);
    var /= w;
    return Vector{*std::max_element(y.begin(), y.end()), mu, std::sqrt(std::max(var, 1e-300))};
  };
  return m;
}

ModelSpec three_normal_mixture(double min_width) {
  ModelSpec m;
  m.name = "three_normal_mixture";
  for (int i = 1; i <= 3; ++i) {
    const std::string s = std::to_string(i);
    m.params.push_back(positive("weight" + s, ""));
    m.params.push_back(amp("mean" + s, "axis"));
    m.params.push_back({"width" + s, "axis", min_width, inf});
  }
  m.eval = [](const Vector& p, double x) {
    return p[0] * normal_pdf(x, p[1], p[2]) + p[3] * normal_pdf(x, p[4], p[5]) + p[6] * normal_pdf(x, p[7], p[8]);
  };
  m.guess = [min_width](const Vector& x, const Vector& y) {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    Vector xs(x.size());
    Vector ys(x.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
      xs[i] = x[idx[i]];
      ys[i] = y[idx[i]];
    }
    const double dx = span(xs) / static_cast<double>(std::max<std::size_t>(xs.size() - 1, 1));
    std::vector<std::size_t> peaks = histogram_peaks(ys, 3, 1.0);
    std::sort(peaks.begin(), peaks.end());
    Vector p;
    for (std::size_t k = 0; k < 3; ++k) {
      if (k < peaks.size()) {
        const std::size_t pk = peaks[k];
        const double half = 0.5 * ys[pk];
        std::size_t l = pk;
        std::size_t r = pk;
        while (l > 0 && ys[l] > half) --l;
        while (r + 1 < ys.size() && ys[r] > half) ++r;
        const double width = std::max({(xs[r] - xs[l]) / 2.355, dx, 1.01 * min_width});
        p.insert(p.end(), {ys[pk] * width * std::sqrt(two_pi), xs[pk], width});
      } else {
        // spare component parked with negligible weight
        p.insert(p.end(), {1e-6 * (*std::max_element(ys.begin(), ys.end())), xs.back(), std::max(dx, 1.01 * min_width)});
      }
    }
    return p;
  };
  return m;
}

}  // namespace models

const std::map<std::string, ModelSpec>& model_registry() {
  static const std::map<std::string, ModelSpec> registry = [] {
    std::map<std::string, ModelSpec> r;
    for (ModelSpec m : {models::linear(), models::ramsey(), models::stretched_exp(), models::damped_sine_sum(2),
                        models::damped_sine_sum(1), models::power_scaling(), models::lorentzian_pair(),
                        models::saturation_law(), models::pol_rate(96.251e6), models::parabola(),
                        models::orbach_offset(1110.755e9), models::power_law_offset(), models::rb_decay(),
                        models::rb_decay_free(), models::rabi_beat(2), models::rabi_beat(1), models::gamma2r_model(),
                        models::exp_recovery(), models::single_exp(), models::gaussian(),
                        models::three_normal_mixture()}) {
      r.emplace(m.name, std::move(m));
    }
    return r;
  }();
  return registry;
}

const ModelSpec& lookup_model(const std::string& name) {
  const auto& r = model_registry();
  const auto it = r.find(name);
  if (it == r.end()) throw UnknownModel("unknown model: " + name);
  return it->second;
}

std::vector<std::string> model_names() {
  std::vector<std::string> out;
  for (const auto& [name, model] : model_registry()) out.push_back(name);
  return out;
}

}  // namespace siv
