#include "siv/readout.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "siv/errors.hpp"
#include "siv/models.hpp"
#include "siv/random.hpp"

namespace siv {

// ---------------------------------------------------------------------------
// Optical pumping
// ---------------------------------------------------------------------------

void PumpParams::validate() const {
  if (!(gamma0 >= 0.0 && s >= 0.0 && t_pulse >= 0.0)) throw InvalidArgument("PumpParams: negative value");
  if (!(eta > 0.0)) throw InvalidArgument("PumpParams: eta must be positive");
}

double polarization_rate(const PumpParams& p) {
  p.validate();
  if (std::isinf(p.s)) return p.gamma0 / (2.0 * p.eta);
  return p.gamma0 / (2.0 * p.eta) * p.s / (1.0 + p.s);
}

double saturation_linewidth(double s, double gamma0_opt) {
  if (!(s >= 0.0)) throw InvalidArgument("saturation_linewidth: s must be non-negative");
  return gamma0_opt * std::sqrt(1.0 + s);
}

namespace {

PulseMetrics metrics_from(const FitResult& f) {
  PulseMetrics m;
  m.amplitude = f.params[0];
  m.t_p = f.params[1];
  m.steady_state = f.params[2];
  m.sigma_amplitude = f.sigma[0];
  m.sigma_t_p = f.sigma[1];
  m.sigma_steady_state = f.sigma[2];
  const double total = m.amplitude + m.steady_state;
  m.fidelity = total > 0.0 ? m.amplitude / total : 0.0;
  return m;
}

bool flat(const Vector& y) {
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  return *hi - *lo <= 1e-12 * std::max(std::abs(*hi), 1.0);
}

PulseMetrics flat_metrics(const Vector& y) {
  PulseMetrics m;
  m.steady_state = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  return m;
}

}  // namespace

PulseMetrics extract_pulse_metrics(const Vector& t, const Vector& counts, double max_residual) {
  if (t.size() != counts.size()) throw InvalidArgument("extract_pulse_metrics: length mismatch");
  if (t.size() < 10) throw InvalidArgument("extract_pulse_metrics: need at least 10 bins");
  if (flat(counts)) return flat_metrics(counts);
  const ModelSpec model = models::single_exp();
  FitResult f;
  try {
    f = least_squares(model, t, counts, poisson_weights(counts), model.initial_guess(t, counts));
    // data-derived weights bias the background low; refit with weights from the fitted rates
    for (int pass = 0; pass < 2; ++pass) {
      f = least_squares(model, t, counts, poisson_weights(model.evaluate(f.params, t)), f.params);
    }
  } catch (const SingularNormalMatrix&) {
    return flat_metrics(counts);
  }
  if (f.residual_norm > max_residual) throw FitFailed("extract_pulse_metrics: residual norm above threshold");
  return metrics_from(f);
}

std::vector<PulseMetrics> extract_pulse_metrics_bounded(const Vector& t, const std::vector<Vector>& traces,
                                                        PulseMetrics* collective) {
  if (traces.empty()) throw InvalidArgument("extract_pulse_metrics_bounded: no traces");
  Vector mean(t.size(), 0.0);
  for (const Vector& tr : traces) {
    if (tr.size() != t.size()) throw InvalidArgument("extract_pulse_metrics_bounded: length mismatch");
    for (std::size_t i = 0; i < t.size(); ++i) mean[i] += tr[i] / static_cast<double>(traces.size());
  }
  const PulseMetrics all = extract_pulse_metrics(t, mean);
  if (collective != nullptr) *collective = all;

  ModelSpec model = models::single_exp();
  auto window = [](Parameter& p, double v, double sigma) {
    const double half = std::max(3.0 * (std::isfinite(sigma) ? sigma : 0.0), 1e-9 * std::max(std::abs(v), 1e-300));
    p.lower = v - half;
    p.upper = v + half;
  };
  window(model.params[1], all.t_p, all.sigma_t_p);
  window(model.params[2], all.steady_state, all.sigma_steady_state);
  if (model.params[1].lower <= 0.0) model.params[1].lower = 0.5 * all.t_p;

  std::vector<PulseMetrics> out;
  for (const Vector& tr : traces) {
    if (flat(tr)) {
      out.push_back(flat_metrics(tr));
      continue;
    }
    Vector init = model.initial_guess(t, tr);
    for (std::size_t k = 1; k < 3; ++k) {
      const Parameter& p = model.params[k];
      const double margin = 1e-3 * (p.upper - p.lower);
      init[k] = std::clamp(init[k], p.lower + margin, p.upper - margin);
    }
    FitOptions opt;
    opt.throw_on_max_iterations = false;
    opt.allow_singular = true;
    out.push_back(metrics_from(least_squares(model, t, tr, poisson_weights(tr), init, opt)));
  }
  return out;
}

Vector renormalize_drift(const Vector& record_counts) {
  if (record_counts.size() < 4 || flat(record_counts)) return record_counts;
  Vector idx(record_counts.size());
  std::iota(idx.begin(), idx.end(), 0.0);
  const ModelSpec model = models::exp_recovery();
  FitOptions opt;
  opt.throw_on_max_iterations = false;
  opt.allow_singular = true;
  try {
    const FitResult f = fit(model, idx, record_counts, opt);
    const double ref = model.eval(f.params, 0.0);
    Vector out(record_counts.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double trend = model.eval(f.params, idx[i]);
      out[i] = trend > 0.0 ? record_counts[i] * ref / trend : record_counts[i];
    }
    return out;
  } catch (const FitFailed&) {
    return record_counts;
  }
}

// ---------------------------------------------------------------------------
// Single-shot readout
// ---------------------------------------------------------------------------

void SsrConfig::validate() const {
  if (n_blocks < 1) throw InvalidArgument("SsrConfig: n_blocks must be positive");
  if (!(t_block > 0.0)) throw InvalidArgument("SsrConfig: t_block must be positive");
  if (!(mean_bright > mean_dark && mean_dark >= 0.0)) {
    throw InvalidArgument("SsrConfig: need mean_bright > mean_dark >= 0");
  }
  if (!(p_offres >= 0.0 && p_offres < 1.0)) throw InvalidArgument("SsrConfig: p_offres must lie in [0, 1)");
  if (!(t_pol_n > 0.0)) throw InvalidArgument("SsrConfig: t_pol_n must be positive");
  if (!(threshold >= 0.0)) throw InvalidArgument("SsrConfig: threshold must be non-negative");
  if (shots < 1) throw InvalidArgument("SsrConfig: shots must be positive");
}

void PhotonRecord::append(const PhotonRecord& other) {
  counts.insert(counts.end(), other.counts.begin(), other.counts.end());
  initial_bright.insert(initial_bright.end(), other.initial_bright.begin(), other.initial_bright.end());
  final_bright.insert(final_bright.end(), other.final_bright.begin(), other.final_bright.end());
  offres.insert(offres.end(), other.offres.begin(), other.offres.end());
}

PhotonRecord simulate_ssr(const SsrConfig& c, NuclearState initial) {
  c.validate();
  const double rate_b = c.mean_bright / c.n_blocks;
  const double rate_d = c.mean_dark / c.n_blocks;
  const double p_flip = -std::expm1(-c.t_block / c.t_pol_n);
  const auto tag = static_cast<std::uint64_t>(initial);

  PhotonRecord r;
  r.counts.reserve(static_cast<std::size_t>(c.shots));
  for (int shot = 0; shot < c.shots; ++shot) {
    std::mt19937_64 rng(derive_seed(c.seed, {tag, static_cast<std::uint64_t>(shot)}));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::poisson_distribution<int> bright(rate_b);
    std::poisson_distribution<int> dark(rate_d);
    bool state = initial == NuclearState::mixed ? u(rng) < 0.5 : initial == NuclearState::bright;
    const bool off = u(rng) < c.p_offres;
    r.initial_bright.push_back(state);
    int n = 0;
    if (!off) {
      for (int b = 0; b < c.n_blocks; ++b) {
        n += state ? bright(rng) : dark(rng);
        // optical pumping through the electron slowly depolarizes the nucleus
        if (state && u(rng) < p_flip) state = false;
      }
    }
    r.counts.push_back(n);
    r.final_bright.push_back(state);
    r.offres.push_back(off);
  }
  return r;
}

namespace {

struct Scores {
  double fid_b, fid_d, rec_b, rec_d;
};

Scores score(const PhotonRecord& r, double threshold) {
  double lb = 0, lb_ok = 0, ld = 0, ld_ok = 0, tb = 0, td = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const bool label = r.counts[i] > threshold;
    const bool truth = r.final_bright[i];
    (label ? lb : ld) += 1.0;
    if (label == truth) (label ? lb_ok : ld_ok) += 1.0;
    (truth ? tb : td) += 1.0;
  }
  auto ratio = [](double a, double b) { return b > 0.0 ? a / b : 0.0; };
  return {ratio(lb_ok, lb), ratio(ld_ok, ld), ratio(lb_ok, tb), ratio(ld_ok, td)};
}

}  // namespace

Classification classify_threshold(const PhotonRecord& r, double threshold) {
  if (!(threshold >= 0.0)) throw InvalidArgument("classify_threshold: threshold must be non-negative");
  Classification out;
  out.labels.reserve(r.size());
  for (int n : r.counts) out.labels.push_back(n > threshold);
  const Scores s = score(r, threshold);
  out.fidelity_bright = s.fid_b;
  out.fidelity_dark = s.fid_d;
  out.recall_bright = s.rec_b;
  out.recall_dark = s.rec_d;

  const int top = r.counts.empty() ? 0 : *std::max_element(r.counts.begin(), r.counts.end());
  double best = std::numeric_limits<double>::infinity();
  for (int th = 0; th <= top; ++th) {
    const Scores t = score(r, th);
    if (t.fid_b <= 0.0 || t.fid_d <= 0.0) continue;
    const double gap = std::abs(t.fid_b - t.fid_d);
    if (gap < best) {
      best = gap;
      out.equalizing_threshold = th;
    }
  }
  return out;
}

double bright_polarization_loss(const PhotonRecord& r) {
  double n = 0.0;
  double kept = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!r.initial_bright[i] || r.offres[i]) continue;
    n += 1.0;
    if (r.final_bright[i]) kept += 1.0;
  }
  return n > 0.0 ? 1.0 - kept / n : 0.0;
}

MixtureFit fit_photon_histogram(const std::vector<int>& counts) {
  if (counts.size() < 500) throw InvalidArgument("fit_photon_histogram: need at least 500 shots");
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  if (*lo < 0) throw InvalidArgument("fit_photon_histogram: negative counts");
  if (*lo == *hi) throw FitFailed("fit_photon_histogram: all shots have the same count");
  const int bins = *hi + 1;
  Vector x(static_cast<std::size_t>(bins));
  Vector y(static_cast<std::size_t>(bins), 0.0);
  for (int b = 0; b < bins; ++b) x[static_cast<std::size_t>(b)] = b;
  for (int n : counts) y[static_cast<std::size_t>(n)] += 1.0 / static_cast<double>(counts.size());
  if (bins < 10) {
    // pad so the nine-parameter fit is determined
    for (int b = bins; b < 10; ++b) {
      x.push_back(b);
      y.push_back(0.0);
    }
  }

  ModelSpec model = models::three_normal_mixture(0.5);
  // keep components on the populated range so no tail can mimic the zero-count spike
  const double x_lo = *lo;
  const double x_hi = *hi;
  for (std::size_t k = 0; k < 3; ++k) {
    model.params[3 * k].upper = 1.5;
    model.params[3 * k + 1].lower = x_lo;
    model.params[3 * k + 1].upper = x_hi;
    model.params[3 * k + 2].upper = x_hi - x_lo + 1.0;
  }
  Vector init = model.initial_guess(x, y);
  for (std::size_t k = 0; k < init.size(); ++k) {
    const Parameter& p = model.params[k];
    const double lo_k = std::isfinite(p.lower) ? p.lower : init[k] - 1.0;
    const double hi_k = std::isfinite(p.upper) ? p.upper : init[k] + 1.0;
    const double margin = 1e-3 * (hi_k - lo_k);
    init[k] = std::clamp(init[k], lo_k + margin, hi_k - margin);
  }
  FitOptions opt;
  opt.throw_on_max_iterations = false;
  opt.allow_singular = true;
  opt.max_iterations = 500;
  MixtureFit out;
  out.fit = least_squares(model, x, y, {}, init, opt);
  std::array<int, 3> order{0, 1, 2};
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return out.fit.params[3 * a + 1] < out.fit.params[3 * b + 1]; });
  for (std::size_t k = 0; k < 3; ++k) {
    const auto j = static_cast<std::size_t>(3 * order[k]);
    out.weights[k] = out.fit.params[j];
    out.means[k] = out.fit.params[j + 1];
    out.widths[k] = out.fit.params[j + 2];
  }
  return out;
}

}  // namespace siv
