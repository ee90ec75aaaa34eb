#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "siv/fitting.hpp"

namespace siv {

// ---------------------------------------------------------------------------
// Optical pumping
// ---------------------------------------------------------------------------

struct PumpParams {
  double gamma0 = 96.251e6;  // Hz, lifetime-limited linewidth
  double eta = 816.285;      // cyclicity
  double s = 1.0;            // P / P_sat
  double t_pulse = 0.0;      // s

  void validate() const;
};

// gamma0 / (2 eta) * s / (1 + s)
double polarization_rate(const PumpParams& p);

// gamma0_opt * sqrt(1 + s)
double saturation_linewidth(double s, double gamma0_opt);

struct PulseMetrics {
  double amplitude = 0.0;     // a
  double steady_state = 0.0;  // n_ss
  double t_p = 0.0;           // s
  double fidelity = 0.0;      // a / (a + n_ss)
  double sigma_amplitude = 0.0;
  double sigma_steady_state = 0.0;
  double sigma_t_p = 0.0;
};

// a exp(-t/T_p) + n_ss; throws FitFailed when the residual norm exceeds max_residual
PulseMetrics extract_pulse_metrics(const Vector& t, const Vector& counts,
                                   double max_residual = std::numeric_limits<double>::infinity());

// collective fit on the mean trace, then per-pulse fits with T_p and n_ss held within 3 sigma of it
std::vector<PulseMetrics> extract_pulse_metrics_bounded(const Vector& t, const std::vector<Vector>& traces,
                                                        PulseMetrics* collective = nullptr);

// divides out a slow exponential drift of per-record counts, referenced to the first record
Vector renormalize_drift(const Vector& record_counts);

// ---------------------------------------------------------------------------
// Single-shot readout
// ---------------------------------------------------------------------------

enum class NuclearState { bright, dark, mixed };

struct SsrConfig {
  int n_blocks = 252;
  double t_block = 11.9e-6;  // s, pump pulse plus CnNOTe
  double mean_bright = 32.0;
  double mean_dark = 10.0;
  double p_offres = 0.1;
  double t_pol_n = 41.62e-3;  // s
  double threshold = 21.0;
  int shots = 10000;
  std::uint64_t seed = 1;

  void validate() const;
  double window() const { return n_blocks * t_block; }
};

struct PhotonRecord {
  std::vector<int> counts;
  std::vector<bool> initial_bright;
  std::vector<bool> final_bright;  // nuclear state at the end of the window
  std::vector<bool> offres;

  std::size_t size() const { return counts.size(); }
  void append(const PhotonRecord& other);
};

PhotonRecord simulate_ssr(const SsrConfig& c, NuclearState initial);

struct Classification {
  std::vector<bool> labels;  // true = bright
  // P(final state matches | label), the heralded initialization fidelity
  double fidelity_bright = 0.0;
  double fidelity_dark = 0.0;
  // P(label matches | final state)
  double recall_bright = 0.0;
  double recall_dark = 0.0;
  // threshold minimizing |fidelity_bright - fidelity_dark|
  double equalizing_threshold = 0.0;
};

// bright when count > threshold
Classification classify_threshold(const PhotonRecord& r, double threshold);

// 1 - fraction of non-off-resonant bright-initialized shots still bright at the end
double bright_polarization_loss(const PhotonRecord& r);

struct MixtureFit {
  std::array<double, 3> weights{};
  std::array<double, 3> means{};
  std::array<double, 3> widths{};
  FitResult fit;
};

// three normal components on the normalized count histogram, ordered by mean
MixtureFit fit_photon_histogram(const std::vector<int>& counts);

}  // namespace siv
