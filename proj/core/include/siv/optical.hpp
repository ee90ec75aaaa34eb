#pragma once

#include <vector>

#include <Eigen/Dense>

#include "siv/fitting.hpp"
#include "siv/sweep.hpp"

namespace siv {

// basis index 0 = excited, 1 = ground
using Matrix2c = Eigen::Matrix2cd;

struct OpticalParams {
  double rabi_per_volt = 1.14422658e9;  // Hz per modulation volt
  double rabi_offset = 0.0;             // Hz, affine calibration offset
  double detuning = 0.0;                // Hz
  double t1 = 1.6535e-9;                // s
  double gamma_phi = 0.0;               // 1/s, pure dephasing

  double rabi(double amplitude) const { return rabi_offset + rabi_per_volt * amplitude; }
  // 1/T2 = 1/(2 T1) + gamma_phi
  double t2() const;
  void validate() const;
};

struct OpticalDrive {
  double amplitude = 0.0;  // V
  double phase = 0.0;      // rad
};

Matrix2c ground_state();
Matrix2c excited_state();

// min(1/(40 Omega), T1/40), shrunk so an integer number of steps covers t
double default_step(const OpticalParams& p, const OpticalDrive& d, double t);

// fixed-step RK4; dt <= 0 selects default_step; throws StepTooLarge above min(1/(20 Omega), T1/20)
Matrix2c evolve_lindblad(const Matrix2c& rho, const OpticalParams& p, const OpticalDrive& d, double t,
                         double dt = 0.0);

double excited_population(const Matrix2c& rho);

// ground start, excited population after each drive duration
SweepResult run_optical_rabi(const OpticalParams& p, double amplitude, const std::vector<double>& mod_times,
                             double dt = 0.0);

// free decay of the excited population after a pulse, sampled at `times`
std::vector<double> fluorescence_decay(const OpticalParams& p, const Matrix2c& rho, const std::vector<double>& times);

struct OpticalRabiAnalysis {
  double frequency = 0.0;  // Hz
  double decay_rate = 0.0; // 1/s, envelope rate (1/T1 + 1/T2) / 2
  double t2 = 0.0;         // s
  double gamma2 = 0.0;     // Hz, linewidth 1/(pi T2)
  FitResult fit;
};

// damped-sine fit of a Rabi sweep with known T1
OpticalRabiAnalysis analyze_optical_rabi(const SweepResult& sweep, double t1);

struct OpticalSegment {
  double amplitude = 0.0;  // V
  double phase = 0.0;      // rad
  double duration = 0.0;   // s
};

struct OpticalPulseTrain {
  std::vector<OpticalSegment> segments;
  double buffer = 0.8e-9;  // s

  void validate() const;
};

// two pi/2 pulses of 0.35 ns with a 0.8 ns buffer for the given calibration
OpticalPulseTrain phase_control_train(const OpticalParams& p, double duration = 0.35e-9, double buffer = 0.8e-9);

// excited population after the second pulse, shifted by each relative phase
SweepResult run_phase_control(const OpticalParams& p, const OpticalPulseTrain& train, const std::vector<double>& phases,
                              double dt = 0.0);

struct SinusoidFit {
  double amplitude = 0.0;
  double period = 0.0;  // axis units
  double phase = 0.0;
  double offset = 0.0;
  double rms_residual = 0.0;
};

SinusoidFit fit_sinusoid(const Vector& x, const Vector& y);

struct LifetimeFit {
  double t1 = 0.0;
  double amplitude = 0.0;
  double sigma_t1 = 0.0;
};

// single exponential with offset; throws FitFailed
LifetimeFit extract_lifetime(const Vector& t, const Vector& trace);

struct LifetimeEnsemble {
  double mean = 0.0;
  double sigma = 0.0;
};

// Gaussian fit to the histogram of per-trace lifetimes
LifetimeEnsemble aggregate_lifetimes(const Vector& t1_values, int bins = 0);

// 1 / (2 pi T1)
double fourier_limit(double t1);

}  // namespace siv
