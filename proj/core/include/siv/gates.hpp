#pragma once

#include <array>

#include <Eigen/Dense>

#include "siv/sequences.hpp"

namespace siv {

enum class GateKind { UI, CeNOTn, CnNOTe, identity };

struct GateSpec {
  GateKind kind = GateKind::identity;
  double tau = 0.0;                // s, DD spacing (conditional block for CeNOTn)
  int n_pulses = 0;                // DD pulses (conditional block for CeNOTn)
  double pi_duration = 55.715e-9;  // s
  // CeNOTn unconditional block; spacing is T_L - T_pi
  double tau_uncond = 0.0;
  int n_pulses_uncond = 0;
  // CnNOTe drive, Hz
  double rabi = 0.0;
  // CeNOTn flips the nucleus when the electron is up
  bool control_up = true;
  bool calibrated = false;

  void validate() const;
};

GateSpec ui_gate(double tau, int n_pulses, double pi_duration = 55.715e-9);
GateSpec identity_gate();

// conditional electron pi resonant with nucleus 0 down; rabi <= 0 selects A_par/sqrt(3)
GateSpec cnnote_gate(const ExperimentSetup& s, double rabi = 0.0);

// searches pulse counts for the conditional and unconditional blocks around the
// zero crossings of the nuclear rotation curve
GateSpec calibrate_cenotn(const ExperimentSetup& s);

// free time between the two U_I blocks keeping the second block phase-locked to the nuclear precession
double ui_gap(const ExperimentSetup& s, const GateSpec& g);

// electron to nucleus polarization transfer followed by an optical re-pump
RegisterState nuclear_init_gate(const ExperimentSetup& s, const GateSpec& g, double f_ie, bool flip_first = false);
void apply_ui(const ExperimentSetup& s, const GateSpec& g, RegisterState& st);

// time-reversed U_I mapping nucleus 0 back onto the electron; returns electron up population
double ui_probe(const ExperimentSetup& s, const GateSpec& g, const RegisterState& st);

// throws UncalibratedGate
void composite_gate(const ExperimentSetup& s, const GateSpec& g, RegisterState& st);

// basis order {down-Down, down-Up, up-Down, up-Up}, index = 2 e + n
struct TransferMatrix {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();

  // ideal image of each basis state
  static std::array<int, 4> permutation(const GateSpec& g);
  double gate_fidelity(const GateSpec& g) const;
};

// readout referenced to identity-gate runs; nucleus read through ui_probe with `readout`
TransferMatrix transfer_matrix(const ExperimentSetup& s, const GateSpec& gate, const GateSpec& readout, double f_ie,
                               double f_in);

}  // namespace siv
