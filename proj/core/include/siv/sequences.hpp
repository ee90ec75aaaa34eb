#pragma once

#include <map>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "siv/register.hpp"
#include "siv/sweep.hpp"

namespace siv {

// ---------------------------------------------------------------------------
// Programs
// ---------------------------------------------------------------------------

struct Pulse {
  DriveSpec drive;
};
struct Wait {
  double duration = 0.0;
};
struct MarkReadout {};

using Segment = std::variant<Pulse, Wait, MarkReadout>;

struct SequenceProgram {
  std::string name;
  std::string axis;
  std::vector<Segment> segments;

  void validate() const;
};

// shared experiment context; pi pulses use rabi 1/(2 pi_duration)
struct ExperimentSetup {
  RegisterParams params;
  DephasingModel dephasing;
  double f_ie = 1.0;
  double pi_duration = 55.715e-9;

  double pi_rabi() const { return 0.5 / pi_duration; }
  double larmor_period() const { return 1.0 / params.larmor_n; }
  void validate() const;
};

enum class DdKind { CPMG, XY };

// phase of the k-th pi pulse
double dd_phase(DdKind kind, int k);

// propagator cache for repeated pulses and waits
class Evolver {
 public:
  Evolver(const RegisterParams& p, const DephasingModel& d);

  void pulse(RegisterState& st, const DriveSpec& d);
  void wait(RegisterState& st, double t);
  // [tau/2 - pi - tau/2]^n with dephasing on each half gap
  void dd_block(RegisterState& st, double tau, int n, double pi_duration, DdKind kind = DdKind::XY);

  const RegisterParams& params() const { return params_; }

 private:
  const ComplexMatrix& drive_propagator(const DriveSpec& d);
  const ComplexMatrix& wait_propagator(double t);

  RegisterParams params_;
  DephasingModel dephasing_;
  std::map<std::tuple<double, double, double>, ComplexMatrix> drives_;
  std::map<double, ComplexMatrix> waits_;
};

// electron up population at each MarkReadout
std::vector<double> run_program(RegisterState& st, const RegisterParams& p, const DephasingModel& d,
                                const SequenceProgram& program);

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

SweepResult run_rabi(const ExperimentSetup& s, double omega, const std::vector<double>& durations);

enum class RamseyTarget { electron, nuclear };

// electron: pi/2 - tau - pi/2 at detuning delta
// nuclear: unconditional DD pi/2 - tau - DD pi/2 with the electron held in `prep`
SweepResult run_ramsey(const ExperimentSetup& s, double delta, const std::vector<double>& taus,
                       RamseyTarget target = RamseyTarget::electron, ElectronSpin prep = ElectronSpin::down);

// n_pulses = 0 reduces to Ramsey
SweepResult run_dd(const ExperimentSetup& s, DdKind kind, int n_pulses, const std::vector<double>& taus);

SweepResult run_spin_lock(const ExperimentSetup& s, double omega_sl, const std::vector<double>& taus);
SweepResult run_spin_lock_amplitude(const ExperimentSetup& s, double tau_sl, const std::vector<double>& omegas);

// signal: electron coherence after the block (nuclei mixed);
// aux nuclear_sigma_z: nucleus 0 prepared up, electron initialized down
SweepResult run_nuclear_rotation(const ExperimentSetup& s, double tau_rot, const std::vector<int>& n_sweep);

// nuclear sigma_z of nucleus 0 after an XY block of every even length up to max_n
// (electron down with F = 1, nucleus up); index k holds N = 2k
std::vector<double> rotation_curve(const ExperimentSetup& s, double tau_rot, int max_n);

// even N nearest each of the first `count` zero crossings of rotation_curve
std::vector<int> rotation_zero_crossings(const ExperimentSetup& s, double tau_rot, int max_n, std::size_t count);

}  // namespace siv
