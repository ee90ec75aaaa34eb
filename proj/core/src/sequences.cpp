#include "siv/sequences.hpp"

#include <algorithm>
#include <cmath>

#include "siv/errors.hpp"

namespace siv {

namespace {

constexpr double xy_pattern[8] = {0.0, pi / 2, 0.0, pi / 2, pi / 2, 0.0, pi / 2, 0.0};

// phase of the closing pi/2 that maps the refocused state back to spin up
double closing_phase(DdKind kind, int n) {
  int x_count = 0;
  for (int k = 0; k < n; ++k) {
    if (dd_phase(kind, k) == 0.0) ++x_count;
  }
  return x_count % 2 == 0 ? 0.0 : pi;
}

DriveSpec half_pi(const ExperimentSetup& s, double phase) { return {s.pi_rabi(), phase, 0.5 * s.pi_duration}; }

}  // namespace

void SequenceProgram::validate() const {
  bool readout = false;
  for (const Segment& seg : segments) {
    if (const auto* p = std::get_if<Pulse>(&seg)) {
      if (p->drive.duration < 0.0 || p->drive.rabi < 0.0) throw InvalidArgument("SequenceProgram: negative pulse");
    } else if (const auto* w = std::get_if<Wait>(&seg)) {
      if (w->duration < 0.0) throw InvalidArgument("SequenceProgram: negative wait");
    } else {
      readout = true;
    }
  }
  if (!readout) throw InvalidArgument("SequenceProgram: no readout marker");
}

void ExperimentSetup::validate() const {
  params.validate();
  dephasing.validate();
  if (!(f_ie >= 0.5 && f_ie <= 1.0)) throw InvalidArgument("ExperimentSetup: f_ie must lie in [0.5, 1]");
  if (!(pi_duration > 0.0)) throw InvalidArgument("ExperimentSetup: pi_duration must be positive");
}

double dd_phase(DdKind kind, int k) {
  if (kind == DdKind::CPMG) return pi / 2;
  return xy_pattern[k % 8];
}

// ---------------------------------------------------------------------------
// Evolver
// ---------------------------------------------------------------------------

Evolver::Evolver(const RegisterParams& p, const DephasingModel& d) : params_(p), dephasing_(d) {}

const ComplexMatrix& Evolver::drive_propagator(const DriveSpec& d) {
  const auto key = std::make_tuple(d.rabi, d.phase, d.duration);
  auto it = drives_.find(key);
  if (it == drives_.end()) it = drives_.emplace(key, propagator(hamiltonian(params_, d), d.duration)).first;
  return it->second;
}

const ComplexMatrix& Evolver::wait_propagator(double t) {
  auto it = waits_.find(t);
  if (it == waits_.end()) it = waits_.emplace(t, propagator(hamiltonian(params_), t)).first;
  return it->second;
}

void Evolver::pulse(RegisterState& st, const DriveSpec& d) {
  if (d.duration < 0.0 || d.rabi < 0.0) throw InvalidArgument("pulse: negative rabi or duration");
  if (d.duration == 0.0) return;
  const ComplexMatrix& u = drive_propagator(d);
  st.rho = u * st.rho * u.adjoint();
}

void Evolver::wait(RegisterState& st, double t) {
  if (t < 0.0) throw InvalidArgument("wait: negative duration");
  if (t == 0.0) return;
  const ComplexMatrix& u = wait_propagator(t);
  st.rho = u * st.rho * u.adjoint();
  apply_dephasing(st, dephasing_.factor(t));
}

void Evolver::dd_block(RegisterState& st, double tau, int n, double pi_duration, DdKind kind) {
  if (n < 0) throw InvalidArgument("dd_block: negative pulse count");
  if (tau < 0.0) throw InvalidArgument("dd_block: negative spacing");
  const double rabi = 0.5 / pi_duration;
  for (int k = 0; k < n; ++k) {
    wait(st, 0.5 * tau);
    pulse(st, {rabi, dd_phase(kind, k), pi_duration});
    wait(st, 0.5 * tau);
  }
}

std::vector<double> run_program(RegisterState& st, const RegisterParams& p, const DephasingModel& d,
                                const SequenceProgram& program) {
  program.validate();
  Evolver ev(p, d);
  std::vector<double> out;
  for (const Segment& seg : program.segments) {
    if (const auto* pl = std::get_if<Pulse>(&seg)) {
      ev.pulse(st, pl->drive);
    } else if (const auto* w = std::get_if<Wait>(&seg)) {
      ev.wait(st, w->duration);
    } else {
      out.push_back(population_up(st));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

SweepResult run_rabi(const ExperimentSetup& s, double omega, const std::vector<double>& durations) {
  s.validate();
  if (omega < 0.0) throw InvalidArgument("run_rabi: negative rabi frequency");
  SweepResult out;
  out.axis_label = "duration_s";
  for (double t : durations) {
    RegisterState st = initialize_electron(s.f_ie, s.params.n_nuclei());
    SequenceProgram prog{"rabi", "duration_s", {Pulse{{omega, 0.0, t}}, MarkReadout{}}};
    out.axis.push_back(t);
    out.signal.push_back(run_program(st, s.params, s.dephasing, prog).front());
  }
  return out;
}

namespace {

SweepResult electron_ramsey(const ExperimentSetup& s, double delta, const std::vector<double>& taus) {
  RegisterParams p = s.params;
  p.detuning = delta;
  SweepResult out;
  out.axis_label = "tau_s";
  for (double tau : taus) {
    RegisterState st = initialize_electron(s.f_ie, p.n_nuclei());
    SequenceProgram prog{"ramsey",
                         "tau_s",
                         {Pulse{half_pi(s, 0.0)}, Wait{tau}, Pulse{half_pi(s, 0.0)}, MarkReadout{}}};
    out.axis.push_back(tau);
    out.signal.push_back(run_program(st, p, s.dephasing, prog).front());
  }
  return out;
}

SweepResult nuclear_ramsey(const ExperimentSetup& s, double delta, const std::vector<double>& taus, ElectronSpin prep) {
  ExperimentSetup cal = s;
  cal.params.detuning = delta;
  const double tau_u = s.larmor_period() - s.pi_duration;
  if (tau_u <= 0.0) throw InvalidArgument("run_ramsey: pi_duration exceeds the Larmor period");
  const std::vector<int> zeros = rotation_zero_crossings(cal, tau_u, 4000, 1);
  if (zeros.empty()) throw InvalidArgument("run_ramsey: no unconditional pi/2 rotation found");
  const int n_half = zeros.front();

  SweepResult out;
  out.axis_label = "tau_s";
  out.signal_label = "nuclear_population_up";
  std::vector<double> sigma;
  Evolver ev(cal.params, s.dephasing);
  for (double tau : taus) {
    RegisterState st = initialize_electron(s.f_ie, cal.params.n_nuclei());
    if (prep == ElectronSpin::up) st = flip_electron(st);
    st = prepare_nucleus(st, 0, 1.0);
    ev.dd_block(st, tau_u, n_half, s.pi_duration);
    ev.wait(st, tau);
    ev.dd_block(st, tau_u, n_half, s.pi_duration);
    const double z = nuclear_sigma_z(st, 0);
    out.axis.push_back(tau);
    out.signal.push_back(0.5 * (1.0 + z));
    sigma.push_back(z);
  }
  out.aux.emplace_back("nuclear_sigma_z", std::move(sigma));
  out.aux.emplace_back("n_half_pi", std::vector<double>(out.axis.size(), static_cast<double>(n_half)));
  return out;
}

}  // namespace

SweepResult run_ramsey(const ExperimentSetup& s, double delta, const std::vector<double>& taus, RamseyTarget target,
                       ElectronSpin prep) {
  s.validate();
  if (target == RamseyTarget::electron) return electron_ramsey(s, delta, taus);
  return nuclear_ramsey(s, delta, taus, prep);
}

SweepResult run_dd(const ExperimentSetup& s, DdKind kind, int n_pulses, const std::vector<double>& taus) {
  s.validate();
  if (n_pulses < 0) throw InvalidArgument("run_dd: negative pulse count");
  SweepResult out;
  out.axis_label = "tau_s";
  std::vector<double> total;
  const double close = closing_phase(kind, n_pulses);
  for (double tau : taus) {
    if (tau < 0.0) throw InvalidArgument("run_dd: negative spacing");
    RegisterState st = initialize_electron(s.f_ie, s.params.n_nuclei());
    Evolver ev(s.params, s.dephasing);
    ev.pulse(st, half_pi(s, 0.0));
    if (n_pulses == 0) {
      ev.wait(st, tau);
    } else {
      ev.dd_block(st, tau, n_pulses, s.pi_duration, kind);
    }
    ev.pulse(st, half_pi(s, close));
    out.axis.push_back(tau);
    out.signal.push_back(population_up(st));
    total.push_back(tau * std::max(n_pulses, 1));
  }
  out.aux.emplace_back("free_time_s", std::move(total));
  return out;
}

SweepResult run_spin_lock(const ExperimentSetup& s, double omega_sl, const std::vector<double>& taus) {
  s.validate();
  SweepResult out;
  out.axis_label = "tau_sl_s";
  for (double tau : taus) {
    RegisterState st = initialize_electron(s.f_ie, s.params.n_nuclei());
    SequenceProgram prog{"spinlock",
                         "tau_sl_s",
                         {Pulse{half_pi(s, 0.0)}, Pulse{{omega_sl, pi / 2, tau}}, Pulse{half_pi(s, 0.0)}, MarkReadout{}}};
    out.axis.push_back(tau);
    out.signal.push_back(run_program(st, s.params, s.dephasing, prog).front());
  }
  return out;
}

SweepResult run_spin_lock_amplitude(const ExperimentSetup& s, double tau_sl, const std::vector<double>& omegas) {
  s.validate();
  SweepResult out;
  out.axis_label = "omega_sl_hz";
  for (double omega : omegas) {
    RegisterState st = initialize_electron(s.f_ie, s.params.n_nuclei());
    SequenceProgram prog{"spinlock",
                         "omega_sl_hz",
                         {Pulse{half_pi(s, 0.0)}, Pulse{{omega, pi / 2, tau_sl}}, Pulse{half_pi(s, 0.0)}, MarkReadout{}}};
    out.axis.push_back(omega);
    out.signal.push_back(run_program(st, s.params, s.dephasing, prog).front());
  }
  return out;
}

SweepResult run_nuclear_rotation(const ExperimentSetup& s, double tau_rot, const std::vector<int>& n_sweep) {
  s.validate();
  if (!(tau_rot > 0.0)) throw InvalidArgument("run_nuclear_rotation: tau_rot must be positive");
  SweepResult out;
  out.axis_label = "n_pulses";
  std::vector<double> sigma;
  Evolver ev(s.params, s.dephasing);
  for (int n : n_sweep) {
    if (n < 0) throw InvalidArgument("run_nuclear_rotation: negative pulse count");
    RegisterState coh = initialize_electron(s.f_ie, s.params.n_nuclei());
    ev.pulse(coh, half_pi(s, 0.0));
    ev.dd_block(coh, tau_rot, n, s.pi_duration);
    ev.pulse(coh, half_pi(s, closing_phase(DdKind::XY, n)));

    RegisterState nuc = prepare_nucleus(initialize_electron(s.f_ie, s.params.n_nuclei()), 0, 1.0);
    ev.dd_block(nuc, tau_rot, n, s.pi_duration);

    out.axis.push_back(static_cast<double>(n));
    out.signal.push_back(population_up(coh));
    sigma.push_back(nuclear_sigma_z(nuc, 0));
  }
  out.aux.emplace_back("nuclear_sigma_z", std::move(sigma));
  return out;
}

std::vector<double> rotation_curve(const ExperimentSetup& s, double tau_rot, int max_n) {
  Evolver ev(s.params, s.dephasing);
  RegisterState st = prepare_nucleus(initialize_electron(1.0, s.params.n_nuclei()), 0, 1.0);
  std::vector<double> out{nuclear_sigma_z(st, 0)};
  const double rabi = s.pi_rabi();
  for (int k = 0; k + 2 <= max_n; k += 2) {
    for (int j = k; j < k + 2; ++j) {
      ev.wait(st, 0.5 * tau_rot);
      ev.pulse(st, {rabi, dd_phase(DdKind::XY, j), s.pi_duration});
      ev.wait(st, 0.5 * tau_rot);
    }
    out.push_back(nuclear_sigma_z(st, 0));
  }
  return out;
}

std::vector<int> rotation_zero_crossings(const ExperimentSetup& s, double tau_rot, int max_n, std::size_t count) {
  const std::vector<double> z = rotation_curve(s, tau_rot, max_n);
  std::vector<int> out;
  for (std::size_t k = 1; k < z.size() && out.size() < count; ++k) {
    if ((z[k - 1] > 0.0) != (z[k] > 0.0)) {
      const std::size_t pick = std::abs(z[k - 1]) < std::abs(z[k]) ? k - 1 : k;
      out.push_back(static_cast<int>(2 * pick));
    }
  }
  return out;
}

}  // namespace siv
