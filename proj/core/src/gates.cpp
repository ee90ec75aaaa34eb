#include "siv/gates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "siv/errors.hpp"

namespace siv {

namespace {

DriveSpec half_pi(const GateSpec& g, double phase) { return {0.5 / g.pi_duration, phase, 0.5 * g.pi_duration}; }

RegisterState basis_state(const ExperimentSetup& s, bool e_up, bool n_up, double f_ie, double f_in) {
  RegisterState st = initialize_electron(f_ie, s.params.n_nuclei());
  if (e_up) st = flip_electron(st);
  const double pol = 2.0 * f_in - 1.0;
  return prepare_nucleus(st, 0, n_up ? pol : -pol);
}

void cenotn(Evolver& ev, const GateSpec& g, RegisterState& st) {
  ev.dd_block(st, g.tau, g.n_pulses, g.pi_duration);
  ev.dd_block(st, g.tau_uncond, g.n_pulses_uncond, g.pi_duration);
}

void cnnote(const ExperimentSetup& s, const GateSpec& g, RegisterState& st) {
  RegisterParams p = s.params;
  p.detuning += 0.5 * p.hyperfine.front().a_par;
  Evolver ev(p, s.dephasing);
  ev.pulse(st, {g.rabi, 0.0, 0.5 / g.rabi});
}

// worst error of the truth table and of the twice-applied identity
double cenotn_score(const ExperimentSetup& s, GateSpec& g) {
  Evolver ev(s.params, s.dephasing);
  double z_once[2];
  double z_twice[2];
  double e_err = 0.0;
  for (int e = 0; e < 2; ++e) {
    RegisterState st = prepare_nucleus(initialize_electron(1.0, s.params.n_nuclei()), 0, 1.0);
    if (e == 1) st = flip_electron(st);
    cenotn(ev, g, st);
    z_once[e] = nuclear_sigma_z(st, 0);
    const double p_up = population_up(st);
    e_err = std::max(e_err, e == 1 ? 1.0 - p_up : p_up);
    cenotn(ev, g, st);
    z_twice[e] = nuclear_sigma_z(st, 0);
  }
  g.control_up = z_once[1] < z_once[0];
  const int ctrl = g.control_up ? 1 : 0;
  const double flip_err = 0.5 * (1.0 + z_once[ctrl]);
  const double idle_err = 0.5 * (1.0 - z_once[1 - ctrl]);
  const double twice_err = 0.5 * (1.0 - std::min(z_twice[0], z_twice[1]));
  return std::max({flip_err, idle_err, twice_err, e_err});
}

}  // namespace

void GateSpec::validate() const {
  if (!(pi_duration > 0.0)) throw InvalidArgument("GateSpec: pi_duration must be positive");
  switch (kind) {
    case GateKind::UI:
    case GateKind::CeNOTn:
      if (n_pulses <= 0 || n_pulses % 2 != 0) throw InvalidArgument("GateSpec: n_pulses must be positive and even");
      if (!(tau > 0.0)) throw InvalidArgument("GateSpec: tau must be positive");
      if (kind == GateKind::CeNOTn && (n_pulses_uncond < 0 || n_pulses_uncond % 2 != 0)) {
        throw InvalidArgument("GateSpec: unconditional pulse count must be even");
      }
      break;
    case GateKind::CnNOTe:
      if (rabi < 0.0) throw InvalidArgument("GateSpec: negative rabi frequency");
      break;
    case GateKind::identity:
      break;
  }
}

GateSpec ui_gate(double tau, int n_pulses, double pi_duration) {
  GateSpec g;
  g.kind = GateKind::UI;
  g.tau = tau;
  g.n_pulses = n_pulses;
  g.pi_duration = pi_duration;
  g.calibrated = true;
  g.validate();
  return g;
}

GateSpec identity_gate() {
  GateSpec g;
  g.calibrated = true;
  return g;
}

GateSpec cnnote_gate(const ExperimentSetup& s, double rabi) {
  s.validate();
  GateSpec g;
  g.kind = GateKind::CnNOTe;
  g.pi_duration = s.pi_duration;
  g.rabi = rabi > 0.0 ? rabi : s.params.hyperfine.front().a_par / std::sqrt(3.0);
  g.calibrated = g.rabi > 0.0;
  return g;
}

GateSpec calibrate_cenotn(const ExperimentSetup& s) {
  s.validate();
  const double t_l = s.larmor_period();
  GateSpec g;
  g.kind = GateKind::CeNOTn;
  g.pi_duration = s.pi_duration;
  g.tau = 0.5 * t_l - s.pi_duration;
  g.tau_uncond = t_l - s.pi_duration;
  if (g.tau <= 0.0) throw InvalidArgument("calibrate_cenotn: pi_duration exceeds half the Larmor period");

  ExperimentSetup clean = s;
  clean.dephasing = DephasingModel{};
  const std::vector<int> nc = rotation_zero_crossings(clean, g.tau, 2000, 1);
  const std::vector<int> nu = rotation_zero_crossings(clean, g.tau_uncond, 4000, 2);
  if (nc.empty() || nu.empty()) throw UncalibratedGate("calibrate_cenotn: no pi/2 rotation found");

  double best = std::numeric_limits<double>::infinity();
  GateSpec best_g = g;
  for (int dc = -2; dc <= 2; dc += 2) {
    for (int base : nu) {
      for (int du = -4; du <= 4; du += 2) {
        GateSpec trial = g;
        trial.n_pulses = nc.front() + dc;
        trial.n_pulses_uncond = base + du;
        if (trial.n_pulses <= 0 || trial.n_pulses_uncond < 0) continue;
        const double score = cenotn_score(clean, trial);
        if (score < best) {
          best = score;
          best_g = trial;
        }
      }
    }
  }
  best_g.calibrated = true;
  return best_g;
}

double ui_gap(const ExperimentSetup& s, const GateSpec& g) {
  const double t_l = s.larmor_period();
  const double block = g.n_pulses * (g.tau + g.pi_duration);
  double gap = std::fmod(0.25 * t_l - block, t_l);
  if (gap < 0.0) gap += t_l;
  while (gap < 0.5 * g.pi_duration) gap += t_l;
  return gap;
}

void apply_ui(const ExperimentSetup& s, const GateSpec& g, RegisterState& st) {
  if (g.kind != GateKind::UI) throw InvalidArgument("apply_ui: gate kind must be UI");
  g.validate();
  Evolver ev(s.params, s.dephasing);
  const double gap = ui_gap(s, g);
  ev.pulse(st, half_pi(g, pi / 2));
  ev.dd_block(st, g.tau, g.n_pulses, g.pi_duration);
  ev.pulse(st, half_pi(g, 0.0));
  ev.wait(st, gap - 0.5 * g.pi_duration);
  ev.dd_block(st, g.tau, g.n_pulses, g.pi_duration);
}

RegisterState nuclear_init_gate(const ExperimentSetup& s, const GateSpec& g, double f_ie, bool flip_first) {
  s.validate();
  if (g.kind != GateKind::UI) throw InvalidArgument("nuclear_init_gate: gate kind must be UI");
  RegisterState st = initialize_electron(f_ie, s.params.n_nuclei());
  if (flip_first) st = flip_electron(st);
  apply_ui(s, g, st);
  return reinitialize_electron(st, f_ie);
}

double ui_probe(const ExperimentSetup& s, const GateSpec& g, const RegisterState& st) {
  if (g.kind != GateKind::UI) throw InvalidArgument("ui_probe: gate kind must be UI");
  g.validate();
  Evolver ev(s.params, s.dephasing);
  RegisterState r = st;
  const double gap = ui_gap(s, g);
  ev.dd_block(r, g.tau, g.n_pulses, g.pi_duration);
  ev.wait(r, gap - 0.5 * g.pi_duration);
  ev.pulse(r, half_pi(g, pi));
  ev.dd_block(r, g.tau, g.n_pulses, g.pi_duration);
  ev.pulse(r, half_pi(g, -pi / 2));
  return population_up(r);
}

void composite_gate(const ExperimentSetup& s, const GateSpec& g, RegisterState& st) {
  if (!g.calibrated) throw UncalibratedGate("composite_gate: gate parameters are not calibrated");
  g.validate();
  switch (g.kind) {
    case GateKind::identity:
      return;
    case GateKind::CeNOTn: {
      Evolver ev(s.params, s.dephasing);
      cenotn(ev, g, st);
      return;
    }
    case GateKind::CnNOTe:
      if (!(g.rabi > 0.0)) throw UncalibratedGate("composite_gate: CnNOTe needs a rabi frequency");
      cnnote(s, g, st);
      return;
    case GateKind::UI:
      apply_ui(s, g, st);
      return;
  }
}

// ---------------------------------------------------------------------------
// Transfer matrix
// ---------------------------------------------------------------------------

std::array<int, 4> TransferMatrix::permutation(const GateSpec& g) {
  switch (g.kind) {
    case GateKind::CeNOTn:
      return g.control_up ? std::array<int, 4>{0, 1, 3, 2} : std::array<int, 4>{1, 0, 2, 3};
    case GateKind::CnNOTe:
      return {2, 1, 0, 3};
    default:
      return {0, 1, 2, 3};
  }
}

double TransferMatrix::gate_fidelity(const GateSpec& g) const {
  const std::array<int, 4> perm = permutation(g);
  double f = 0.0;
  for (int j = 0; j < 4; ++j) f += m(perm[static_cast<std::size_t>(j)], j);
  return 0.25 * f;
}

namespace {

// nuclear transverse coherence averages out during the optical re-pump
RegisterState dephase_nucleus(const RegisterState& st, std::size_t i) {
  RegisterState out = st;
  const std::size_t bit = std::size_t{1} << (st.n_nuclei - 1 - i);
  for (Eigen::Index r = 0; r < out.rho.rows(); ++r) {
    for (Eigen::Index c = 0; c < out.rho.cols(); ++c) {
      if (((static_cast<std::size_t>(r) ^ static_cast<std::size_t>(c)) & bit) != 0) out.rho(r, c) = 0.0;
    }
  }
  return out;
}

// sequential readout: electron projectively, then nucleus 0 through the probe; linear in rho
Eigen::Vector4d readout_column(const ExperimentSetup& s, const GateSpec& readout, const RegisterState& st,
                               double f_ie, double k_norm, double p_mixed) {
  const Eigen::Index h = st.rho.rows() / 2;
  Eigen::Vector4d c = Eigen::Vector4d::Zero();
  for (int e = 0; e < 2; ++e) {
    // electron index 0 is spin up
    const Eigen::Index off = e == 1 ? 0 : h;
    RegisterState proj = st;
    proj.rho.setZero();
    proj.rho.block(off, off, h, h) = st.rho.block(off, off, h, h);
    const double pe = proj.rho.trace().real();
    if (pe <= 1e-15) continue;
    proj.rho /= pe;
    const RegisterState pumped = dephase_nucleus(reinitialize_electron(proj, f_ie), 0);
    const double pn = 0.5 * (1.0 + (ui_probe(s, readout, pumped) - p_mixed) / k_norm);
    c(2 * e) = pe * (1.0 - pn);
    c(2 * e + 1) = pe * pn;
  }
  return c;
}

}  // namespace

TransferMatrix transfer_matrix(const ExperimentSetup& s, const GateSpec& gate, const GateSpec& readout, double f_ie,
                               double f_in) {
  s.validate();
  if (!(f_in >= 0.5 && f_in <= 1.0)) throw InvalidArgument("transfer_matrix: f_in must lie in [0.5, 1]");
  if (readout.kind != GateKind::UI) throw InvalidArgument("transfer_matrix: readout must be a UI gate");

  RegisterState mixed = prepare_nucleus(initialize_electron(f_ie, s.params.n_nuclei()), 0, 0.0);
  RegisterState polarized = prepare_nucleus(mixed, 0, 1.0);
  const double p_mixed = ui_probe(s, readout, mixed);
  const double k_norm = ui_probe(s, readout, polarized) - p_mixed;
  if (std::abs(k_norm) < 1e-9) throw InvalidArgument("transfer_matrix: readout gate has no nuclear contrast");

  Eigen::Matrix4d raw;
  Eigen::Matrix4d ref;
  const GateSpec id = identity_gate();
  for (int j = 0; j < 4; ++j) {
    const bool e_up = j >= 2;
    const bool n_up = j % 2 == 1;
    RegisterState a = basis_state(s, e_up, n_up, f_ie, f_in);
    RegisterState b = a;
    composite_gate(s, gate, a);
    composite_gate(s, id, b);
    raw.col(j) = readout_column(s, readout, a, f_ie, k_norm, p_mixed);
    ref.col(j) = readout_column(s, readout, b, f_ie, k_norm, p_mixed);
  }
  Eigen::FullPivLU<Eigen::Matrix4d> lu(ref);
  if (!lu.isInvertible()) throw InvalidArgument("transfer_matrix: reference readout is singular");
  TransferMatrix t;
  t.m = (raw * lu.inverse()).cwiseMax(0.0).cwiseMin(1.0);
  return t;
}

}  // namespace siv
