#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <siv/benchmarking.hpp>
#include <siv/electronic.hpp>
#include <siv/estimation.hpp>
#include <siv/gates.hpp>
#include <siv/models.hpp>
#include <siv/optical.hpp>
#include <siv/readout.hpp>
#include <siv/numerics.hpp>
#include <siv/sequences.hpp>

#include "csv.hpp"

namespace sivsim {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Shared key groups
// ---------------------------------------------------------------------------

double field_tesla(Config& cfg) {
  if (cfg.has("b") || !cfg.has("larmor_n")) return cfg.number("b");
  return siv::field_from_larmor(cfg.number("larmor_n"));
}

siv::ExperimentSetup read_setup(Config& cfg) {
  siv::ExperimentSetup s;
  s.params.larmor_n = cfg.number("larmor_n");
  s.params.detuning = cfg.number("detuning", 0.0);
  const long n = cfg.integer("n_nuclei", 1);
  if (n < 1 || n > 2) throw ConfigError("key 'n_nuclei' must be 1 or 2");
  for (long k = 1; k <= n; ++k) {
    const std::string tag = std::to_string(k);
    s.params.hyperfine.push_back({cfg.number("a_par_" + tag), cfg.number("a_perp_" + tag)});
  }
  s.dephasing.t_c = cfg.number("t_c", inf);
  s.dephasing.beta = cfg.number("beta", 1.0);
  s.f_ie = cfg.number("f_ie", 1.0);
  s.pi_duration = cfg.number("pi_duration", 55.715e-9);
  return s;
}

std::string name_of(bool e_up, bool n_up) { return std::string(e_up ? "up" : "down") + "_" + (n_up ? "Up" : "Down"); }

// ---------------------------------------------------------------------------
// run <experiment>
// ---------------------------------------------------------------------------

std::string run_rabi(Config& cfg, CsvWriter& out) {
  const siv::ExperimentSetup s = read_setup(cfg);
  const double omega = cfg.number("omega", s.pi_rabi());
  const auto t = cfg.sweep("duration", 0.0, 1e-6, 101);
  cfg.check_unused();
  out.sweep(siv::run_rabi(s, omega, t));
  return "rabi";
}

std::string run_ramsey(Config& cfg, CsvWriter& out) {
  const siv::ExperimentSetup s = read_setup(cfg);
  const double delta = cfg.number("delta", 0.0);
  const std::string target = cfg.choice("target", "electron", {"electron", "nuclear"});
  const std::string prep = cfg.choice("prep", "down", {"down", "up"});
  const auto taus = cfg.sweep("tau", 0.0, 10e-6, 201);
  cfg.check_unused();
  out.sweep(siv::run_ramsey(s, delta, taus, target == "electron" ? siv::RamseyTarget::electron : siv::RamseyTarget::nuclear,
                            prep == "up" ? siv::ElectronSpin::up : siv::ElectronSpin::down));
  return "ramsey";
}

std::string run_dd(Config& cfg, CsvWriter& out) {
  const siv::ExperimentSetup s = read_setup(cfg);
  const std::string kind = cfg.choice("kind", "xy", {"xy", "cpmg"});
  const long n = cfg.integer("n_pulses", 8);
  const auto taus = cfg.sweep("tau", 50e-9, 1e-6, 96);
  cfg.check_unused();
  out.sweep(siv::run_dd(s, kind == "xy" ? siv::DdKind::XY : siv::DdKind::CPMG, static_cast<int>(n), taus));
  return "dd";
}

std::string run_spinlock(Config& cfg, CsvWriter& out) {
  const siv::ExperimentSetup s = read_setup(cfg);
  const std::string mode = cfg.choice("mode", "duration", {"duration", "amplitude"});
  if (mode == "duration") {
    const double omega = cfg.number("omega_sl", s.params.larmor_n);
    const auto taus = cfg.sweep("tau_sl", 0.0, 40e-6, 201);
    cfg.check_unused();
    out.sweep(siv::run_spin_lock(s, omega, taus));
  } else {
    const double tau = cfg.number("tau_sl", 20e-6);
    const auto omegas = cfg.sweep("omega_sl", 0.5 * s.params.larmor_n, 1.5 * s.params.larmor_n, 101);
    cfg.check_unused();
    out.sweep(siv::run_spin_lock_amplitude(s, tau, omegas));
  }
  return "spinlock";
}

std::string run_nucrot(Config& cfg, CsvWriter& out) {
  const siv::ExperimentSetup s = read_setup(cfg);
  const double tau = cfg.number("tau_rot", 0.5 * s.larmor_period() - s.pi_duration);
  const long n_max = cfg.integer("n_max", 400);
  const long step = cfg.integer("n_step", 4);
  if (step < 1) throw ConfigError("key 'n_step' must be positive");
  cfg.check_unused();
  std::vector<int> ns;
  for (long n = 0; n <= n_max; n += step) ns.push_back(static_cast<int>(n));
  out.sweep(siv::run_nuclear_rotation(s, tau, ns));
  return "nucrot";
}

std::string run_gates(Config& cfg, CsvWriter& out) {
  const siv::ExperimentSetup s = read_setup(cfg);
  const std::string gate = cfg.choice("gate", "cenotn", {"cenotn", "cnnote", "identity", "ui"});
  const double ui_tau = cfg.number("ui_tau", 81.5e-9);
  const long ui_n = cfg.integer("ui_n", 42);
  const siv::GateSpec ui = siv::ui_gate(ui_tau, static_cast<int>(ui_n), s.pi_duration);

  if (gate == "ui") {
    cfg.check_unused();
    const siv::RegisterState a = siv::nuclear_init_gate(s, ui, s.f_ie, false);
    const siv::RegisterState b = siv::nuclear_init_gate(s, ui, s.f_ie, true);
    out.columns({"nucleus", "sigma_z", "sigma_z_flipped"});
    for (std::size_t i = 0; i < s.params.n_nuclei(); ++i) {
      out.row({static_cast<double>(i + 1), siv::nuclear_sigma_z(a, i), siv::nuclear_sigma_z(b, i)});
    }
    out.note("target_polarization_fidelity", 0.5 * (1.0 + std::abs(siv::nuclear_sigma_z(a, 0))));
    out.note("probe_contrast", siv::ui_probe(s, ui, a) - siv::ui_probe(s, ui, b));
    return "gates";
  }

  const double f_in = cfg.number("f_in", 1.0);
  siv::GateSpec g = siv::identity_gate();
  if (gate == "cnnote") {
    const double rabi = cfg.number("rabi", 0.0);
    cfg.check_unused();
    g = siv::cnnote_gate(s, rabi);
    out.note("rabi_hz", g.rabi);
  } else if (gate == "cenotn") {
    cfg.check_unused();
    g = siv::calibrate_cenotn(s);
    out.note("n_pulses_conditional", static_cast<double>(g.n_pulses));
    out.note("n_pulses_unconditional", static_cast<double>(g.n_pulses_uncond));
    out.note("control", g.control_up ? "up" : "down");
  } else {
    cfg.check_unused();
  }
  const siv::TransferMatrix t = siv::transfer_matrix(s, g, ui, s.f_ie, f_in);
  out.columns({"to\\from", name_of(false, false), name_of(false, true), name_of(true, false), name_of(true, true)});
  for (int r = 0; r < 4; ++r) {
    std::vector<std::string> cells{name_of(r >= 2, r % 2 == 1)};
    for (int c = 0; c < 4; ++c) cells.push_back(format_number(t.m(r, c)));
    out.row(cells);
  }
  out.note("gate_fidelity", t.gate_fidelity(g));
  return "gates";
}

std::string run_rb(Config& cfg, CsvWriter& out) {
  const siv::ExperimentSetup s = read_setup(cfg);
  siv::RbConfig c;
  std::vector<double> lengths;
  for (int n : c.n_list) lengths.push_back(n);
  lengths = cfg.number_list("n_list", lengths);
  c.n_list.clear();
  for (double v : lengths) {
    if (v < 0 || v != std::floor(v)) throw ConfigError("key 'n_list' must hold non-negative integers");
    c.n_list.push_back(static_cast<int>(v));
  }
  c.n_random = static_cast<int>(cfg.integer("n_random", c.n_random));
  c.depolarizing = cfg.number("depolarizing", 0.0);
  c.rabi = cfg.number("rabi", c.rabi);
  c.seed = cfg.seed(1);
  cfg.check_unused();
  const siv::RbResult r = siv::run_randomized_benchmarking(s, c);
  out.sweep(r.sweep);
  out.note("decay", r.decay);
  out.note("decay_sigma", r.decay_sigma);
  out.note("gate_fidelity", r.gate_fidelity);
  return "rb";
}

}  // namespace

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

std::string cmd_structure(Config& cfg) {
  siv::StrainField strain{cfg.number("epsilon"), cfg.number("alpha")};
  siv::FieldConfig field{field_tesla(cfg), cfg.number("btheta", 0.0), 0.0};
  cfg.check_unused();
  const siv::DerivedObservables o = siv::observables_at({}, strain, field);
  CsvWriter out("structure", cfg.resolved());
  out.columns({"omega_L_e_hz", "delta_ss_hz", "delta_gs_hz", "cyclicity"});
  out.row({o.omega_L_e, o.delta_ss, o.delta_gs, o.cyclicity});
  return out.str();
}

std::string cmd_estimate(Config& cfg) {
  siv::DerivedObservables targets;
  targets.omega_L_e = cfg.number("target_omega_l", 9.431e9);
  targets.delta_ss = cfg.number("target_delta_ss", 254.654e6);
  targets.delta_gs = cfg.number("target_delta_gs", 1110.755e9);
  targets.cyclicity = cfg.number("target_eta", 816.285);
  const double b = field_tesla(cfg);
  cfg.check_unused();
  const siv::EstimationResult r = siv::estimate_parameters(targets, b);
  CsvWriter out("estimate", cfg.resolved());
  out.columns({"epsilon_hz", "alpha", "theta_deg", "cost", "converged", "omega_L_e_hz", "delta_ss_hz", "delta_gs_hz",
               "cyclicity"});
  out.row({r.strain.epsilon, r.strain.alpha, r.theta, r.cost, r.converged ? 1.0 : 0.0, r.fitted.omega_L_e,
           r.fitted.delta_ss, r.fitted.delta_gs, r.fitted.cyclicity});
  return out.str();
}

std::string cmd_run(const std::string& experiment, Config& cfg) {
  // the resolved config is only complete after the experiment read its keys
  CsvWriter scratch("", nlohmann::json::object());
  std::string name;
  if (experiment == "rabi") {
    name = run_rabi(cfg, scratch);
  } else if (experiment == "ramsey") {
    name = run_ramsey(cfg, scratch);
  } else if (experiment == "dd") {
    name = run_dd(cfg, scratch);
  } else if (experiment == "spinlock") {
    name = run_spinlock(cfg, scratch);
  } else if (experiment == "nucrot") {
    name = run_nucrot(cfg, scratch);
  } else if (experiment == "gates") {
    name = run_gates(cfg, scratch);
  } else if (experiment == "rb") {
    name = run_rb(cfg, scratch);
  } else {
    throw ConfigError("unknown experiment '" + experiment + "' (rabi|ramsey|dd|spinlock|nucrot|gates|rb)");
  }
  return scratch.rebind("run " + name, cfg.resolved()).str();
}

std::string cmd_ssr(Config& cfg) {
  siv::SsrConfig c;
  c.n_blocks = static_cast<int>(cfg.integer("n_blocks", c.n_blocks));
  c.t_block = cfg.number("t_block", c.t_block);
  c.mean_bright = cfg.number("mean_bright", c.mean_bright);
  c.mean_dark = cfg.number("mean_dark", c.mean_dark);
  c.p_offres = cfg.number("p_offres", c.p_offres);
  c.t_pol_n = cfg.number("t_pol_n", c.t_pol_n);
  c.threshold = cfg.number("threshold", c.threshold);
  c.shots = static_cast<int>(cfg.integer("shots", c.shots));
  c.seed = cfg.seed(1);
  const std::string initial = cfg.choice("initial", "both", {"both", "bright", "dark", "mixed"});
  const bool histogram = cfg.boolean("fit_histogram", true);
  cfg.check_unused();

  siv::PhotonRecord r;
  if (initial == "both" || initial == "bright") r.append(siv::simulate_ssr(c, siv::NuclearState::bright));
  if (initial == "both" || initial == "dark") r.append(siv::simulate_ssr(c, siv::NuclearState::dark));
  if (initial == "mixed") r = siv::simulate_ssr(c, siv::NuclearState::mixed);
  const siv::Classification cl = siv::classify_threshold(r, c.threshold);

  CsvWriter out("ssr", cfg.resolved());
  out.note("fidelity_bright", cl.fidelity_bright);
  out.note("fidelity_dark", cl.fidelity_dark);
  out.note("recall_bright", cl.recall_bright);
  out.note("recall_dark", cl.recall_dark);
  out.note("equalizing_threshold", cl.equalizing_threshold);
  out.note("bright_polarization_loss", siv::bright_polarization_loss(r));
  if (histogram && r.size() >= 500) {
    const siv::MixtureFit m = siv::fit_photon_histogram(r.counts);
    for (int k = 0; k < 3; ++k) {
      out.note("component_" + std::to_string(k + 1), format_number(m.weights[k]) + " " + format_number(m.means[k]) +
                                                         " " + format_number(m.widths[k]));
    }
  }
  out.columns({"shot", "counts", "latent_initial", "latent_final", "offres", "label"});
  for (std::size_t i = 0; i < r.size(); ++i) {
    out.row(std::vector<std::string>{std::to_string(i), std::to_string(r.counts[i]),
                                     r.initial_bright[i] ? "bright" : "dark", r.final_bright[i] ? "bright" : "dark",
                                     r.offres[i] ? "1" : "0", cl.labels[i] ? "bright" : "dark"});
  }
  return out.str();
}

std::string cmd_optical(Config& cfg) {
  siv::OpticalParams p;
  p.rabi_per_volt = cfg.number("rabi_per_volt", p.rabi_per_volt);
  p.rabi_offset = cfg.number("rabi_offset", 0.0);
  p.detuning = cfg.number("detuning", 0.0);
  p.t1 = cfg.number("t1", p.t1);
  p.gamma_phi = cfg.number("gamma_phi", 0.0);
  const double dt = cfg.number("dt", 0.0);
  const std::string mode = cfg.choice("mode", "rabi", {"rabi", "phase"});

  if (mode == "rabi") {
    const double amplitude = cfg.number("amplitude", 1.0);
    const auto t = cfg.sweep("mod_time", 0.0, 3e-9, 121);
    cfg.check_unused();
    const siv::SweepResult s = siv::run_optical_rabi(p, amplitude, t, dt);
    CsvWriter out("optical rabi", cfg.resolved());
    if (amplitude > 0.0) {
      const siv::OpticalRabiAnalysis a = siv::analyze_optical_rabi(s, p.t1);
      out.note("rabi_frequency_hz", a.frequency);
      out.note("gamma2_hz", a.gamma2);
    }
    out.note("fourier_limit_hz", siv::fourier_limit(p.t1));
    out.sweep(s);
    return out.str();
  }
  const double duration = cfg.number("pulse_duration", 0.35e-9);
  const double buffer = cfg.number("buffer", 0.8e-9);
  const auto phases = cfg.sweep("phase", 0.0, siv::two_pi, 41);
  cfg.check_unused();
  const siv::SweepResult s = siv::run_phase_control(p, siv::phase_control_train(p, duration, buffer), phases, dt);
  const siv::SinusoidFit f = siv::fit_sinusoid(s.axis, s.signal);
  CsvWriter out("optical phase", cfg.resolved());
  out.note("period_rad", f.period);
  out.note("contrast", 2.0 * f.amplitude);
  out.sweep(s);
  return out.str();
}

std::string cmd_fit(Config& cfg) {
  const std::string name = cfg.text("model");
  const std::string path = cfg.text("data");
  const std::string weighting = cfg.choice("weights", "unit", {"unit", "poisson", "column"});
  cfg.check_unused();
  const siv::ModelSpec& model = siv::lookup_model(name);

  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file " + path);
  siv::Vector x;
  siv::Vector y;
  siv::Vector w;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> v;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      char* end = nullptr;
      const double d = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) numeric = false;
      v.push_back(d);
    }
    if (!numeric) continue;  // header row
    if (v.size() < 2) throw ConfigError("data rows need at least x,y columns");
    x.push_back(v[0]);
    y.push_back(v[1]);
    w.push_back(v.size() > 2 ? v[2] : 1.0);
  }
  siv::Vector weights;
  if (weighting == "poisson") weights = siv::poisson_weights(y);
  if (weighting == "column") weights = w;
  siv::FitOptions opt;
  opt.throw_on_max_iterations = false;
  const siv::FitResult f = siv::least_squares(model, x, y, weights, model.initial_guess(x, y), opt);

  CsvWriter out("fit", cfg.resolved());
  out.note("residual_norm", f.residual_norm);
  out.note("converged", f.converged ? "true" : "false");
  out.note("iterations", static_cast<double>(f.iterations));
  out.columns({"param", "value", "sigma", "unit"});
  for (std::size_t k = 0; k < model.size(); ++k) {
    out.row(std::vector<std::string>{model.params[k].name, format_number(f.params[k]), format_number(f.sigma[k]),
                                     model.params[k].unit});
  }
  return out.str();
}

}  // namespace sivsim
