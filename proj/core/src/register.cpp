#include "siv/register.hpp"

#include <cmath>

#include "siv/errors.hpp"

namespace siv {

void RegisterParams::validate() const {
  if (hyperfine.empty() || hyperfine.size() > 2) throw InvalidArgument("RegisterParams: one or two nuclei required");
  if (!(larmor_n > 0.0)) throw InvalidArgument("RegisterParams: larmor_n must be positive");
  if (!std::isfinite(detuning)) throw InvalidArgument("RegisterParams: detuning must be finite");
}

double DephasingModel::factor(double t) const {
  if (!active() || t <= 0.0) return 1.0;
  return std::exp(-std::pow(t / t_c, beta));
}

void DephasingModel::validate() const {
  if (!(t_c > 0.0)) throw InvalidArgument("DephasingModel: t_c must be positive");
  if (beta < 0.5 || beta > 3.0) throw InvalidArgument("DephasingModel: beta must lie in [0.5, 3]");
}

ComplexMatrix embed(const ComplexMatrix& op, std::size_t factor, std::size_t n_nuclei) {
  ComplexMatrix out = factor == 0 ? op : pauli::identity();
  for (std::size_t k = 1; k <= n_nuclei; ++k) out = kron(out, k == factor ? op : pauli::identity());
  return out;
}

ComplexMatrix hamiltonian(const RegisterParams& p, const std::optional<DriveSpec>& d) {
  const std::size_t n = p.n_nuclei();
  const ComplexMatrix sz_e = embed(pauli::z(), 0, n);
  ComplexMatrix h = 0.5 * p.detuning * sz_e;
  if (d) {
    h += 0.5 * d->rabi * (std::cos(d->phase) * embed(pauli::x(), 0, n) + std::sin(d->phase) * embed(pauli::y(), 0, n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const ComplexMatrix sz_n = embed(pauli::z(), i + 1, n);
    const ComplexMatrix sx_n = embed(pauli::x(), i + 1, n);
    h += 0.5 * p.larmor_n * sz_n;
    h += sz_e * (0.25 * p.hyperfine[i].a_par * sz_n + 0.25 * p.hyperfine[i].a_perp * sx_n);
  }
  return two_pi * h;
}

RegisterState apply_unitary(const RegisterState& st, const ComplexMatrix& u) {
  RegisterState out = st;
  out.rho = u * st.rho * u.adjoint();
  return out;
}

RegisterState apply_pulse(const RegisterState& st, const RegisterParams& p, const DriveSpec& d) {
  if (d.rabi < 0.0 || d.duration < 0.0) throw InvalidArgument("apply_pulse: negative rabi or duration");
  return apply_unitary(st, propagator(hamiltonian(p, d), d.duration));
}

void apply_dephasing(RegisterState& st, double factor) {
  if (factor == 1.0) return;
  const Eigen::Index h = st.rho.rows() / 2;
  st.rho.topRightCorner(h, h) *= factor;
  st.rho.bottomLeftCorner(h, h) *= factor;
}

RegisterState free_evolve(const RegisterState& st, const RegisterParams& p, double t, const DephasingModel& d) {
  if (t < 0.0) throw InvalidArgument("free_evolve: negative duration");
  RegisterState out = apply_unitary(st, propagator(hamiltonian(p), t));
  apply_dephasing(out, d.factor(t));
  return out;
}

RegisterState initialize_electron(double fidelity, std::size_t n_nuclei) {
  if (!(fidelity >= 0.5 && fidelity <= 1.0)) throw InvalidArgument("initialize_electron: fidelity must lie in [0.5, 1]");
  if (n_nuclei > 2) throw InvalidArgument("initialize_electron: at most two nuclei");
  ComplexMatrix rho = ComplexMatrix::Zero(2, 2);
  rho(0, 0) = 1.0 - fidelity;
  rho(1, 1) = fidelity;
  for (std::size_t i = 0; i < n_nuclei; ++i) rho = kron(rho, 0.5 * pauli::identity());
  return {rho, n_nuclei};
}

RegisterState reinitialize_electron(const RegisterState& st, double fidelity) {
  if (!(fidelity >= 0.5 && fidelity <= 1.0)) throw InvalidArgument("reinitialize_electron: fidelity must lie in [0.5, 1]");
  const Eigen::Index h = st.rho.rows() / 2;
  const ComplexMatrix nuclear = st.rho.topLeftCorner(h, h) + st.rho.bottomRightCorner(h, h);
  ComplexMatrix e = ComplexMatrix::Zero(2, 2);
  e(0, 0) = 1.0 - fidelity;
  e(1, 1) = fidelity;
  return {kron(e, nuclear), st.n_nuclei};
}

RegisterState prepare_nucleus(const RegisterState& st, std::size_t i, double polarization) {
  if (i >= st.n_nuclei) throw InvalidArgument("prepare_nucleus: invalid nucleus index");
  if (std::abs(polarization) > 1.0) throw InvalidArgument("prepare_nucleus: polarization outside [-1, 1]");
  // rebuild as a product of single-spin marginals
  const std::size_t n = st.n_nuclei;
  ComplexMatrix out;
  for (std::size_t f = 0; f <= n; ++f) {
    ComplexMatrix m(2, 2);
    if (f == i + 1) {
      m << 0.5 * (1.0 + polarization), 0.0, 0.0, 0.5 * (1.0 - polarization);
    } else {
      const double up = f == 0 ? population_up(st) : 0.5 * (1.0 + nuclear_sigma_z(st, f - 1));
      m << up, 0.0, 0.0, 1.0 - up;
    }
    out = f == 0 ? m : kron(out, m);
  }
  return {out, n};
}

RegisterState flip_electron(const RegisterState& st) {
  return apply_unitary(st, embed(pauli::x(), 0, st.n_nuclei));
}

double population_up(const RegisterState& st) {
  const Eigen::Index h = st.rho.rows() / 2;
  return st.rho.topLeftCorner(h, h).trace().real();
}

double nuclear_sigma_z(const RegisterState& st, std::size_t nucleus) {
  if (nucleus >= st.n_nuclei) throw InvalidArgument("measure: invalid nucleus index");
  // sigma_z of factor k is diagonal: sign from the bit of the basis index
  const std::size_t n = st.n_nuclei;
  const std::size_t bit = n - 1 - nucleus;
  double s = 0.0;
  for (Eigen::Index k = 0; k < st.rho.rows(); ++k) {
    const bool down = (static_cast<std::size_t>(k) >> bit) & 1U;
    s += (down ? -1.0 : 1.0) * st.rho(k, k).real();
  }
  return s;
}

double measure(const RegisterState& st, Observable obs, std::size_t nucleus) {
  switch (obs) {
    case Observable::electron_population_up:
      return population_up(st);
    case Observable::electron_population_down:
      return 1.0 - population_up(st);
    case Observable::electron_sigma_z:
      return 2.0 * population_up(st) - 1.0;
    case Observable::nuclear_sigma_z:
      return nuclear_sigma_z(st, nucleus);
  }
  return 0.0;
}

}  // namespace siv
