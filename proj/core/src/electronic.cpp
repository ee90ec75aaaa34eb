#include "siv/electronic.hpp"

#include <cmath>
#include <limits>

#include "siv/errors.hpp"

namespace siv {

namespace {

ComplexMatrix projector(int index) {
  ComplexMatrix p = ComplexMatrix::Zero(2, 2);
  p(index, index) = 1.0;
  return p;
}

ComplexMatrix kron3(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c) {
  return kron(kron(a, b), c);
}

struct ManifoldConstants {
  double lambda;
  double p;
  double gL;
  double deltaP;
  double strain;
};

// one parity block, Hz
ComplexMatrix manifold_hamiltonian(const ManifoldConstants& m, double gS, const FieldConfig& f) {
  using namespace pauli;
  const double theta = f.theta * pi / 180.0;
  const double bx = f.magnitude * std::sin(theta);
  const double bz = f.magnitude * std::cos(theta);
  const double mu = constants::bohr_magneton_over_h;
  const ComplexMatrix minus_sy = -y();

  ComplexMatrix h = -0.5 * m.lambda * kron(minus_sy, z());
  h += mu * m.p * m.gL * bz * kron(minus_sy, identity());
  h += mu * gS * kron(identity(), 0.5 * (bx * x() + bz * z()));
  h += mu * 2.0 * m.deltaP * m.gL * bz * kron(identity(), 0.5 * z());
  h += kron(m.strain * z() + m.strain * x(), identity());
  return h;
}

double branch_mean(const ComplexMatrix& block) {
  const Eigensystem es = hermitian_eig(block);
  return 0.5 * (es.values(0) + es.values(1));
}

}  // namespace

ComplexMatrix build_hamiltonian(const DefectConstants& c, const StrainField& s, const FieldConfig& f) {
  if (s.epsilon < 0.0 || s.alpha <= 0.0) throw InvalidArgument("build_hamiltonian: invalid strain");
  if (f.magnitude < 0.0 || f.theta < 0.0 || f.theta > 90.0) {
    throw InvalidArgument("build_hamiltonian: invalid field");
  }
  const ComplexMatrix hg =
      manifold_hamiltonian({c.lambda_g, c.p_g, c.gL_g, c.deltaP_g, s.epsilon}, c.gS, f);
  const ComplexMatrix hu =
      manifold_hamiltonian({c.lambda_u, c.p_u, c.gL_u, c.deltaP_u, s.alpha * s.epsilon}, c.gS, f);

  // omega_C places the lower excited branch c/lambda above the lower ground branch
  const double target = constants::speed_of_light / c.transition_C_wavelength;
  const double omega_c = target - (branch_mean(hu) - branch_mean(hg));

  const ComplexMatrix pg = projector(0);
  const ComplexMatrix pu = projector(1);
  ComplexMatrix h = 0.5 * omega_c * kron3(pu - pg, pauli::identity(), pauli::identity());
  h += kron(pg, hg);
  h += kron(pu, hu);
  return two_pi * h;
}

ComplexMatrix ground_strain_operator(double epsilon) {
  return two_pi * epsilon * kron3(projector(0), pauli::z() + pauli::x(), pauli::identity());
}

ComplexMatrix dipole_x() { return kron3(pauli::x(), pauli::z(), pauli::identity()); }
ComplexMatrix dipole_y() { return kron3(pauli::x(), -pauli::x(), pauli::identity()); }
ComplexMatrix dipole_z() { return 2.0 * kron3(pauli::x(), pauli::identity(), pauli::identity()); }

double cyclicity(const Eigensystem& eig) {
  if (eig.values.size() != 8) throw InvalidArgument("cyclicity: expected an 8-level eigensystem");
  if (std::abs(eig.values(1) - eig.values(0)) <= two_pi * 1.0) {
    throw DegenerateStates("cyclicity: E0 and E1 coincide within 1 Hz");
  }
  const auto e0 = eig.vectors.col(0);
  const auto e1 = eig.vectors.col(1);
  const auto e4 = eig.vectors.col(4);
  double num = 0.0;
  double den = 0.0;
  for (const ComplexMatrix& p : {dipole_x(), dipole_y(), dipole_z()}) {
    num += std::norm(e0.dot(p * e4));
    den += std::norm(e1.dot(p * e4));
  }
  if (den < 1e-30) return std::numeric_limits<double>::infinity();
  return num / den;
}

DerivedObservables derived_observables(const Eigensystem& eig) {
  if (eig.values.size() != 8) throw InvalidArgument("derived_observables: expected an 8-level eigensystem");
  const RealVector e = eig.values / two_pi;
  DerivedObservables out;
  out.omega_L_e = e(1) - e(0);
  out.delta_ss = (e(5) - e(1)) - (e(4) - e(0));
  out.delta_gs = 0.5 * (e(3) + e(2)) - 0.5 * (e(1) + e(0));
  try {
    out.cyclicity = cyclicity(eig);
  } catch (const DegenerateStates&) {
    out.cyclicity = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

// s only fixes the strain direction (equal x and y components), so the unit operator is used
double orbach_rate(const Eigensystem& eig, [[maybe_unused]] const StrainField& s, double temperature) {
  if (!(temperature > 0.0)) throw InvalidArgument("orbach_rate: temperature must be positive");
  const double gap = 0.5 * (eig.values(3) + eig.values(2) - eig.values(1) - eig.values(0)) / two_pi;
  const double x = gap / (constants::boltzmann_over_h * temperature);
  const double bose = 1.0 / std::expm1(x);

  const ComplexMatrix hs = ground_strain_operator(1.0) / two_pi;
  auto d = [&](int i, int j) { return eig.vectors.col(i).dot(hs * eig.vectors.col(j)); };
  const cplx d02 = d(0, 2);
  const cplx d12 = d(1, 2);
  const cplx d03 = d(0, 3);
  const cplx d13 = d(1, 3);
  const double den = std::norm(d02) + std::norm(d12) + std::norm(d03) + std::norm(d13);
  if (den == 0.0) return 0.0;
  const double ratio = std::norm(d02 * std::conj(d12) + d03 * std::conj(d13)) / den;
  return gap * gap * gap * bose * ratio;
}

DerivedObservables observables_at(const DefectConstants& c, const StrainField& s, const FieldConfig& f) {
  return derived_observables(hermitian_eig(build_hamiltonian(c, s, f)));
}

double ground_splitting_zero_field(double lambda_g, double epsilon) {
  return std::sqrt(lambda_g * lambda_g + 8.0 * epsilon * epsilon);
}

double field_from_larmor(double larmor_n) { return larmor_n / constants::gyromag_13C; }

}  // namespace siv
