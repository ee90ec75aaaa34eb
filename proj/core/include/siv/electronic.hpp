#pragma once

#include "siv/numerics.hpp"

namespace siv {

namespace constants {
inline constexpr double bohr_magneton_over_h = 13.996245e9;  // Hz/T
inline constexpr double boltzmann_over_h = 20.836619e9;      // Hz/K
inline constexpr double gyromag_13C = 10.7084e6;             // Hz/T
inline constexpr double speed_of_light = 299792458.0;        // m/s
}  // namespace constants

// spin-orbit, orbital and spin constants for the SiV ground (g) and excited (u) manifolds
struct DefectConstants {
  double lambda_g = 50e9;  // Hz
  double lambda_u = 260e9;
  double p_g = 0.308;
  double p_u = 0.128;
  double gL_g = 0.328;
  double gL_u = 0.782;
  double gS = 2.0023;
  double deltaP_g = 0.003;
  double deltaP_u = 0.028;
  double transition_C_wavelength = 736.9e-9;  // m
};

struct StrainField {
  double epsilon = 0.0;  // Hz
  double alpha = 1.0;
};

struct FieldConfig {
  double magnitude = 0.0;  // T
  double theta = 0.0;      // degrees from the symmetry axis
  double phi = 0.0;        // degrees, held at 0
};

struct DerivedObservables {
  double omega_L_e = 0.0;  // Hz
  double delta_ss = 0.0;   // Hz
  double delta_gs = 0.0;   // Hz
  double cyclicity = 0.0;  // NaN when the two lowest levels are degenerate
};

// 8x8 in parity(g,u) x orbital(e_x,e_y) x spin, angular units (rad/s)
ComplexMatrix build_hamiltonian(const DefectConstants& c, const StrainField& s, const FieldConfig& f);

// unit-direction ground-state strain operator P_g x (sz + sx) x 1, scaled by epsilon
ComplexMatrix ground_strain_operator(double epsilon);

// optical dipole operators p_x, p_y, p_z
ComplexMatrix dipole_x();
ComplexMatrix dipole_y();
ComplexMatrix dipole_z();

DerivedObservables derived_observables(const Eigensystem& eig);

// eta = sum |<e0|p|e4>|^2 / sum |<e1|p|e4>|^2, +inf when the denominator vanishes
double cyclicity(const Eigensystem& eig);

// relative two-phonon Orbach rate, proportionality constant 1
double orbach_rate(const Eigensystem& eig, const StrainField& s, double temperature);

// convenience: build, diagonalize, derive
DerivedObservables observables_at(const DefectConstants& c, const StrainField& s, const FieldConfig& f);

// closed form of the zero-field ground splitting, Hz
double ground_splitting_zero_field(double lambda_g, double epsilon);

// B = omega_L,n / gamma(13C)
double field_from_larmor(double larmor_n);

}  // namespace siv
