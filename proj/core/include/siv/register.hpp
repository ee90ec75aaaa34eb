#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "siv/numerics.hpp"

namespace siv {

struct Hyperfine {
  double a_par = 0.0;   // Hz
  double a_perp = 0.0;  // Hz
};

struct RegisterParams {
  double detuning = 0.0;  // Hz, omega_e - omega_MW
  double larmor_n = 0.0;  // Hz, shared by all nuclei
  std::vector<Hyperfine> hyperfine;

  std::size_t n_nuclei() const { return hyperfine.size(); }
  std::size_t dim() const { return std::size_t{2} << hyperfine.size(); }
  void validate() const;
};

struct DriveSpec {
  double rabi = 0.0;      // Hz
  double phase = 0.0;     // rad
  double duration = 0.0;  // s
};

// exp(-(t/t_c)^beta) on electron coherences per free segment; t_c = inf disables it
struct DephasingModel {
  double t_c = std::numeric_limits<double>::infinity();
  double beta = 1.0;

  bool active() const { return t_c < std::numeric_limits<double>::infinity(); }
  double factor(double t) const;
  void validate() const;
};

enum class ElectronSpin { up, down };

// basis electron x n1 x n2, index 0 of each factor is spin up (sigma_z = +1)
struct RegisterState {
  ComplexMatrix rho;
  std::size_t n_nuclei = 1;

  std::size_t dim() const { return static_cast<std::size_t>(rho.rows()); }
};

// angular units; drive terms vanish when d is empty
ComplexMatrix hamiltonian(const RegisterParams& p, const std::optional<DriveSpec>& d = std::nullopt);

// operator acting on one tensor factor (0 = electron, i + 1 = nucleus i)
ComplexMatrix embed(const ComplexMatrix& op, std::size_t factor, std::size_t n_nuclei);

RegisterState apply_unitary(const RegisterState& st, const ComplexMatrix& u);
RegisterState apply_pulse(const RegisterState& st, const RegisterParams& p, const DriveSpec& d);
RegisterState free_evolve(const RegisterState& st, const RegisterParams& p, double t, const DephasingModel& d);

// scale every element between the electron up and down blocks
void apply_dephasing(RegisterState& st, double factor);

// (F |down><down| + (1-F) |up><up|) x (1/2)^n
RegisterState initialize_electron(double fidelity, std::size_t n_nuclei = 1);

// optical re-pump: electron replaced by the F mixture, nuclear marginal kept
RegisterState reinitialize_electron(const RegisterState& st, double fidelity);

// replace nucleus i by (1 + polarization sigma_z)/2 keeping everything else as a product
RegisterState prepare_nucleus(const RegisterState& st, std::size_t i, double polarization);

// ideal instantaneous electron sigma_x
RegisterState flip_electron(const RegisterState& st);

enum class Observable { electron_population_up, electron_population_down, electron_sigma_z, nuclear_sigma_z };

double measure(const RegisterState& st, Observable obs, std::size_t nucleus = 0);

double population_up(const RegisterState& st);
double nuclear_sigma_z(const RegisterState& st, std::size_t nucleus);

}  // namespace siv
