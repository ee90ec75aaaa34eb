#pragma once

#include <map>
#include <string>
#include <vector>

#include "siv/fitting.hpp"

namespace siv {

// all frequencies are ordinary (Hz); phases in radians
namespace models {

ModelSpec linear();
ModelSpec ramsey();
ModelSpec stretched_exp();
ModelSpec damped_sine_sum(std::size_t k);
ModelSpec power_scaling();
ModelSpec lorentzian_pair();
ModelSpec saturation_law();
ModelSpec pol_rate(double gamma0);
ModelSpec parabola();
ModelSpec orbach_offset(double delta_gs);
ModelSpec power_law_offset();
ModelSpec rb_decay();
ModelSpec rb_decay_fixed(double f_init);
ModelSpec rb_decay_free();
ModelSpec rabi_beat(std::size_t k);
ModelSpec gamma2r_model();
ModelSpec exp_recovery();
ModelSpec single_exp();
ModelSpec gaussian();
ModelSpec three_normal_mixture(double min_width = 0.0);

}  // namespace models

// named models with default constants (two-component sums, SiV ground splitting and lifetime-limited rate)
const std::map<std::string, ModelSpec>& model_registry();

// throws UnknownModel
const ModelSpec& lookup_model(const std::string& name);

std::vector<std::string> model_names();

// ---------------------------------------------------------------------------
// Initial-guess helpers
// ---------------------------------------------------------------------------

// strongest k peaks of the discrete Fourier magnitude of y - mean(y), Hz
std::vector<double> dominant_frequencies(const Vector& x, const Vector& y, std::size_t k);

// decay constant from a log-linear fit on the local-maximum envelope of |y - offset|
double envelope_decay_time(const Vector& x, const Vector& y, double offset);

// ordinary linear least squares on explicit basis columns
Vector linear_fit(const std::vector<Vector>& columns, const Vector& y);

}  // namespace siv
