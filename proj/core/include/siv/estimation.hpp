#pragma once

#include <array>
#include <functional>
#include <vector>

#include "siv/electronic.hpp"

namespace siv {

struct EstimationBounds {
  double epsilon_min = 0.0;
  double epsilon_max = 1e12;
  double alpha_min = 0.1;
  double alpha_max = 2.0;
  double theta_min = 0.0;
  double theta_max = 60.0;
};

struct EstimationResult {
  StrainField strain;
  double theta = 0.0;  // degrees
  double cost = 0.0;
  bool converged = false;  // false when the best cost stalls above 1e-2
  DerivedObservables fitted;
  int evaluations = 0;
};

// sum of squared relative deviations over the four observables; +inf if the model is degenerate
double estimation_cost(const DerivedObservables& model, const DerivedObservables& targets);

// multi-start Nelder-Mead over (epsilon, alpha, theta) at a fixed field magnitude
EstimationResult estimate_parameters(const DerivedObservables& targets, double field_tesla,
                                     const EstimationBounds& bounds = {},
                                     const DefectConstants& constants = {});

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
};

// derivative-free simplex minimizer; stops when the simplex spread falls below x_tol and f_tol
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, double step, int max_evaluations = 4000,
                             double x_tol = 1e-10, double f_tol = 1e-18);

}  // namespace siv
