#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace siv {

using Vector = std::vector<double>;

struct Parameter {
  std::string name;
  std::string unit;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

struct ModelSpec {
  std::string name;
  std::vector<Parameter> params;
  std::function<double(const Vector& p, double x)> eval;
  // initial-guess rule; falls back to the bound-clamped zero vector when empty
  std::function<Vector(const Vector& x, const Vector& y)> guess;

  std::size_t size() const { return params.size(); }
  Vector evaluate(const Vector& p, const Vector& x) const;
  Vector initial_guess(const Vector& x, const Vector& y) const;
  std::size_t index(const std::string& param) const;
};

struct FitResult {
  Vector params;
  Vector sigma;
  double residual_norm = 0.0;
  Eigen::MatrixXd covariance;
  bool converged = false;
  int iterations = 0;
};

struct FitOptions {
  int max_iterations = 200;
  double relative_step = 1e-6;
  double tolerance = 1e-10;
  bool throw_on_max_iterations = true;
  // inert parameters are tolerated and get NaN uncertainties instead of SingularNormalMatrix
  bool allow_singular = false;
};

// Levenberg-Marquardt on bound-transformed parameters with a central-difference Jacobian
FitResult least_squares(const ModelSpec& model, const Vector& x, const Vector& y, const Vector& weights,
                        const Vector& init, const FitOptions& options = {});

// unit weights, registry initial guess
FitResult fit(const ModelSpec& model, const Vector& x, const Vector& y, const FitOptions& options = {});

// 1/sqrt(max(y, 1)) for count data
Vector poisson_weights(const Vector& counts);

}  // namespace siv
