#include "siv/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "siv/errors.hpp"

namespace siv {

Vector ModelSpec::evaluate(const Vector& p, const Vector& x) const {
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = eval(p, x[i]);
  return out;
}

Vector ModelSpec::initial_guess(const Vector& x, const Vector& y) const {
  if (guess) return guess(x, y);
  return Vector(params.size(), 0.0);
}

std::size_t ModelSpec::index(const std::string& param) const {
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].name == param) return i;
  }
  throw InvalidArgument("model " + name + " has no parameter " + param);
}

namespace {

// ---------------------------------------------------------------------------
// Bound transforms
// ---------------------------------------------------------------------------

double to_internal(const Parameter& b, double p) {
  const bool lo = std::isfinite(b.lower);
  const bool hi = std::isfinite(b.upper);
  if (lo && hi) {
    const double width = b.upper - b.lower;
    const double margin = 1e-9 * width;
    p = std::clamp(p, b.lower + margin, b.upper - margin);
    return std::log((p - b.lower) / (b.upper - p));
  }
  if (lo) {
    const double margin = std::max(1e-300, 1e-12 * std::abs(b.lower));
    return std::log(std::max(p - b.lower, margin));
  }
  if (hi) {
    const double margin = std::max(1e-300, 1e-12 * std::abs(b.upper));
    return std::log(std::max(b.upper - p, margin));
  }
  return p;
}

double to_external(const Parameter& b, double u) {
  const bool lo = std::isfinite(b.lower);
  const bool hi = std::isfinite(b.upper);
  if (lo && hi) {
    // numerically symmetric logistic
    const double s = u >= 0.0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u));
    return b.lower + (b.upper - b.lower) * s;
  }
  if (lo) return b.lower + std::exp(u);
  if (hi) return b.upper - std::exp(u);
  return u;
}

struct Problem {
  const ModelSpec& model;
  const Vector& x;
  const Vector& y;
  Vector w;

  Vector external(const Vector& u) const {
    Vector p(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) p[k] = to_external(model.params[k], u[k]);
    return p;
  }

  Eigen::VectorXd residual_p(const Vector& p) const {
    Eigen::VectorXd r(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) r(static_cast<Eigen::Index>(i)) = w[i] * (model.eval(p, x[i]) - y[i]);
    return r;
  }

  Eigen::VectorXd residual(const Vector& u) const { return residual_p(external(u)); }

  // central differences; the step is relative to max(|v|, scale) and grows while a column stays exactly zero
  template <typename F>
  Eigen::MatrixXd jacobian(const F& f, const Vector& v, double rel, const Vector& scale) const {
    Eigen::MatrixXd j(static_cast<Eigen::Index>(x.size()), static_cast<Eigen::Index>(v.size()));
    for (std::size_t k = 0; k < v.size(); ++k) {
      const double ref = std::max(std::abs(v[k]), std::abs(scale[k]));
      double h = ref > 0.0 ? rel * ref : rel;
      for (int attempt = 0; attempt < 8; ++attempt) {
        Vector plus = v;
        Vector minus = v;
        plus[k] += h;
        minus[k] -= h;
        j.col(static_cast<Eigen::Index>(k)) = (f(plus) - f(minus)) / (plus[k] - minus[k]);
        if (j.col(static_cast<Eigen::Index>(k)).squaredNorm() > 0.0) break;
        h *= 1e3;
      }
    }
    return j;
  }
};

double half_square(const Eigen::VectorXd& r) { return 0.5 * r.squaredNorm(); }

}  // namespace

FitResult least_squares(const ModelSpec& model, const Vector& x, const Vector& y, const Vector& weights,
                        const Vector& init, const FitOptions& options) {
  const std::size_t n = model.size();
  if (x.size() != y.size()) throw InvalidArgument("least_squares: x and y differ in length");
  if (x.size() < n + 1) throw InvalidArgument("least_squares: need at least n_params + 1 points");
  if (init.size() != n) throw InvalidArgument("least_squares: initial vector has the wrong length");
  if (!weights.empty() && weights.size() != x.size()) throw InvalidArgument("least_squares: weights length mismatch");

  Problem prob{model, x, y, weights.empty() ? Vector(x.size(), 1.0) : weights};
  Vector u(n);
  for (std::size_t k = 0; k < n; ++k) u[k] = to_internal(model.params[k], init[k]);

  const Vector u0 = u;
  auto residual_u = [&](const Vector& v) { return prob.residual(v); };
  Eigen::VectorXd r = prob.residual(u);
  double cost = half_square(r);
  if (!std::isfinite(cost)) throw FitFailed("least_squares: model is not finite at the initial point");

  double scale = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) scale += prob.w[i] * prob.w[i] * y[i] * y[i];
  const double exact_floor = 1e-30 * std::max(scale, 1e-300);

  double lambda = 1e-3;
  int small_steps = 0;
  bool converged = false;
  int it = 0;
  for (it = 1; it <= options.max_iterations; ++it) {
    if (cost <= exact_floor) {
      converged = true;
      break;
    }
    const Eigen::MatrixXd j = prob.jacobian(residual_u, u, options.relative_step, u0);
    const Eigen::MatrixXd a = j.transpose() * j;
    const Eigen::VectorXd g = j.transpose() * r;
    Eigen::VectorXd diag = a.diagonal();
    if (!diag.allFinite()) throw SingularNormalMatrix("least_squares: non-finite Jacobian");
    if ((diag.array() <= 0.0).any()) {
      if (!options.allow_singular) {
        throw SingularNormalMatrix("least_squares: a parameter has no effect on the residuals");
      }
      // inert parameters get a nominal damping scale and stay put
      const double floor = std::max(diag.maxCoeff(), 1e-300) * 1e-12;
      diag = diag.cwiseMax(floor);
    }

    bool accepted = false;
    double new_cost = cost;
    Vector trial = u;
    Eigen::VectorXd trial_r;
    while (lambda < 1e20) {
      Eigen::MatrixXd damped = a;
      damped.diagonal() += lambda * diag;
      const Eigen::VectorXd step = damped.ldlt().solve(-g);
      if (step.allFinite()) {
        for (std::size_t k = 0; k < n; ++k) trial[k] = u[k] + step(static_cast<Eigen::Index>(k));
        trial_r = prob.residual(trial);
        new_cost = half_square(trial_r);
        if (std::isfinite(new_cost) && new_cost < cost) {
          accepted = true;
          break;
        }
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      // no descent direction left at working precision
      converged = true;
      break;
    }
    const double rel = (cost - new_cost) / std::max(cost, 1e-300);
    u = trial;
    r = trial_r;
    cost = new_cost;
    lambda = std::max(lambda / 10.0, 1e-12);
    small_steps = rel < options.tolerance ? small_steps + 1 : 0;
    if (small_steps >= 3) {
      converged = true;
      break;
    }
  }

  FitResult out;
  out.params = prob.external(u);
  out.iterations = std::min(it, options.max_iterations);
  out.converged = converged;
  out.residual_norm = std::sqrt(2.0 * cost);

  // covariance in external coordinates
  auto residual_p = [&](const Vector& p) { return prob.residual_p(p); };
  const Eigen::MatrixXd jp = prob.jacobian(residual_p, out.params, options.relative_step, init);
  Eigen::MatrixXd a = jp.transpose() * jp;
  Eigen::VectorXd d = a.diagonal();
  const double dof = static_cast<double>(x.size() - n);
  const double s2 = 2.0 * cost / dof;
  bool singular = (d.array() <= 0.0).any() || !d.allFinite();
  if (!singular) {
    const Eigen::VectorXd s = d.cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd scaled = s.asDiagonal() * a * s.asDiagonal();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(scaled);
    lu.setThreshold(1e-13);
    singular = !lu.isInvertible();
    if (!singular) {
      out.covariance = s2 * (s.asDiagonal() * lu.inverse() * s.asDiagonal());
      out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
    }
  }
  if (singular) {
    if (!options.allow_singular) throw SingularNormalMatrix("least_squares: singular normal matrix");
    out.covariance = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n),
                                               std::numeric_limits<double>::quiet_NaN());
  }
  out.sigma.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double v = out.covariance(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    out.sigma[k] = std::isnan(v) ? v : std::sqrt(std::max(0.0, v));
  }

  if (!converged && options.throw_on_max_iterations) {
    throw MaxIterations("least_squares: no convergence within " + std::to_string(options.max_iterations) +
                        " iterations for model " + model.name);
  }
  return out;
}

FitResult fit(const ModelSpec& model, const Vector& x, const Vector& y, const FitOptions& options) {
  return least_squares(model, x, y, {}, model.initial_guess(x, y), options);
}

Vector poisson_weights(const Vector& counts) {
  Vector w(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) w[i] = 1.0 / std::sqrt(std::max(counts[i], 1.0));
  return w;
}

}  // namespace siv
