#include "siv/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "siv/errors.hpp"

namespace siv {

double estimation_cost(const DerivedObservables& m, const DerivedObservables& t) {
  const std::array<double, 4> model{m.omega_L_e, m.delta_ss, m.delta_gs, m.cyclicity};
  const std::array<double, 4> target{t.omega_L_e, t.delta_ss, t.delta_gs, t.cyclicity};
  double cost = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!std::isfinite(model[i])) return std::numeric_limits<double>::infinity();
    const double r = (model[i] - target[i]) / target[i];
    cost += r * r;
  }
  return cost;
}

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, double step, int max_evaluations,
                             double x_tol, double f_tol) {
  const std::size_t n = start.size();
  std::vector<std::vector<double>> simplex(n + 1, start);
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step;
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  while (evals < max_evaluations) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];

    double spread_x = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t k = 0; k < n; ++k) spread_x = std::max(spread_x, std::abs(simplex[i][k] - simplex[best][k]));
    }
    const double spread_f = values[worst] - values[best];
    if (spread_x < x_tol && spread_f < f_tol) break;

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / static_cast<double>(n);
    }
    auto along = [&](double coeff) {
      std::vector<double> x(n);
      for (std::size_t k = 0; k < n; ++k) x[k] = centroid[k] + coeff * (simplex[worst][k] - centroid[k]);
      return x;
    };

    const std::vector<double> xr = along(-1.0);
    const double fr = eval(xr);
    if (fr < values[best]) {
      const std::vector<double> xe = along(-2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        values[worst] = fe;
      } else {
        simplex[worst] = xr;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = xr;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const std::vector<double> xc = along(outside ? -0.5 : 0.5);
    const double fc = eval(xc);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = xc;
      values[worst] = fc;
      continue;
    }
    // shrink toward the best vertex
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t k = 0; k < n; ++k) simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
      values[i] = eval(simplex[i]);
    }
  }

  const auto it = std::min_element(values.begin(), values.end());
  const std::size_t idx = static_cast<std::size_t>(it - values.begin());
  return {simplex[idx], values[idx], evals};
}

EstimationResult estimate_parameters(const DerivedObservables& targets, double field_tesla,
                                     const EstimationBounds& bounds, const DefectConstants& constants) {
  for (double v : {targets.omega_L_e, targets.delta_ss, targets.delta_gs, targets.cyclicity}) {
    if (!std::isfinite(v) || v <= 0.0) throw InvalidArgument("estimate_parameters: targets must be finite and positive");
  }
  if (!(field_tesla > 0.0)) throw InvalidArgument("estimate_parameters: field must be positive");

  const std::array<double, 3> lo{bounds.epsilon_min, bounds.alpha_min, bounds.theta_min};
  const std::array<double, 3> hi{bounds.epsilon_max, bounds.alpha_max, bounds.theta_max};

  // unit-cube coordinates, clamped to the box
  auto to_params = [&](const std::vector<double>& u) {
    std::array<double, 3> p{};
    for (std::size_t k = 0; k < 3; ++k) p[k] = lo[k] + std::clamp(u[k], 0.0, 1.0) * (hi[k] - lo[k]);
    return p;
  };
  auto forward = [&](const std::array<double, 3>& p) {
    return observables_at(constants, {p[0], p[1]}, {field_tesla, p[2], 0.0});
  };
  auto cost = [&](const std::vector<double>& u) {
    double penalty = 0.0;
    for (double v : u) {
      const double out = std::max(0.0, -v) + std::max(0.0, v - 1.0);
      penalty += out * out;
    }
    return estimation_cost(forward(to_params(u)), targets) + penalty;
  };

  EstimationResult best;
  best.cost = std::numeric_limits<double>::infinity();
  std::array<double, 3> best_params{};
  int evaluations = 0;
  for (double a : {0.25, 0.75}) {
    for (double b : {0.25, 0.75}) {
      for (double c : {0.25, 0.75}) {
        NelderMeadResult r = nelder_mead(cost, {a, b, c}, 0.1);
        // restart once from the optimum to escape a collapsed simplex
        r = nelder_mead(cost, r.x, 0.02);
        evaluations += r.evaluations;
        const std::array<double, 3> p = to_params(r.x);
        if (r.value < best.cost || (r.value == best.cost && p < best_params)) {
          best.cost = r.value;
          best_params = p;
        }
      }
    }
  }
  best.strain = {best_params[0], best_params[1]};
  best.theta = best_params[2];
  best.fitted = forward(best_params);
  best.cost = estimation_cost(best.fitted, targets);
  best.converged = best.cost <= 1e-2;
  best.evaluations = evaluations;
  return best;
}

}  // namespace siv
