#include "siv/sweep.hpp"

#include <cmath>

#include "siv/errors.hpp"

namespace siv {

const std::vector<double>& SweepResult::column(const std::string& name) const {
  if (name == signal_label || name == "signal") return signal;
  if (name == axis_label || name == "axis") return axis;
  for (const auto& [key, values] : aux) {
    if (key == name) return values;
  }
  throw InvalidArgument("SweepResult: no column named " + name);
}

std::vector<double> linspace(double start, double stop, std::size_t points) {
  if (points < 2) throw InvalidArgument("linspace: at least two points required");
  std::vector<double> out(points);
  const double step = (stop - start) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) out[i] = start + step * static_cast<double>(i);
  out.back() = stop;
  return out;
}

std::vector<double> logspace(double start, double stop, std::size_t points) {
  if (!(start > 0.0 && stop > 0.0)) throw InvalidArgument("logspace: bounds must be positive");
  std::vector<double> out = linspace(std::log(start), std::log(stop), points);
  for (double& v : out) v = std::exp(v);
  out.front() = start;
  out.back() = stop;
  return out;
}

}  // namespace siv
