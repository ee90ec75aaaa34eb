#pragma once

#include <string>
#include <utility>
#include <vector>

namespace siv {

struct SweepResult {
  std::string axis_label;
  std::string signal_label = "population_up";
  std::vector<double> axis;
  std::vector<double> signal;
  // extra per-point columns, in output order
  std::vector<std::pair<std::string, std::vector<double>>> aux;

  const std::vector<double>& column(const std::string& name) const;
};

std::vector<double> linspace(double start, double stop, std::size_t points);
std::vector<double> logspace(double start, double stop, std::size_t points);

}  // namespace siv
