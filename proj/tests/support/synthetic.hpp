#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "siv/models.hpp"
#include "siv/numerics.hpp"

namespace siv::testing {

struct SyntheticCase {
  SyntheticCase() = default;
  SyntheticCase(Vector x_, Vector truth_, std::vector<std::size_t> phases_ = {}, std::size_t start = 0,
                std::size_t size = 0, std::size_t count = 0, std::size_t key = 0)
      : x(std::move(x_)), truth(std::move(truth_)), phases(std::move(phases_)), block_start(start),
        block_size(size), block_count(count), block_key(key) {}

  Vector x;
  Vector truth;
  // parameters compared modulo 2 pi
  std::vector<std::size_t> phases;
  // component blocks that may come back permuted: (first index, block size, count, sort key offset)
  std::size_t block_start = 0;
  std::size_t block_size = 0;
  std::size_t block_count = 0;
  std::size_t block_key = 0;
};

inline Vector grid(double a, double b, std::size_t n) {
  Vector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return x;
}

inline Vector log_grid(double a, double b, std::size_t n) {
  Vector x = grid(std::log(a), std::log(b), n);
  for (double& v : x) v = std::exp(v);
  return x;
}

// zero-noise ground truth for every registry entry
inline std::map<std::string, SyntheticCase> synthetic_cases() {
  std::map<std::string, SyntheticCase> c;
  c["linear"] = {grid(0.0, 10.0, 50), {2.5, -1.3}};
  c["ramsey"] = {grid(0.0, 4e-6, 400), {0.3, 2.1e6, 0.7, 0.1, 2.5e-6, 1.6, 0.5}, {2}};
  c["stretched_exp"] = {grid(0.0, 5e-6, 200), {0.8, 1.5e-6, 1.7, 0.1}};
  c["damped_sine_sum"] = {grid(0.0, 6e-6, 600),
                          {0.3, 1.0e6, 0.4, 3e-6, 1.0, 0.2, 2.6e6, 1.1, 3e-6, 1.0, 0.5},
                          {2, 7},
                          0, 5, 2, 1};
  c["damped_sine_sum1"] = {grid(0.0, 6e-6, 400), {0.4, 1.5e6, 0.3, 3e-6, 1.3, 0.5}, {2}};
  c["rabi_beat"] = {grid(0.0, 5e-7, 500), {0.25, 1.0e7, 1.2, 6e-7, 0.15, 2.0e7, 0.9, 6e-7, 0.5}, {2, 6}, 0, 4, 2, 1};
  c["rabi_beat1"] = {grid(0.0, 5e-7, 400), {0.5, 8.878e6, 1.2, 1e-6, 0.5}, {2}};
  c["power_scaling"] = {log_grid(1.0, 1000.0, 40), {1.2e-3, 0.5}};
  c["lorentzian_pair"] = {grid(-10.0, 10.0, 400), {1.0, -2.5, 1.2, 0.6, 3.0, 0.8, 0.1}};
  c["saturation_law"] = {grid(0.0, 10.0, 60), {96e6, 2.0}};
  c["pol_rate"] = {grid(0.05, 10.0, 60), {816.0, 1.5}};
  c["parabola"] = {grid(-2.0, 4.0, 50), {0.7, 1.1, -0.3}};
  c["orbach_offset"] = {grid(2.0, 10.0, 40), {1.0e3, 2.0e-31, 1.543}};
  c["power_law_offset"] = {log_grid(1.0, 100.0, 50), {2.0, -0.7, 0.3}};
  c["rb_decay"] = {grid(1.0, 200.0, 40), {0.9, 0.995}};
  c["rb_decay_free"] = {grid(1.0, 400.0, 60), {0.4, 0.99, 0.5}};
  c["gamma2r_model"] = {grid(0.5, 20.0, 50), {3.0, 0.4, 1.2}};
  c["exp_recovery"] = {grid(0.0, 5.0, 80), {2.0, 1.3, 0.4}};
  c["single_exp"] = {grid(0.0, 5.0, 80), {-1.5, 0.7, 3.0}};
  c["gaussian"] = {grid(-5.0, 5.0, 80), {2.0, 0.3, 1.1}};
  c["three_normal_mixture"] = {grid(0.0, 60.0, 61), {0.12, 0.5, 1.0, 0.3, 10.0, 3.2, 0.58, 32.0, 5.7}, {}, 0, 3, 3, 1};
  return c;
}

// canonical ordering of interchangeable blocks by their key parameter
inline Vector canonical(const SyntheticCase& c, Vector p) {
  if (c.block_count < 2) return p;
  std::vector<Vector> blocks;
  for (std::size_t b = 0; b < c.block_count; ++b) {
    const auto first = p.begin() + static_cast<std::ptrdiff_t>(c.block_start + b * c.block_size);
    blocks.emplace_back(first, first + static_cast<std::ptrdiff_t>(c.block_size));
  }
  std::sort(blocks.begin(), blocks.end(),
            [&](const Vector& a, const Vector& b) { return a[c.block_key] < b[c.block_key]; });
  for (std::size_t b = 0; b < c.block_count; ++b) {
    std::copy(blocks[b].begin(), blocks[b].end(),
              p.begin() + static_cast<std::ptrdiff_t>(c.block_start + b * c.block_size));
  }
  return p;
}

// worst relative deviation; phases compared as absolute wrapped differences
inline double worst_deviation(const SyntheticCase& c, const Vector& fitted) {
  const Vector a = canonical(c, fitted);
  const Vector b = canonical(c, c.truth);
  double worst = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    double d = 0.0;
    if (std::find(c.phases.begin(), c.phases.end(), k) != c.phases.end()) {
      d = std::remainder(a[k] - b[k], two_pi);
      d = std::abs(d);
    } else {
      d = std::abs(a[k] - b[k]) / std::abs(b[k]);
    }
    worst = std::max(worst, d);
  }
  return worst;
}

}  // namespace siv::testing
