#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "siv/sequences.hpp"

namespace siv {

// one generator pulse; angle in units of pi
struct CliffordPulse {
  std::string name;
  double angle = 0.0;
  double phase = 0.0;
};

// {+-X/2, +-X, +-Y/2, +-Y}
const std::vector<CliffordPulse>& clifford_generators();

// 24-element single-qubit Clifford group as shortest generator words
const std::vector<std::vector<int>>& clifford_group_words();

struct RbConfig {
  std::vector<int> n_list{1, 5, 10, 20, 50, 100, 200};
  int n_random = 20;
  double depolarizing = 0.0;  // probability per Clifford
  double rabi = 8.878e6;      // Hz
  std::uint64_t seed = 1;

  void validate() const;
};

struct RbResult {
  SweepResult sweep;       // mean up population vs sequence length; aux std over randomizations
  double decay = 1.0;      // fitted base of (F_I - 1/2) p^N + 1/2
  double decay_sigma = 0.0;
  double gate_fidelity = 1.0;  // (1 + p) / 2
};

RbResult run_randomized_benchmarking(const ExperimentSetup& s, const RbConfig& c);

}  // namespace siv
