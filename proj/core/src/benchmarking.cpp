#include "siv/benchmarking.hpp"

#include <cmath>
#include <deque>
#include <random>

#include "siv/errors.hpp"
#include "siv/fitting.hpp"
#include "siv/models.hpp"
#include "siv/random.hpp"

namespace siv {

namespace {

using Mat2 = Eigen::Matrix2cd;

Mat2 rotation(const CliffordPulse& g) {
  const double theta = g.angle * pi;
  const Mat2 axis = std::cos(g.phase) * pauli::x() + std::sin(g.phase) * pauli::y();
  return std::cos(0.5 * theta) * Mat2::Identity() - cplx(0.0, 1.0) * std::sin(0.5 * theta) * axis;
}

Mat2 word_unitary(const std::vector<int>& word) {
  const auto& gens = clifford_generators();
  Mat2 u = Mat2::Identity();
  for (int k : word) u = rotation(gens[static_cast<std::size_t>(k)]) * u;
  return u;
}

// remove the global phase so equal rotations compare equal
Mat2 normalized(const Mat2& u) {
  // clifford entries are 0 or of magnitude >= 1/2: the first nonzero one fixes the phase
  for (Eigen::Index k = 0; k < 4; ++k) {
    const cplx v = u(k / 2, k % 2);
    if (std::abs(v) > 0.1) return u * (std::abs(v) / v);
  }
  return u;
}

bool same(const Mat2& a, const Mat2& b) { return (a - b).cwiseAbs().maxCoeff() < 1e-9; }

void depolarize_electron(RegisterState& st, double q) {
  if (q <= 0.0) return;
  const Eigen::Index h = st.rho.rows() / 2;
  const ComplexMatrix nuc = st.rho.topLeftCorner(h, h) + st.rho.bottomRightCorner(h, h);
  st.rho *= 1.0 - q;
  st.rho.topLeftCorner(h, h) += 0.5 * q * nuc;
  st.rho.bottomRightCorner(h, h) += 0.5 * q * nuc;
}

}  // namespace

const std::vector<CliffordPulse>& clifford_generators() {
  static const std::vector<CliffordPulse> gens{
      {"+X/2", 0.5, 0.0},      {"-X/2", 0.5, pi},      {"+X", 1.0, 0.0},      {"-X", 1.0, pi},
      {"+Y/2", 0.5, pi / 2}, {"-Y/2", 0.5, 1.5 * pi}, {"+Y", 1.0, pi / 2}, {"-Y", 1.0, 1.5 * pi},
  };
  return gens;
}

const std::vector<std::vector<int>>& clifford_group_words() {
  static const std::vector<std::vector<int>> words = [] {
    std::vector<std::vector<int>> out{{}};
    std::vector<Mat2> seen{Mat2::Identity()};
    std::deque<std::vector<int>> queue{{}};
    const int n_gen = static_cast<int>(clifford_generators().size());
    while (!queue.empty()) {
      const std::vector<int> w = queue.front();
      queue.pop_front();
      for (int k = 0; k < n_gen; ++k) {
        std::vector<int> next = w;
        next.push_back(k);
        const Mat2 u = normalized(word_unitary(next));
        bool found = false;
        for (const Mat2& v : seen) found = found || same(u, v);
        if (!found) {
          seen.push_back(u);
          out.push_back(next);
          queue.push_back(next);
        }
      }
    }
    return out;
  }();
  return words;
}

void RbConfig::validate() const {
  if (n_list.empty()) throw InvalidArgument("RbConfig: empty length list");
  for (int n : n_list) {
    if (n < 0) throw InvalidArgument("RbConfig: negative sequence length");
  }
  if (n_random < 1) throw InvalidArgument("RbConfig: n_random must be positive");
  if (!(depolarizing >= 0.0 && depolarizing <= 1.0)) throw InvalidArgument("RbConfig: depolarizing must lie in [0, 1]");
  if (!(rabi > 0.0)) throw InvalidArgument("RbConfig: rabi must be positive");
}

RbResult run_randomized_benchmarking(const ExperimentSetup& s, const RbConfig& c) {
  s.validate();
  c.validate();
  if (s.f_ie <= 0.5 + 1e-9) throw InvalidArgument("run_randomized_benchmarking: f_ie must exceed 1/2");
  const auto& gens = clifford_generators();
  const auto& group = clifford_group_words();
  auto drive = [&](int k) {
    const CliffordPulse& g = gens[static_cast<std::size_t>(k)];
    return DriveSpec{c.rabi, g.phase, g.angle * 0.5 / c.rabi};
  };

  Evolver ev(s.params, s.dephasing);
  RbResult res;
  res.sweep.axis_label = "n_cliffords";
  std::vector<double> spread;
  for (std::size_t ni = 0; ni < c.n_list.size(); ++ni) {
    const int n = c.n_list[ni];
    std::vector<double> values;
    for (int r = 0; r < c.n_random; ++r) {
      std::mt19937_64 rng(derive_seed(c.seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(r)}));
      std::uniform_int_distribution<int> pick(0, static_cast<int>(gens.size()) - 1);
      RegisterState st = initialize_electron(s.f_ie, s.params.n_nuclei());
      Mat2 ideal = Mat2::Identity();
      for (int k = 0; k < n; ++k) {
        const int g = pick(rng);
        ev.pulse(st, drive(g));
        depolarize_electron(st, c.depolarizing);
        ideal = rotation(gens[static_cast<std::size_t>(g)]) * ideal;
      }
      // recovery maps the initial down state onto up
      const std::vector<int>* recovery = nullptr;
      for (const auto& w : group) {
        if (std::norm((word_unitary(w) * ideal)(0, 1)) > 1.0 - 1e-9) {
          recovery = &w;
          break;
        }
      }
      if (recovery == nullptr) throw Error("run_randomized_benchmarking: no recovery element");
      for (int g : *recovery) ev.pulse(st, drive(g));
      values.push_back(population_up(st));
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= c.n_random;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    res.sweep.axis.push_back(static_cast<double>(n));
    res.sweep.signal.push_back(mean);
    spread.push_back(std::sqrt(var / c.n_random));
  }
  res.sweep.aux.emplace_back("std", std::move(spread));

  const ModelSpec model = models::rb_decay_fixed(s.f_ie);
  FitOptions opt;
  opt.throw_on_max_iterations = false;
  const FitResult f = fit(model, res.sweep.axis, res.sweep.signal, opt);
  res.decay = f.params[0];
  res.decay_sigma = f.sigma[0];
  res.gate_fidelity = 0.5 * (1.0 + res.decay);
  return res;
}

}  // namespace siv
