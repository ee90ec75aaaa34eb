#include <benchmark/benchmark.h>

#include <vector>

#include <siv/fitting.hpp>
#include <siv/models.hpp>
#include <siv/numerics.hpp>
#include <siv/readout.hpp>
#include <siv/register.hpp>
#include <siv/sequences.hpp>
#include <siv/sweep.hpp>

namespace {

siv::RegisterParams register_params(int n_nuclei) {
  siv::RegisterParams p;
  p.larmor_n = 3.58579e6;
  p.hyperfine.push_back({621.75e3, 140.1e3});
  if (n_nuclei > 1) p.hyperfine.push_back({50e3, 101.19e3});
  if (n_nuclei > 2) p.hyperfine.push_back({-80e3, 30e3});
  return p;
}

siv::ExperimentSetup setup() {
  siv::ExperimentSetup s;
  s.params = register_params(1);
  s.dephasing.t_c = 5e-6;
  s.dephasing.beta = 2.0;
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// numerics
// ---------------------------------------------------------------------------

static void BM_HermitianEig(benchmark::State& state) {
  const siv::ComplexMatrix h = siv::hamiltonian(register_params(static_cast<int>(state.range(0))), siv::DriveSpec{9e6, 0.3});
  for (auto _ : state) benchmark::DoNotOptimize(siv::hermitian_eig(h));
}
BENCHMARK(BM_HermitianEig)->Arg(1)->Arg(2)->Arg(3);

static void BM_Propagator(benchmark::State& state) {
  const siv::ComplexMatrix h = siv::hamiltonian(register_params(static_cast<int>(state.range(0))), siv::DriveSpec{9e6, 0.3});
  for (auto _ : state) benchmark::DoNotOptimize(siv::propagator(h, 55.7e-9));
}
BENCHMARK(BM_Propagator)->Arg(1)->Arg(2)->Arg(3);

// ---------------------------------------------------------------------------
// sequences
// ---------------------------------------------------------------------------

static void BM_DecouplingBlock(benchmark::State& state) {
  const siv::ExperimentSetup s = setup();
  const std::vector<double> taus = siv::linspace(0.2e-6, 2e-6, 16);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(siv::run_dd(s, siv::DdKind::XY, n, taus));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(taus.size()) * n);
}
BENCHMARK(BM_DecouplingBlock)->Arg(8)->Arg(64);

// ---------------------------------------------------------------------------
// readout
// ---------------------------------------------------------------------------

static void BM_SingleShotReadout(benchmark::State& state) {
  siv::SsrConfig c;
  c.shots = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(siv::simulate_ssr(c, siv::NuclearState::mixed));
  state.SetItemsProcessed(state.iterations() * c.shots);
}
BENCHMARK(BM_SingleShotReadout)->Arg(1000)->Arg(10000);

// ---------------------------------------------------------------------------
// fitting
// ---------------------------------------------------------------------------

static void BM_LevenbergMarquardt(benchmark::State& state) {
  const siv::ModelSpec m = siv::models::ramsey();
  const std::vector<double> x = siv::linspace(0.0, 4e-6, 400);
  const std::vector<double> y = m.evaluate({0.3, 2.1e6, 0.7, 0.1, 2.5e-6, 1.6, 0.5}, x);
  for (auto _ : state) benchmark::DoNotOptimize(siv::fit(m, x, y));
}
BENCHMARK(BM_LevenbergMarquardt);

BENCHMARK_MAIN();
