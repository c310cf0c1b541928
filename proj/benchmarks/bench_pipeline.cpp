#include "bipolaron/bipolaron.hpp"

#include <benchmark/benchmark.h>

using namespace bipolaron;

namespace {

TrapConfig trap(int n) {
  TrapConfig t;
  t.ion_count = n;
  t.ion_mass_amu = 40.0;
  t.axial_frequency = two_pi * 0.5e6;
  t.transverse_x = two_pi * 10e6;
  t.transverse_y = two_pi * 12e6;
  return t;
}

struct Chain {
  TrapConfig t;
  EquilibriumSolution eq;
  ModeTable axial;
  ModeTable transverse;
  TweezerSettings settings;
  JMatrix j;

  explicit Chain(int n) : t(trap(n)) {
    eq = solve_equilibrium(t);
    axial = axial_modes(t, eq);
    transverse = transverse_modes(t, eq, t.transverse_x);
    settings = calibrate(axial, two_pi * 160.0, -two_pi * 65.0);
    DriveParams d;
    d.rabi_frequency = two_pi * 150e3;
    d.modulation = two_pi * 10.3e6;
    d.wavenumber = two_pi / 729e-9;
    j = j_matrix(transverse, d, t.mass_kg());
  }
};

}  // namespace

static void BM_Equilibrium(benchmark::State& state) {
  const TrapConfig t = trap(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_equilibrium(t));
}
BENCHMARK(BM_Equilibrium)->Arg(10)->Arg(30)->Arg(100);

static void BM_AxialModes(benchmark::State& state) {
  const TrapConfig t = trap(static_cast<int>(state.range(0)));
  const auto eq = solve_equilibrium(t);
  for (auto _ : state) benchmark::DoNotOptimize(axial_modes(t, eq));
}
BENCHMARK(BM_AxialModes)->Arg(10)->Arg(30);

static void BM_BMatrixExact(benchmark::State& state) {
  const Chain c(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(b_matrix(c.axial, c.settings, Method::exact));
}
BENCHMARK(BM_BMatrixExact)->Arg(10)->Arg(20);

static void BM_SectorAssemble(benchmark::State& state) {
  const Chain c(static_cast<int>(state.range(0)));
  const SectorBasis b = build_basis(c.t.ion_count, 2, 0);
  const auto diag = diagonal_energies(b, c.axial, c.settings, {});
  for (auto _ : state) benchmark::DoNotOptimize(assemble(b, c.j.values, diag));
}
BENCHMARK(BM_SectorAssemble)->Arg(10)->Arg(20);

static void BM_SectorSpectrum(benchmark::State& state) {
  const Chain c(static_cast<int>(state.range(0)));
  const SectorBasis b = build_basis(c.t.ion_count, 2, 0);
  const HamiltonianMatrix h = assemble(b, c.j.values, diagonal_energies(b, c.axial, c.settings, {}));
  for (auto _ : state) benchmark::DoNotOptimize(spectrum(h));
}
BENCHMARK(BM_SectorSpectrum)->Arg(10)->Arg(20);

static void BM_EnsembleEnumerate(benchmark::State& state) {
  const Chain c(10);
  EnsembleOptions o;
  o.mode = EnsembleMode::enumerate;
  const double t = static_cast<double>(state.range(0)) * 1e-6;
  for (auto _ : state) benchmark::DoNotOptimize(build_ensemble(c.axial, t, o));
}
BENCHMARK(BM_EnsembleEnumerate)->Arg(10)->Arg(25)->Arg(40);

static void BM_ThermalMember(benchmark::State& state) {
  const Chain c(10);
  const SectorBasis b = build_basis(10, 2, 0);
  const ThermalProblem problem{c.axial, c.settings, c.j.values, b, 3, Method::exact};
  FockEnsemble one;
  one.occupations.emplace_back(10, 0);
  one.weights.push_back(1.0);
  one.captured_mass = 1.0;
  const TimeGrid grid = TimeGrid::explicit_times({0.01, 0.03, 0.05});
  for (auto _ : state) benchmark::DoNotOptimize(thermal_dynamics(problem, one, grid));
}
BENCHMARK(BM_ThermalMember);

BENCHMARK_MAIN();
