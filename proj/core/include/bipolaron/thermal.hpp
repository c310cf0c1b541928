#pragma once

// Thermal phonon backgrounds. Each Fock configuration is a static background
// for coherent spin evolution; observables are averaged classically with the
// Bose-Einstein weights.

#include "bipolaron/dynamics.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace bipolaron {

/// Bose-Einstein mean occupation of a mode at angular frequency omega; 0 at T = 0.
double mean_occupation(double omega, double temperature);

struct ThermalParams {
  double temperature = 0.0;         // K
  Eigen::VectorXd mean_occupation;  // per mode
  double epsilon = 1e-3;            // truncation budget

  static ThermalParams from_modes(const ModeTable& modes, double temperature, double epsilon = 1e-3);
};

/// prod_m nbar_m^n_m / (1 + nbar_m)^(n_m + 1).
double fock_probability(std::span<const int> occupation, const ThermalParams& params);

struct FockEnsemble {
  std::vector<std::vector<int>> occupations;
  std::vector<double> weights;
  double captured_mass = 0.0;
  bool sampled = false;
  std::size_t draws = 0;  // sampled ensembles: number of draws before merging duplicates

  std::size_t size() const { return weights.size(); }
};

enum class EnsembleMode {
  enumerate,
  sample,
  /// Enumerate, switching to sampling if the cap would be exceeded.
  automatic,
};

struct EnsembleOptions {
  EnsembleMode mode = EnsembleMode::automatic;
  double epsilon = 1e-3;
  std::size_t max_configurations = 100000;
  std::uint64_t seed = 20240601;
  std::size_t sample_count = 4000;
};

/// Enumeration visits configurations in descending probability, restricted to
/// per-mode cutoffs reaching (1 - eps)^(1/N) marginal mass, until the captured
/// mass reaches 1 - eps. Weights are exact probabilities (not renormalised).
/// Sampling draws each mode from its geometric distribution with an
/// mt19937_64 stream seeded by `seed`; weights are 1/count.
FockEnsemble build_ensemble(const ModeTable& axial, double temperature, const EnsembleOptions& options);

/// Thermally averaged pair observables.
struct ThermalObservables {
  Observables mean;
  /// Per-entry uncertainty: standard error for sampled ensembles, or the
  /// truncation bound (1 - captured mass) * max value for enumerated ones.
  Observables error;
  std::size_t members = 0;
  double captured_mass = 0.0;
  bool sampled = false;
};

struct ThermalProblem {
  const ModeTable& axial;
  const TweezerSettings& settings;
  const Eigen::MatrixXd& couplings;
  const SectorBasis& basis;
  int initial_site = 0;
  Method method = Method::exact;
};

ThermalObservables thermal_dynamics(const ThermalProblem& problem, const FockEnsemble& ensemble,
                                    const TimeGrid& grid, int threads = 1);

ThermalObservables thermal_dynamics(const ThermalProblem& problem, double temperature, const TimeGrid& grid,
                                    const EnsembleOptions& options, int threads = 1);

/// prod_{m >= 2} (1 - exp(-hbar omega_m / k_B T)); 1 at T = 0.
double p_mobile_product(const ModeTable& axial, double temperature);
double p_mobile_product(std::span<const double> frequencies, double temperature);

struct ClosedFormMobility {
  double value = 1.0;
  bool clamped = false;
};

/// (2 sinh x - 1) / (e^x - 1) with x = hbar omega_z / k_B T, clamped to [0, 1].
ClosedFormMobility p_mobile_closed(double x);

/// Least-squares slope of log(omega_m / omega_1) against log m.
double fit_nu(const ModeTable& axial);
double fit_nu(std::span<const double> frequencies);

}  // namespace bipolaron
