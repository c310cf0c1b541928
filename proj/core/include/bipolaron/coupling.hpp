#pragma once

// Phonon-mediated spin-spin couplings from a bichromatic transverse drive, and
// the pairwise internal-state processes that survive the detuning selection.

#include "bipolaron/crystal.hpp"
#include "bipolaron/tweezer.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <vector>

namespace bipolaron {

struct DriveParams {
  double rabi_frequency = 0.0;  // Omega, rad/s
  double modulation = 0.0;      // mu, rad/s
  double wavenumber = 0.0;      // k, 1/m
  /// Delta_1, Delta_2, Delta_3 in rad/s. Metadata only: within a fixed
  /// (n, S_z) sector their contribution is a constant offset.
  std::optional<std::array<double, 3>> detunings;

  /// Throws Error(config) on non-finite inputs or detunings violating
  /// Delta_1 != Delta_2 and Delta_1 + Delta_2 = Delta_3 != 0.
  void validate() const;
};

Eigen::VectorXd lamb_dicke(const ModeTable& transverse, double wavenumber, double mass_kg);

enum class FitMethod {
  /// Least squares of J_ij = c / |i-j|^alpha over all pairs i < j, in linear space.
  nonlinear_all_pairs,
  /// Slope of log(geometric mean |J| at distance d) against log d.
  log_log_geometric,
};

struct PowerLawFit {
  double alpha = 0.0;
  double amplitude = 0.0;  // same units as the fitted matrix
  double residual = 0.0;   // rms residual (linear space, or log space for log_log_geometric)
  int pairs_used = 0;
  FitMethod method = FitMethod::nonlinear_all_pairs;
};

struct JMatrix {
  Eigen::MatrixXd values;      // J_ij / hbar in rad/s; zero diagonal
  Eigen::VectorXd lamb_dicke;  // per transverse mode
  PowerLawFit fit;             // absent (alpha = 0, pairs_used = 0) when N < 4
};

/// Minimum allowed |mu - omega_m| in units of the table's unit frequency.
inline constexpr double kResonanceGuard = 1e-3;

JMatrix j_matrix(const ModeTable& transverse, const DriveParams& drive, double mass_kg);

/// Fits |J_ij| ~ c / |i - j|^alpha. Requires N >= 4.
PowerLawFit fit_alpha(const Eigen::MatrixXd& couplings, FitMethod method = FitMethod::nonlinear_all_pairs);

/// Single-site operator |to><from|.
struct Transition {
  SiteState to;
  SiteState from;
  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Ordered pair: `first` acts on site i, `second` on site j.
struct Process {
  Transition first;
  Transition second;
  friend bool operator==(const Process&, const Process&) = default;
};

/// The eight laser-coupled transitions |0><1|, |1><0|, |0><2|, |2><0|,
/// |1><3|, |3><1|, |2><3|, |3><2|.
std::array<Transition, 8> coupled_transitions();

/// Ordered transition pairs that conserve particle number and S_z. The set is
/// closed under Hermitian conjugation.
std::vector<Process> resonant_processes();

}  // namespace bipolaron
