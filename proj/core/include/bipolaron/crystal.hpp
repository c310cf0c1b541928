#pragma once

// Equilibrium structure and normal modes of a linear ion chain.
//
// Internally lengths are measured in units of the length scale
// l = (e^2 / (4 pi eps0 M wz^2))^(1/3) and squared frequencies in units of wz^2.
// Frequencies at the API boundary (ModeTable::frequencies) are in rad/s.

#include <Eigen/Dense>

#include <vector>

namespace bipolaron {

struct TrapConfig {
  int ion_count = 1;
  double ion_mass_amu = 40.0;
  double axial_frequency = 0.0;  // rad/s
  double transverse_x = 0.0;     // rad/s
  double transverse_y = 0.0;     // rad/s

  double mass_kg() const;
  /// Throws Error(config) if N < 1, any frequency is non-positive or a
  /// transverse frequency does not exceed the axial one.
  void validate() const;
};

double length_scale(const TrapConfig& trap);

struct EquilibriumSolution {
  std::vector<double> dimensionless;  // u_i, ascending
  double length_scale = 1.0;          // metres
  double residual_norm = 0.0;         // max |dV/du_i|
  int iterations = 0;

  int ion_count() const { return static_cast<int>(dimensionless.size()); }
  std::vector<double> positions() const;  // metres
};

struct SolverOptions {
  double tolerance = 1e-12;
  int max_iterations = 200;
};

EquilibriumSolution solve_equilibrium(const TrapConfig& trap, const SolverOptions& options = {});

/// Stationarity residual dV/du_i of the dimensionless potential
/// V = sum_i u_i^2 / 2 + sum_{i<j} 1/|u_i - u_j|.
Eigen::VectorXd equilibrium_gradient(const std::vector<double>& u);

/// Minimum separation below which curvatures are rejected as degenerate.
inline constexpr double kDegenerateSeparation = 1e-6;

Eigen::MatrixXd axial_hessian(const EquilibriumSolution& eq);
Eigen::MatrixXd transverse_hessian(const EquilibriumSolution& eq, double frequency_ratio);

enum class Axis { axial, transverse };

struct ModeTable {
  Axis axis = Axis::axial;
  double unit_frequency = 1.0;  // rad/s; hessian and eigenvalues are in units of its square
  Eigen::MatrixXd hessian;      // dimensionless
  Eigen::VectorXd eigenvalues;  // dimensionless, ascending
  Eigen::VectorXd frequencies;  // rad/s, ascending
  Eigen::MatrixXd vectors;      // vectors(i, m) = amplitude of ion i in mode m

  int size() const { return static_cast<int>(eigenvalues.size()); }
  double participation(int mode, int ion) const { return vectors(ion, mode); }
};

/// Diagonalises a symmetric positive-definite Hessian. Modes are sorted by
/// ascending frequency and each eigenvector's largest-magnitude entry is made
/// positive (ties resolved towards the lowest ion index).
ModeTable modes(const Eigen::MatrixXd& hessian, Axis axis, double unit_frequency);

ModeTable axial_modes(const TrapConfig& trap, const EquilibriumSolution& eq);
ModeTable transverse_modes(const TrapConfig& trap, const EquilibriumSolution& eq,
                           double transverse_frequency);

/// Applies the sign convention used by `modes` to every column of `vectors`.
void fix_mode_signs(Eigen::MatrixXd& vectors);

}  // namespace bipolaron
