#include "bipolaron/crystal.hpp"

#include "bipolaron/constants.hpp"
#include "bipolaron/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bipolaron {

double TrapConfig::mass_kg() const { return ion_mass_amu * codata.atomic_mass_unit; }

void TrapConfig::validate() const {
  if (ion_count < 1) {
    throw Error(ErrorKind::config, "ion_count must be at least 1");
  }
  if (!(ion_mass_amu > 0.0) || !std::isfinite(ion_mass_amu)) {
    throw Error(ErrorKind::config, "ion mass must be positive");
  }
  for (double f : {axial_frequency, transverse_x, transverse_y}) {
    if (!(f > 0.0) || !std::isfinite(f)) {
      throw Error(ErrorKind::config, "trap frequencies must be positive and finite");
    }
  }
  if (transverse_x <= axial_frequency || transverse_y <= axial_frequency) {
    throw Error(ErrorKind::config,
                "transverse frequencies must exceed the axial frequency for a linear chain");
  }
}

double length_scale(const TrapConfig& trap) {
  const auto& c = codata;
  const double w = trap.axial_frequency;
  return std::cbrt(c.elementary_charge * c.elementary_charge /
                   (4.0 * std::numbers::pi * c.vacuum_permittivity * trap.mass_kg() * w * w));
}

std::vector<double> EquilibriumSolution::positions() const {
  std::vector<double> z(dimensionless.size());
  std::transform(dimensionless.begin(), dimensionless.end(), z.begin(),
                 [this](double u) { return u * length_scale; });
  return z;
}

Eigen::VectorXd equilibrium_gradient(const std::vector<double>& u) {
  const auto n = static_cast<Eigen::Index>(u.size());
  Eigen::VectorXd g(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double gi = u[i];
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = u[i] - u[j];
      gi -= std::copysign(1.0 / (d * d), d);
    }
    g[i] = gi;
  }
  return g;
}

namespace {

double potential(const std::vector<double>& u) {
  double v = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    v += 0.5 * u[i] * u[i];
    for (std::size_t j = i + 1; j < u.size(); ++j) v += 1.0 / std::abs(u[i] - u[j]);
  }
  return v;
}

double min_separation(const std::vector<double>& u) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = i + 1; j < u.size(); ++j) best = std::min(best, std::abs(u[i] - u[j]));
  return best;
}

void check_separation(const std::vector<double>& u) {
  if (u.size() > 1 && min_separation(u) < kDegenerateSeparation) {
    throw Error(ErrorKind::degenerate_positions, "ion separation below 1e-6 length units");
  }
}

Eigen::MatrixXd coulomb_axial_hessian(const std::vector<double>& u) {
  const auto n = static_cast<Eigen::Index>(u.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double c = 1.0 / std::pow(std::abs(u[i] - u[j]), 3);
      d(i, i) += 2.0 * c;
      d(i, j) = -2.0 * c;
    }
  }
  return d;
}

double max_abs(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

EquilibriumSolution solve_equilibrium(const TrapConfig& trap, const SolverOptions& options) {
  trap.validate();
  const int n = trap.ion_count;

  EquilibriumSolution sol;
  sol.length_scale = length_scale(trap);

  // Empirical near-linear spread; Newton converges from here for N <= 100.
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) {
    u[i] = 2.018 * ((i + 1) - 0.5 * (n + 1)) / std::pow(n, 0.559);
  }

  Eigen::VectorXd g = equilibrium_gradient(u);
  double residual = max_abs(g);
  int iter = 0;
  while (residual >= options.tolerance && iter < options.max_iterations) {
    ++iter;
    const Eigen::MatrixXd hess = coulomb_axial_hessian(u);
    Eigen::VectorXd step = -hess.ldlt().solve(g);
    if (!step.allFinite() || step.dot(g) >= 0.0) step = -g;  // gradient-descent fallback

    const double v0 = potential(u);
    double t = 1.0;
    std::vector<double> trial(u.size());
    bool accepted = false;
    for (int k = 0; k < 60; ++k, t *= 0.5) {
      for (int i = 0; i < n; ++i) trial[i] = u[i] + t * step[i];
      if (!std::is_sorted(trial.begin(), trial.end()) ||
          (n > 1 && min_separation(trial) < kDegenerateSeparation))
        continue;
      const Eigen::VectorXd gt = equilibrium_gradient(trial);
      // Near the minimum the potential is flat to rounding, so also accept on residual.
      if (potential(trial) <= v0 || max_abs(gt) < residual) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    u = trial;
    g = equilibrium_gradient(u);
    residual = max_abs(g);
  }

  sol.dimensionless = std::move(u);
  sol.residual_norm = residual;
  sol.iterations = iter;
  if (residual >= options.tolerance) {
    std::ostringstream msg;
    msg << "equilibrium solve stopped after " << iter << " iterations with residual " << residual;
    throw Error(ErrorKind::non_convergence, msg.str());
  }
  return sol;
}

Eigen::MatrixXd axial_hessian(const EquilibriumSolution& eq) {
  check_separation(eq.dimensionless);
  return coulomb_axial_hessian(eq.dimensionless);
}

Eigen::MatrixXd transverse_hessian(const EquilibriumSolution& eq, double frequency_ratio) {
  const auto& u = eq.dimensionless;
  check_separation(u);
  const auto n = static_cast<Eigen::Index>(u.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Identity(n, n) * (frequency_ratio * frequency_ratio);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double c = 1.0 / std::pow(std::abs(u[i] - u[j]), 3);
      d(i, i) -= c;
      d(i, j) = c;
    }
  }
  const double lowest = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(d, Eigen::EigenvaluesOnly)
                            .eigenvalues()
                            .minCoeff();
  if (!(lowest > 0.0)) {
    std::ostringstream msg;
    msg << "transverse Hessian has eigenvalue " << lowest << " <= 0 (zig-zag transition)";
    throw Error(ErrorKind::zig_zag_instability, msg.str());
  }
  return d;
}

void fix_mode_signs(Eigen::MatrixXd& vectors) {
  for (Eigen::Index m = 0; m < vectors.cols(); ++m) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      // Strictly-greater with a relative slack keeps the lowest index on numerical ties.
      const double a = std::abs(vectors(i, m));
      if (a > best_abs * (1.0 + 1e-12)) {
        best_abs = a;
        best = i;
      }
    }
    if (vectors(best, m) < 0.0) vectors.col(m) *= -1.0;
  }
}

ModeTable modes(const Eigen::MatrixXd& hessian, Axis axis, double unit_frequency) {
  if (hessian.rows() != hessian.cols()) {
    throw Error(ErrorKind::dimension_mismatch, "Hessian must be square");
  }
  const double scale = std::max(1.0, hessian.cwiseAbs().maxCoeff());
  if ((hessian - hessian.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorKind::not_positive_definite, "Hessian is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hessian);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::not_positive_definite, "eigen-decomposition failed");
  }
  if (hessian.rows() > 0 && !(solver.eigenvalues().minCoeff() > 0.0)) {
    std::ostringstream msg;
    msg << "smallest Hessian eigenvalue " << solver.eigenvalues().minCoeff() << " <= 0";
    throw Error(ErrorKind::not_positive_definite, msg.str());
  }

  ModeTable table;
  table.axis = axis;
  table.unit_frequency = unit_frequency;
  table.hessian = hessian;
  table.eigenvalues = solver.eigenvalues();  // Eigen returns ascending order
  table.vectors = solver.eigenvectors();
  fix_mode_signs(table.vectors);
  table.frequencies = table.eigenvalues.cwiseSqrt() * unit_frequency;
  return table;
}

ModeTable axial_modes(const TrapConfig& trap, const EquilibriumSolution& eq) {
  return modes(axial_hessian(eq), Axis::axial, trap.axial_frequency);
}

ModeTable transverse_modes(const TrapConfig& trap, const EquilibriumSolution& eq,
                           double transverse_frequency) {
  return modes(transverse_hessian(eq, transverse_frequency / trap.axial_frequency),
               Axis::transverse, trap.axial_frequency);
}

}  // namespace bipolaron
