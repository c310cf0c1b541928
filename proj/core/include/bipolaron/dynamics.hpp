#pragma once

#include "bipolaron/hilbert.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace bipolaron {

struct TimeGrid {
  std::vector<double> times;  // seconds, non-negative, strictly increasing

  static TimeGrid uniform(double t_max, int points);
  static TimeGrid explicit_times(std::vector<double> times);
  int size() const { return static_cast<int>(times.size()); }
};

/// Pair observables on a time grid. Sites are 0-based.
struct Observables {
  Eigen::MatrixXd pair_probability;  // times x sites
  Eigen::VectorXd total;             // sum over sites
  Eigen::VectorXd spread;            // sigma_sd about the initial site
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXcd> states;
  Observables observables;
  std::vector<double> norms;
  std::vector<double> energies;  // <psi|H|psi>, rad/s
};

/// exp(-iHt) through one eigen-decomposition of H, reused for every time.
class Propagator {
public:
  explicit Propagator(const HamiltonianMatrix& h);

  Eigen::VectorXcd evolve(const Eigen::VectorXcd& initial, double t) const;
  const Eigen::VectorXd& eigenvalues() const { return values_; }
  const Eigen::MatrixXd& eigenvectors() const { return vectors_; }
  int dimension() const { return static_cast<int>(values_.size()); }

private:
  Eigen::VectorXd values_;
  Eigen::MatrixXd vectors_;
};

Eigen::VectorXcd basis_state(int dimension, int index);

Trajectory evolve(const HamiltonianMatrix& h, const SectorBasis& basis, const Eigen::VectorXcd& initial,
                  const TimeGrid& grid, int initial_site);

/// Observables only; states are not retained.
Observables evolve_observables(const Propagator& propagator, const SectorBasis& basis,
                               const Eigen::VectorXcd& initial, const TimeGrid& grid, int initial_site);

/// |amplitude of the pair-at-i state|^2 for each site.
Eigen::VectorXd pair_probabilities(const SectorBasis& basis, const Eigen::VectorXcd& state);

/// sqrt((1/N) sum_i (i - initial_site)^2 P_i). Uses raw, possibly sub-unity,
/// probabilities and the 1/N prefactor rather than a normalised variance.
double spread_sd(std::span<const double> probabilities, int initial_site);
double spread_sd(const Eigen::VectorXd& probabilities, int initial_site);

}  // namespace bipolaron
