#include "bipolaron/dynamics.hpp"

#include "bipolaron/errors.hpp"

#include <cmath>
#include <complex>

namespace bipolaron {

TimeGrid TimeGrid::uniform(double t_max, int points) {
  if (points < 1 || !(t_max >= 0.0) || !std::isfinite(t_max)) {
    throw Error(ErrorKind::config, "uniform time grid needs t_max >= 0 and at least one point");
  }
  if (points > 1 && t_max == 0.0) throw Error(ErrorKind::config, "time grid must be strictly increasing");
  TimeGrid g;
  g.times.resize(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    g.times[static_cast<std::size_t>(k)] = points == 1 ? 0.0 : t_max * k / (points - 1);
  }
  return g;
}

TimeGrid TimeGrid::explicit_times(std::vector<double> times) {
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] >= 0.0) || !std::isfinite(times[k]) || (k > 0 && !(times[k] > times[k - 1]))) {
      throw Error(ErrorKind::config, "time grid must be non-negative and strictly increasing");
    }
  }
  TimeGrid g;
  g.times = std::move(times);
  return g;
}

Propagator::Propagator(const HamiltonianMatrix& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.matrix);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::not_positive_definite, "Hamiltonian diagonalisation failed");
  }
  values_ = solver.eigenvalues();
  vectors_ = solver.eigenvectors();
}

Eigen::VectorXcd Propagator::evolve(const Eigen::VectorXcd& initial, double t) const {
  if (t == 0.0) return initial;
  Eigen::VectorXcd coeff = vectors_.transpose().cast<std::complex<double>>() * initial;
  for (Eigen::Index k = 0; k < coeff.size(); ++k) coeff[k] *= std::polar(1.0, -values_[k] * t);
  return vectors_.cast<std::complex<double>>() * coeff;
}

Eigen::VectorXcd basis_state(int dimension, int index) {
  if (index < 0 || index >= dimension) throw Error(ErrorKind::dimension_mismatch, "basis index out of range");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dimension);
  v[index] = 1.0;
  return v;
}

Eigen::VectorXd pair_probabilities(const SectorBasis& basis, const Eigen::VectorXcd& state) {
  const auto& idx = basis.pair_indices();
  Eigen::VectorXd p = Eigen::VectorXd::Zero(basis.ion_count());
  for (std::size_t i = 0; i < idx.size(); ++i) p[static_cast<Eigen::Index>(i)] = std::norm(state[idx[i]]);
  return p;
}

double spread_sd(std::span<const double> probabilities, int initial_site) {
  if (probabilities.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const double d = static_cast<double>(static_cast<int>(i) - initial_site);
    acc += d * d * probabilities[i];
  }
  return std::sqrt(acc / static_cast<double>(probabilities.size()));
}

double spread_sd(const Eigen::VectorXd& probabilities, int initial_site) {
  return spread_sd(std::span<const double>(probabilities.data(), static_cast<std::size_t>(probabilities.size())),
                   initial_site);
}

namespace {

void check_initial(const Eigen::VectorXcd& initial, int dimension) {
  if (initial.size() != dimension) {
    throw Error(ErrorKind::dimension_mismatch, "initial state dimension differs from Hamiltonian");
  }
  if (std::abs(initial.norm() - 1.0) > 1e-9) throw Error(ErrorKind::config, "initial state must be normalised");
}

void record(Observables& obs, int row, const SectorBasis& basis, const Eigen::VectorXcd& psi, int initial_site) {
  const Eigen::VectorXd p = pair_probabilities(basis, psi);
  obs.pair_probability.row(row) = p.transpose();
  obs.total[row] = p.sum();
  obs.spread[row] = spread_sd(p, initial_site);
}

Observables make_observables(int times, int sites) {
  Observables obs;
  obs.pair_probability = Eigen::MatrixXd::Zero(times, sites);
  obs.total = Eigen::VectorXd::Zero(times);
  obs.spread = Eigen::VectorXd::Zero(times);
  return obs;
}

}  // namespace

Observables evolve_observables(const Propagator& propagator, const SectorBasis& basis,
                               const Eigen::VectorXcd& initial, const TimeGrid& grid, int initial_site) {
  check_initial(initial, propagator.dimension());
  Observables obs = make_observables(grid.size(), basis.ion_count());
  const auto& idx = basis.pair_indices();
  if (idx.empty()) return obs;

  // Only the pair amplitudes are needed, so project the eigenvectors once.
  const Eigen::MatrixXd& vectors = propagator.eigenvectors();
  const Eigen::VectorXcd coeff = vectors.transpose().cast<std::complex<double>>() * initial;
  Eigen::MatrixXd pair_rows(static_cast<Eigen::Index>(idx.size()), vectors.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) pair_rows.row(static_cast<Eigen::Index>(i)) = vectors.row(idx[i]);

  const Eigen::VectorXd& values = propagator.eigenvalues();
  Eigen::VectorXcd phased(coeff.size());
  for (int k = 0; k < grid.size(); ++k) {
    const double t = grid.times[static_cast<std::size_t>(k)];
    for (Eigen::Index q = 0; q < coeff.size(); ++q) phased[q] = coeff[q] * std::polar(1.0, -values[q] * t);
    const Eigen::VectorXcd amp = pair_rows.cast<std::complex<double>>() * phased;
    Eigen::VectorXd p = amp.cwiseAbs2();
    if (t == 0.0) {
      for (std::size_t i = 0; i < idx.size(); ++i) p[static_cast<Eigen::Index>(i)] = std::norm(initial[idx[i]]);
    }
    obs.pair_probability.row(k) = p.transpose();
    obs.total[k] = p.sum();
    obs.spread[k] = spread_sd(p, initial_site);
  }
  return obs;
}

Trajectory evolve(const HamiltonianMatrix& h, const SectorBasis& basis, const Eigen::VectorXcd& initial,
                  const TimeGrid& grid, int initial_site) {
  if (h.matrix.rows() != basis.size()) {
    throw Error(ErrorKind::dimension_mismatch, "Hamiltonian dimension differs from basis size");
  }
  const Propagator prop(h);
  check_initial(initial, prop.dimension());
  Trajectory traj;
  traj.times = grid.times;
  traj.observables = make_observables(grid.size(), basis.ion_count());
  const Eigen::MatrixXcd hc = h.matrix.cast<std::complex<double>>();
  for (int k = 0; k < grid.size(); ++k) {
    Eigen::VectorXcd psi = prop.evolve(initial, grid.times[static_cast<std::size_t>(k)]);
    record(traj.observables, k, basis, psi, initial_site);
    traj.norms.push_back(psi.norm());
    traj.energies.push_back(psi.dot(hc * psi).real());
    traj.states.push_back(std::move(psi));
  }
  return traj;
}

}  // namespace bipolaron
