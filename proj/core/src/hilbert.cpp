#include "bipolaron/hilbert.hpp"

#include "bipolaron/coupling.hpp"
#include "bipolaron/errors.hpp"

#include <cstdlib>
#include <sstream>

namespace bipolaron {

std::uint64_t encode(const SpinConfig& config) {
  std::uint64_t key = 0;
  for (int i = config.size() - 1; i >= 0; --i) key = (key << 2) | static_cast<std::uint64_t>(config[i]);
  return key;
}

SectorBasis::SectorBasis(int ion_count, int particle_number, int twice_spin, std::vector<SpinConfig> states)
    : ion_count_(ion_count),
      particle_number_(particle_number),
      twice_spin_(twice_spin),
      states_(std::move(states)) {
  lookup_.reserve(states_.size());
  for (int k = 0; k < size(); ++k) {
    const auto& c = states_[static_cast<std::size_t>(k)];
    if (c.size() != ion_count_ || c.particle_number() != particle_number_ || c.twice_spin() != twice_spin_) {
      throw Error(ErrorKind::unsupported_sector, "basis state outside its declared sector");
    }
    if (!lookup_.emplace(encode(c), k).second) {
      throw Error(ErrorKind::unsupported_sector, "duplicate basis state " + c.to_string());
    }
  }
  if (particle_number_ == 2 && twice_spin_ == 0) {
    pair_indices_.resize(static_cast<std::size_t>(ion_count_));
    for (int i = 0; i < ion_count_; ++i) {
      pair_indices_[static_cast<std::size_t>(i)] = *index_of(SpinConfig::pair_at(ion_count_, i));
    }
  }
}

std::optional<int> SectorBasis::index_of(const SpinConfig& config) const {
  if (config.size() != ion_count_) return std::nullopt;
  const auto it = lookup_.find(encode(config));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

SectorBasis build_basis(int ion_count, int particle_number, int twice_spin) {
  if (ion_count < 1 || ion_count > 32) {
    throw Error(ErrorKind::unsupported_sector, "ion count must be in 1..32");
  }
  if (particle_number < 0 || particle_number > 2) {
    throw Error(ErrorKind::unsupported_sector, "only sectors with n <= 2 are supported");
  }
  if (std::abs(twice_spin) > particle_number || (particle_number - twice_spin) % 2 != 0) {
    throw Error(ErrorKind::unsupported_sector, "S_z inconsistent with particle number");
  }
  const int n = ion_count;
  std::vector<SpinConfig> states;
  if (particle_number == 0) {
    states.emplace_back(n);
  } else if (particle_number == 1) {
    const SiteState s = twice_spin > 0 ? SiteState::up : SiteState::down;
    for (int i = 0; i < n; ++i) {
      SpinConfig c(n);
      c.set(i, s);
      states.push_back(std::move(c));
    }
  } else if (twice_spin == 0) {
    for (int i = 0; i < n; ++i) states.push_back(SpinConfig::pair_at(n, i));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) states.push_back(SpinConfig::up_down(n, i, j));
  } else {
    // Same-species pairs are hardcore: one per site, unordered.
    const SiteState s = twice_spin > 0 ? SiteState::up : SiteState::down;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        SpinConfig c(n);
        c.set(i, s);
        c.set(j, s);
        states.push_back(std::move(c));
      }
  }
  return SectorBasis(ion_count, particle_number, twice_spin, std::move(states));
}

Eigen::MatrixXd hopping_matrix(const SectorBasis& basis, const Eigen::MatrixXd& couplings) {
  const int n = basis.ion_count();
  if (couplings.rows() != n || couplings.cols() != n) {
    throw Error(ErrorKind::dimension_mismatch, "coupling matrix size differs from ion count");
  }
  const auto processes = resonant_processes();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(basis.size(), basis.size());
  for (int k = 0; k < basis.size(); ++k) {
    const SpinConfig& c = basis.state(k);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double jij = couplings(i, j);
        if (jij == 0.0) continue;
        for (const auto& p : processes) {
          if (c[i] != p.first.from || c[j] != p.second.from) continue;
          SpinConfig target = c;
          target.set(i, p.first.to);
          target.set(j, p.second.to);
          const auto idx = basis.index_of(target);
          if (!idx) {
            throw Error(ErrorKind::unsupported_sector,
                        "process maps " + c.to_string() + " outside the sector to " + target.to_string());
          }
          h(*idx, k) += jij;
        }
      }
    }
  }
  return h;
}

HamiltonianMatrix assemble(const SectorBasis& basis, const Eigen::MatrixXd& couplings,
                           std::span<const double> diagonal_energies, std::string provenance) {
  if (static_cast<int>(diagonal_energies.size()) != basis.size()) {
    throw Error(ErrorKind::dimension_mismatch, "diagonal energies length differs from basis size");
  }
  HamiltonianMatrix h;
  h.matrix = hopping_matrix(basis, couplings);
  for (int k = 0; k < basis.size(); ++k) h.matrix(k, k) += diagonal_energies[static_cast<std::size_t>(k)];
  h.provenance = std::move(provenance);
  return h;
}

Eigen::MatrixXd sector_frequency_shifts(const SectorBasis& basis, const ModeTable& axial,
                                        const TweezerSettings& settings, Method method) {
  const Eigen::VectorXd vacuum = frequency_shifts(axial, settings, SpinConfig(basis.ion_count()), method);
  Eigen::MatrixXd shifts(basis.size(), axial.size());
  for (int k = 0; k < basis.size(); ++k) {
    shifts.row(k) = (frequency_shifts(axial, settings, basis.state(k), method) - vacuum).transpose();
  }
  return shifts;
}

std::vector<double> diagonal_energies(const SectorBasis& basis, const ModeTable& axial,
                                      const TweezerSettings& settings, std::span<const int> fock,
                                      Method method) {
  const Eigen::MatrixXd shifts = sector_frequency_shifts(basis, axial, settings, method);
  std::vector<double> e(static_cast<std::size_t>(basis.size()));
  for (int k = 0; k < basis.size(); ++k) {
    e[static_cast<std::size_t>(k)] = zero_point_energy(shifts.row(k).transpose(), fock);
  }
  return e;
}

Spectrum spectrum(const HamiltonianMatrix& h, bool with_vectors) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      h.matrix, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::not_positive_definite, "Hamiltonian diagonalisation failed");
  }
  Spectrum s;
  s.values = solver.eigenvalues();
  if (with_vectors) s.vectors = solver.eigenvectors();
  return s;
}

Eigen::VectorXd pair_character(const SectorBasis& basis, const Spectrum& spec) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(spec.vectors.cols());
  for (int idx : basis.pair_indices()) out += spec.vectors.row(idx).cwiseAbs2().transpose();
  return out;
}

}  // namespace bipolaron
