#pragma once

// Fixed (particle number, S_z) sectors of the four-level-per-ion chain and the
// effective Hamiltonian restricted to them.

#include "bipolaron/tweezer.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace bipolaron {

class SectorBasis {
public:
  SectorBasis(int ion_count, int particle_number, int twice_spin, std::vector<SpinConfig> states);

  int ion_count() const { return ion_count_; }
  int particle_number() const { return particle_number_; }
  int twice_spin() const { return twice_spin_; }
  int size() const { return static_cast<int>(states_.size()); }

  const SpinConfig& state(int k) const { return states_[static_cast<std::size_t>(k)]; }
  const std::vector<SpinConfig>& states() const { return states_; }
  std::optional<int> index_of(const SpinConfig& config) const;

  /// Basis index of the doubly occupied state at each site; empty unless the
  /// sector is (n = 2, S_z = 0).
  const std::vector<int>& pair_indices() const { return pair_indices_; }

private:
  int ion_count_;
  int particle_number_;
  int twice_spin_;
  std::vector<SpinConfig> states_;
  std::unordered_map<std::uint64_t, int> lookup_;
  std::vector<int> pair_indices_;
};

/// Packs a configuration (N <= 32) into two bits per site.
std::uint64_t encode(const SpinConfig& config);

/// Enumerates the sector. Ordering: pair states by site, then single
/// occupations lexicographic by (i, j) with the up spin at i.
/// Throws Error(unsupported_sector) for n > 2 or inconsistent spin.
SectorBasis build_basis(int ion_count, int particle_number, int twice_spin);

struct HamiltonianMatrix {
  Eigen::MatrixXd matrix;  // real symmetric, rad/s
  std::string provenance;
};

/// sum_{i<j} J_ij sum_{(P,Q)} P^(i) Q^(j) restricted to the sector.
Eigen::MatrixXd hopping_matrix(const SectorBasis& basis, const Eigen::MatrixXd& couplings);

HamiltonianMatrix assemble(const SectorBasis& basis, const Eigen::MatrixXd& couplings,
                           std::span<const double> diagonal_energies, std::string provenance = {});

/// Configuration energies of every basis state relative to the all-vacuum
/// state, for a given phonon Fock configuration.
std::vector<double> diagonal_energies(const SectorBasis& basis, const ModeTable& axial,
                                      const TweezerSettings& settings, std::span<const int> fock,
                                      Method method = Method::exact);

/// Per-basis-state frequency shifts (rows: basis states, cols: modes), with the
/// all-vacuum shifts subtracted. Reused across Fock configurations.
Eigen::MatrixXd sector_frequency_shifts(const SectorBasis& basis, const ModeTable& axial,
                                        const TweezerSettings& settings, Method method = Method::exact);

struct Spectrum {
  Eigen::VectorXd values;   // ascending, rad/s
  Eigen::MatrixXd vectors;  // columns; empty when not requested
};

Spectrum spectrum(const HamiltonianMatrix& h, bool with_vectors = true);

/// sum_i |<pair at i|psi>|^2 for each eigenvector.
Eigen::VectorXd pair_character(const SectorBasis& basis, const Spectrum& spec);

}  // namespace bipolaron
