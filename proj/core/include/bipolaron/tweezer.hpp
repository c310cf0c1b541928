#pragma once

// State-dependent tweezer curvatures and the phonon zero-point energies they
// induce. Curvatures are signed squared angular frequencies (rad^2/s^2); a
// negative entry is an anti-confining tweezer.

#include "bipolaron/crystal.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bipolaron {

enum class SiteState : std::uint8_t { vacuum = 0, up = 1, down = 2, pair = 3 };

inline constexpr int kStatesPerSite = 4;

constexpr int particle_number(SiteState s) {
  return s == SiteState::vacuum ? 0 : (s == SiteState::pair ? 2 : 1);
}
/// Twice the S_z contribution, so spins stay integral.
constexpr int twice_spin(SiteState s) {
  return s == SiteState::up ? 1 : (s == SiteState::down ? -1 : 0);
}

class SpinConfig {
public:
  SpinConfig() = default;
  explicit SpinConfig(int ion_count) : states_(static_cast<std::size_t>(ion_count), SiteState::vacuum) {}
  explicit SpinConfig(std::vector<SiteState> states) : states_(std::move(states)) {}

  static SpinConfig pair_at(int ion_count, int site);
  static SpinConfig up_down(int ion_count, int up_site, int down_site);

  int size() const { return static_cast<int>(states_.size()); }
  SiteState operator[](int i) const { return states_[static_cast<std::size_t>(i)]; }
  void set(int i, SiteState s) { states_[static_cast<std::size_t>(i)] = s; }
  std::span<const SiteState> states() const { return states_; }

  int particle_number() const;
  int twice_spin() const;
  std::string to_string() const;  // e.g. "0030000000"

  friend bool operator==(const SpinConfig&, const SpinConfig&) = default;
  friend auto operator<=>(const SpinConfig&, const SpinConfig&) = default;

private:
  std::vector<SiteState> states_;
};

enum class Construction { explicit_values, calibrated };

struct TweezerSettings {
  Eigen::MatrixXd signed_curvature;  // N x 4, rad^2/s^2, column k = state k
  std::vector<double> site_weights;  // max normalised to 1
  double g = 0.0;                    // rad/s (energy / hbar)
  double gamma = 0.0;                // rad/s
  Construction construction = Construction::explicit_values;

  int ion_count() const { return static_cast<int>(signed_curvature.rows()); }

  /// Zero curvatures on every site and state (tweezers off).
  static TweezerSettings off(int ion_count);

  /// Per-state signed tweezer frequencies (rad/s, sign = confinement) scaled
  /// per site by intensity weights: curvature(i, k) = w_i * sign(v_k) v_k^2.
  static TweezerSettings from_frequencies(const std::array<double, kStatesPerSite>& signed_frequency,
                                          std::vector<double> weights);

  /// Returns human-readable warnings for curvatures above 10% of wz^2 and
  /// throws Error(curvature_too_large) above 50%.
  std::vector<std::string> validate(double axial_frequency) const;
};

Eigen::VectorXd state_curvatures(const TweezerSettings& settings, const SpinConfig& config);

/// exact: diagonalise the tweezer-augmented Hessian.
/// perturbative: omega_hat = sqrt(omega^2 + sum_i O_i b_mi^2).
/// first_order: the square root linearised, omega + sum_i O_i b_mi^2 / (2 omega);
/// the calibration is exact for this one.
enum class Method { perturbative, exact, first_order };

struct PerturbedSpectrum {
  Eigen::VectorXd frequencies;    // rad/s, indexed by unperturbed mode
  Method method = Method::exact;
  std::vector<int> matched_index;  // position of each mode in the sorted perturbed spectrum
};

PerturbedSpectrum perturbative_frequencies(const ModeTable& modes, const Eigen::VectorXd& curvature);
PerturbedSpectrum first_order_frequencies(const ModeTable& modes, const Eigen::VectorXd& curvature);

/// Diagonalises the axial Hessian with the tweezer curvatures added to its
/// diagonal. Modes are matched to the unperturbed table by sorted order unless
/// an eigenvector overlap drops below 0.9, in which case greedy maximum-overlap
/// matching is used instead.
PerturbedSpectrum exact_frequencies(const ModeTable& axial, const Eigen::VectorXd& curvature);

/// Site weights and curvatures that make the first-order single-spin energy g
/// and the pair energy gamma on every site. State 0 has zero curvature.
TweezerSettings calibrate(const ModeTable& axial, double g, double gamma);

/// Inverts the calibration for a chosen peak (weight 1) signed tweezer
/// frequency: returns the energy target whose calibrated curvature peaks at v.
double calibration_target_for_peak(const ModeTable& axial, double signed_peak_frequency);

/// sum_m b_mi^2 / omega_m for each ion (s).
Eigen::VectorXd inverse_frequency_participation(const ModeTable& axial);

/// omega_hat_m - omega_m for the configuration, per unperturbed mode (rad/s).
Eigen::VectorXd frequency_shifts(const ModeTable& axial, const TweezerSettings& settings,
                                 const SpinConfig& config, Method method);

/// sum_m shift_m (n_m + 1/2) in rad/s.
double zero_point_energy(const Eigen::VectorXd& shifts, std::span<const int> fock);

double config_energy(const ModeTable& axial, const TweezerSettings& settings, const SpinConfig& config,
                     std::span<const int> fock, Method method = Method::exact);

/// Ground-state energy of two opposite spins at (i, j), or the pair at i on the
/// diagonal, relative to the all-vacuum configuration.
Eigen::MatrixXd b_matrix(const ModeTable& axial, const TweezerSettings& settings,
                         Method method = Method::exact);

/// First-order bipolaron binding gap 2g - gamma.
double gs_gap(const TweezerSettings& settings);

}  // namespace bipolaron
