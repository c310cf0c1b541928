#pragma once

// Run configuration for the command-line tool. The file is JSON with // and
// /* */ comments allowed; unknown keys are rejected. Laboratory units carry an
// implied 2*pi (a value of 0.5 for omega_z_MHz means wz = 2*pi x 0.5 MHz).

#include "bipolaron/bipolaron.hpp"

#include "json.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bipolaron::app {

struct TweezerConfig {
  enum class Mode { calibrated, explicit_values };
  Mode mode = Mode::calibrated;
  bool enabled = true;
  Method method = Method::exact;
  // calibrated: either targets in Hz or peak signed tweezer frequencies in kHz
  std::optional<double> g_hz;
  std::optional<double> gamma_hz;
  std::optional<double> peak_single_khz;
  std::optional<double> peak_pair_khz;
  // explicit: signed tweezer frequency per state (kHz) at weight 1, and site weights
  std::array<double, kStatesPerSite> varpi_khz{};
  std::vector<double> weights;
};

struct DriveConfig {
  double omega_khz = 150.0;
  double mu_mhz = 3.3;
  std::optional<double> k_per_m;
  double wavelength_nm = 729.0;
  std::optional<std::array<double, 3>> detunings_khz;
  char transverse_axis = 'x';
};

struct ThermalConfig {
  std::vector<double> temperatures_uk;
  double epsilon = 1e-3;
  EnsembleMode mode = EnsembleMode::automatic;
  std::uint64_t seed = 20240601;
  std::size_t sample_count = 4000;
  std::size_t max_configurations = 100000;
  std::vector<int> ion_counts;          // mobility command
  std::vector<double> snapshot_ms;      // sweep command
};

struct DynamicsConfig {
  int initial_pair_site = 4;  // 1-based
  double t_max_ms = 50.0;
  int n_points = 251;
  std::vector<double> temperatures_uk;  // evolve command
};

struct OutputConfig {
  std::filesystem::path directory = "out";
  bool csv = true;
  bool json = true;
};

struct RunConfig {
  TrapConfig trap;
  TweezerConfig tweezer;
  DriveConfig drive;
  ThermalConfig thermal;
  DynamicsConfig dynamics;
  OutputConfig output;

  DriveParams drive_params(const TrapConfig& trap) const;
  double transverse_frequency() const;
};

/// Throws Error(config) on malformed JSON, unknown keys, missing required
/// fields or out-of-range values.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical echo of the parsed configuration (SI-free lab units as in the file).
nlohmann::json to_json(const RunConfig& config);

}  // namespace bipolaron::app
