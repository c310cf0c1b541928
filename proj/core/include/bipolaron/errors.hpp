#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bipolaron {

/// Failure categories raised by the numerical core. The command-line tool maps
/// `ErrorKind::config` to exit code 2 and every other kind to exit code 3.
enum class ErrorKind {
  config,
  non_convergence,
  degenerate_positions,
  zig_zag_instability,
  not_positive_definite,
  mode_collapse,
  curvature_too_large,
  resonant_drive,
  degenerate_fit,
  unsupported_sector,
  ensemble_too_large,
  dimension_mismatch,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::config: return "ConfigError";
    case ErrorKind::non_convergence: return "NonConvergence";
    case ErrorKind::degenerate_positions: return "DegeneratePositions";
    case ErrorKind::zig_zag_instability: return "ZigZagInstability";
    case ErrorKind::not_positive_definite: return "NotPositiveDefinite";
    case ErrorKind::mode_collapse: return "ModeCollapse";
    case ErrorKind::curvature_too_large: return "CurvatureTooLarge";
    case ErrorKind::resonant_drive: return "ResonantDrive";
    case ErrorKind::degenerate_fit: return "DegenerateFit";
    case ErrorKind::unsupported_sector: return "UnsupportedSector";
    case ErrorKind::ensemble_too_large: return "EnsembleTooLarge";
    case ErrorKind::dimension_mismatch: return "DimensionMismatch";
  }
  return "Error";
}

}  // namespace bipolaron
