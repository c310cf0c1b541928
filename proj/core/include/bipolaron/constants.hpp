#pragma once

#include <numbers>

namespace bipolaron {

/// SI constants. Elementary charge, hbar and Boltzmann are exact since the 2019
/// SI redefinition; vacuum permittivity and the atomic mass unit are CODATA 2018.
struct PhysicalConstants {
  double elementary_charge = 1.602176634e-19;    // C
  double vacuum_permittivity = 8.8541878128e-12;  // F/m
  double hbar = 1.054571817e-34;                  // J s
  double boltzmann = 1.380649e-23;                // J/K
  double atomic_mass_unit = 1.66053906660e-27;    // kg
};

inline constexpr PhysicalConstants codata{};

inline constexpr double two_pi = 2.0 * std::numbers::pi;

}  // namespace bipolaron
