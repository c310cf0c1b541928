#pragma once

#include "bipolaron/bipolaron.hpp"

namespace test_support {

inline bipolaron::TrapConfig reference_trap(int n = 10) {
  bipolaron::TrapConfig t;
  t.ion_count = n;
  t.ion_mass_amu = 40.0;
  t.axial_frequency = bipolaron::two_pi * 0.5e6;
  t.transverse_x = bipolaron::two_pi * 3.0e6;
  t.transverse_y = bipolaron::two_pi * 4.0e6;
  return t;
}

inline bipolaron::DriveParams reference_drive() {
  bipolaron::DriveParams d;
  d.rabi_frequency = bipolaron::two_pi * 150e3;
  d.modulation = bipolaron::two_pi * 3.3e6;
  d.wavenumber = bipolaron::two_pi / 729e-9;
  return d;
}

}  // namespace test_support
