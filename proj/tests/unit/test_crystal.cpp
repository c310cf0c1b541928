#include "doctest.h"
#include "reference_setup.hpp"

#include <cmath>

using namespace bipolaron;
using test_support::reference_trap;

TEST_CASE("two-ion equilibrium solves u^3 = 1/4") {
  const auto eq = solve_equilibrium(reference_trap(2));
  const double u = std::cbrt(0.25);
  CHECK(eq.dimensionless[0] == doctest::Approx(-u).epsilon(1e-12));
  CHECK(eq.dimensionless[1] == doctest::Approx(u).epsilon(1e-12));
  CHECK(std::abs(eq.dimensionless[1] - 0.62996) < 1e-5);
}

TEST_CASE("three-ion equilibrium has outer ions at (5/4)^(1/3)") {
  const auto eq = solve_equilibrium(reference_trap(3));
  CHECK(std::abs(eq.dimensionless[1]) < 1e-14);
  CHECK(eq.dimensionless[2] == doctest::Approx(std::cbrt(1.25)).epsilon(1e-12));
  CHECK(eq.dimensionless[2] == doctest::Approx(1.0772).epsilon(1e-4));
}

TEST_CASE("length scale for calcium at 0.5 MHz") {
  const TrapConfig t = reference_trap(2);
  const double m = 40.0 * codata.atomic_mass_unit;
  const double e2 = codata.elementary_charge * codata.elementary_charge;
  const double expected = std::cbrt(e2 / (4.0 * M_PI * codata.vacuum_permittivity * m * t.axial_frequency * t.axial_frequency));
  CHECK(length_scale(t) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(length_scale(t) == doctest::Approx(7.06e-6).epsilon(2e-3));
}

TEST_CASE("equilibrium is mirror symmetric and converged for N up to 30") {
  for (int n = 1; n <= 30; ++n) {
    const auto eq = solve_equilibrium(reference_trap(n));
    CHECK(eq.residual_norm < 1e-12);
    CHECK(equilibrium_gradient(eq.dimensionless).cwiseAbs().maxCoeff() < 1e-12);
    for (int i = 0; i < n; ++i) {
      CHECK(eq.dimensionless[i] == doctest::Approx(-eq.dimensionless[n - 1 - i]).epsilon(1e-12));
      if (i) CHECK(eq.dimensionless[i] > eq.dimensionless[i - 1]);
    }
  }
}

TEST_CASE("axial modes: com and breathing frequencies") {
  for (int n = 2; n <= 30; ++n) {
    const TrapConfig t = reference_trap(n);
    const auto m = axial_modes(t, solve_equilibrium(t));
    CHECK(std::abs(m.frequencies[0] / t.axial_frequency - 1.0) < 1e-9);
    CHECK(std::abs(m.frequencies[1] / (std::sqrt(3.0) * t.axial_frequency) - 1.0) < 1e-9);
    const Eigen::MatrixXd gram = m.vectors.transpose() * m.vectors;
    CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("two-ion Hessians match the closed forms") {
  const TrapConfig t = reference_trap(2);
  const auto eq = solve_equilibrium(t);
  const Eigen::MatrixXd d = axial_hessian(eq);
  CHECK(d(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(d(0, 1) == doctest::Approx(-1.0).epsilon(1e-12));
  const double r = t.transverse_x / t.axial_frequency;
  const auto tm = transverse_modes(t, eq, t.transverse_x);
  CHECK(tm.frequencies[1] == doctest::Approx(t.transverse_x).epsilon(1e-14));
  CHECK(tm.frequencies[0] == doctest::Approx(t.axial_frequency * std::sqrt(r * r - 1.0)).epsilon(1e-12));
}

TEST_CASE("transverse com mode sits at the trap frequency") {
  for (int n : {2, 5, 10, 20, 30}) {
    TrapConfig t = reference_trap(n);
    t.transverse_x = two_pi * 10e6;
    t.transverse_y = two_pi * 12e6;
    const auto eq = solve_equilibrium(t);
    for (double w : {t.transverse_x, t.transverse_y}) {
      const auto tm = transverse_modes(t, eq, w);
      CHECK(std::abs(tm.frequencies[n - 1] / w - 1.0) < 1e-13);
      for (int i = 0; i < n; ++i) CHECK(tm.vectors(i, n - 1) == doctest::Approx(1.0 / std::sqrt(n)).epsilon(1e-10));
    }
  }
}

TEST_CASE("mode vectors have their largest entry positive") {
  const TrapConfig t = reference_trap(10);
  const auto m = axial_modes(t, solve_equilibrium(t));
  for (int k = 0; k < m.size(); ++k) {
    const double top = m.vectors.col(k).cwiseAbs().maxCoeff();
    int first = 0;
    while (std::abs(m.vectors(first, k)) < top * (1.0 - 1e-9)) ++first;
    CHECK(m.vectors(first, k) > 0.0);
  }
}

TEST_CASE("weak transverse confinement is a zig-zag instability") {
  TrapConfig t = reference_trap(10);
  t.transverse_x = 2.0 * t.axial_frequency;
  const auto eq = solve_equilibrium(t);
  try {
    transverse_modes(t, eq, t.transverse_x);
    FAIL("expected zig-zag instability");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::zig_zag_instability);
  }
}

TEST_CASE("invalid trap parameters are configuration errors") {
  TrapConfig t = reference_trap(0);
  CHECK_THROWS_AS(solve_equilibrium(t), Error);
  t = reference_trap(3);
  t.axial_frequency = -1.0;
  try {
    solve_equilibrium(t);
    FAIL("expected config error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
  }
}

TEST_CASE("non-symmetric Hessian is rejected") {
  Eigen::MatrixXd h(2, 2);
  h << 2, -1, 0, 2;
  CHECK_THROWS_AS(modes(h, Axis::axial, 1.0), Error);
}
