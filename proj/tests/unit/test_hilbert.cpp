#include "doctest.h"

#include "full_space.hpp"

#include <cmath>
#include <random>

using namespace bipolaron;
using namespace test_support;

namespace {

Eigen::MatrixXd random_couplings(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) j(a, b) = j(b, a) = u(rng);
  return j;
}

}  // namespace

TEST_CASE("two-particle zero-spin basis has N^2 states with pairs first") {
  for (int n : {1, 2, 5, 10}) {
    const SectorBasis b = build_basis(n, 2, 0);
    CHECK(b.size() == n * n);
    REQUIRE(static_cast<int>(b.pair_indices().size()) == n);
    for (int i = 0; i < n; ++i) {
      CHECK(b.pair_indices()[i] == i);
      CHECK(b.state(i) == SpinConfig::pair_at(n, i));
    }
    for (int k = 0; k < b.size(); ++k) {
      CHECK(b.index_of(b.state(k)) == k);
      CHECK(b.state(k).particle_number() == 2);
      CHECK(b.state(k).twice_spin() == 0);
    }
  }
}

TEST_CASE("other sectors have the expected dimensions") {
  CHECK(build_basis(6, 0, 0).size() == 1);
  CHECK(build_basis(6, 1, 1).size() == 6);
  CHECK(build_basis(6, 1, -1).size() == 6);
  CHECK(build_basis(6, 2, 2).size() == 15);
  CHECK_THROWS_AS(build_basis(6, 3, 1), Error);
  CHECK_THROWS_AS(build_basis(6, 2, 1), Error);
  CHECK_THROWS_AS(build_basis(33, 2, 0), Error);
}

TEST_CASE("sector Hamiltonian equals the projection of the full-space operator") {
  std::mt19937_64 rng(7);
  for (int n = 2; n <= 4; ++n) {
    const Eigen::MatrixXd j = random_couplings(n, rng);
    const Eigen::MatrixXd full = full_hamiltonian(j, n);
    CHECK((full - full.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (auto [np, s] : {std::pair{2, 0}, std::pair{1, 1}, std::pair{2, 2}, std::pair{2, -2}}) {
      const SectorBasis b = build_basis(n, np, s);
      std::vector<double> diag(static_cast<std::size_t>(b.size()));
      std::uniform_real_distribution<double> u(-5.0, 5.0);
      for (auto& x : diag) x = u(rng);
      const Eigen::MatrixXd h = assemble(b, j, diag).matrix;
      Eigen::MatrixXd projected(b.size(), b.size());
      for (int r = 0; r < b.size(); ++r)
        for (int c = 0; c < b.size(); ++c)
          projected(r, c) = full(full_index(b.state(r)), full_index(b.state(c))) + (r == c ? diag[r] : 0.0);
      CHECK((h - projected).cwiseAbs().maxCoeff() < 1e-12);

      // no amplitude leaks from the sector
      for (int c = 0; c < b.size(); ++c) {
        double inside = 0.0;
        for (int r = 0; r < b.size(); ++r) inside += std::abs(full(full_index(b.state(r)), full_index(b.state(c))));
        CHECK(full.col(full_index(b.state(c))).cwiseAbs().sum() == doctest::Approx(inside));
      }
    }
  }
}

TEST_CASE("single-particle sector reduces to the coupling matrix") {
  std::mt19937_64 rng(11);
  for (int n : {3, 6, 10}) {
    const Eigen::MatrixXd j = random_couplings(n, rng);
    for (int s : {1, -1}) {
      const SectorBasis b = build_basis(n, 1, s);
      CHECK((hopping_matrix(b, j) - j).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("diagonal energies vanish without tweezers") {
  const SectorBasis b = build_basis(4, 2, 0);
  TrapConfig t;
  t.ion_count = 4;
  t.axial_frequency = two_pi * 0.5e6;
  t.transverse_x = t.transverse_y = two_pi * 3e6;
  const ModeTable axial = axial_modes(t, solve_equilibrium(t));
  const auto e = diagonal_energies(b, axial, TweezerSettings::off(4), {});
  for (double x : e) CHECK(x == 0.0);
}

TEST_CASE("pair character of eigenstates") {
  const SectorBasis b = build_basis(3, 2, 0);
  std::vector<double> diag(9, 0.0);
  for (int i = 0; i < 3; ++i) diag[i] = -100.0;
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(3, 3);
  const Spectrum s = spectrum(assemble(b, j, diag));
  const Eigen::VectorXd pc = pair_character(b, s);
  for (int k = 0; k < 3; ++k) CHECK(pc[k] == doctest::Approx(1.0));
  for (int k = 3; k < 9; ++k) CHECK(pc[k] == doctest::Approx(0.0));
}

TEST_CASE("mismatched inputs are rejected") {
  const SectorBasis b = build_basis(3, 2, 0);
  std::vector<double> diag(5, 0.0);
  CHECK_THROWS_AS(assemble(b, Eigen::MatrixXd::Zero(3, 3), diag), Error);
  CHECK_THROWS_AS(hopping_matrix(b, Eigen::MatrixXd::Zero(4, 4)), Error);
}
