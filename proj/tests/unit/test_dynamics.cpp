#include "doctest.h"

#include "bipolaron/bipolaron.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>

using namespace bipolaron;

namespace {

HamiltonianMatrix random_sector_h(const SectorBasis& b, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = b.ion_count();
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int c = a + 1; c < n; ++c) j(a, c) = j(c, a) = u(rng);
  std::vector<double> diag(static_cast<std::size_t>(b.size()));
  for (auto& x : diag) x = 3.0 * u(rng);
  return assemble(b, j, diag);
}

}  // namespace

TEST_CASE("two-ion propagation matches the matrix exponential") {
  const SectorBasis b = build_basis(2, 2, 0);
  const HamiltonianMatrix h = random_sector_h(b, 3);
  const Propagator prop(h);
  const Eigen::VectorXcd psi0 = basis_state(b.size(), 0);
  for (double t : {0.0, 0.1, 1.3, 7.0}) {
    const Eigen::MatrixXcd u = (Eigen::MatrixXcd(h.matrix.cast<std::complex<double>>()) *
                                std::complex<double>(0.0, -t))
                                   .exp();
    const Eigen::VectorXcd expected = u * psi0;
    CHECK((prop.evolve(psi0, t) - expected).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("evolution is unitary and conserves energy") {
  const SectorBasis b = build_basis(6, 2, 0);
  const HamiltonianMatrix h = random_sector_h(b, 5);
  const Trajectory tr = evolve(h, b, basis_state(b.size(), 2), TimeGrid::uniform(20.0, 41), 2);
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    CHECK(std::abs(tr.norms[k] - 1.0) < 1e-12);
    CHECK(std::abs(tr.energies[k] - tr.energies[0]) < 1e-11);
  }
  CHECK(tr.observables.total[0] == 1.0);
  CHECK(tr.observables.pair_probability(0, 2) == 1.0);
  CHECK(tr.observables.spread[0] == 0.0);
}

TEST_CASE("the initial state is returned exactly at t = 0") {
  const SectorBasis b = build_basis(4, 2, 0);
  const Propagator prop(random_sector_h(b, 9));
  const Eigen::VectorXcd psi0 = basis_state(b.size(), 1);
  CHECK(prop.evolve(psi0, 0.0) == psi0);
}

TEST_CASE("projected observables agree with full-state evolution") {
  const SectorBasis b = build_basis(5, 2, 0);
  const HamiltonianMatrix h = random_sector_h(b, 13);
  const TimeGrid grid = TimeGrid::uniform(5.0, 11);
  const Eigen::VectorXcd psi0 = basis_state(b.size(), 3);
  const Trajectory full = evolve(h, b, psi0, grid, 3);
  const Observables fast = evolve_observables(Propagator(h), b, psi0, grid, 3);
  CHECK((full.observables.pair_probability - fast.pair_probability).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((full.observables.spread - fast.spread).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("spread of the pair distribution") {
  std::vector<double> p(10, 0.0);
  p[4] = 1.0;
  CHECK(spread_sd(p, 3) == doctest::Approx(std::sqrt(0.1)).epsilon(1e-15));
  CHECK(spread_sd(p, 4) == 0.0);
  std::vector<double> uniform(10, 0.1);
  double acc = 0.0;
  for (int i = 0; i < 10; ++i) acc += (i - 3) * (i - 3) * 0.1;
  CHECK(spread_sd(uniform, 3) == doctest::Approx(std::sqrt(acc / 10.0)).epsilon(1e-15));
}

TEST_CASE("time grids") {
  const TimeGrid g = TimeGrid::uniform(0.05, 251);
  CHECK(g.size() == 251);
  CHECK(g.times.front() == 0.0);
  CHECK(g.times.back() == 0.05);
  CHECK_THROWS_AS(TimeGrid::explicit_times({0.0, 0.2, 0.1}), Error);
  CHECK_THROWS_AS(TimeGrid::explicit_times({-1.0}), Error);
  CHECK_THROWS_AS(TimeGrid::uniform(0.0, 5), Error);
}

TEST_CASE("unnormalised initial states are rejected") {
  const SectorBasis b = build_basis(3, 2, 0);
  const Propagator prop(random_sector_h(b, 1));
  Eigen::VectorXcd psi = basis_state(b.size(), 0) * 2.0;
  CHECK_THROWS_AS(evolve_observables(prop, b, psi, TimeGrid::uniform(1.0, 3), 0), Error);
}
