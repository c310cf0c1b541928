#include "bipolaron/thermal.hpp"

#include "bipolaron/constants.hpp"
#include "bipolaron/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <random>
#include <sstream>
#include <thread>

namespace bipolaron {

double mean_occupation(double omega, double temperature) {
  if (temperature < 0.0) throw Error(ErrorKind::config, "temperature must be non-negative");
  if (temperature == 0.0) return 0.0;
  const double x = codata.hbar * omega / (codata.boltzmann * temperature);
  return 1.0 / std::expm1(x);
}

ThermalParams ThermalParams::from_modes(const ModeTable& modes, double temperature, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw Error(ErrorKind::config, "epsilon must lie in (0, 1)");
  ThermalParams p;
  p.temperature = temperature;
  p.epsilon = epsilon;
  p.mean_occupation.resize(modes.size());
  for (int m = 0; m < modes.size(); ++m) p.mean_occupation[m] = bipolaron::mean_occupation(modes.frequencies[m], temperature);
  return p;
}

double fock_probability(std::span<const int> occupation, const ThermalParams& params) {
  if (static_cast<Eigen::Index>(occupation.size()) != params.mean_occupation.size()) {
    throw Error(ErrorKind::dimension_mismatch, "occupation length differs from mode count");
  }
  double p = 1.0;
  for (std::size_t m = 0; m < occupation.size(); ++m) {
    const int n = occupation[m];
    if (n < 0) throw Error(ErrorKind::config, "phonon occupations must be non-negative");
    const double nbar = params.mean_occupation[static_cast<Eigen::Index>(m)];
    if (nbar == 0.0) {
      if (n != 0) return 0.0;
      continue;
    }
    p *= std::pow(nbar, n) / std::pow(1.0 + nbar, n + 1);
  }
  return p;
}

namespace {

// Ratio q = nbar / (1 + nbar) of the geometric distribution P(n) = (1 - q) q^n.
std::vector<double> geometric_ratios(const ThermalParams& params) {
  std::vector<double> q(static_cast<std::size_t>(params.mean_occupation.size()));
  for (std::size_t m = 0; m < q.size(); ++m) {
    const double nbar = params.mean_occupation[static_cast<Eigen::Index>(m)];
    q[m] = nbar / (1.0 + nbar);
  }
  return q;
}

struct Candidate {
  double probability;
  std::vector<int> occupation;
  int last_mode;  // highest mode index with a non-zero occupation, -1 for the vacuum

  bool operator<(const Candidate& other) const {
    if (probability != other.probability) return probability < other.probability;
    return occupation > other.occupation;  // ties pop lexicographically smallest first
  }
};

FockEnsemble enumerate_ensemble(const ThermalParams& params, const EnsembleOptions& options) {
  const auto modes = static_cast<int>(params.mean_occupation.size());
  const std::vector<double> q = geometric_ratios(params);
  const double per_mode = std::pow(1.0 - options.epsilon, 1.0 / std::max(modes, 1));

  std::vector<int> cutoff(static_cast<std::size_t>(modes), 0);
  for (int m = 0; m < modes; ++m) {
    const double qm = q[static_cast<std::size_t>(m)];
    int c = 0;
    double tail = qm;  // mass beyond c is q^(c+1)
    while (1.0 - tail < per_mode && c < 100000) {
      ++c;
      tail *= qm;
    }
    cutoff[static_cast<std::size_t>(m)] = c;
  }

  FockEnsemble out;
  std::priority_queue<Candidate> heap;
  std::vector<int> vacuum(static_cast<std::size_t>(modes), 0);
  heap.push({fock_probability(vacuum, params), vacuum, -1});
  while (!heap.empty() && out.captured_mass < 1.0 - options.epsilon) {
    if (out.size() >= options.max_configurations) {
      std::ostringstream msg;
      msg << "enumeration exceeded " << options.max_configurations << " configurations at captured mass "
          << out.captured_mass;
      throw Error(ErrorKind::ensemble_too_large, msg.str());
    }
    Candidate top = heap.top();
    heap.pop();
    const double w = fock_probability(top.occupation, params);
    out.captured_mass += w;
    // Children raise a mode at or above the last raised one, so each
    // configuration has exactly one parent and is generated once.
    for (int m = std::max(top.last_mode, 0); m < modes; ++m) {
      const auto um = static_cast<std::size_t>(m);
      if (top.occupation[um] >= cutoff[um] || q[um] == 0.0) continue;
      Candidate child{top.probability * q[um], top.occupation, m};
      ++child.occupation[um];
      heap.push(std::move(child));
    }
    out.occupations.push_back(std::move(top.occupation));
    out.weights.push_back(w);
  }
  return out;
}

FockEnsemble sample_ensemble(const ThermalParams& params, const EnsembleOptions& options) {
  if (options.sample_count == 0) throw Error(ErrorKind::config, "sample count must be positive");
  const std::vector<double> q = geometric_ratios(params);
  std::mt19937_64 engine(options.seed);
  // Uniform in [0, 1) from the top 53 bits; avoids implementation-defined distributions.
  auto uniform = [&engine] { return static_cast<double>(engine() >> 11) * 0x1.0p-53; };

  std::map<std::vector<int>, std::size_t> counts;
  std::vector<int> draw(q.size());
  for (std::size_t s = 0; s < options.sample_count; ++s) {
    for (std::size_t m = 0; m < q.size(); ++m) {
      const double u = uniform();
      draw[m] = q[m] > 0.0 ? static_cast<int>(std::floor(std::log1p(-u) / std::log(q[m]))) : 0;
    }
    ++counts[draw];
  }
  FockEnsemble out;
  out.sampled = true;
  out.draws = options.sample_count;
  const auto total = static_cast<double>(options.sample_count);
  for (auto& [occ, c] : counts) {
    out.occupations.push_back(occ);
    out.weights.push_back(static_cast<double>(c) / total);
  }
  out.captured_mass = 1.0;
  return out;
}

}  // namespace

FockEnsemble build_ensemble(const ModeTable& axial, double temperature, const EnsembleOptions& options) {
  const ThermalParams params = ThermalParams::from_modes(axial, temperature, options.epsilon);
  if (temperature == 0.0) {
    FockEnsemble out;
    out.occupations.emplace_back(static_cast<std::size_t>(axial.size()), 0);
    out.weights.push_back(1.0);
    out.captured_mass = 1.0;
    return out;
  }
  switch (options.mode) {
    case EnsembleMode::enumerate: return enumerate_ensemble(params, options);
    case EnsembleMode::sample: return sample_ensemble(params, options);
    case EnsembleMode::automatic:
      try {
        return enumerate_ensemble(params, options);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::ensemble_too_large) throw;
        return sample_ensemble(params, options);
      }
  }
  return {};
}

namespace {

Observables zero_observables(int times, int sites) {
  return {Eigen::MatrixXd::Zero(times, sites), Eigen::VectorXd::Zero(times), Eigen::VectorXd::Zero(times)};
}

void accumulate(Observables& acc, const Observables& x, double w) {
  acc.pair_probability += w * x.pair_probability;
  acc.total += w * x.total;
  acc.spread += w * x.spread;
}

void accumulate_square(Observables& acc, const Observables& x, double w) {
  acc.pair_probability += w * x.pair_probability.cwiseAbs2();
  acc.total += w * x.total.cwiseAbs2();
  acc.spread += w * x.spread.cwiseAbs2();
}

}  // namespace

ThermalObservables thermal_dynamics(const ThermalProblem& problem, const FockEnsemble& ensemble,
                                    const TimeGrid& grid, int threads) {
  const SectorBasis& basis = problem.basis;
  const int sites = basis.ion_count();
  const Eigen::MatrixXd shifts = sector_frequency_shifts(basis, problem.axial, problem.settings, problem.method);
  const Eigen::MatrixXd hopping = hopping_matrix(basis, problem.couplings);
  const Eigen::VectorXcd initial = basis_state(basis.size(), basis.pair_indices().at(
                                                                 static_cast<std::size_t>(problem.initial_site)));

  double total_weight = 0.0;
  for (double w : ensemble.weights) total_weight += w;

  ThermalObservables out;
  out.mean = zero_observables(grid.size(), sites);
  Observables second = zero_observables(grid.size(), sites);
  out.members = ensemble.size();
  out.captured_mass = ensemble.captured_mass;
  out.sampled = ensemble.sampled;

  auto run_member = [&](std::size_t k) {
    HamiltonianMatrix h{hopping, {}};
    Eigen::VectorXd nhalf(problem.axial.size());
    for (int m = 0; m < problem.axial.size(); ++m) nhalf[m] = ensemble.occupations[k][static_cast<std::size_t>(m)] + 0.5;
    h.matrix.diagonal() += shifts * nhalf;
    return evolve_observables(Propagator(h), basis, initial, grid, problem.initial_site);
  };

  // Fixed-size blocks evaluated concurrently, reduced in index order.
  const std::size_t block = 64;
  const int workers = std::max(threads, 1);
  std::vector<Observables> results(block);
  for (std::size_t start = 0; start < ensemble.size(); start += block) {
    const std::size_t count = std::min(block, ensemble.size() - start);
    if (workers == 1 || count == 1) {
      for (std::size_t k = 0; k < count; ++k) results[k] = run_member(start + k);
    } else {
      std::vector<std::jthread> pool;
      for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&, t] {
          for (std::size_t k = static_cast<std::size_t>(t); k < count; k += static_cast<std::size_t>(workers)) {
            results[k] = run_member(start + k);
          }
        });
      }
    }
    for (std::size_t k = 0; k < count; ++k) {
      const double w = ensemble.weights[start + k] / total_weight;
      accumulate(out.mean, results[k], w);
      if (ensemble.sampled) accumulate_square(second, results[k], w);
    }
  }

  out.error = zero_observables(grid.size(), sites);
  if (ensemble.sampled) {
    const double denom = std::max(static_cast<double>(ensemble.draws) - 1.0, 1.0);
    auto se = [denom](double m2, double m) { return std::sqrt(std::max(m2 - m * m, 0.0) / denom); };
    out.error.pair_probability = second.pair_probability.binaryExpr(out.mean.pair_probability, se);
    out.error.total = second.total.binaryExpr(out.mean.total, se);
    out.error.spread = second.spread.binaryExpr(out.mean.spread, se);
  } else {
    const double missing = std::max(0.0, 1.0 - ensemble.captured_mass);
    const double max_distance = std::max(problem.initial_site, sites - 1 - problem.initial_site);
    const double spread_range = max_distance / std::sqrt(static_cast<double>(sites));
    out.error.pair_probability.setConstant(missing);
    out.error.total.setConstant(missing);
    out.error.spread.setConstant(missing * spread_range);
  }
  return out;
}

ThermalObservables thermal_dynamics(const ThermalProblem& problem, double temperature, const TimeGrid& grid,
                                    const EnsembleOptions& options, int threads) {
  return thermal_dynamics(problem, build_ensemble(problem.axial, temperature, options), grid, threads);
}

double p_mobile_product(std::span<const double> frequencies, double temperature) {
  if (temperature < 0.0) throw Error(ErrorKind::config, "temperature must be non-negative");
  if (temperature == 0.0) return 1.0;
  double p = 1.0;
  for (std::size_t m = 1; m < frequencies.size(); ++m) {
    p *= -std::expm1(-codata.hbar * frequencies[m] / (codata.boltzmann * temperature));
  }
  return p;
}

double p_mobile_product(const ModeTable& axial, double temperature) {
  return p_mobile_product(std::span<const double>(axial.frequencies.data(),
                                                  static_cast<std::size_t>(axial.frequencies.size())),
                          temperature);
}

ClosedFormMobility p_mobile_closed(double x) {
  if (!(x > 0.0)) throw Error(ErrorKind::config, "p_mobile_closed needs x > 0");
  ClosedFormMobility out;
  if (std::isinf(x)) return out;
  double v;
  if (x < 20.0) {
    v = (2.0 * std::sinh(x) - 1.0) / std::expm1(x);
  } else {
    // Same expression divided through by e^x, which would otherwise overflow.
    const double e1 = std::exp(-x);
    v = (1.0 - e1 - e1 * e1) / (1.0 - e1);
  }
  out.value = std::clamp(v, 0.0, 1.0);
  out.clamped = out.value != v;
  return out;
}

double fit_nu(std::span<const double> frequencies) {
  if (frequencies.size() < 3) throw Error(ErrorKind::degenerate_fit, "fit_nu needs at least three modes");
  const auto k = static_cast<double>(frequencies.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t m = 0; m < frequencies.size(); ++m) {
    const double x = std::log(static_cast<double>(m + 1));
    const double y = std::log(frequencies[m] / frequencies[0]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

double fit_nu(const ModeTable& axial) {
  return fit_nu(std::span<const double>(axial.frequencies.data(), static_cast<std::size_t>(axial.frequencies.size())));
}

}  // namespace bipolaron
