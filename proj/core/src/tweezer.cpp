#include "bipolaron/tweezer.hpp"

#include "bipolaron/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bipolaron {

SpinConfig SpinConfig::pair_at(int ion_count, int site) {
  SpinConfig c(ion_count);
  c.set(site, SiteState::pair);
  return c;
}

SpinConfig SpinConfig::up_down(int ion_count, int up_site, int down_site) {
  SpinConfig c(ion_count);
  c.set(up_site, SiteState::up);
  c.set(down_site, SiteState::down);
  return c;
}

int SpinConfig::particle_number() const {
  int n = 0;
  for (auto s : states_) n += bipolaron::particle_number(s);
  return n;
}

int SpinConfig::twice_spin() const {
  int s2 = 0;
  for (auto s : states_) s2 += bipolaron::twice_spin(s);
  return s2;
}

std::string SpinConfig::to_string() const {
  std::string out;
  out.reserve(states_.size());
  for (auto s : states_) out.push_back(static_cast<char>('0' + static_cast<int>(s)));
  return out;
}

TweezerSettings TweezerSettings::off(int ion_count) {
  TweezerSettings s;
  s.signed_curvature = Eigen::MatrixXd::Zero(ion_count, kStatesPerSite);
  s.site_weights.assign(static_cast<std::size_t>(ion_count), 1.0);
  return s;
}

TweezerSettings TweezerSettings::from_frequencies(
    const std::array<double, kStatesPerSite>& signed_frequency, std::vector<double> weights) {
  if (weights.empty()) throw Error(ErrorKind::config, "tweezer weights must not be empty");
  const double wmax = *std::max_element(weights.begin(), weights.end());
  for (double w : weights) {
    if (!(w > 0.0) || w > 1.0 || !std::isfinite(w)) {
      throw Error(ErrorKind::config, "tweezer site weights must lie in (0, 1]");
    }
  }
  if (std::abs(wmax - 1.0) > 1e-12) {
    throw Error(ErrorKind::config, "tweezer site weights must have maximum 1");
  }
  TweezerSettings s;
  const auto n = static_cast<Eigen::Index>(weights.size());
  s.signed_curvature.resize(n, kStatesPerSite);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (int k = 0; k < kStatesPerSite; ++k) {
      const double v = signed_frequency[static_cast<std::size_t>(k)];
      s.signed_curvature(i, k) = weights[static_cast<std::size_t>(i)] * std::copysign(v * v, v);
    }
  }
  s.site_weights = std::move(weights);
  s.construction = Construction::explicit_values;
  return s;
}

std::vector<std::string> TweezerSettings::validate(double axial_frequency) const {
  std::vector<std::string> warnings;
  const double w2 = axial_frequency * axial_frequency;
  const double ratio = signed_curvature.size() == 0 ? 0.0 : signed_curvature.cwiseAbs().maxCoeff() / w2;
  if (ratio > 0.5) {
    std::ostringstream msg;
    msg << "tweezer curvature is " << ratio << " of wz^2; perturbative picture invalid above 0.5";
    throw Error(ErrorKind::curvature_too_large, msg.str());
  }
  if (ratio > 0.1) {
    std::ostringstream msg;
    msg << "tweezer curvature is " << ratio << " of wz^2 (above 10%)";
    warnings.push_back(msg.str());
  }
  return warnings;
}

Eigen::VectorXd state_curvatures(const TweezerSettings& settings, const SpinConfig& config) {
  if (settings.ion_count() != config.size()) {
    throw Error(ErrorKind::dimension_mismatch, "tweezer settings and spin configuration sizes differ");
  }
  Eigen::VectorXd o(config.size());
  for (int i = 0; i < config.size(); ++i) {
    o[i] = settings.signed_curvature(i, static_cast<int>(config[i]));
  }
  return o;
}

PerturbedSpectrum perturbative_frequencies(const ModeTable& modes, const Eigen::VectorXd& curvature) {
  if (curvature.size() != modes.size()) {
    throw Error(ErrorKind::dimension_mismatch, "curvature vector length differs from mode count");
  }
  PerturbedSpectrum out;
  out.method = Method::perturbative;
  out.frequencies.resize(modes.size());
  out.matched_index.resize(static_cast<std::size_t>(modes.size()));
  for (int m = 0; m < modes.size(); ++m) {
    const double shift = modes.vectors.col(m).cwiseAbs2().dot(curvature);
    const double w2 = modes.frequencies[m] * modes.frequencies[m] + shift;
    if (!(w2 > 0.0)) {
      std::ostringstream msg;
      msg << "mode " << m << " squared frequency " << w2 << " <= 0";
      throw Error(ErrorKind::mode_collapse, msg.str());
    }
    out.frequencies[m] = std::sqrt(w2);
    out.matched_index[static_cast<std::size_t>(m)] = m;
  }
  return out;
}

PerturbedSpectrum first_order_frequencies(const ModeTable& modes, const Eigen::VectorXd& curvature) {
  if (curvature.size() != modes.size()) {
    throw Error(ErrorKind::dimension_mismatch, "curvature vector length differs from mode count");
  }
  PerturbedSpectrum out;
  out.method = Method::first_order;
  out.frequencies.resize(modes.size());
  out.matched_index.resize(static_cast<std::size_t>(modes.size()));
  for (int m = 0; m < modes.size(); ++m) {
    const double shift = modes.vectors.col(m).cwiseAbs2().dot(curvature);
    out.frequencies[m] = modes.frequencies[m] + shift / (2.0 * modes.frequencies[m]);
    out.matched_index[static_cast<std::size_t>(m)] = m;
  }
  return out;
}

PerturbedSpectrum exact_frequencies(const ModeTable& axial, const Eigen::VectorXd& curvature) {
  const int n = axial.size();
  if (curvature.size() != n) {
    throw Error(ErrorKind::dimension_mismatch, "curvature vector length differs from mode count");
  }
  PerturbedSpectrum out;
  out.method = Method::exact;
  out.matched_index.resize(static_cast<std::size_t>(n));

  if (curvature.isZero(0.0)) {
    out.frequencies = axial.frequencies;
    for (int m = 0; m < n; ++m) out.matched_index[static_cast<std::size_t>(m)] = m;
    return out;
  }

  const double unit2 = axial.unit_frequency * axial.unit_frequency;
  Eigen::MatrixXd h = axial.hessian;
  h.diagonal() += curvature / unit2;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success || !(solver.eigenvalues().minCoeff() > 0.0)) {
    throw Error(ErrorKind::not_positive_definite,
                "tweezer-augmented Hessian is not positive definite (anti-confinement too strong)");
  }
  const Eigen::VectorXd sorted = solver.eigenvalues().cwiseSqrt() * axial.unit_frequency;
  const Eigen::MatrixXd overlap = (axial.vectors.transpose() * solver.eigenvectors()).cwiseAbs();

  bool sorted_ok = true;
  for (int m = 0; m < n; ++m) sorted_ok = sorted_ok && overlap(m, m) > 0.9;

  if (sorted_ok) {
    for (int m = 0; m < n; ++m) out.matched_index[static_cast<std::size_t>(m)] = m;
  } else {
    // Greedy: repeatedly take the globally largest remaining overlap.
    std::vector<bool> row_used(static_cast<std::size_t>(n)), col_used(static_cast<std::size_t>(n));
    for (int step = 0; step < n; ++step) {
      double best = -1.0;
      int bi = 0, bj = 0;
      for (int i = 0; i < n; ++i) {
        if (row_used[static_cast<std::size_t>(i)]) continue;
        for (int j = 0; j < n; ++j) {
          if (col_used[static_cast<std::size_t>(j)]) continue;
          if (overlap(i, j) > best) {
            best = overlap(i, j);
            bi = i;
            bj = j;
          }
        }
      }
      row_used[static_cast<std::size_t>(bi)] = true;
      col_used[static_cast<std::size_t>(bj)] = true;
      out.matched_index[static_cast<std::size_t>(bi)] = bj;
    }
  }
  out.frequencies.resize(n);
  for (int m = 0; m < n; ++m) out.frequencies[m] = sorted[out.matched_index[static_cast<std::size_t>(m)]];
  return out;
}

Eigen::VectorXd inverse_frequency_participation(const ModeTable& axial) {
  return axial.vectors.cwiseAbs2() * axial.frequencies.cwiseInverse();
}

TweezerSettings calibrate(const ModeTable& axial, double g, double gamma) {
  const Eigen::VectorXd s = inverse_frequency_participation(axial);
  const int n = axial.size();
  TweezerSettings out;
  out.signed_curvature = Eigen::MatrixXd::Zero(n, kStatesPerSite);
  out.site_weights.resize(static_cast<std::size_t>(n));
  const double smin = s.minCoeff();
  for (int i = 0; i < n; ++i) {
    out.signed_curvature(i, 1) = 4.0 * g / s[i];
    out.signed_curvature(i, 2) = 4.0 * g / s[i];
    out.signed_curvature(i, 3) = 4.0 * gamma / s[i];
    out.site_weights[static_cast<std::size_t>(i)] = smin / s[i];
  }
  out.g = g;
  out.gamma = gamma;
  out.construction = Construction::calibrated;
  return out;
}

double calibration_target_for_peak(const ModeTable& axial, double signed_peak_frequency) {
  const double v = signed_peak_frequency;
  return std::copysign(v * v, v) * inverse_frequency_participation(axial).minCoeff() / 4.0;
}

Eigen::VectorXd frequency_shifts(const ModeTable& axial, const TweezerSettings& settings,
                                 const SpinConfig& config, Method method) {
  const Eigen::VectorXd o = state_curvatures(settings, config);
  if (method == Method::first_order) {
    // Returned directly so the calibration identity holds without cancellation.
    return (axial.vectors.cwiseAbs2().transpose() * o).cwiseQuotient(2.0 * axial.frequencies);
  }
  const PerturbedSpectrum spec =
      method == Method::exact ? exact_frequencies(axial, o) : perturbative_frequencies(axial, o);
  return spec.frequencies - axial.frequencies;
}

double zero_point_energy(const Eigen::VectorXd& shifts, std::span<const int> fock) {
  if (!fock.empty() && static_cast<Eigen::Index>(fock.size()) != shifts.size()) {
    throw Error(ErrorKind::dimension_mismatch, "Fock vector length differs from mode count");
  }
  double e = 0.0;
  for (Eigen::Index m = 0; m < shifts.size(); ++m) {
    const int n = fock.empty() ? 0 : fock[static_cast<std::size_t>(m)];
    if (n < 0) throw Error(ErrorKind::config, "phonon occupations must be non-negative");
    e += shifts[m] * (n + 0.5);
  }
  return e;
}

double config_energy(const ModeTable& axial, const TweezerSettings& settings, const SpinConfig& config,
                     std::span<const int> fock, Method method) {
  return zero_point_energy(frequency_shifts(axial, settings, config, method), fock);
}

Eigen::MatrixXd b_matrix(const ModeTable& axial, const TweezerSettings& settings, Method method) {
  const int n = axial.size();
  const double reference = config_energy(axial, settings, SpinConfig(n), {}, method);
  Eigen::MatrixXd b(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const SpinConfig c = i == j ? SpinConfig::pair_at(n, i) : SpinConfig::up_down(n, i, j);
      b(i, j) = config_energy(axial, settings, c, {}, method) - reference;
    }
  }
  return b;
}

double gs_gap(const TweezerSettings& settings) { return 2.0 * settings.g - settings.gamma; }

}  // namespace bipolaron
