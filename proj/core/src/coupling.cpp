#include "bipolaron/coupling.hpp"

#include "bipolaron/constants.hpp"
#include "bipolaron/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bipolaron {

void DriveParams::validate() const {
  for (double v : {rabi_frequency, modulation, wavenumber}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorKind::config, "drive parameters must be finite and non-negative");
    }
  }
  if (!(modulation > 0.0)) throw Error(ErrorKind::config, "drive modulation frequency must be positive");
  if (detunings) {
    const auto [d1, d2, d3] = *detunings;
    if (d1 == d2) throw Error(ErrorKind::config, "detunings must satisfy Delta1 != Delta2");
    if (d3 == 0.0) throw Error(ErrorKind::config, "detunings must satisfy Delta3 != 0");
    if (std::abs(d1 + d2 - d3) > 1e-9 * std::max({std::abs(d1), std::abs(d2), std::abs(d3)})) {
      throw Error(ErrorKind::config, "detunings must satisfy Delta1 + Delta2 = Delta3");
    }
  }
}

Eigen::VectorXd lamb_dicke(const ModeTable& transverse, double wavenumber, double mass_kg) {
  Eigen::VectorXd eta(transverse.size());
  for (int m = 0; m < transverse.size(); ++m) {
    eta[m] = wavenumber * std::sqrt(codata.hbar / (2.0 * mass_kg * transverse.frequencies[m]));
  }
  return eta;
}

JMatrix j_matrix(const ModeTable& transverse, const DriveParams& drive, double mass_kg) {
  const int n = transverse.size();
  for (int m = 0; m < n; ++m) {
    if (std::abs(drive.modulation - transverse.frequencies[m]) <= kResonanceGuard * transverse.unit_frequency) {
      std::ostringstream msg;
      msg << "modulation frequency within resonance guard of transverse mode " << m;
      throw Error(ErrorKind::resonant_drive, msg.str());
    }
  }

  JMatrix out;
  out.lamb_dicke = lamb_dicke(transverse, drive.wavenumber, mass_kg);
  Eigen::VectorXd weight(n);
  const double mu2 = drive.modulation * drive.modulation;
  for (int m = 0; m < n; ++m) {
    const double w = transverse.frequencies[m];
    weight[m] = out.lamb_dicke[m] * out.lamb_dicke[m] * w / (mu2 - w * w);
  }
  const double omega2 = drive.rabi_frequency * drive.rabi_frequency;
  out.values = omega2 * transverse.vectors * weight.asDiagonal() * transverse.vectors.transpose();
  // Exact symmetry regardless of summation order.
  out.values = 0.5 * (out.values + out.values.transpose()).eval();
  out.values.diagonal().setZero();

  if (n >= 4 && out.values.cwiseAbs().maxCoeff() > 0.0) out.fit = fit_alpha(out.values);
  return out;
}

namespace {

struct PairData {
  std::vector<double> distance;
  std::vector<double> value;
};

PairData upper_pairs(const Eigen::MatrixXd& j) {
  PairData p;
  for (Eigen::Index i = 0; i < j.rows(); ++i) {
    for (Eigen::Index k = i + 1; k < j.cols(); ++k) {
      p.distance.push_back(static_cast<double>(k - i));
      p.value.push_back(std::abs(j(i, k)));
    }
  }
  return p;
}

// For fixed alpha the optimal amplitude is linear; returns (cost, amplitude).
std::pair<double, double> projected_cost(const PairData& p, double alpha) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < p.value.size(); ++k) {
    const double basis = std::pow(p.distance[k], -alpha);
    num += p.value[k] * basis;
    den += basis * basis;
  }
  const double c = num / den;
  double cost = 0.0;
  for (std::size_t k = 0; k < p.value.size(); ++k) {
    const double r = p.value[k] - c * std::pow(p.distance[k], -alpha);
    cost += r * r;
  }
  return {cost, c};
}

PowerLawFit fit_nonlinear(const PairData& p) {
  constexpr double lo = -2.0, hi = 8.0, step = 0.05;
  double best_alpha = lo;
  double best_cost = std::numeric_limits<double>::infinity();
  for (double a = lo; a <= hi + 1e-12; a += step) {
    const double c = projected_cost(p, a).first;
    if (c < best_cost) {
      best_cost = c;
      best_alpha = a;
    }
  }
  // Golden-section refinement inside the bracketing cell.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = best_alpha - step, b = best_alpha + step;
  double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  double f1 = projected_cost(p, x1).first, f2 = projected_cost(p, x2).first;
  for (int it = 0; it < 200 && (b - a) > 1e-13; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = projected_cost(p, x1).first;
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = projected_cost(p, x2).first;
    }
  }
  PowerLawFit fit;
  fit.method = FitMethod::nonlinear_all_pairs;
  fit.alpha = 0.5 * (a + b);
  const auto [cost, amp] = projected_cost(p, fit.alpha);
  fit.amplitude = amp;
  fit.residual = std::sqrt(cost / static_cast<double>(p.value.size()));
  fit.pairs_used = static_cast<int>(p.value.size());
  return fit;
}

PowerLawFit fit_log_log(const Eigen::MatrixXd& j) {
  const Eigen::Index n = j.rows();
  std::vector<double> x, y;
  for (Eigen::Index d = 1; d < n; ++d) {
    double log_sum = 0.0;
    for (Eigen::Index i = 0; i + d < n; ++i) {
      const double v = std::abs(j(i, i + d));
      if (!(v > 0.0)) throw Error(ErrorKind::degenerate_fit, "zero coupling in log-log fit");
      log_sum += std::log(v);
    }
    x.push_back(std::log(static_cast<double>(d)));
    y.push_back(log_sum / static_cast<double>(n - d));
  }
  const auto k = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / k;
  PowerLawFit fit;
  fit.method = FitMethod::log_log_geometric;
  fit.alpha = -slope;
  fit.amplitude = std::exp(intercept);
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / k);
  fit.pairs_used = static_cast<int>(n * (n - 1) / 2);
  return fit;
}

}  // namespace

PowerLawFit fit_alpha(const Eigen::MatrixXd& couplings, FitMethod method) {
  if (couplings.rows() != couplings.cols()) {
    throw Error(ErrorKind::dimension_mismatch, "coupling matrix must be square");
  }
  if (couplings.rows() < 4) throw Error(ErrorKind::degenerate_fit, "power-law fit needs N >= 4");
  const PairData p = upper_pairs(couplings);
  double max_v = 0.0;
  for (double v : p.value) max_v = std::max(max_v, v);
  if (!(max_v > 0.0)) throw Error(ErrorKind::degenerate_fit, "all couplings are zero");
  return method == FitMethod::nonlinear_all_pairs ? fit_nonlinear(p) : fit_log_log(couplings);
}

std::array<Transition, 8> coupled_transitions() {
  using S = SiteState;
  return {{{S::vacuum, S::up},
           {S::up, S::vacuum},
           {S::vacuum, S::down},
           {S::down, S::vacuum},
           {S::up, S::pair},
           {S::pair, S::up},
           {S::down, S::pair},
           {S::pair, S::down}}};
}

std::vector<Process> resonant_processes() {
  std::vector<Process> out;
  const auto ops = coupled_transitions();
  auto delta_n = [](const Transition& t) { return particle_number(t.to) - particle_number(t.from); };
  auto delta_s = [](const Transition& t) { return twice_spin(t.to) - twice_spin(t.from); };
  for (const auto& p : ops) {
    for (const auto& q : ops) {
      if (delta_n(p) + delta_n(q) == 0 && delta_s(p) + delta_s(q) == 0) out.push_back({p, q});
    }
  }
  return out;
}

}  // namespace bipolaron
