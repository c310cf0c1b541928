#include "bipolaron/export.hpp"

#include "bipolaron/constants.hpp"
#include "bipolaron/errors.hpp"

#include <cmath>
#include <cstdio>

namespace bipolaron {

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0 into 0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(const std::vector<double>& values) {
  if (values.size() != header_.size()) {
    throw Error(ErrorKind::dimension_mismatch, "CSV row width differs from header");
  }
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) body_ += ',';
    body_ += format_number(values[k]);
  }
  body_ += '\n';
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t k = 0; k < header_.size(); ++k) {
    if (k) out += ',';
    out += header_[k];
  }
  out += '\n';
  return out + body_;
}

namespace {

std::vector<std::string> numbered(const std::string& prefix, int count) {
  std::vector<std::string> out;
  for (int i = 1; i <= count; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

std::string positions_csv(const EquilibriumSolution& eq) {
  CsvTable t({"ion", "u", "z_m"});
  for (int i = 0; i < eq.ion_count(); ++i) {
    const double u = eq.dimensionless[static_cast<std::size_t>(i)];
    t.add_row({static_cast<double>(i + 1), u, u * eq.length_scale});
  }
  return t.str();
}

std::string modes_csv(const ModeTable& modes) {
  const int n = modes.size();
  CsvTable t(concat({"mode", "frequency_rad_s", "frequency_MHz"}, numbered("b_ion_", n)));
  for (int m = 0; m < n; ++m) {
    std::vector<double> row{static_cast<double>(m + 1), modes.frequencies[m], modes.frequencies[m] / two_pi / 1e6};
    for (int i = 0; i < n; ++i) row.push_back(modes.vectors(i, m));
    t.add_row(row);
  }
  return t.str();
}

std::string matrix_csv(const Eigen::MatrixXd& m, double scale) {
  CsvTable t(concat({"site"}, numbered("site_", static_cast<int>(m.cols()))));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row{static_cast<double>(i + 1)};
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j) * scale);
    t.add_row(row);
  }
  return t.str();
}

std::string weights_csv(const TweezerSettings& settings) {
  CsvTable t({"site", "weight", "varpi_0_kHz", "varpi_up_kHz", "varpi_down_kHz", "varpi_pair_kHz"});
  for (int i = 0; i < settings.ion_count(); ++i) {
    std::vector<double> row{static_cast<double>(i + 1), settings.site_weights[static_cast<std::size_t>(i)]};
    for (int k = 0; k < kStatesPerSite; ++k) {
      const double c = settings.signed_curvature(i, k);
      row.push_back(std::copysign(std::sqrt(std::abs(c)), c) / two_pi / 1e3);
    }
    t.add_row(row);
  }
  return t.str();
}

std::string spectrum_csv(const Eigen::VectorXd& values_rad_s, const Eigen::VectorXd& pair_character) {
  CsvTable t({"index", "eigenvalue_Hz", "pair_character"});
  const double ground = values_rad_s.size() ? values_rad_s[0] : 0.0;
  for (Eigen::Index k = 0; k < values_rad_s.size(); ++k) {
    t.add_row({static_cast<double>(k), (values_rad_s[k] - ground) / two_pi,
               k < pair_character.size() ? pair_character[k] : 0.0});
  }
  return t.str();
}

std::string trajectory_csv(const std::vector<double>& times, const Observables& obs) {
  const auto n = static_cast<int>(obs.pair_probability.cols());
  CsvTable t(concat(concat({"time_ms"}, numbered("P_site_", n)), {"P_total", "sigma_sd"}));
  for (std::size_t k = 0; k < times.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    std::vector<double> row{times[k] * 1e3};
    for (int i = 0; i < n; ++i) row.push_back(obs.pair_probability(r, i));
    row.push_back(obs.total[r]);
    row.push_back(obs.spread[r]);
    t.add_row(row);
  }
  return t.str();
}

}  // namespace bipolaron
