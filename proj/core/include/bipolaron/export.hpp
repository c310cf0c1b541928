#pragma once

// CSV renderings of the core results. Numbers use 17 significant digits and a
// fixed column/row order so identical inputs produce identical bytes.

#include "bipolaron/coupling.hpp"
#include "bipolaron/crystal.hpp"
#include "bipolaron/dynamics.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace bipolaron {

std::string format_number(double value);

class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(const std::vector<double>& values);
  std::size_t columns() const { return header_.size(); }
  std::string str() const;

private:
  std::vector<std::string> header_;
  std::string body_;
};

/// ion, u, z_m
std::string positions_csv(const EquilibriumSolution& eq);

/// mode, frequency_rad_s, frequency_MHz, b_ion_1..N (row per mode).
std::string modes_csv(const ModeTable& modes);

/// Square matrix, one row per site, columns site_1..N, values multiplied by `scale`.
std::string matrix_csv(const Eigen::MatrixXd& m, double scale = 1.0);

/// site, weight, then one column per state with the signed tweezer frequency in kHz.
std::string weights_csv(const TweezerSettings& settings);

/// index, eigenvalue_Hz, pair_character; eigenvalues relative to the lowest.
std::string spectrum_csv(const Eigen::VectorXd& values_rad_s, const Eigen::VectorXd& pair_character);

/// time_ms, P_site_1..N, P_total, sigma_sd.
std::string trajectory_csv(const std::vector<double>& times, const Observables& obs);

}  // namespace bipolaron
