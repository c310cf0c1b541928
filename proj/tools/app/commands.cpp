#include "commands.hpp"

#include <Eigen/Core>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <system_error>

#ifndef BIPOLARON_VERSION
#define BIPOLARON_VERSION "0.0.0"
#endif

namespace bipolaron::app {

using nlohmann::json;

namespace {

constexpr double kMicroKelvin = 1e-6;
constexpr double kHbarOverKb = codata.hbar / codata.boltzmann;

double hz(double rad_s) { return rad_s / two_pi; }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string temperature_tag(double t_uk) { return "T" + format_number(t_uk) + "uK"; }

json vector_json(const Eigen::VectorXd& v, double scale = 1.0) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v[k] * scale);
  return out;
}

json matrix_json(const Eigen::MatrixXd& m, double scale = 1.0) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(vector_json(m.row(i).transpose(), scale));
  return out;
}

json modes_json(const ModeTable& modes) {
  json out;
  out["axis"] = modes.axis == Axis::axial ? "axial" : "transverse";
  out["frequencies_rad_s"] = vector_json(modes.frequencies);
  out["frequencies_MHz"] = vector_json(modes.frequencies, 1.0 / two_pi / 1e6);
  // one row per mode: amplitude on each ion
  out["eigenvectors"] = matrix_json(modes.vectors.transpose());
  return out;
}

const char* method_label(Method m) {
  switch (m) {
    case Method::exact: return "exact";
    case Method::perturbative: return "perturbative";
    case Method::first_order: return "first_order";
  }
  return "exact";
}

EnsembleOptions ensemble_options(const RunConfig& c) {
  EnsembleOptions o;
  o.mode = c.thermal.mode;
  o.epsilon = c.thermal.epsilon;
  o.max_configurations = c.thermal.max_configurations;
  o.seed = c.thermal.seed;
  o.sample_count = c.thermal.sample_count;
  return o;
}

struct CouplingContext {
  JMatrix couplings;
  SectorBasis basis;
};

CouplingContext couplings_for(const Pipeline& p) {
  const DriveParams drive = p.config.drive_params(p.config.trap);
  return {j_matrix(p.transverse, drive, p.config.trap.mass_kg()), build_basis(p.config.trap.ion_count, 2, 0)};
}

struct SectorSpectrum {
  Spectrum spec;
  Eigen::VectorXd character;
};

SectorSpectrum sector_spectrum(const Pipeline& p, const CouplingContext& ctx, const TweezerSettings& settings) {
  const auto diag = diagonal_energies(ctx.basis, p.axial, settings, {}, p.config.tweezer.method);
  const HamiltonianMatrix h = assemble(ctx.basis, ctx.couplings.values, diag, "sector n=2 Sz=0");
  SectorSpectrum out;
  out.spec = spectrum(h, true);
  out.character = pair_character(ctx.basis, out.spec);
  return out;
}

json spectrum_summary(const SectorSpectrum& s, int ion_count) {
  const Eigen::VectorXd& e = s.spec.values;
  const Eigen::Index n = ion_count;
  json out;
  out["dimension"] = e.size();
  if (e.size() > n) {
    out["gap_Hz"] = hz(e[n] - e[n - 1]);
    out["mean_spacing_Hz"] = hz((e[e.size() - 1] - e[0]) / static_cast<double>(e.size() - 1));
    out["min_pair_character_lowest_N"] = s.character.head(n).minCoeff();
  }
  return out;
}

ThermalObservables thermal_run(const Pipeline& p, const CouplingContext& ctx, const TweezerSettings& settings,
                               double t_uk, const TimeGrid& grid, const RunOptions& options) {
  const ThermalProblem problem{p.axial, settings, ctx.couplings.values, ctx.basis,
                               p.config.dynamics.initial_pair_site - 1, p.config.tweezer.method};
  return thermal_dynamics(problem, t_uk * kMicroKelvin, grid, ensemble_options(p.config), options.threads);
}

using Outputs = std::vector<OutputFile>;

void add(Outputs& out, const RunConfig& c, std::string name, std::string contents, bool is_json) {
  if (is_json ? c.output.json : c.output.csv) out.push_back({std::move(name), std::move(contents)});
}

Outputs cmd_modes(const Pipeline& p, const RunOptions&) {
  Outputs out;
  const auto& c = p.config;
  const ModeTable tx = transverse_modes(c.trap, p.equilibrium, c.trap.transverse_x);
  const ModeTable ty = transverse_modes(c.trap, p.equilibrium, c.trap.transverse_y);
  add(out, c, "positions.csv", positions_csv(p.equilibrium), false);
  add(out, c, "modes_axial.csv", modes_csv(p.axial), false);
  add(out, c, "modes_transverse_x.csv", modes_csv(tx), false);
  add(out, c, "modes_transverse_y.csv", modes_csv(ty), false);
  json j;
  j["length_scale_m"] = p.equilibrium.length_scale;
  j["positions_dimensionless"] = p.equilibrium.dimensionless;
  j["positions_m"] = p.equilibrium.positions();
  j["newton_residual"] = p.equilibrium.residual_norm;
  j["newton_iterations"] = p.equilibrium.iterations;
  j["axial"] = modes_json(p.axial);
  j["transverse_x"] = modes_json(tx);
  j["transverse_y"] = modes_json(ty);
  add(out, c, "modes.json", dump(j), true);
  return out;
}

Outputs cmd_bmatrix(const Pipeline& p, const RunOptions&) {
  Outputs out;
  const auto& c = p.config;
  const Eigen::MatrixXd b = b_matrix(p.axial, p.settings, c.tweezer.method);
  add(out, c, "bmatrix.csv", matrix_csv(b, 1.0 / two_pi), false);
  add(out, c, "weights.csv", weights_csv(p.settings), false);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      if (i == j) continue;
      lo = std::min(lo, b(i, j));
      hi = std::max(hi, b(i, j));
    }
  }
  json j;
  j["method"] = method_label(c.tweezer.method);
  j["g_Hz"] = hz(p.settings.g);
  j["gamma_Hz"] = hz(p.settings.gamma);
  j["binding_gap_Hz"] = hz(gs_gap(p.settings));
  j["site_weights"] = p.settings.site_weights;
  j["B_Hz"] = matrix_json(b, 1.0 / two_pi);
  j["diagonal_Hz"] = vector_json(b.diagonal(), 1.0 / two_pi);
  if (b.rows() > 1 && lo != 0.0) {
    j["offdiagonal_min_Hz"] = hz(lo);
    j["offdiagonal_max_Hz"] = hz(hi);
    j["offdiagonal_variation"] = hi / lo - 1.0;
  }
  add(out, c, "bmatrix.json", dump(j), true);
  return out;
}

Outputs cmd_jmatrix(const Pipeline& p, const RunOptions&) {
  Outputs out;
  const auto& c = p.config;
  const DriveParams drive = c.drive_params(c.trap);
  const JMatrix jm = j_matrix(p.transverse, drive, c.trap.mass_kg());
  add(out, c, "jmatrix.csv", matrix_csv(jm.values, 1.0 / two_pi), false);
  json j;
  j["J_Hz"] = matrix_json(jm.values, 1.0 / two_pi);
  j["max_abs_J_Hz"] = hz(jm.values.cwiseAbs().maxCoeff());
  j["lamb_dicke"] = vector_json(jm.lamb_dicke);
  j["transverse_frequencies_MHz"] = vector_json(p.transverse.frequencies, 1.0 / two_pi / 1e6);
  j["wavenumber_per_m"] = drive.wavenumber;
  if (jm.fit.pairs_used > 0) {
    j["alpha"] = jm.fit.alpha;
    j["fit_amplitude_Hz"] = hz(jm.fit.amplitude);
    j["fit_residual_Hz"] = hz(jm.fit.residual);
    j["fit_pairs"] = jm.fit.pairs_used;
  }
  add(out, c, "jmatrix.json", dump(j), true);
  return out;
}

Outputs cmd_spectrum(const Pipeline& p, const RunOptions&) {
  Outputs out;
  const auto& c = p.config;
  const CouplingContext ctx = couplings_for(p);
  const SectorSpectrum on = sector_spectrum(p, ctx, p.settings);
  const SectorSpectrum off = sector_spectrum(p, ctx, TweezerSettings::off(c.trap.ion_count));
  add(out, c, "spectrum_on.csv", spectrum_csv(on.spec.values, on.character), false);
  add(out, c, "spectrum_off.csv", spectrum_csv(off.spec.values, off.character), false);
  json j;
  j["binding_gap_Hz"] = hz(gs_gap(p.settings));
  j["tweezers_on"] = spectrum_summary(on, c.trap.ion_count);
  j["tweezers_off"] = spectrum_summary(off, c.trap.ion_count);
  j["tweezers_on"]["eigenvalues_Hz"] = vector_json(on.spec.values, 1.0 / two_pi);
  j["tweezers_off"]["eigenvalues_Hz"] = vector_json(off.spec.values, 1.0 / two_pi);
  add(out, c, "spectrum.json", dump(j), true);
  return out;
}

json trajectory_summary(const ThermalObservables& r) {
  const Observables& m = r.mean;
  const Eigen::Index last = m.total.size() - 1;
  json j;
  j["members"] = r.members;
  j["captured_mass"] = r.captured_mass;
  j["sampled"] = r.sampled;
  j["min_P_total"] = m.total.minCoeff();
  j["final_P_total"] = m.total[last];
  j["final_sigma_sd"] = m.spread[last];
  j["final_sigma_sd_error"] = r.error.spread[last];
  return j;
}

Outputs cmd_evolve(const Pipeline& p, const RunOptions& options) {
  Outputs out;
  const auto& c = p.config;
  const CouplingContext ctx = couplings_for(p);
  const TimeGrid grid = TimeGrid::uniform(c.dynamics.t_max_ms * 1e-3, c.dynamics.n_points);
  json j;
  j["initial_pair_site"] = c.dynamics.initial_pair_site;
  j["runs"] = json::array();
  for (double t_uk : c.dynamics.temperatures_uk) {
    const ThermalObservables r = thermal_run(p, ctx, p.settings, t_uk, grid, options);
    const std::string tag = temperature_tag(t_uk);
    add(out, c, "trajectory_" + tag + ".csv", trajectory_csv(grid.times, r.mean), false);
    if (t_uk > 0.0) add(out, c, "trajectory_" + tag + "_error.csv", trajectory_csv(grid.times, r.error), false);
    json s = trajectory_summary(r);
    s["T_uK"] = t_uk;
    s["nbar_com"] = mean_occupation(p.axial.frequencies[0], t_uk * kMicroKelvin);
    s["tweezers"] = c.tweezer.enabled;
    j["runs"].push_back(s);
  }
  const ThermalObservables off =
      thermal_run(p, ctx, TweezerSettings::off(c.trap.ion_count), 0.0, grid, options);
  add(out, c, "trajectory_tweezers_off.csv", trajectory_csv(grid.times, off.mean), false);
  json s = trajectory_summary(off);
  s["T_uK"] = 0.0;
  s["tweezers"] = false;
  j["runs"].push_back(s);
  add(out, c, "evolve.json", dump(j), true);
  return out;
}

Outputs cmd_sweep(const Pipeline& p, const RunOptions& options) {
  Outputs out;
  const auto& c = p.config;
  const CouplingContext ctx = couplings_for(p);
  std::vector<double> seconds;
  for (double ms : c.thermal.snapshot_ms) seconds.push_back(ms * 1e-3);
  const TimeGrid grid = TimeGrid::explicit_times(seconds);

  std::vector<std::string> header{"T_uK", "nbar_com"};
  for (double ms : c.thermal.snapshot_ms) header.push_back("sigma_sd_" + format_number(ms) + "ms");
  for (double ms : c.thermal.snapshot_ms) header.push_back("sigma_sd_err_" + format_number(ms) + "ms");
  for (double ms : c.thermal.snapshot_ms) header.push_back("P_total_" + format_number(ms) + "ms");
  for (const char* h : {"p_mobile_product", "p_mobile_closed", "members", "captured_mass", "sampled"}) {
    header.emplace_back(h);
  }
  CsvTable table(header);
  json j;
  j["snapshot_ms"] = c.thermal.snapshot_ms;
  j["rows"] = json::array();
  for (double t_uk : c.thermal.temperatures_uk) {
    const double t = t_uk * kMicroKelvin;
    const ThermalObservables r = thermal_run(p, ctx, p.settings, t_uk, grid, options);
    const double x = t > 0.0 ? kHbarOverKb * p.axial.frequencies[0] / t : std::numeric_limits<double>::infinity();
    const double nbar = mean_occupation(p.axial.frequencies[0], t);
    const double product = p_mobile_product(p.axial, t);
    const double closed = p_mobile_closed(x).value;
    std::vector<double> row{t_uk, nbar};
    for (Eigen::Index k = 0; k < r.mean.spread.size(); ++k) row.push_back(r.mean.spread[k]);
    for (Eigen::Index k = 0; k < r.error.spread.size(); ++k) row.push_back(r.error.spread[k]);
    for (Eigen::Index k = 0; k < r.mean.total.size(); ++k) row.push_back(r.mean.total[k]);
    row.insert(row.end(), {product, closed, static_cast<double>(r.members), r.captured_mass, r.sampled ? 1.0 : 0.0});
    table.add_row(row);
    j["rows"].push_back({{"T_uK", t_uk},
                         {"nbar_com", nbar},
                         {"sigma_sd", vector_json(r.mean.spread)},
                         {"sigma_sd_error", vector_json(r.error.spread)},
                         {"P_total", vector_json(r.mean.total)},
                         {"p_mobile_product", product},
                         {"p_mobile_closed", closed},
                         {"members", r.members},
                         {"captured_mass", r.captured_mass},
                         {"sampled", r.sampled}});
  }
  add(out, c, "sweep.csv", table.str(), false);
  add(out, c, "sweep.json", dump(j), true);
  return out;
}

Outputs cmd_mobility(const Pipeline& p, const RunOptions&) {
  Outputs out;
  const auto& c = p.config;
  std::vector<ModeTable> chains;
  for (int n : c.thermal.ion_counts) {
    TrapConfig trap = c.trap;
    trap.ion_count = n;
    chains.push_back(axial_modes(trap, solve_equilibrium(trap)));
  }
  std::vector<std::string> header{"T_uK", "x", "p_mobile_closed", "closed_clamped"};
  for (int n : c.thermal.ion_counts) header.push_back("p_mobile_N" + std::to_string(n));
  CsvTable table(header);
  json j;
  j["nu"] = json::object();
  for (std::size_t k = 0; k < chains.size(); ++k) {
    j["nu"][std::to_string(c.thermal.ion_counts[k])] = fit_nu(chains[k]);
  }
  j["rows"] = json::array();
  for (double t_uk : c.thermal.temperatures_uk) {
    const double t = t_uk * kMicroKelvin;
    const double x = t > 0.0 ? kHbarOverKb * c.trap.axial_frequency / t : std::numeric_limits<double>::infinity();
    const ClosedFormMobility closed = p_mobile_closed(x);
    std::vector<double> row{t_uk, x, closed.value, closed.clamped ? 1.0 : 0.0};
    json products = json::object();
    for (std::size_t k = 0; k < chains.size(); ++k) {
      const double v = p_mobile_product(chains[k], t);
      row.push_back(v);
      products[std::to_string(c.thermal.ion_counts[k])] = v;
    }
    table.add_row(row);
    json r{{"T_uK", t_uk}, {"p_mobile_closed", closed.value}, {"closed_clamped", closed.clamped},
           {"p_mobile_product", products}};
    if (std::isfinite(x)) r["x"] = x;
    j["rows"].push_back(r);
  }
  add(out, c, "mobility.csv", table.str(), false);
  add(out, c, "mobility.json", dump(j), true);
  return out;
}

using Command = std::function<Outputs(const Pipeline&, const RunOptions&)>;

const std::map<std::string, Command>& registry() {
  static const std::map<std::string, Command> commands{
      {"modes", cmd_modes},     {"bmatrix", cmd_bmatrix}, {"jmatrix", cmd_jmatrix}, {"spectrum", cmd_spectrum},
      {"evolve", cmd_evolve},   {"sweep", cmd_sweep},     {"mobility", cmd_mobility},
  };
  return commands;
}

std::string manifest(const std::string& command, const RunConfig& config, const Outputs& files) {
  json j;
  j["tool"] = "bipolaron";
  j["version"] = BIPOLARON_VERSION;
  j["command"] = command;
  j["libraries"] = {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                  std::to_string(EIGEN_MINOR_VERSION)},
                    {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                          std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                          std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
  j["seed"] = config.thermal.seed;
  j["config"] = to_json(config);
  j["config"]["output"].erase("directory");
  j["files"] = json::array();
  for (const auto& f : files) {
    j["files"].push_back({{"name", f.name}, {"bytes", f.contents.size()}, {"fnv1a64", hex(fnv1a(f.contents))}});
  }
  return dump(j);
}

}  // namespace

Pipeline build_pipeline(const RunConfig& config) {
  Pipeline p;
  p.config = config;
  const TrapConfig& trap = config.trap;
  p.equilibrium = solve_equilibrium(trap);
  p.axial = axial_modes(trap, p.equilibrium);
  p.transverse = transverse_modes(trap, p.equilibrium, config.transverse_frequency());
  const int n = trap.ion_count;
  const TweezerConfig& tw = config.tweezer;
  if (!tw.enabled) {
    p.settings = TweezerSettings::off(n);
  } else if (tw.mode == TweezerConfig::Mode::explicit_values) {
    std::array<double, kStatesPerSite> v{};
    for (int k = 0; k < kStatesPerSite; ++k) v[static_cast<std::size_t>(k)] = two_pi * 1e3 * tw.varpi_khz[static_cast<std::size_t>(k)];
    p.settings = TweezerSettings::from_frequencies(v, tw.weights);
  } else if (tw.g_hz) {
    p.settings = calibrate(p.axial, two_pi * *tw.g_hz, two_pi * *tw.gamma_hz);
  } else {
    const double g = calibration_target_for_peak(p.axial, two_pi * 1e3 * *tw.peak_single_khz);
    const double gamma = calibration_target_for_peak(p.axial, two_pi * 1e3 * *tw.peak_pair_khz);
    p.settings = calibrate(p.axial, g, gamma);
  }
  p.warnings = p.settings.validate(trap.axial_frequency);
  return p;
}

std::vector<std::string> command_names() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : registry()) names.push_back(name);
  return names;
}

std::vector<OutputFile> run_command(const std::string& command, const RunConfig& config, const RunOptions& options) {
  const auto it = registry().find(command);
  if (it == registry().end()) throw Error(ErrorKind::config, "unknown command " + command);
  const Pipeline p = build_pipeline(config);
  for (const auto& w : p.warnings) std::cerr << "warning: " << w << "\n";
  Outputs files = it->second(p, options);
  files.push_back({"manifest.json", manifest(command, config, files)});
  return files;
}

void write_outputs(const std::filesystem::path& directory, const std::vector<OutputFile>& files) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw Error(ErrorKind::config, "cannot create output directory " + directory.string() + ": " + ec.message());
  std::vector<fs::path> staged;
  auto cleanup = [&] {
    for (const auto& s : staged) fs::remove(s, ec);
  };
  for (const auto& f : files) {
    const fs::path tmp = directory / (f.name + ".tmp");
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    staged.push_back(tmp);
    out.write(f.contents.data(), static_cast<std::streamsize>(f.contents.size()));
    out.close();
    if (!out) {
      cleanup();
      throw Error(ErrorKind::config, "cannot write " + tmp.string());
    }
  }
  for (std::size_t k = 0; k < files.size(); ++k) {
    fs::rename(staged[k], directory / files[k].name, ec);
    if (ec) {
      cleanup();
      throw Error(ErrorKind::config, "cannot rename " + staged[k].string() + ": " + ec.message());
    }
  }
}

}  // namespace bipolaron::app
