#include "doctest.h"

#include "app/commands.hpp"
#include "app/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

using namespace bipolaron;
using namespace bipolaron::app;
using nlohmann::json;

namespace {

json reference_json() {
  std::ifstream in(std::string(BIPOLARON_CONFIG_DIR) + "/ca40_n10.json");
  std::stringstream buf;
  buf << in.rdbuf();
  return json::parse(buf.str(), nullptr, true, true);
}

const OutputFile& find(const std::vector<OutputFile>& files, const std::string& name) {
  for (const auto& f : files)
    if (f.name == name) return f;
  FAIL("missing output " << name);
  throw 0;
}

std::vector<std::vector<double>> parse_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void check_close(const std::string& actual, const std::string& fixture, double tol) {
  const auto a = parse_csv(actual);
  const auto f = parse_csv(read_file(std::string(BIPOLARON_FIXTURE_DIR) + "/" + fixture));
  REQUIRE(a.size() == f.size());
  double worst = 0.0;
  for (std::size_t r = 0; r < a.size(); ++r) {
    REQUIRE(a[r].size() == f[r].size());
    for (std::size_t c = 0; c < a[r].size(); ++c) worst = std::max(worst, std::abs(a[r][c] - f[r][c]));
  }
  CHECK(worst < tol);
}

ErrorKind parse_error_kind(const json& doc) {
  try {
    parse_config(doc);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::non_convergence;
}

}  // namespace

TEST_CASE("the example configuration parses with the reference values") {
  const RunConfig c = parse_config(reference_json());
  CHECK(c.trap.ion_count == 10);
  CHECK(c.trap.axial_frequency == doctest::Approx(two_pi * 0.5e6));
  CHECK(c.drive.omega_khz == 150.0);
  CHECK(c.tweezer.peak_single_khz == 33.0);
  CHECK(c.thermal.temperatures_uk.size() == 11);
  CHECK(c.dynamics.initial_pair_site == 4);
  const RunConfig again = parse_config(to_json(c));
  CHECK(to_json(again) == to_json(c));
}

TEST_CASE("configuration errors") {
  json doc = reference_json();
  doc["trap"]["extra"] = 1;
  CHECK(parse_error_kind(doc) == ErrorKind::config);

  doc = reference_json();
  doc.erase("trap");
  CHECK(parse_error_kind(doc) == ErrorKind::config);

  doc = reference_json();
  doc["tweezer"]["g_Hz"] = 100;
  doc["tweezer"]["gamma_Hz"] = -50;
  CHECK(parse_error_kind(doc) == ErrorKind::config);

  doc = reference_json();
  doc["trap"]["N"] = 2.5;
  CHECK(parse_error_kind(doc) == ErrorKind::config);

  doc = reference_json();
  doc["dynamics"]["initial_pair_site"] = 11;
  CHECK(parse_error_kind(doc) == ErrorKind::config);

  doc = reference_json();
  doc["thermal"]["epsilon"] = 2.0;
  CHECK(parse_error_kind(doc) == ErrorKind::config);

  doc = reference_json();
  doc["drive"]["k_per_m"] = 1e7;
  CHECK(parse_error_kind(doc) == ErrorKind::config);

  CHECK_THROWS_AS(parse_config_text("{\"trap\": "), Error);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), Error);
}

TEST_CASE("explicit tweezer values are accepted") {
  json doc = reference_json();
  doc["tweezer"] = {{"mode", "explicit"}, {"varpi_kHz", {0, 30, 30, -20}}};
  const RunConfig c = parse_config(doc);
  CHECK(c.tweezer.weights.size() == 10);
  const Pipeline p = build_pipeline(c);
  CHECK(p.settings.signed_curvature(0, 1) == doctest::Approx(std::pow(two_pi * 30e3, 2)));
}

TEST_CASE("modes command for two ions") {
  json doc = reference_json();
  doc["trap"]["N"] = 2;
  doc["dynamics"]["initial_pair_site"] = 1;
  const RunConfig c = parse_config(doc);
  const auto files = run_command("modes", c, {});
  const auto pos = parse_csv(find(files, "positions.csv").contents);
  const double l = length_scale(c.trap);
  CHECK(pos[0][2] == doctest::Approx(-std::cbrt(0.25) * l).epsilon(1e-12));
  CHECK(pos[1][2] == doctest::Approx(std::cbrt(0.25) * l).epsilon(1e-12));
  const json manifest = json::parse(find(files, "manifest.json").contents);
  CHECK(manifest["command"] == "modes");
  CHECK(manifest["files"].size() == files.size() - 1);
}

TEST_CASE("reference configuration summaries") {
  const RunConfig c = parse_config(reference_json());
  const auto modes = run_command("modes", c, {});
  const auto axial = parse_csv(find(modes, "modes_axial.csv").contents);
  CHECK(axial.size() == 10);
  CHECK(axial[0][2] == doctest::Approx(0.5).epsilon(1e-12));

  const json j = json::parse(find(run_command("jmatrix", c, {}), "jmatrix.json").contents);
  CHECK(std::abs(j["alpha"].get<double>() - 1.43) < 0.05);

  const auto mob = run_command("mobility", c, {});
  const auto rows = parse_csv(find(mob, "mobility.csv").contents);
  CHECK(rows[0][0] == 0.0);
  for (std::size_t k = 2; k < rows[0].size(); ++k) {
    if (k != 3) CHECK(rows[0][k] == 1.0);
  }
  check_close(find(mob, "mobility.csv").contents, "mobility.csv", 1e-9);
}

TEST_CASE("zero-temperature evolution is pinned and starts from a full pair") {
  json doc = reference_json();
  doc["dynamics"]["T_uK"] = {0};
  const RunConfig c = parse_config(doc);
  const auto files = run_command("evolve", c, {});
  const auto on = parse_csv(find(files, "trajectory_T0uK.csv").contents);
  CHECK(on[0][11] == 1.0);
  CHECK(on[0][4] == 1.0);
  check_close(find(files, "trajectory_T0uK.csv").contents, "trajectory_T0uK.csv", 1e-9);
  check_close(find(files, "trajectory_tweezers_off.csv").contents, "trajectory_tweezers_off.csv", 1e-9);
}

TEST_CASE("repeated runs are byte identical") {
  json doc = reference_json();
  doc["thermal"]["T_uK"] = {0, 50};
  doc["thermal"]["sampler"]["count"] = 200;
  doc["dynamics"]["T_uK"] = {0};
  const RunConfig c = parse_config(doc);
  for (const auto& name : command_names()) {
    const auto a = run_command(name, c, {1});
    const auto b = run_command(name, c, {2});
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a[k].name == b[k].name);
      CHECK(a[k].contents == b[k].contents);
    }
  }
}

TEST_CASE("output formats can be restricted") {
  json doc = reference_json();
  doc["output"]["formats"] = {"json"};
  const auto files = run_command("bmatrix", parse_config(doc), {});
  for (const auto& f : files) CHECK(f.name.ends_with(".json"));
}
