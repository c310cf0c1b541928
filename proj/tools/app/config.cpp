#include "config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace bipolaron::app {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorKind::config, what); }

// Object reader that tracks consumed keys so leftovers can be rejected.
class Section {
public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail(path_ + " must be an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  const json* child(const std::string& key) {
    seen_.insert(key);
    const auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  std::optional<double> number(const std::string& key) {
    const json* v = child(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) fail(where(key) + " must be a number");
    const double d = v->get<double>();
    if (!std::isfinite(d)) fail(where(key) + " must be finite");
    return d;
  }

  double number(const std::string& key, double fallback, double lo, double hi) {
    const double d = number(key).value_or(fallback);
    if (d < lo || d > hi) {
      std::ostringstream msg;
      msg << where(key) << " = " << d << " outside [" << lo << ", " << hi << "]";
      fail(msg.str());
    }
    return d;
  }

  double required_number(const std::string& key, double lo, double hi) {
    if (!has(key)) fail(where(key) + " is required");
    return number(key, 0.0, lo, hi);
  }

  std::optional<long long> integer(const std::string& key) {
    const json* v = child(key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) fail(where(key) + " must be an integer");
    return v->get<long long>();
  }

  long long integer(const std::string& key, long long fallback, long long lo, long long hi) {
    const long long i = integer(key).value_or(fallback);
    if (i < lo || i > hi) fail(where(key) + " = " + std::to_string(i) + " out of range");
    return i;
  }

  std::optional<std::string> string(const std::string& key) {
    const json* v = child(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) fail(where(key) + " must be a string");
    return v->get<std::string>();
  }

  std::optional<bool> boolean(const std::string& key) {
    const json* v = child(key);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) fail(where(key) + " must be true or false");
    return v->get<bool>();
  }

  std::optional<std::vector<double>> numbers(const std::string& key) {
    const json* v = child(key);
    if (!v) return std::nullopt;
    if (!v->is_array()) fail(where(key) + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number() || !std::isfinite(e.get<double>())) fail(where(key) + " must contain finite numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::optional<Section> section(const std::string& key) {
    const json* v = child(key);
    if (!v) return std::nullopt;
    return Section(*v, where(key));
  }

  std::string where(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.contains(key)) fail("unknown key " + where(key));
    }
  }

private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

constexpr double kMaxFrequencyMHz = 1000.0;

TrapConfig parse_trap(Section s) {
  TrapConfig t;
  t.ion_count = static_cast<int>(s.integer("N", 0, 1, 30));
  if (!s.has("N")) fail("trap.N is required");
  t.ion_mass_amu = s.required_number("mass_amu", 1e-3, 1e4);
  t.transverse_x = two_pi * 1e6 * s.required_number("omega_x_MHz", 1e-9, kMaxFrequencyMHz);
  t.transverse_y = two_pi * 1e6 * s.required_number("omega_y_MHz", 1e-9, kMaxFrequencyMHz);
  t.axial_frequency = two_pi * 1e6 * s.required_number("omega_z_MHz", 1e-9, kMaxFrequencyMHz);
  s.finish();
  t.validate();
  return t;
}

Method parse_method(const std::string& name, const std::string& where) {
  if (name == "exact") return Method::exact;
  if (name == "perturbative") return Method::perturbative;
  if (name == "first_order") return Method::first_order;
  fail(where + " must be one of exact, perturbative, first_order");
}

std::string method_name(Method m) {
  switch (m) {
    case Method::exact: return "exact";
    case Method::perturbative: return "perturbative";
    case Method::first_order: return "first_order";
  }
  return "exact";
}

TweezerConfig parse_tweezer(Section s, int ion_count) {
  TweezerConfig t;
  const std::string mode = s.string("mode").value_or("calibrated");
  t.enabled = s.boolean("enabled").value_or(true);
  t.method = parse_method(s.string("method").value_or("exact"), s.where("method"));
  if (mode == "calibrated") {
    t.mode = TweezerConfig::Mode::calibrated;
    t.g_hz = s.number("g_Hz");
    t.gamma_hz = s.number("gamma_Hz");
    if (auto peak = s.section("peak_varpi_kHz")) {
      t.peak_single_khz = peak->required_number("single", -1e4, 1e4);
      t.peak_pair_khz = peak->required_number("pair", -1e4, 1e4);
      peak->finish();
    }
    const bool targets = t.g_hz.has_value() || t.gamma_hz.has_value();
    if (targets && t.peak_single_khz) fail("tweezer: give either g_Hz/gamma_Hz or peak_varpi_kHz, not both");
    if (targets && !(t.g_hz && t.gamma_hz)) fail("tweezer: g_Hz and gamma_Hz must be given together");
    if (!targets && !t.peak_single_khz) fail("tweezer: calibrated mode needs g_Hz/gamma_Hz or peak_varpi_kHz");
  } else if (mode == "explicit") {
    t.mode = TweezerConfig::Mode::explicit_values;
    const auto v = s.numbers("varpi_kHz");
    if (!v || v->size() != kStatesPerSite) fail("tweezer.varpi_kHz must list 4 signed frequencies (states 0,up,down,pair)");
    std::copy(v->begin(), v->end(), t.varpi_khz.begin());
    t.weights = s.numbers("weights").value_or(std::vector<double>(static_cast<std::size_t>(ion_count), 1.0));
    if (static_cast<int>(t.weights.size()) != ion_count) fail("tweezer.weights must have one entry per ion");
  } else {
    fail("tweezer.mode must be calibrated or explicit");
  }
  s.finish();
  return t;
}

DriveConfig parse_drive(Section s) {
  DriveConfig d;
  d.omega_khz = s.number("Omega_kHz", d.omega_khz, 0.0, 1e5);
  d.mu_mhz = s.number("mu_MHz", d.mu_mhz, 1e-9, kMaxFrequencyMHz);
  d.k_per_m = s.number("k_per_m");
  if (d.k_per_m && *d.k_per_m < 0.0) fail("drive.k_per_m must be non-negative");
  if (d.k_per_m && s.has("wavelength_nm")) fail("drive: give either k_per_m or wavelength_nm, not both");
  d.wavelength_nm = s.number("wavelength_nm", d.wavelength_nm, 1.0, 1e6);
  if (auto det = s.numbers("detunings_kHz")) {
    if (det->size() != 3) fail("drive.detunings_kHz must have three entries");
    d.detunings_khz = std::array<double, 3>{(*det)[0], (*det)[1], (*det)[2]};
  }
  const std::string axis = s.string("transverse_axis").value_or("x");
  if (axis != "x" && axis != "y") fail("drive.transverse_axis must be x or y");
  d.transverse_axis = axis[0];
  s.finish();
  return d;
}

std::vector<double> default_temperatures() {
  std::vector<double> t;
  for (int k = 0; k <= 10; ++k) t.push_back(5.0 * k);
  return t;
}

void check_temperatures(const std::vector<double>& t, const std::string& where) {
  for (double v : t) {
    if (v < 0.0 || v > 1e4) fail(where + " temperatures must lie in [0, 1e4] uK");
  }
}

ThermalConfig parse_thermal(std::optional<Section> s) {
  ThermalConfig t;
  t.temperatures_uk = default_temperatures();
  t.ion_counts = {10, 15, 20, 25, 30};
  t.snapshot_ms = {10.0, 30.0, 50.0};
  if (!s) return t;
  if (auto v = s->numbers("T_uK")) t.temperatures_uk = *v;
  check_temperatures(t.temperatures_uk, "thermal.T_uK");
  if (t.temperatures_uk.empty()) fail("thermal.T_uK must not be empty");
  t.epsilon = s->number("epsilon", t.epsilon, 1e-12, 0.5);
  t.max_configurations =
      static_cast<std::size_t>(s->integer("max_configurations", static_cast<long long>(t.max_configurations), 1, 100000000));
  if (auto sampler = s->section("sampler")) {
    const std::string mode = sampler->string("mode").value_or("automatic");
    if (mode == "automatic") t.mode = EnsembleMode::automatic;
    else if (mode == "enumerate") t.mode = EnsembleMode::enumerate;
    else if (mode == "sample") t.mode = EnsembleMode::sample;
    else fail("thermal.sampler.mode must be automatic, enumerate or sample");
    if (const json* seed = sampler->child("seed")) {
      if (!seed->is_number_unsigned() && !(seed->is_number_integer() && seed->get<long long>() >= 0)) {
        fail("thermal.sampler.seed must be a non-negative integer");
      }
      t.seed = seed->get<std::uint64_t>();
    }
    t.sample_count = static_cast<std::size_t>(sampler->integer("count", static_cast<long long>(t.sample_count), 1, 10000000));
    sampler->finish();
  }
  if (auto v = s->numbers("N_list")) {
    t.ion_counts.clear();
    for (double n : *v) {
      if (n != std::floor(n) || n < 1 || n > 30) fail("thermal.N_list entries must be integers in 1..30");
      t.ion_counts.push_back(static_cast<int>(n));
    }
  }
  if (auto v = s->numbers("snapshot_ms")) t.snapshot_ms = *v;
  for (std::size_t k = 0; k < t.snapshot_ms.size(); ++k) {
    if (t.snapshot_ms[k] < 0.0 || (k && t.snapshot_ms[k] <= t.snapshot_ms[k - 1])) {
      fail("thermal.snapshot_ms must be non-negative and strictly increasing");
    }
  }
  s->finish();
  return t;
}

DynamicsConfig parse_dynamics(std::optional<Section> s, int ion_count) {
  DynamicsConfig d;
  d.temperatures_uk = {0.0, 25.0};
  if (s) {
    d.initial_pair_site = static_cast<int>(s->integer("initial_pair_site", d.initial_pair_site, 1, ion_count));
    d.t_max_ms = s->number("t_max_ms", d.t_max_ms, 1e-9, 1e6);
    d.n_points = static_cast<int>(s->integer("n_points", d.n_points, 2, 1000000));
    if (auto v = s->numbers("T_uK")) d.temperatures_uk = *v;
    check_temperatures(d.temperatures_uk, "dynamics.T_uK");
    s->finish();
  }
  if (d.initial_pair_site > ion_count) fail("dynamics.initial_pair_site exceeds the ion count");
  return d;
}

OutputConfig parse_output(std::optional<Section> s) {
  OutputConfig o;
  if (!s) return o;
  if (auto dir = s->string("directory")) o.directory = *dir;
  if (const json* formats = s->child("formats")) {
    if (!formats->is_array()) fail("output.formats must be an array");
    o.csv = o.json = false;
    for (const auto& f : *formats) {
      if (f == "csv") o.csv = true;
      else if (f == "json") o.json = true;
      else fail("output.formats entries must be csv or json");
    }
  }
  s->finish();
  return o;
}

}  // namespace

DriveParams RunConfig::drive_params(const TrapConfig&) const {
  DriveParams p;
  p.rabi_frequency = two_pi * 1e3 * drive.omega_khz;
  p.modulation = two_pi * 1e6 * drive.mu_mhz;
  p.wavenumber = drive.k_per_m ? *drive.k_per_m : two_pi / (drive.wavelength_nm * 1e-9);
  if (drive.detunings_khz) {
    const auto& d = *drive.detunings_khz;
    p.detunings = std::array<double, 3>{two_pi * 1e3 * d[0], two_pi * 1e3 * d[1], two_pi * 1e3 * d[2]};
  }
  return p;
}

double RunConfig::transverse_frequency() const {
  return drive.transverse_axis == 'y' ? trap.transverse_y : trap.transverse_x;
}

RunConfig parse_config(const json& doc) {
  Section root(doc, "config");
  RunConfig c;
  auto trap = root.section("trap");
  if (!trap) fail("config.trap is required");
  c.trap = parse_trap(*trap);
  if (auto t = root.section("tweezer")) {
    c.tweezer = parse_tweezer(*t, c.trap.ion_count);
  } else {
    fail("config.tweezer is required");
  }
  if (auto d = root.section("drive")) c.drive = parse_drive(*d);
  c.thermal = parse_thermal(root.section("thermal"));
  c.dynamics = parse_dynamics(root.section("dynamics"), c.trap.ion_count);
  c.output = parse_output(root.section("output"));
  root.finish();
  c.drive_params(c.trap).validate();
  return c;
}

RunConfig parse_config_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    fail(std::string("malformed configuration: ") + e.what());
  }
  return parse_config(doc);
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot open configuration file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

json to_json(const RunConfig& c) {
  json j;
  j["trap"] = {{"N", c.trap.ion_count},
               {"mass_amu", c.trap.ion_mass_amu},
               {"omega_x_MHz", c.trap.transverse_x / two_pi / 1e6},
               {"omega_y_MHz", c.trap.transverse_y / two_pi / 1e6},
               {"omega_z_MHz", c.trap.axial_frequency / two_pi / 1e6}};
  json tw;
  tw["enabled"] = c.tweezer.enabled;
  tw["method"] = method_name(c.tweezer.method);
  if (c.tweezer.mode == TweezerConfig::Mode::calibrated) {
    tw["mode"] = "calibrated";
    if (c.tweezer.g_hz) {
      tw["g_Hz"] = *c.tweezer.g_hz;
      tw["gamma_Hz"] = *c.tweezer.gamma_hz;
    } else {
      tw["peak_varpi_kHz"] = {{"single", *c.tweezer.peak_single_khz}, {"pair", *c.tweezer.peak_pair_khz}};
    }
  } else {
    tw["mode"] = "explicit";
    tw["varpi_kHz"] = c.tweezer.varpi_khz;
    tw["weights"] = c.tweezer.weights;
  }
  j["tweezer"] = tw;
  json dr = {{"Omega_kHz", c.drive.omega_khz},
             {"mu_MHz", c.drive.mu_mhz},
             {"transverse_axis", std::string(1, c.drive.transverse_axis)}};
  if (c.drive.k_per_m) dr["k_per_m"] = *c.drive.k_per_m;
  else dr["wavelength_nm"] = c.drive.wavelength_nm;
  if (c.drive.detunings_khz) dr["detunings_kHz"] = *c.drive.detunings_khz;
  j["drive"] = dr;
  const char* mode = c.thermal.mode == EnsembleMode::automatic ? "automatic"
                     : c.thermal.mode == EnsembleMode::enumerate ? "enumerate"
                                                                 : "sample";
  j["thermal"] = {{"T_uK", c.thermal.temperatures_uk},
                  {"epsilon", c.thermal.epsilon},
                  {"max_configurations", c.thermal.max_configurations},
                  {"sampler", {{"mode", mode}, {"seed", c.thermal.seed}, {"count", c.thermal.sample_count}}},
                  {"N_list", c.thermal.ion_counts},
                  {"snapshot_ms", c.thermal.snapshot_ms}};
  j["dynamics"] = {{"initial_pair_site", c.dynamics.initial_pair_site},
                   {"t_max_ms", c.dynamics.t_max_ms},
                   {"n_points", c.dynamics.n_points},
                   {"T_uK", c.dynamics.temperatures_uk}};
  json formats = json::array();
  if (c.output.csv) formats.push_back("csv");
  if (c.output.json) formats.push_back("json");
  j["output"] = {{"directory", c.output.directory.generic_string()}, {"formats", formats}};
  return j;
}

}  // namespace bipolaron::app
