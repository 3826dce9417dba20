#pragma once

// Run configuration: flat `key = value` text with dotted key groups.
// Lengths are given in um (cavity quantities in cm), energies in peV.

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bouncer/analysis.hpp"
#include "bouncer/error.hpp"
#include "bouncer/potential.hpp"
#include "bouncer/transmission.hpp"

namespace bouncer {

enum class Scenario { Spectrum, Scan, Fit, Appendix };

inline const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::Spectrum: return "spectrum";
    case Scenario::Scan: return "scan";
    case Scenario::Fit: return "fit";
    case Scenario::Appendix: return "appendix";
  }
  return "unknown";
}

enum class PotentialKind { Box, Gravity, GravityAbsorber, Tabulated };
enum class FitTarget { Populations, Threshold };

struct PotentialConfig {
  PotentialKind kind = PotentialKind::Gravity;
  double box_width = from_um(15.0);
  double slit = from_um(15.0);
  double v0 = from_peV(1.5);
  double diffuseness = from_um(1.0);
  std::optional<double> wall;  // defaults to the slit width
  std::filesystem::path table;
  std::vector<TabulatedSample> samples;  // filled from `table`
};

/// Published numbers the appendix scenario checks its chain against.
struct AppendixReference {
  double area = 0.0173;
  double k = 0.54991 / kMetrePerCm;  // 1/m
  double delta_x = from_cm(0.0320259);
  double n_max = 0.3;
  double cavity_length = from_cm(10.0);
  double slit = from_um(15.0);
  // Simulated ground-state areas, Table 1 of the appendix comparison.
  std::vector<std::pair<double, double>> simulated_areas = {{from_um(20.0), 0.0252},
                                                            {from_um(30.0), 0.0031}};
};

struct RunConfig {
  Scenario scenario = Scenario::Spectrum;
  PhysicalConstants constants{};
  PotentialConfig potential{};
  int n_states = 4;
  GridPolicy grid{};
  std::optional<double> z_max;
  AbsorberModel absorber{from_cm(0.0320259), from_cm(10.0), ConstantDensity{0.3}};
  std::vector<double> slits = {from_um(15.0), from_um(20.0), from_um(30.0)};
  bool parallel = true;
  PopulationWeights weights = PopulationWeights::ground_state();
  FitTarget fit_target = FitTarget::Populations;
  double z0_resolution = from_um(0.01);
  std::optional<std::filesystem::path> data_path;
  std::filesystem::path out_dir = "out";
  AppendixReference appendix{};

  PotentialSpec potential_spec() const;
  ScanSetup scan_setup() const;
};

inline PotentialSpec RunConfig::potential_spec() const {
  switch (potential.kind) {
    case PotentialKind::Box: return InfiniteBox{potential.box_width};
    case PotentialKind::Gravity: return GravityFloor{};
    case PotentialKind::GravityAbsorber:
      return GravityWithAbsorber{
          potential.slit,
          WoodSaxonParams{potential.v0, potential.wall.value_or(potential.slit),
                          potential.diffuseness}};
    case PotentialKind::Tabulated: return Tabulated{potential.samples};
  }
  return GravityFloor{};
}

inline ScanSetup RunConfig::scan_setup() const {
  ScanSetup s;
  s.constants = constants;
  s.v0 = potential.v0;
  s.diffuseness = potential.diffuseness;
  s.grid = grid;
  s.z_max = z_max;
  s.parallel = parallel;
  return s;
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::optional<double> parse_double(std::string_view s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  double v = 0;
  const char* first = t.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

struct Entry {
  std::string value;
  int line;  // 0 for command-line overrides
};

// Collects every problem before failing so a user sees them all at once.
class ConfigReader {
 public:
  ConfigReader(std::map<std::string, Entry> entries, std::filesystem::path base)
      : entries_(std::move(entries)), base_(std::move(base)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::optional<std::string> text(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    used_.push_back(key);
    return it->second.value;
  }

  void number(const std::string& key, double& target, double unit = 1.0) {
    auto t = text(key);
    if (!t) return;
    if (auto v = parse_double(*t)) {
      target = *v * unit;
    } else {
      fail(key, "expected a number, got '" + *t + "'");
    }
  }

  void optional_number(const std::string& key, std::optional<double>& target, double unit = 1.0) {
    if (!has(key)) return;
    double v = 0;
    const std::size_t before = errors_.size();
    number(key, v, unit);
    if (errors_.size() == before) target = v;
  }

  void count(const std::string& key, std::size_t& target) {
    auto t = text(key);
    if (!t) return;
    auto v = parse_double(*t);
    if (!v || *v < 0 || std::floor(*v) != *v) {
      fail(key, "expected a non-negative integer, got '" + *t + "'");
      return;
    }
    target = static_cast<std::size_t>(*v);
  }

  void list(const std::string& key, std::vector<double>& target, double unit = 1.0) {
    auto t = text(key);
    if (!t) return;
    std::vector<double> out;
    for (const auto& item : split(*t, ',')) {
      auto v = parse_double(item);
      if (!v) {
        fail(key, "expected a comma-separated list of numbers, got '" + *t + "'");
        return;
      }
      out.push_back(*v * unit);
    }
    target = std::move(out);
  }

  void flag(const std::string& key, bool& target) {
    auto t = text(key);
    if (!t) return;
    if (*t == "true" || *t == "1" || *t == "yes") {
      target = true;
    } else if (*t == "false" || *t == "0" || *t == "no") {
      target = false;
    } else {
      fail(key, "expected true or false, got '" + *t + "'");
    }
  }

  std::filesystem::path path(const std::string& value) const {
    std::filesystem::path p(value);
    return p.is_absolute() ? p : base_ / p;
  }

  void fail(const std::string& key, const std::string& message) {
    auto it = entries_.find(key);
    std::string where = "config";
    if (it != entries_.end()) {
      where = it->second.line > 0 ? "line " + std::to_string(it->second.line) : "command line";
    }
    errors_.push_back(where + ": " + key + ": " + message);
  }

  void check(bool ok, const std::string& key, const std::string& message) {
    if (!ok) fail(key, message);
  }

  void reject_unknown() {
    for (const auto& [key, entry] : entries_) {
      if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
        fail(key, "unknown key");
      }
    }
  }

  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::map<std::string, Entry> entries_;
  std::filesystem::path base_;
  std::vector<std::string> used_;
  std::vector<std::string> errors_;
};

inline std::vector<TabulatedSample> read_potential_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open potential table " + path.string());
  std::vector<TabulatedSample> samples;
  std::string line;
  int lineno = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    if (header) {
      header = false;
      if (t != "z_um,V_peV") {
        throw Error(ErrorKind::Parse, path.string() + ": expected header 'z_um,V_peV'");
      }
      continue;
    }
    const auto cells = split(t, ',');
    std::optional<double> z, v;
    if (cells.size() == 2) {
      z = parse_double(cells[0]);
      v = parse_double(cells[1]);
    }
    if (!z || !v) {
      throw Error(ErrorKind::Parse,
                  path.string() + ": malformed row at line " + std::to_string(lineno));
    }
    samples.push_back({from_um(*z), from_peV(*v)});
  }
  return samples;
}

}  // namespace detail

inline Scenario parse_scenario(const std::string& name) {
  if (name == "spectrum") return Scenario::Spectrum;
  if (name == "scan") return Scenario::Scan;
  if (name == "fit") return Scenario::Fit;
  if (name == "appendix") return Scenario::Appendix;
  throw Error(ErrorKind::Validation, "unknown scenario '" + name + "'");
}

using ConfigOverrides = std::map<std::string, std::string>;

/// Parses and validates configuration text. `base` resolves relative paths;
/// `overrides` (e.g. from command-line flags) replace file entries.
inline RunConfig parse_config(std::string_view text, const std::filesystem::path& base = ".",
                              const ConfigOverrides& overrides = {}) {
  std::map<std::string, detail::Entry> entries;
  std::vector<std::string> errors;
  {
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = detail::trim(line);
      if (t.empty() || t.front() == '#') continue;
      const auto eq = t.find('=');
      if (eq == std::string::npos) {
        errors.push_back("line " + std::to_string(lineno) + ": expected 'key = value'");
        continue;
      }
      const std::string key = detail::trim(std::string_view(t).substr(0, eq));
      const std::string value = detail::trim(std::string_view(t).substr(eq + 1));
      if (key.empty()) {
        errors.push_back("line " + std::to_string(lineno) + ": empty key");
      } else if (entries.count(key)) {
        errors.push_back("line " + std::to_string(lineno) + ": " + key + ": duplicate key");
      } else {
        entries[key] = {value, lineno};
      }
    }
  }
  if (!errors.empty()) {
    std::string msg = "config parse failed";
    for (const auto& e : errors) msg += "\n  " + e;
    throw Error(ErrorKind::Parse, msg);
  }
  for (const auto& [key, value] : overrides) entries[key] = {value, 0};

  detail::ConfigReader r(std::move(entries), base);
  RunConfig cfg;

  if (auto s = r.text("scenario")) {
    try {
      cfg.scenario = parse_scenario(*s);
    } catch (const Error&) {
      r.fail("scenario", "expected spectrum, scan, fit or appendix, got '" + *s + "'");
    }
  }

  r.number("constants.hbar", cfg.constants.hbar);
  r.number("constants.neutron_mass", cfg.constants.m_n);
  r.number("constants.g", cfg.constants.g);
  r.check(cfg.constants.hbar > 0, "constants.hbar", "must be > 0");
  r.check(cfg.constants.m_n > 0, "constants.neutron_mass", "must be > 0");
  r.check(cfg.constants.g > 0, "constants.g", "must be > 0");

  auto& pot = cfg.potential;
  if (auto k = r.text("potential.kind")) {
    if (*k == "box") {
      pot.kind = PotentialKind::Box;
    } else if (*k == "gravity") {
      pot.kind = PotentialKind::Gravity;
    } else if (*k == "gravity_absorber") {
      pot.kind = PotentialKind::GravityAbsorber;
    } else if (*k == "tabulated") {
      pot.kind = PotentialKind::Tabulated;
    } else {
      r.fail("potential.kind", "expected box, gravity, gravity_absorber or tabulated, got '" +
                                   *k + "'");
    }
  }
  r.number("potential.box_width", pot.box_width, kMetrePerMicron);
  r.number("potential.slit", pot.slit, kMetrePerMicron);
  r.number("potential.v0", pot.v0, kJoulePerPeV);
  r.number("potential.diffuseness", pot.diffuseness, kMetrePerMicron);
  r.optional_number("potential.wall", pot.wall, kMetrePerMicron);
  r.check(pot.box_width > 0, "potential.box_width", "must be > 0");
  r.check(pot.slit > 0, "potential.slit", "must be > 0");
  r.check(pot.v0 > 0, "potential.v0", "must be > 0");
  r.check(pot.diffuseness > 0, "potential.diffuseness", "must be > 0");
  r.check(!pot.wall || *pot.wall > 0, "potential.wall", "must be > 0");
  if (auto t = r.text("potential.table")) pot.table = r.path(*t);
  if (pot.kind == PotentialKind::Tabulated) {
    if (pot.table.empty()) {
      r.fail("potential.table", "required for potential.kind = tabulated");
    } else {
      try {
        pot.samples = detail::read_potential_table(pot.table);
        validate(PotentialSpec{Tabulated{pot.samples}});
      } catch (const Error& e) {
        r.fail("potential.table", e.what());
      }
    }
  }

  std::size_t n_states = static_cast<std::size_t>(cfg.n_states);
  r.count("solver.n_states", n_states);
  r.check(n_states >= 1, "solver.n_states", "must be >= 1");
  cfg.n_states = static_cast<int>(n_states);
  r.count("grid.n_points", cfg.grid.n_points);
  r.check(cfg.grid.n_points >= Grid::kMinPoints, "grid.n_points", "must be >= 16");
  r.number("grid.z_max_factor", cfg.grid.z_max_factor);
  r.check(cfg.grid.z_max_factor > 1, "grid.z_max_factor", "must be > 1");
  r.optional_number("grid.z_max", cfg.z_max, kMetrePerMicron);
  r.check(!cfg.z_max || *cfg.z_max > 0, "grid.z_max", "must be > 0");

  r.number("absorber.delta_x", cfg.absorber.delta_x, kMetrePerCm);
  r.number("absorber.length", cfg.absorber.cavity_length, kMetrePerCm);
  r.check(cfg.absorber.delta_x > 0, "absorber.delta_x", "must be > 0");
  r.check(cfg.absorber.cavity_length > 0, "absorber.length", "must be > 0");
  r.check(cfg.absorber.delta_x <= cfg.absorber.cavity_length, "absorber.delta_x",
          "must not exceed absorber.length");
  std::string model = "constant";
  if (auto m = r.text("absorber.n_max_model")) model = *m;
  if (model == "constant") {
    ConstantDensity c;
    r.number("absorber.n_max", c.value);
    r.check(c.value >= 0, "absorber.n_max", "must be >= 0");
    cfg.absorber.n_max = c;
  } else if (model == "power_law") {
    PowerLawDensity p{0.3, 0.0};
    r.number("absorber.n_max_scale", p.scale);
    r.number("absorber.n_max_exponent", p.exponent);
    r.check(p.scale >= 0, "absorber.n_max_scale", "must be >= 0");
    cfg.absorber.n_max = p;
  } else {
    r.fail("absorber.n_max_model", "expected constant or power_law, got '" + model + "'");
  }

  r.list("scan.slits", cfg.slits, kMetrePerMicron);
  if (r.has("scan.slit_min") || r.has("scan.slit_max") || r.has("scan.slit_step")) {
    double lo = 0, hi = 0, step = 0;
    r.number("scan.slit_min", lo, kMetrePerMicron);
    r.number("scan.slit_max", hi, kMetrePerMicron);
    r.number("scan.slit_step", step, kMetrePerMicron);
    const bool ok = lo > 0 && hi >= lo && step > 0;
    r.check(ok, "scan.slit_step", "range needs 0 < slit_min <= slit_max and slit_step > 0");
    if (ok) {
      cfg.slits.clear();
      const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
      for (std::size_t i = 0; i <= n; ++i) cfg.slits.push_back(lo + static_cast<double>(i) * step);
    }
  }
  r.check(!cfg.slits.empty(), "scan.slits", "slit list must not be empty");
  for (std::size_t i = 0; i < cfg.slits.size(); ++i) {
    r.check(cfg.slits[i] > 0, "scan.slits", "slit widths must be > 0");
    if (i > 0) r.check(cfg.slits[i] > cfg.slits[i - 1], "scan.slits", "must be increasing");
  }
  r.flag("scan.parallel", cfg.parallel);

  if (r.has("populations.c")) {
    std::vector<double> c;
    r.list("populations.c", c);
    if (c.size() != kLevels) {
      r.fail("populations.c", "expected 4 weights");
    } else {
      try {
        cfg.weights = PopulationWeights({c[0], c[1], c[2], c[3]});
      } catch (const Error& e) {
        r.fail("populations.c", e.what());
      }
    }
  }

  if (auto t = r.text("fit.target")) {
    if (*t == "populations") {
      cfg.fit_target = FitTarget::Populations;
    } else if (*t == "threshold") {
      cfg.fit_target = FitTarget::Threshold;
    } else {
      r.fail("fit.target", "expected populations or threshold, got '" + *t + "'");
    }
  }
  r.number("fit.z0_resolution", cfg.z0_resolution, kMetrePerMicron);
  r.check(cfg.z0_resolution > 0, "fit.z0_resolution", "must be > 0");
  if (auto t = r.text("fit.data")) cfg.data_path = r.path(*t);
  if (cfg.scenario == Scenario::Fit) {
    if (!cfg.data_path) {
      r.fail("fit.data", "fit scenario requires a dataset (fit.data or --data)");
    } else if (!std::filesystem::exists(*cfg.data_path)) {
      r.fail("fit.data", "file not found: " + cfg.data_path->string());
    }
  }

  if (auto t = r.text("output.dir")) cfg.out_dir = r.path(*t);

  auto& ap = cfg.appendix;
  r.number("appendix.area", ap.area);
  r.number("appendix.k", ap.k, 1.0 / kMetrePerCm);
  r.number("appendix.delta_x", ap.delta_x, kMetrePerCm);
  r.number("appendix.n_max", ap.n_max);
  r.number("appendix.length", ap.cavity_length, kMetrePerCm);
  r.number("appendix.slit", ap.slit, kMetrePerMicron);
  r.check(ap.area >= 0 && ap.area < 1, "appendix.area", "must lie in [0, 1)");
  r.check(ap.k > 0, "appendix.k", "must be > 0");
  r.check(ap.delta_x > 0, "appendix.delta_x", "must be > 0");
  r.check(ap.n_max > 0, "appendix.n_max", "must be > 0");
  r.check(ap.cavity_length > 0, "appendix.length", "must be > 0");
  r.check(ap.slit > 0, "appendix.slit", "must be > 0");

  r.reject_unknown();
  if (!r.errors().empty()) {
    std::string msg = "invalid configuration";
    for (const auto& e : r.errors()) msg += "\n  " + e;
    throw Error(ErrorKind::Validation, msg);
  }
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path,
                             const ConfigOverrides& overrides = {}) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path().empty() ? "." : path.parent_path(), overrides);
}

}  // namespace bouncer
