#include "vibron_app/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace vibron::app {

namespace {

using K = ParamKind;
constexpr double kInf = 1e300;

ParamSpec real(std::string key, std::string def, double lo, double hi, bool lo_open,
               std::string help) {
  return {std::move(key), K::Real, std::move(def), lo, hi, lo_open, {}, std::move(help)};
}
ParamSpec positive(std::string key, std::string def, std::string help) {
  return real(std::move(key), std::move(def), 0.0, kInf, true, std::move(help));
}
ParamSpec integer(std::string key, std::string def, double lo, double hi, std::string help) {
  return {std::move(key), K::Integer, std::move(def), lo, hi, false, {}, std::move(help)};
}
ParamSpec choice(std::string key, std::string def, std::vector<std::string> options,
                 std::string help) {
  return {std::move(key), K::Text, std::move(def), 0, 0, false, std::move(options), std::move(help)};
}
ParamSpec list(std::string key, std::string def, double lo, bool lo_open, std::string help) {
  return {std::move(key), K::RealList, std::move(def), lo, kInf, lo_open, {}, std::move(help)};
}

std::vector<ParamSpec> build_registry() {
  std::vector<std::string> scenarios{"none"};
  for (const auto& s : scenario_names()) scenarios.push_back(s);
  return {
      choice("scenario", "none", scenarios, "scenario preset"),
      integer("seed", "12345", 0, 4294967295.0, "noise generator seed"),
      positive("ion.mass_amu", "87.9056122571", "ion mass in atomic mass units"),
      positive("trap.omega_x_mhz", "1.42", "radial secular frequency"),
      positive("trap.omega_z_mhz", "0.778", "axial secular frequency"),
      positive("trap.omega_rf_mhz", "18.2", "RF drive frequency"),
      list("trap.omega_x_list_mhz", "1.42,1.35,1.23", 0.0, true, "radial frequencies for scans"),
      choice("polarisability.units", "critical_mhz", {"si", "critical_mhz"},
             "si: value is P; critical_mhz: value is the excited-surface softening frequency"),
      real("polarisability.value", "1.2268", -kInf, kInf, false, "polarisability or target"),
      choice("equilibrium.surface", "both", {"ground", "rydberg", "both"}, "surfaces to solve"),
      choice("modes.surface", "both", {"ground", "rydberg", "both"}, "surfaces to analyse"),
      choice("soften.surface", "both", {"ground", "rydberg", "both"}, "surfaces to scan"),
      positive("soften.omega_x_min_mhz", "1.0", "scan start"),
      positive("soften.omega_x_max_mhz", "1.5", "scan end"),
      integer("soften.points", "51", 2, 100000, "scan points"),
      integer("fc.n_max", "4", 0, 64, "ground phonon truncation"),
      integer("fc.m_max", "120", 0, 400, "excited phonon truncation"),
      integer("fc.n_cm", "0", 0, 64, "ground CM occupation of the reported row"),
      integer("fc.n_zz", "0", 0, 64, "ground zigzag occupation of the reported row"),
      positive("fc.completeness_bound", "1e-6", "allowed completeness defect"),
      choice("fc.marginal", "none", {"none", "m1", "m2"}, "emit a marginal instead of the table"),
      positive("dynamics.gamma_gp_mhz", "25", "p -> g decay rate in 1e6 s^-1"),
      positive("dynamics.gamma_sp_mhz", "475", "p -> s decay rate in 1e6 s^-1"),
      positive("dynamics.tau_us", "5.5", "Rydberg lifetime"),
      real("dynamics.omega_gp_mhz", "1.0", 0.0, kInf, false, "g-p Rabi frequency"),
      real("dynamics.omega_pr_mhz", "1.5", 0.0, kInf, false, "p-r Rabi frequency"),
      integer("dynamics.n1_max", "8", 1, 64, "CM Fock states"),
      integer("dynamics.n2_max", "8", 1, 64, "zigzag Fock states"),
      positive("dynamics.t_probe_us", "2.0", "probe pulse duration"),
      real("dynamics.nbar_cm", "0.1", 0.0, kInf, false, "thermal CM occupation"),
      real("dynamics.nbar_zz", "0.1", 0.0, kInf, false, "thermal zigzag occupation"),
      real("dynamics.delta_min_mhz", "-0.15", -kInf, kInf, false, "detuning scan start"),
      real("dynamics.delta_max_mhz", "0.09", -kInf, kInf, false, "detuning scan end"),
      integer("dynamics.delta_points", "13", 1, 100000, "detuning points"),
      choice("dynamics.integrator", "adaptive", {"adaptive", "fixed"},
             "fixed selects the reproducibility mode"),
      positive("dynamics.fixed_step_ns", "2.0", "step of the fixed-step integrator"),
      positive("dynamics.rtol", "1e-8", "adaptive relative tolerance"),
      integer("dynamics.fc_m_max", "40", 1, 200, "excited truncation of the FC matrix"),
      real("dynamics.branching", "0.95", 0.0, 1.0, false, "Rydberg decay fraction into s"),
      integer("dynamics.workers", "0", 0, 1024, "worker threads, 0 = all cores"),
      {"dynamics.dressed", K::Boolean, "false", 0, 0, false, {}, "use the dressed Rydberg state"},
      positive("dressing.omega_mw_mhz", "154", "microwave Rabi frequency"),
      real("dressing.delta_mw_mhz", "-95", -kInf, kInf, false, "microwave detuning"),
      real("dressing.residual_fraction", "0.048", -kInf, kInf, false,
           "dressed/bare polarisability at the working detuning"),
      real("dressing.pol_p_over_pol_s", "0", -kInf, kInf, false,
           "bare P/S ratio; 0 calibrates it from residual_fraction"),
      real("dressing.delta_min_mhz", "-300", -kInf, kInf, false, "detuning scan start"),
      real("dressing.delta_max_mhz", "300", -kInf, kInf, false, "detuning scan end"),
      integer("dressing.points", "61", 2, 100000, "detuning points"),
      list("dressing.dx_um_list", "0.5,1.0,1.5,2.0,2.5,3.0", 0.0, false, "synthetic displacements"),
      positive("dressing.shift_scale_khz", "200", "bare S shift magnitude at 1 um"),
      real("dressing.noise", "0.01", 0.0, kInf, false, "relative synthetic noise"),
      positive("dressing.truth_scale", "1.0", "synthetic polarisability scale"),
      real("dressing.truth_offset_mhz", "0.0", -kInf, kInf, false, "synthetic detuning offset"),
      choice("dressing.measurements", "", {}, "measurement CSV for the dressing command"),
      list("phase.omega_z_list_mhz", "0.4,0.5,0.6,0.7,0.778,0.8,0.9,1.0,1.1,1.2", 0.0, true,
           "axial frequencies of the phase diagram"),
      positive("fig1.linewidth_mhz", "0.05", "Lorentzian FWHM of each FC line"),
      real("fig1.delta_min_mhz", "-0.5", -kInf, kInf, false, "profile start"),
      real("fig1.delta_max_mhz", "0.5", -kInf, kInf, false, "profile end"),
      integer("fig1.points", "201", 2, 100000, "profile points"),
      positive("drop.omega_x_min_mhz", "1.21", "radial scan start"),
      positive("drop.omega_x_max_mhz", "1.42", "radial scan end"),
      integer("drop.points", "23", 2, 100000, "radial scan points"),
      integer("output.precision", "12", 6, 17, "significant digits in CSV files"),
  };
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0u : 1u)});
      diag = up;
    }
  }
  return row[b.size()];
}

bool parse_double(std::string_view s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto res = std::from_chars(first, t.data() + t.size(), out);
  return res.ec == std::errc() && res.ptr == t.data() + t.size() && std::isfinite(out);
}

std::string range_text(const ParamSpec& p) {
  const std::string lo = p.lo <= -kInf ? "-inf" : fmt::format("{}", p.lo);
  const std::string hi = p.hi >= kInf ? "inf" : fmt::format("{}", p.hi);
  return fmt::format("{}{}, {}{}", p.lo_open ? "(" : "[", lo, hi, "]");
}

void check_range(const ParamSpec& p, double v, const std::string& origin) {
  const bool ok = (p.lo_open ? v > p.lo : v >= p.lo) && v <= p.hi;
  if (!ok) {
    throw ConfigError(p.key, fmt::format("value {} outside expected range {} ({})", v,
                                         range_text(p), origin));
  }
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{
      "fig1_spectra", "fig2b_drop", "fig2c_phase_diagram", "fig2d_dressed",
      "sm_fig3_dressing", "sm_fig4_fc", "sm_fig5_spectrum"};
  return names;
}

const std::vector<std::pair<std::string, std::string>>& scenario_preset(const std::string& name) {
  static const std::map<std::string, std::vector<std::pair<std::string, std::string>>> presets{
      {"fig1_spectra", {{"trap.omega_x_list_mhz", "1.42,1.35,1.23"}, {"fc.m_max", "200"}}},
      {"fig2b_drop", {{"fc.m_max", "200"}}},
      {"fig2c_phase_diagram", {}},
      {"fig2d_dressed", {{"fc.m_max", "200"}}},
      {"sm_fig3_dressing", {}},
      {"sm_fig4_fc",
       {{"trap.omega_x_list_mhz", "1.346,1.234,1.225"}, {"fc.n_max", "0"}, {"fc.m_max", "200"}}},
      {"sm_fig5_spectrum", {{"trap.omega_x_list_mhz", "1.346,1.234"}}},
  };
  static const std::vector<std::pair<std::string, std::string>> empty;
  const auto it = presets.find(name);
  return it == presets.end() ? empty : it->second;
}

const std::vector<ParamSpec>& parameter_registry() {
  static const std::vector<ParamSpec> reg = build_registry();
  return reg;
}

const ParamSpec* find_parameter(std::string_view key) {
  for (const auto& p : parameter_registry()) {
    if (p.key == key) return &p;
  }
  return nullptr;
}

std::string nearest_key(std::string_view key) {
  std::string best;
  std::size_t best_d = static_cast<std::size_t>(-1);
  for (const auto& p : parameter_registry()) {
    std::size_t d = edit_distance(key, p.key);
    const auto dot = p.key.rfind('.');
    if (dot != std::string::npos) {
      d = std::min(d, edit_distance(key, std::string_view(p.key).substr(dot + 1)));
    }
    if (d < best_d) {
      best_d = d;
      best = p.key;
    }
  }
  return best;
}

void apply_assignment(RawConfig& cfg, std::string_view assignment, const std::string& origin) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("", fmt::format("expected key = value ({})", origin));
  }
  const std::string key = trim(assignment.substr(0, eq));
  std::string value = trim(assignment.substr(eq + 1));
  if (key.empty()) throw ConfigError("", fmt::format("empty key ({})", origin));
  if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
    value = value.substr(1, value.size() - 2);
  }
  if (find_parameter(key) == nullptr) {
    throw ConfigError(key, fmt::format("unknown key ({}); nearest valid key is '{}'", origin,
                                       nearest_key(key)));
  }
  cfg[key] = RawEntry{value, origin};
}

RawConfig parse_config_text(std::string_view text, const std::string& source) {
  RawConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    apply_assignment(cfg, body, fmt::format("{}:{}", source, lineno));
  }
  return cfg;
}

RawConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", fmt::format("cannot read config file '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.filename().string());
}

double ScenarioConfig::real(const std::string& key) const {
  const auto it = reals_.find(key);
  if (it == reals_.end()) throw ConfigError(key, "not a real-valued key");
  return it->second;
}

int ScenarioConfig::integer(const std::string& key) const {
  const auto it = integers_.find(key);
  if (it == integers_.end()) throw ConfigError(key, "not an integer key");
  return it->second;
}

const std::string& ScenarioConfig::text(const std::string& key) const {
  const auto it = texts_.find(key);
  if (it == texts_.end()) throw ConfigError(key, "not a text key");
  return it->second;
}

const std::vector<double>& ScenarioConfig::list(const std::string& key) const {
  const auto it = lists_.find(key);
  if (it == lists_.end()) throw ConfigError(key, "not a list key");
  return it->second;
}

bool ScenarioConfig::flag(const std::string& key) const {
  const auto it = flags_.find(key);
  if (it == flags_.end()) throw ConfigError(key, "not a boolean key");
  return it->second;
}

double ScenarioConfig::angular(const std::string& key) const {
  return 2.0 * 3.14159265358979323846 * 1e6 * real(key);
}

ScenarioConfig validate_config(const RawConfig& raw) {
  for (const auto& [key, entry] : raw) {
    if (find_parameter(key) == nullptr) {
      throw ConfigError(key, fmt::format("unknown key ({}); nearest valid key is '{}'",
                                         entry.origin, nearest_key(key)));
    }
  }
  ScenarioConfig cfg;
  for (const auto& p : parameter_registry()) {
    const auto it = raw.find(p.key);
    const std::string value = it == raw.end() ? p.default_value : it->second.value;
    const std::string origin = it == raw.end() ? "default" : it->second.origin;
    cfg.origins_[p.key] = origin;
    switch (p.kind) {
      case K::Real: {
        double v = 0.0;
        if (!parse_double(value, v)) {
          throw ConfigError(p.key, fmt::format("'{}' is not a number ({})", value, origin));
        }
        check_range(p, v, origin);
        cfg.reals_[p.key] = v;
        cfg.canonical_[p.key] = fmt::format("{}", v);
        break;
      }
      case K::Integer: {
        double v = 0.0;
        if (!parse_double(value, v) || v != std::floor(v)) {
          throw ConfigError(p.key, fmt::format("'{}' is not an integer ({})", value, origin));
        }
        check_range(p, v, origin);
        cfg.integers_[p.key] = static_cast<int>(v);
        cfg.canonical_[p.key] = fmt::format("{}", static_cast<long long>(v));
        break;
      }
      case K::Text: {
        if (!p.choices.empty() &&
            std::find(p.choices.begin(), p.choices.end(), value) == p.choices.end()) {
          throw ConfigError(p.key, fmt::format("'{}' is not one of {{{}}} ({})", value,
                                               fmt::join(p.choices, ", "), origin));
        }
        cfg.texts_[p.key] = value;
        cfg.canonical_[p.key] = value;
        break;
      }
      case K::RealList: {
        std::vector<double> values;
        std::string_view rest = value;
        while (!rest.empty()) {
          const auto comma = rest.find(',');
          const std::string_view item = rest.substr(0, comma);
          double v = 0.0;
          if (!parse_double(item, v)) {
            throw ConfigError(p.key, fmt::format("'{}' is not a number list ({})", value, origin));
          }
          check_range(p, v, origin);
          values.push_back(v);
          if (comma == std::string_view::npos) break;
          rest.remove_prefix(comma + 1);
        }
        if (values.empty()) throw ConfigError(p.key, fmt::format("empty list ({})", origin));
        cfg.canonical_[p.key] = fmt::format("{}", fmt::join(values, ","));
        cfg.lists_[p.key] = std::move(values);
        break;
      }
      case K::Boolean: {
        std::string v = trim(value);
        std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
        bool b = false;
        if (v == "true" || v == "1" || v == "yes" || v == "on") {
          b = true;
        } else if (v != "false" && v != "0" && v != "no" && v != "off") {
          throw ConfigError(p.key, fmt::format("'{}' is not a boolean ({})", value, origin));
        }
        cfg.flags_[p.key] = b;
        cfg.canonical_[p.key] = b ? "true" : "false";
        break;
      }
    }
  }
  if (cfg.real("soften.omega_x_max_mhz") <= cfg.real("soften.omega_x_min_mhz")) {
    throw ConfigError("soften.omega_x_max_mhz", "must exceed soften.omega_x_min_mhz");
  }
  if (cfg.real("dynamics.delta_max_mhz") < cfg.real("dynamics.delta_min_mhz")) {
    throw ConfigError("dynamics.delta_max_mhz", "must not be below dynamics.delta_min_mhz");
  }
  if (cfg.real("drop.omega_x_max_mhz") <= cfg.real("drop.omega_x_min_mhz")) {
    throw ConfigError("drop.omega_x_max_mhz", "must exceed drop.omega_x_min_mhz");
  }
  if (cfg.real("dressing.delta_max_mhz") <= cfg.real("dressing.delta_min_mhz")) {
    throw ConfigError("dressing.delta_max_mhz", "must exceed dressing.delta_min_mhz");
  }
  if (cfg.real("fig1.delta_max_mhz") <= cfg.real("fig1.delta_min_mhz")) {
    throw ConfigError("fig1.delta_max_mhz", "must exceed fig1.delta_min_mhz");
  }
  return cfg;
}

ScenarioConfig resolve_config(const RawConfig& file, const RawConfig& overrides) {
  std::string name = "none";
  if (const auto it = file.find("scenario"); it != file.end()) name = it->second.value;
  if (const auto it = overrides.find("scenario"); it != overrides.end()) name = it->second.value;

  RawConfig merged;
  for (const auto& [k, v] : scenario_preset(name)) merged[k] = RawEntry{v, "preset " + name};
  for (const auto& [k, v] : file) merged[k] = v;
  for (const auto& [k, v] : overrides) merged[k] = v;
  return validate_config(merged);
}

}  // namespace vibron::app
