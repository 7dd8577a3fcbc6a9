#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vibron::app {

/// Invalid configuration; the CLI exits with status 2.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}
  [[nodiscard]] const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

enum class ParamKind { Real, Integer, Text, RealList, Boolean };

struct ParamSpec {
  std::string key;
  ParamKind kind = ParamKind::Real;
  std::string default_value;
  double lo = -1e300;
  double hi = 1e300;
  bool lo_open = false;  ///< lower bound excluded
  std::vector<std::string> choices;  ///< for Text parameters; empty accepts anything
  std::string help;
};

/// Every accepted key, in documentation order.
const std::vector<ParamSpec>& parameter_registry();
const ParamSpec* find_parameter(std::string_view key);
/// Closest registered key by edit distance, also matching the part after the last dot.
std::string nearest_key(std::string_view key);

struct RawEntry {
  std::string value;
  std::string origin;  ///< "file:line", "--set", "preset", "default"
};

/// Unvalidated key = value table.
using RawConfig = std::map<std::string, RawEntry>;

RawConfig parse_config_text(std::string_view text, const std::string& source);
RawConfig parse_config_file(const std::filesystem::path& path);
/// Parses `key=value` and stores it, replacing any earlier value.
void apply_assignment(RawConfig& cfg, std::string_view assignment, const std::string& origin);

/// Names of the built-in scenario presets.
const std::vector<std::string>& scenario_names();
/// Key overrides applied by a scenario before the user's file.
const std::vector<std::pair<std::string, std::string>>& scenario_preset(const std::string& name);

/// Validated, typed configuration. Values are stored in the units of their keys;
/// helpers convert frequencies to rad/s.
class ScenarioConfig {
 public:
  [[nodiscard]] double real(const std::string& key) const;
  [[nodiscard]] int integer(const std::string& key) const;
  [[nodiscard]] const std::string& text(const std::string& key) const;
  [[nodiscard]] const std::vector<double>& list(const std::string& key) const;
  [[nodiscard]] bool flag(const std::string& key) const;
  /// Frequency key in MHz as angular frequency in rad/s.
  [[nodiscard]] double angular(const std::string& key) const;

  [[nodiscard]] const std::string& scenario() const { return text("scenario"); }
  [[nodiscard]] const std::map<std::string, std::string>& resolved() const { return canonical_; }
  [[nodiscard]] const std::map<std::string, std::string>& origins() const { return origins_; }

 private:
  friend ScenarioConfig validate_config(const RawConfig& raw);
  std::map<std::string, double> reals_;
  std::map<std::string, int> integers_;
  std::map<std::string, std::string> texts_;
  std::map<std::string, std::vector<double>> lists_;
  std::map<std::string, bool> flags_;
  std::map<std::string, std::string> canonical_;
  std::map<std::string, std::string> origins_;
};

/// Range-checks every value and rejects unknown keys. Missing keys take defaults.
ScenarioConfig validate_config(const RawConfig& raw);

/// defaults < scenario preset < file < overrides, then validation.
ScenarioConfig resolve_config(const RawConfig& file, const RawConfig& overrides);

}  // namespace vibron::app
