#include "vibron_app/cli.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "vibron/errors.hpp"
#include "vibron_app/commands.hpp"
#include "vibron_app/config.hpp"
#include "vibron_app/output.hpp"
#include "vibron_app/version.hpp"

namespace vibron::app {

namespace {

using Runner = std::function<void(const ScenarioConfig&, RunManifest&)>;

const std::map<std::string, std::pair<Runner, std::string>>& commands() {
  static const std::map<std::string, std::pair<Runner, std::string>> table{
      {"equilibrium", {run_equilibrium, "Analytic and minimiser equilibria with residuals"}},
      {"modes", {run_modes, "Normal-mode frequencies and eigenvectors"}},
      {"soften", {run_soften, "Lowest radial eigenvalue against omega_x and the critical point"}},
      {"fc", {run_fc, "Franck-Condon coefficients or a single-mode marginal"}},
      {"spectrum", {run_spectrum, "Lindblad detuning scan of the Rydberg population"}},
      {"dressing", {run_dressing, "Fit dressed polarisabilities from shift measurements"}},
      {"scenario", {run_scenario, "Regenerate the data set of one figure panel"}},
  };
  return table;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Three-ion Rydberg crystal simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> sets;
  std::string marginal;
  std::string scenario;

  for (const auto& [name, entry] : commands()) {
    CLI::App* sub = app.add_subcommand(name, entry.second);
    sub->add_option("--config,-c", config_path, "key = value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--out,-o", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--set,-s", sets, "Override one key, key=value (repeatable)")->take_all();
    if (name == "fc") {
      sub->add_option("--marginal", marginal, "Emit the m1 or m2 marginal instead of the full table")
          ->check(CLI::IsMember({"m1", "m2"}));
    }
    if (name == "scenario") {
      sub->add_option("name", scenario, "Scenario name (or set scenario = ... in the config)")
          ->check(CLI::IsMember(scenario_names()));
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const auto start = std::chrono::steady_clock::now();
    RawConfig file;
    if (!config_path.empty()) file = parse_config_file(config_path);
    RawConfig overrides;
    if (!marginal.empty()) apply_assignment(overrides, "fc.marginal=" + marginal, "--marginal");
    if (!scenario.empty()) apply_assignment(overrides, "scenario=" + scenario, "argument");
    for (const auto& s : sets) apply_assignment(overrides, s, "--set");
    const ScenarioConfig cfg = resolve_config(file, overrides);
    if (command == "scenario" && cfg.scenario() == "none") {
      throw ConfigError("scenario", "choose one of " + fmt::format("{}", fmt::join(scenario_names(), ", ")));
    }

    std::filesystem::create_directories(out_dir);
    RunManifest manifest(command, out_dir);
    manifest.set_config(cfg.resolved(), cfg.origins());
    commands().at(command).first(cfg, manifest);
    manifest.set_wall_time(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    manifest.finish();
    for (const auto& rec : manifest.outputs()) {
      fmt::print("{}  {}\n", rec.sha256, (std::filesystem::path(out_dir) / rec.file).string());
    }
    for (const auto& [k, v] : manifest.results()) fmt::print("{} = {}\n", k, v);
    return kExitOk;
  } catch (const ConfigError& e) {
    fmt::print(stderr, "config error: {}\n", e.what());
    return kExitConfig;
  } catch (const PhysicsError& e) {
    fmt::print(stderr, "numerical failure: {}\n", e.what());
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    fmt::print(stderr, "config error: output directory: {}\n", e.what());
    return kExitConfig;
  }
}

}  // namespace vibron::app
