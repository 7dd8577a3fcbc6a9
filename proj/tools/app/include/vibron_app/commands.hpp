#pragma once

#include <string>
#include <vector>

#include "vibron/dressing.hpp"
#include "vibron/dynamics.hpp"
#include "vibron/surfaces.hpp"
#include "vibron_app/config.hpp"
#include "vibron_app/output.hpp"

namespace vibron::app {

/// Species, axial and drive frequencies and the resolved polarisability.
struct TrapContext {
  IonConstants ions = IonConstants::strontium88();
  double omega_z = 0.0;
  double omega_rf = 0.0;
  Polarisability pol{};
};

/// Resolves `polarisability.units`; critical_mhz calibrates P at the configured axial frequency.
TrapContext trap_context(const ScenarioConfig& cfg);

/// Stable equilibrium of one surface: linear if the radial block is positive, else zigzag.
EquilibriumResult stable_equilibrium(const PesModel& pes);

/// Dressed-state quantities at the configured microwave settings.
struct DressedState {
  double theta = 0.0;
  double pol_p_over_pol_s = 0.0;
  double residual_fraction = 0.0;  ///< dressed / bare S
};
DressedState dressed_state(const ScenarioConfig& cfg);

void run_equilibrium(const ScenarioConfig& cfg, RunManifest& out);
void run_modes(const ScenarioConfig& cfg, RunManifest& out);
void run_soften(const ScenarioConfig& cfg, RunManifest& out);
void run_fc(const ScenarioConfig& cfg, RunManifest& out);
void run_spectrum(const ScenarioConfig& cfg, RunManifest& out);
void run_dressing(const ScenarioConfig& cfg, RunManifest& out);
/// Dispatches on `scenario` and writes one CSV per figure panel.
void run_scenario(const ScenarioConfig& cfg, RunManifest& out);

/// Detuning scan at one radial frequency; `tag` prefixes the manifest result keys.
SpectrumResult spectrum_at(const ScenarioConfig& cfg, const TrapContext& ctx, double omega_x,
                           const std::string& tag, RunManifest& out, const std::string& file);

}  // namespace vibron::app
