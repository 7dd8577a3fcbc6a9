#pragma once

#include "vibron/franck_condon.hpp"

namespace vibron {

/// Ground and central-ion-excited surfaces at one trap setting, with their
/// equilibria, modes and the Duschinsky relation between them.
struct SurfacePair {
  PesModel ground;
  PesModel excited;
  EquilibriumResult ground_equilibrium;
  EquilibriumResult excited_equilibrium;
  ModeSet ground_modes;
  ModeSet excited_modes;
  DuschinskyMap map;
};

/// The ground crystal must be linear. The excited crystal uses the analytic
/// linear modes when stable and the zigzag minimum with full modes otherwise.
SurfacePair make_surface_pair(const IonConstants& ions, const SecularFrequencies& freqs,
                              double omega_rf, const Polarisability& pol);

}  // namespace vibron
