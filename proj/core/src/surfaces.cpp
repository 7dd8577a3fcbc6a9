#include "vibron/surfaces.hpp"

#include "vibron/errors.hpp"

namespace vibron {

SurfacePair make_surface_pair(const IonConstants& ions, const SecularFrequencies& freqs,
                              double omega_rf, const Polarisability& pol) {
  SurfacePair sp;
  sp.ground = make_pes(ions, freqs, omega_rf, pol, false);
  sp.excited = make_pes(ions, freqs, omega_rf, pol, true);
  sp.ground_equilibrium = equilibrium_linear_analytic(sp.ground);
  sp.ground_modes = ground_radial_modes(sp.ground);
  if (lowest_radial_eigenvalue(sp.excited) > 0.0) {
    sp.excited_equilibrium = equilibrium_linear_analytic(sp.excited);
    sp.excited_modes = rydberg_radial_modes(sp.excited);
  } else {
    sp.excited_equilibrium = equilibrium_zigzag_analytic(sp.excited);
    sp.excited_modes = full_mode_analysis(sp.excited, sp.excited_equilibrium.positions);
  }
  sp.map = duschinsky_from_modes(sp.ground_modes, sp.excited_modes,
                                 sp.ground_equilibrium.positions,
                                 sp.excited_equilibrium.positions, ions);
  return sp;
}

}  // namespace vibron
