#pragma once

#include <random>

#include "vibron/crystal.hpp"
#include "vibron/modes.hpp"
#include "vibron/trap_model.hpp"

namespace vibron::testing {

inline constexpr double kOmegaZMhz = 0.778;
inline constexpr double kOmegaRfMhz = 18.2;
inline constexpr double kRydbergCriticalMhz = 1.2268;

inline IonConstants sr88() { return IonConstants::strontium88(); }
inline double omega_z() { return units::mhz_to_rad(kOmegaZMhz); }
inline double omega_rf() { return units::mhz_to_rad(kOmegaRfMhz); }

/// Polarisability calibrated like the fig1 preset.
inline Polarisability calibrated_pol() {
  return polarisability_for_critical_frequency(units::mhz_to_rad(kRydbergCriticalMhz), omega_z(),
                                               omega_rf(), sr88());
}

inline PesModel pes_at(double omega_x_mhz, bool excited, double omega_z_mhz = kOmegaZMhz,
                       Polarisability pol = calibrated_pol()) {
  return make_pes(sr88(), {units::mhz_to_rad(omega_x_mhz), units::mhz_to_rad(omega_z_mhz)}, omega_rf(),
                  pol, excited);
}

/// Random configuration near a linear chain of typical spacing.
inline IonPositions random_configuration(std::mt19937_64& rng, double spread = 1.5e-6) {
  std::uniform_real_distribution<double> u(-spread, spread);
  IonPositions p;
  const double z0[3] = {-4.4e-6, 0.0, 4.4e-6};
  for (std::size_t i = 0; i < 3; ++i) {
    p.x[i] = u(rng);
    p.z[i] = z0[i] + u(rng);
  }
  return p;
}

}  // namespace vibron::testing
