#include "vibron/trap_model.hpp"

#include <cmath>
#include <string>

#include "vibron/errors.hpp"

namespace vibron {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw PhysicsError(ErrorCode::InvalidArgument, std::string(name) + " must be positive and finite");
  }
}

}  // namespace

IonConstants::IonConstants(double mass, double charge, double vacuum_permittivity, double hbar)
    : mass_(mass), charge_(charge), eps0_(vacuum_permittivity), hbar_(hbar) {
  require_positive(mass, "mass");
  require_positive(charge, "charge");
  require_positive(vacuum_permittivity, "vacuum permittivity");
  require_positive(hbar, "hbar");
  k0_ = charge_ * charge_ / (4.0 * std::numbers::pi * eps0_);
}

IonConstants IonConstants::strontium88() { return from_mass_amu(87.9056122571); }

IonConstants IonConstants::from_mass_amu(double mass_amu) {
  return IonConstants(mass_amu * units::kAtomicMassUnit, units::kElementaryCharge,
                      units::kVacuumPermittivity, units::kHbar);
}

SecularFrequencies frequencies_from_gradients(const TrapGradients& g, const IonConstants& ions) {
  require_positive(g.alpha, "alpha");
  require_positive(g.beta, "beta");
  require_positive(g.omega_rf, "omega_rf");
  const double e = ions.charge();
  const double m = ions.mass();
  const double wx2 = 2.0 * e * e * g.alpha * g.alpha / (m * m * g.omega_rf * g.omega_rf) -
                     2.0 * e * g.beta / m;
  const double wz2 = 4.0 * e * g.beta / m;
  if (!(wx2 > 0.0) || !(wz2 > 0.0)) {
    throw PhysicsError(ErrorCode::UnstableTrap, "secular radicand is not positive");
  }
  return {std::sqrt(wx2), std::sqrt(wz2)};
}

TrapGradients gradients_from_frequencies(const SecularFrequencies& f, double omega_rf,
                                         const IonConstants& ions) {
  if (!(f.omega_x > 0.0) || !(f.omega_z > 0.0)) {
    throw PhysicsError(ErrorCode::UnstableTrap, "secular frequencies must be positive");
  }
  require_positive(omega_rf, "omega_rf");
  const double e = ions.charge();
  const double m = ions.mass();
  const double beta = m * f.omega_z * f.omega_z / (4.0 * e);
  const double alpha = m * omega_rf / (std::sqrt(2.0) * e) *
                       std::sqrt(f.omega_x * f.omega_x + 0.5 * f.omega_z * f.omega_z);
  return {alpha, beta, omega_rf};
}

double polarisability_shift_sq(const TrapGradients& g, const Polarisability& pol,
                               const IonConstants& ions) {
  const double e2 = ions.charge() * ions.charge();
  return (2.0 * e2 * g.alpha * g.alpha + 4.0 * e2 * g.beta * g.beta) * pol.value / ions.mass();
}

double rydberg_radial_frequency(const SecularFrequencies& f, const TrapGradients& g,
                                const Polarisability& pol, const IonConstants& ions) {
  const double radicand = f.omega_x * f.omega_x - polarisability_shift_sq(g, pol, ions);
  if (!(radicand > 0.0)) {
    throw PhysicsError(ErrorCode::RadialCollapse, "Rydberg radial confinement is inverted");
  }
  return std::sqrt(radicand);
}

double critical_frequency_scaling(int n_ions, double omega_z) {
  if (n_ions < 3) {
    throw PhysicsError(ErrorCode::InvalidCount, "scaling law needs at least three ions");
  }
  if (omega_z < 0.0) {
    throw PhysicsError(ErrorCode::InvalidArgument, "omega_z must be non-negative");
  }
  return 0.81 * omega_z * std::pow(static_cast<double>(n_ions), 0.87);
}

double critical_frequency_exact3(double omega_z) {
  require_positive(omega_z, "omega_z");
  return std::sqrt(12.0 / 5.0) * omega_z;
}

double critical_frequency_rydberg(double omega_xc, const TrapGradients& g,
                                  const Polarisability& pol, const IonConstants& ions) {
  const double radicand = omega_xc * omega_xc + polarisability_shift_sq(g, pol, ions);
  if (!(radicand > 0.0)) {
    throw PhysicsError(ErrorCode::InvalidRadicand, "critical-frequency radicand is not positive");
  }
  return std::sqrt(radicand);
}

}  // namespace vibron
