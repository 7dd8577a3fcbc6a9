#pragma once

#include <numbers>

namespace vibron {

namespace units {
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kAtomicMassUnit = 1.66053906660e-27;  // kg
inline constexpr double kElementaryCharge = 1.602176634e-19;   // C
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m
inline constexpr double kHbar = 1.054571817e-34;  // J s

/// Ordinary frequency in MHz to angular frequency in rad/s.
constexpr double mhz_to_rad(double mhz) noexcept { return kTwoPi * 1.0e6 * mhz; }
constexpr double rad_to_mhz(double rad_per_s) noexcept { return rad_per_s / (kTwoPi * 1.0e6); }
}  // namespace units

/// Physical constants of the trapped species. K0 = e^2 / (4 pi eps0) is derived.
class IonConstants {
 public:
  IonConstants(double mass, double charge, double vacuum_permittivity, double hbar);

  static IonConstants strontium88();
  static IonConstants from_mass_amu(double mass_amu);

  [[nodiscard]] double mass() const noexcept { return mass_; }
  [[nodiscard]] double charge() const noexcept { return charge_; }
  [[nodiscard]] double vacuum_permittivity() const noexcept { return eps0_; }
  [[nodiscard]] double coulomb_constant() const noexcept { return k0_; }
  [[nodiscard]] double hbar() const noexcept { return hbar_; }

 private:
  double mass_;
  double charge_;
  double eps0_;
  double hbar_;
  double k0_;
};

/// Quadrupole field gradients of the linear Paul trap.
struct TrapGradients {
  double alpha;     ///< oscillating radial gradient, V/m^2
  double beta;      ///< static axial gradient, V/m^2
  double omega_rf;  ///< drive frequency, rad/s
};

struct SecularFrequencies {
  double omega_x;  ///< radial, rad/s
  double omega_z;  ///< axial, rad/s
};

/// Signed polarisability.
///
/// Convention: a positive value weakens the radial confinement of the
/// Rydberg-excited ion, so omega_x^(r) < omega_x and the critical radial
/// frequency of the excited crystal rises above the ground-state one. The
/// trap-modification formulas use the coefficient such that
/// (2 e^2 alpha^2 + 4 e^2 beta^2) P / M is a squared angular frequency,
/// while the Stark-shift formula uses P alpha^2 dx^2 / hbar directly.
struct Polarisability {
  enum class Convention { PositiveWeakensRadial };
  static constexpr Convention kConvention = Convention::PositiveWeakensRadial;

  double value = 0.0;
};

SecularFrequencies frequencies_from_gradients(const TrapGradients& gradients,
                                              const IonConstants& ions);

/// Inverse of frequencies_from_gradients at a fixed drive frequency.
TrapGradients gradients_from_frequencies(const SecularFrequencies& freqs, double omega_rf,
                                         const IonConstants& ions);

/// (2 e^2 alpha^2 + 4 e^2 beta^2) P / M in s^-2.
double polarisability_shift_sq(const TrapGradients& gradients, const Polarisability& pol,
                               const IonConstants& ions);

/// Radial trap frequency of the Rydberg-excited ion.
double rydberg_radial_frequency(const SecularFrequencies& freqs, const TrapGradients& gradients,
                                const Polarisability& pol, const IonConstants& ions);

/// Empirical scaling law 0.81 omega_z N^0.87 for the linear-to-zigzag point.
double critical_frequency_scaling(int n_ions, double omega_z);

/// Exact three-ion softening point sqrt(12/5) omega_z.
double critical_frequency_exact3(double omega_z);

/// Approximate critical radial frequency when the central ion is excited.
double critical_frequency_rydberg(double omega_xc, const TrapGradients& gradients,
                                  const Polarisability& pol, const IonConstants& ions);

}  // namespace vibron
