#pragma once

#include <array>

#include <Eigen/Core>

#include "vibron/trap_model.hpp"

namespace vibron {

using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

/// State-dependent potential energy surface of the three-ion crystal in the x-z plane.
///
/// The central ion (index 1) feels omega_x_rydberg radially when excited;
/// otherwise all three ions share omega_x.
struct PesModel {
  SecularFrequencies freqs{};
  double omega_x_rydberg = 0.0;
  double coulomb_constant = 0.0;
  double mass = 0.0;
  bool central_ion_excited = false;

  static PesModel ground(const SecularFrequencies& freqs, const IonConstants& ions);
  static PesModel excited(const SecularFrequencies& freqs, double omega_x_rydberg,
                          const IonConstants& ions);

  /// Squared radial frequency seen by the central ion.
  [[nodiscard]] double central_radial_sq() const noexcept;
  /// Natural length (K0 / (M omega_z^2))^(1/3).
  [[nodiscard]] double length_scale() const noexcept;
  /// Natural force M omega_z^2 times length_scale().
  [[nodiscard]] double force_scale() const noexcept;
};

/// Builds the surface at the given secular frequencies, deriving the field
/// gradients at fixed drive frequency. With `excited` the central ion's
/// radial frequency is modified by `pol`.
PesModel make_pes(const IonConstants& ions, const SecularFrequencies& freqs, double omega_rf,
                  const Polarisability& pol, bool excited);

/// Coordinates of ions 0, 1, 2 in metres; ion 1 is the central ion.
struct IonPositions {
  std::array<double, 3> x{};
  std::array<double, 3> z{};

  /// Packed as (x0, x1, x2, z0, z1, z2).
  [[nodiscard]] Vector6 as_vector() const;
  static IonPositions from_vector(const Vector6& v);
};

enum class Configuration { Linear, Zigzag };

const char* to_string(Configuration c) noexcept;

struct EquilibriumResult {
  IonPositions positions;
  Configuration configuration = Configuration::Linear;
  double gradient_norm = 0.0;         ///< N
  double scaled_gradient_norm = 0.0;  ///< gradient_norm / force_scale
  double energy = 0.0;                ///< J
};

double potential_energy(const IonPositions& p, const PesModel& pes);
Vector6 potential_gradient(const IonPositions& p, const PesModel& pes);
/// Second derivatives of the potential in J/m^2.
Matrix6 potential_hessian(const IonPositions& p, const PesModel& pes);

EquilibriumResult equilibrium_linear_analytic(const PesModel& pes);

/// Zigzag minimum on the branch with X_1 > 0.
EquilibriumResult equilibrium_zigzag_analytic(const PesModel& pes);

struct MinimizerOptions {
  double gradient_tolerance = 1e-10;  ///< on the scaled gradient norm
  int max_iterations = 2000;
};

/// Local minimum reached from `seed` by quasi-Newton descent with Newton polishing.
EquilibriumResult equilibrium_numeric(const PesModel& pes, const IonPositions& seed,
                                      const MinimizerOptions& options = {});

Configuration classify_configuration(const IonPositions& p, double tol_x = 1e-9);

}  // namespace vibron
