#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vibron/crystal.hpp"

namespace vibron {

/// Mass-weighted Hessian (s^-2), ordered (x0, x1, x2, z0, z1, z2).
struct HessianMatrix {
  Matrix6 entries = Matrix6::Zero();
  bool block_diagonal = false;  ///< x-z off-blocks exactly zero
};

/// Normal modes about a reference equilibrium.
///
/// Eigenvectors are the columns of a 6 x n matrix in the mass-weighted ion
/// basis. Each is normalized and signed so its largest-magnitude component is
/// positive. A negative squared frequency is reported as a negative frequency.
struct ModeSet {
  std::vector<double> squared_frequencies;
  std::vector<double> frequencies;
  Eigen::Matrix<double, 6, Eigen::Dynamic> eigenvectors;
  std::vector<std::string> labels;
  IonPositions reference_equilibrium;

  [[nodiscard]] std::size_t size() const noexcept { return frequencies.size(); }
  [[nodiscard]] bool stable() const noexcept;
  /// Index of the mode with this label; throws IndexOutOfRange if absent.
  [[nodiscard]] std::size_t index_of(const std::string& label) const;
  [[nodiscard]] Vector6 vector(std::size_t i) const { return eigenvectors.col(static_cast<Eigen::Index>(i)); }
};

/// Radial basis of the linear crystal: rows are CM, zigzag and rocking in x.
Eigen::Matrix3d radial_mode_basis();

HessianMatrix hessian(const PesModel& pes, const IonPositions& eq);

/// Lowest eigenvalue of the radial block at the linear stationary point.
double lowest_radial_eigenvalue(const PesModel& pes);

ModeSet ground_radial_modes(const PesModel& pes);
ModeSet rydberg_radial_modes(const PesModel& pes);
ModeSet full_mode_analysis(const PesModel& pes, const IonPositions& eq);

using PesBuilder = std::function<PesModel(double omega_x)>;

/// Radial frequency at which the lowest radial squared frequency changes sign,
/// bracketed on `omega_x_grid` and refined by bisection.
double softening_scan(double omega_z, std::span<const double> omega_x_grid,
                      const PesBuilder& pes_builder);

/// Polarisability that places the excited-surface softening point at
/// `target_critical` for the given axial and drive frequencies.
Polarisability polarisability_for_critical_frequency(double target_critical, double omega_z,
                                                     double omega_rf, const IonConstants& ions);

}  // namespace vibron
