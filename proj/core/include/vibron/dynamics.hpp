#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "vibron/franck_condon.hpp"
#include "vibron/integrator.hpp"

namespace vibron {

enum class ElectronicLevel : int { s = 0, g = 1, p = 2, r = 3 };
inline constexpr int kElectronicLevels = 4;

/// Electronic (x) two-mode phonon space in the ground-surface Fock basis.
///
/// Basis index = level * (n1 * n2) + i_cm * n2 + i_zz, where n1 and n2 are
/// the numbers of retained Fock states of the CM and zigzag modes.
class CompositeSpace {
 public:
  CompositeSpace(int n1_max, int n2_max);

  [[nodiscard]] int n1_max() const noexcept { return n1_; }
  [[nodiscard]] int n2_max() const noexcept { return n2_; }
  [[nodiscard]] int phonon_dimension() const noexcept { return n1_ * n2_; }
  [[nodiscard]] int dimension() const noexcept { return kElectronicLevels * n1_ * n2_; }
  [[nodiscard]] int index(ElectronicLevel e, int i_cm, int i_zz) const;
  [[nodiscard]] Eigen::MatrixXd phonon_identity() const;

 private:
  int n1_;
  int n2_;
};

struct LaserParams {
  double delta = 0.0;     ///< two-photon laser detuning, rad/s
  double omega_gp = 0.0;  ///< rad/s
  double omega_pr = 0.0;  ///< rad/s
};

struct DecayRates {
  double gamma_sp = 0.0;  ///< p -> s, s^-1
  double gamma_gp = 0.0;  ///< p -> g, s^-1
  double gamma_sr = 0.0;  ///< r -> s, 1 / lifetime
};

struct PhononFrequencies {
  double first = 0.0;   ///< CM on the ground surface, mode 1 on the excited one
  double second = 0.0;  ///< zigzag on the ground surface, mode 2 on the excited one
};

/// Jump operator |to><from| (x) I_p with its rate.
struct JumpOperator {
  ElectronicLevel from;
  ElectronicLevel to;
  double rate;
};

/// Master-equation model with hbar = 1 and energies in rad/s.
///
/// H = H_g (x) (s, g, p projectors) + (H_r - delta) (x) |r><r|
///     + Omega_gp/2 (|g><p| + h.c.) + Omega_pr/2 (|p><r| + h.c.)
/// where H_r = W diag(E_m) W^T is the excited-surface phonon Hamiltonian in the
/// ground Fock basis. The detuning enters with a minus sign so that a
/// positive delta is a blue laser detuning.
struct LindbladModel {
  CompositeSpace space{1, 1};
  Eigen::VectorXd ground_phonon_energies;  ///< diagonal of H_g, zero point included
  Eigen::MatrixXd rydberg_phonon_hamiltonian;
  LaserParams laser;
  DecayRates rates;
  std::vector<JumpOperator> jumps;

  [[nodiscard]] Eigen::MatrixXd dense_hamiltonian() const;
  [[nodiscard]] LindbladModel with_detuning(double delta) const;
  /// Total decay rate out of each electronic level.
  [[nodiscard]] std::array<double, kElectronicLevels> loss_rates() const;
};

/// Assembles the model. The FC rows retained by `space` must satisfy
/// `completeness_bound`, otherwise TruncationTooSmall is thrown.
LindbladModel build_hamiltonian(const CompositeSpace& space, const LaserParams& laser,
                                const DecayRates& rates, const PhononFrequencies& ground,
                                const PhononFrequencies& excited, const FCMatrix& fc,
                                double completeness_bound = 1e-6);

/// Model on an unmodified excited surface (W = I), used as a reference.
LindbladModel build_hamiltonian_identity(const CompositeSpace& space, const LaserParams& laser,
                                         const DecayRates& rates, const PhononFrequencies& ground);

struct ThermalPhononState {
  double mean_cm = 0.0;
  double mean_zz = 0.0;
  Eigen::VectorXd weights_cm;
  Eigen::VectorXd weights_zz;
  Eigen::VectorXd diagonal;  ///< product distribution in the composite phonon order
  double truncated_tail = 0.0;

  [[nodiscard]] Eigen::MatrixXd density() const;
};

ThermalPhononState thermal_state(const CompositeSpace& space, double mean_cm, double mean_zz,
                                 double tail_bound = 1e-6);

/// |level><level| (x) rho_phonon.
Eigen::MatrixXcd product_state(const CompositeSpace& space, ElectronicLevel level,
                               const ThermalPhononState& phonons);

struct PopulationSet {
  double s = 0.0, g = 0.0, p = 0.0, r = 0.0;
};

struct EvolveResult {
  Eigen::MatrixXcd rho;
  PopulationSet populations;
  double integrated_rydberg = 0.0;  ///< integral of P_r dt, s
  double trace_defect = 0.0;
  double positivity_defect = 0.0;   ///< max(0, -lowest eigenvalue)
  IntegrationStats stats;
};

struct EvolveOptions {
  IntegratorOptions integrator{};
  bool compute_positivity = true;
};

/// Evolves rho0 under the Lindblad equation in the standard trace-preserving form.
EvolveResult evolve(const LindbladModel& model, const Eigen::MatrixXcd& rho0, double t_final,
                    const EvolveOptions& options = {});

/// d rho / dt for a dense density matrix from the textbook commutator and
/// dissipator expressions, independent of the block-structured propagator.
Eigen::MatrixXcd lindblad_rhs_dense(const LindbladModel& model, const Eigen::MatrixXcd& rho);

/// d rho / dt as produced by the block-structured propagator.
Eigen::MatrixXcd lindblad_rhs_blocked(const LindbladModel& model, const Eigen::MatrixXcd& rho);

struct SpectrumResult {
  std::vector<double> delta;
  std::vector<PopulationSet> populations;
  std::vector<double> rydberg_time_average;  ///< (1/T) integral of P_r
  std::vector<double> trace_defect;
  std::vector<double> positivity_defect;
  double probe_time = 0.0;

  [[nodiscard]] std::vector<double> rydberg() const;
  [[nodiscard]] double max_trace_defect() const;
  [[nodiscard]] double max_positivity_defect() const;
};

using ModelBuilder = std::function<LindbladModel(double delta)>;

/// One evolution per detuning, distributed over `workers` threads (0 = all cores).
/// Output order follows the grid.
SpectrumResult spectrum(const ModelBuilder& builder, std::span<const double> delta_grid,
                        const Eigen::MatrixXcd& rho0, double t_probe,
                        const EvolveOptions& options = {}, unsigned workers = 0);

struct PeakEstimate {
  std::size_t index = 0;  ///< grid maximum
  double delta = 0.0;     ///< parabolic refinement through the neighbours
  double height = 0.0;
};

PeakEstimate locate_peak(std::span<const double> delta, std::span<const double> values);

/// Bright-state detection proxy P_s + branching * P_r, clamped to [0, 1].
///
/// Population in s fluoresces; Rydberg population is counted with the
/// fraction that decays into s. Not a detector model.
std::vector<double> fluorescence_signal(const SpectrumResult& result, double branching = 0.95);

}  // namespace vibron
