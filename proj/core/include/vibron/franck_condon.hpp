#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "vibron/modes.hpp"

namespace vibron {

/// Relation between the two relevant radial modes of the lower and upper surfaces.
///
/// With x the ground normal coordinates in units of their zero-point lengths,
/// the excited coordinates are y = T (x - d) with
/// T = diag(sqrt(w_exc)) S^T diag(1/sqrt(w_gnd)).
struct DuschinskyMap {
  Eigen::Matrix2d rotation = Eigen::Matrix2d::Identity();  ///< S(k, j) = <ground k | excited j>
  Eigen::Vector2d displacement = Eigen::Vector2d::Zero();  ///< excited minimum, ground zp units
  Eigen::Vector2d frequencies_ground = Eigen::Vector2d::Ones();   ///< (w_cm, w_zz)
  Eigen::Vector2d frequencies_excited = Eigen::Vector2d::Ones();  ///< (w_1, w_2)
  /// Singular values of the raw eigenvector overlap before orthogonalization.
  Eigen::Vector2d projection_singular_values = Eigen::Vector2d::Ones();

  /// Validates orthogonality and positive frequencies.
  static DuschinskyMap make(const Eigen::Matrix2d& rotation, const Eigen::Vector2d& displacement,
                            const Eigen::Vector2d& frequencies_ground,
                            const Eigen::Vector2d& frequencies_excited);

  [[nodiscard]] Eigen::Matrix2d transform() const;
  [[nodiscard]] Eigen::Vector2d offset() const;
};

/// Pairs the excited modes with the ground CM and zigzag modes by maximal
/// eigenvector overlap and measures the displacement of the minima.
DuschinskyMap duschinsky_from_modes(const ModeSet& ground, const ModeSet& excited,
                                    const IonPositions& eq_ground, const IonPositions& eq_excited,
                                    const IonConstants& ions);

/// Overlaps C(n_cm, n_zz; m_1, m_2) = <n|m> for n_i <= n_max and m_i <= m_max.
class FCMatrix {
 public:
  FCMatrix(int n_max, int m_max, std::vector<double> coefficients, double completeness_bound);

  [[nodiscard]] int n_max() const noexcept { return n_max_; }
  [[nodiscard]] int m_max() const noexcept { return m_max_; }
  [[nodiscard]] double operator()(int n1, int n2, int m1, int m2) const;
  [[nodiscard]] double completeness_defect(int n1, int n2) const;
  [[nodiscard]] double max_completeness_defect(int n1_count, int n2_count) const;
  [[nodiscard]] double completeness_bound() const noexcept { return bound_; }
  /// True when every row satisfies the bound given at construction.
  [[nodiscard]] bool meets_bound() const noexcept { return meets_bound_; }
  /// Throws TruncationTooSmall unless rows n1 < n1_count, n2 < n2_count meet `bound`.
  void require_complete(int n1_count, int n2_count, double bound) const;

  /// W(n, m) with row n = n1 * n2_count + n2 and column m = m1 * (m_max + 1) + m2.
  [[nodiscard]] Eigen::MatrixXd overlap_matrix(int n1_count, int n2_count) const;

 private:
  [[nodiscard]] std::size_t index(int n1, int n2, int m1, int m2) const;

  int n_max_;
  int m_max_;
  std::vector<double> c_;
  std::vector<double> defects_;
  double bound_;
  bool meets_bound_;
};

FCMatrix fc_matrix(const DuschinskyMap& map, int n_max, int m_max,
                   double completeness_bound = 1e-6);

struct GridSpec {
  double half_width = 8.0;  ///< in ground zero-point lengths
  int points = 401;         ///< per axis
};

/// Independent overlap by 2D trapezoidal quadrature of explicit oscillator eigenfunctions.
double fc_oracle_grid(const DuschinskyMap& map, std::array<int, 2> n, std::array<int, 2> m,
                      const GridSpec& grid = {});

/// |C(n; m)|^2 along one excited mode with the other excited mode in its vacuum.
/// mode_index 2 varies m_2 at m_1 = 0; mode_index 1 varies m_1 at m_2 = 0.
std::vector<double> fc_marginal(const FCMatrix& fc, std::array<int, 2> n, int mode_index);

}  // namespace vibron
