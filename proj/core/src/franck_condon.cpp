#include "vibron/franck_condon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "vibron/errors.hpp"

namespace vibron {

DuschinskyMap DuschinskyMap::make(const Eigen::Matrix2d& rotation,
                                  const Eigen::Vector2d& displacement,
                                  const Eigen::Vector2d& frequencies_ground,
                                  const Eigen::Vector2d& frequencies_excited) {
  const double defect = (rotation.transpose() * rotation - Eigen::Matrix2d::Identity()).norm();
  if (!(defect < 1e-10)) {
    throw PhysicsError(ErrorCode::InvalidArgument, "Duschinsky rotation is not orthogonal");
  }
  if (!(frequencies_ground.minCoeff() > 0.0) || !(frequencies_excited.minCoeff() > 0.0)) {
    throw PhysicsError(ErrorCode::InvalidArgument, "mode frequencies must be positive");
  }
  if (!displacement.allFinite()) {
    throw PhysicsError(ErrorCode::InvalidArgument, "displacement must be finite");
  }
  DuschinskyMap map;
  map.rotation = rotation;
  map.displacement = displacement;
  map.frequencies_ground = frequencies_ground;
  map.frequencies_excited = frequencies_excited;
  return map;
}

Eigen::Matrix2d DuschinskyMap::transform() const {
  const Eigen::Vector2d sqrt_exc = frequencies_excited.cwiseSqrt();
  const Eigen::Vector2d inv_sqrt_gnd = frequencies_ground.cwiseSqrt().cwiseInverse();
  return sqrt_exc.asDiagonal() * rotation.transpose() * inv_sqrt_gnd.asDiagonal();
}

Eigen::Vector2d DuschinskyMap::offset() const { return -(transform() * displacement); }

DuschinskyMap duschinsky_from_modes(const ModeSet& ground, const ModeSet& excited,
                                    const IonPositions& eq_ground, const IonPositions& eq_excited,
                                    const IonConstants& ions) {
  if (excited.size() < 2) {
    throw PhysicsError(ErrorCode::DimensionMismatch, "excited mode set has fewer than two modes");
  }
  std::array<std::size_t, 2> g_idx{};
  try {
    g_idx = {ground.index_of("cm"), ground.index_of("zz")};
  } catch (const PhysicsError&) {
    throw PhysicsError(ErrorCode::DimensionMismatch, "ground mode set lacks cm and zz modes");
  }

  std::array<std::size_t, 2> e_idx{};
  for (int k = 0; k < 2; ++k) {
    double best = -1.0;
    for (std::size_t j = 0; j < excited.size(); ++j) {
      if (k == 1 && j == e_idx[0]) continue;
      const double ov = std::abs(ground.vector(g_idx[k]).dot(excited.vector(j)));
      if (ov > best) {
        best = ov;
        e_idx[k] = j;
      }
    }
  }

  Eigen::Matrix2d raw;
  for (int k = 0; k < 2; ++k) {
    for (int j = 0; j < 2; ++j) {
      raw(k, j) = ground.vector(g_idx[k]).dot(excited.vector(e_idx[j]));
    }
  }
  // Nearest orthogonal matrix; exact when the excited pair spans the ground pair.
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(raw, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Matrix2d rotation = svd.matrixU() * svd.matrixV().transpose();

  Eigen::Vector2d wg(ground.frequencies[g_idx[0]], ground.frequencies[g_idx[1]]);
  Eigen::Vector2d we(excited.frequencies[e_idx[0]], excited.frequencies[e_idx[1]]);
  if (!(wg.minCoeff() > 0.0) || !(we.minCoeff() > 0.0)) {
    throw PhysicsError(ErrorCode::Unstable, "relevant mode has non-positive frequency");
  }

  const Vector6 shift = eq_excited.as_vector() - eq_ground.as_vector();
  Eigen::Vector2d d;
  for (int k = 0; k < 2; ++k) {
    const double q = std::sqrt(ions.mass()) * ground.vector(g_idx[k]).dot(shift);
    d(k) = q * std::sqrt(wg(k) / ions.hbar());
  }

  DuschinskyMap map = DuschinskyMap::make(rotation, d, wg, we);
  map.projection_singular_values = svd.singularValues();
  return map;
}

FCMatrix::FCMatrix(int n_max, int m_max, std::vector<double> coefficients,
                   double completeness_bound)
    : n_max_(n_max), m_max_(m_max), c_(std::move(coefficients)), bound_(completeness_bound) {
  const auto side_n = static_cast<std::size_t>(n_max + 1);
  const auto side_m = static_cast<std::size_t>(m_max + 1);
  if (c_.size() != side_n * side_n * side_m * side_m) {
    throw PhysicsError(ErrorCode::DimensionMismatch, "coefficient storage has wrong size");
  }
  defects_.resize(side_n * side_n);
  meets_bound_ = true;
  for (int n1 = 0; n1 <= n_max_; ++n1) {
    for (int n2 = 0; n2 <= n_max_; ++n2) {
      double sum = 0.0;
      const std::size_t base = index(n1, n2, 0, 0);
      for (std::size_t k = 0; k < side_m * side_m; ++k) sum += c_[base + k] * c_[base + k];
      const double defect = std::abs(1.0 - sum);
      defects_[static_cast<std::size_t>(n1) * side_n + static_cast<std::size_t>(n2)] = defect;
      if (!(defect < bound_)) meets_bound_ = false;
    }
  }
}

std::size_t FCMatrix::index(int n1, int n2, int m1, int m2) const {
  const auto side_n = static_cast<std::size_t>(n_max_ + 1);
  const auto side_m = static_cast<std::size_t>(m_max_ + 1);
  return ((static_cast<std::size_t>(n1) * side_n + static_cast<std::size_t>(n2)) * side_m +
          static_cast<std::size_t>(m1)) *
             side_m +
         static_cast<std::size_t>(m2);
}

double FCMatrix::operator()(int n1, int n2, int m1, int m2) const {
  if (n1 < 0 || n2 < 0 || m1 < 0 || m2 < 0 || n1 > n_max_ || n2 > n_max_ || m1 > m_max_ ||
      m2 > m_max_) {
    throw PhysicsError(ErrorCode::IndexOutOfRange, "FC index outside truncation");
  }
  return c_[index(n1, n2, m1, m2)];
}

double FCMatrix::completeness_defect(int n1, int n2) const {
  if (n1 < 0 || n2 < 0 || n1 > n_max_ || n2 > n_max_) {
    throw PhysicsError(ErrorCode::IndexOutOfRange, "FC row outside truncation");
  }
  return defects_[static_cast<std::size_t>(n1) * static_cast<std::size_t>(n_max_ + 1) +
                  static_cast<std::size_t>(n2)];
}

double FCMatrix::max_completeness_defect(int n1_count, int n2_count) const {
  double worst = 0.0;
  for (int n1 = 0; n1 < n1_count; ++n1) {
    for (int n2 = 0; n2 < n2_count; ++n2) worst = std::max(worst, completeness_defect(n1, n2));
  }
  return worst;
}

void FCMatrix::require_complete(int n1_count, int n2_count, double bound) const {
  const double worst = max_completeness_defect(n1_count, n2_count);
  if (!(worst < bound)) {
    throw PhysicsError(ErrorCode::TruncationTooSmall,
                       "FC completeness defect " + std::to_string(worst) + " exceeds bound " +
                           std::to_string(bound) + " at m_max = " + std::to_string(m_max_));
  }
}

Eigen::MatrixXd FCMatrix::overlap_matrix(int n1_count, int n2_count) const {
  if (n1_count < 1 || n2_count < 1 || n1_count > n_max_ + 1 || n2_count > n_max_ + 1) {
    throw PhysicsError(ErrorCode::IndexOutOfRange, "requested rows exceed FC truncation");
  }
  const int side_m = m_max_ + 1;
  Eigen::MatrixXd w(n1_count * n2_count, side_m * side_m);
  for (int n1 = 0; n1 < n1_count; ++n1) {
    for (int n2 = 0; n2 < n2_count; ++n2) {
      const std::size_t base = index(n1, n2, 0, 0);
      for (int k = 0; k < side_m * side_m; ++k) {
        w(n1 * n2_count + n2, k) = c_[base + static_cast<std::size_t>(k)];
      }
    }
  }
  return w;
}

namespace {

// Dense square table over (m1, m2) with zero padding outside [0, side).
class Table {
 public:
  explicit Table(int side) : side_(side), v_(static_cast<std::size_t>(side * side), 0.0) {}
  [[nodiscard]] double at(int a, int b) const {
    if (a < 0 || b < 0 || a >= side_ || b >= side_) return 0.0;
    return v_[static_cast<std::size_t>(a * side_ + b)];
  }
  double& ref(int a, int b) { return v_[static_cast<std::size_t>(a * side_ + b)]; }
  [[nodiscard]] int side() const noexcept { return side_; }

 private:
  int side_;
  std::vector<double> v_;
};

}  // namespace

FCMatrix fc_matrix(const DuschinskyMap& map, int n_max, int m_max, double completeness_bound) {
  if (n_max < 0 || m_max < 0) {
    throw PhysicsError(ErrorCode::InvalidArgument, "truncations must be non-negative");
  }
  const Eigen::Matrix2d t = map.transform();
  const Eigen::Vector2d c = map.offset();
  const Eigen::Matrix2d t_inv = t.inverse();
  const Eigen::Matrix2d pp = 0.5 * (t_inv + t.transpose());
  const Eigen::Matrix2d rm = 0.5 * (t_inv - t.transpose());
  const Eigen::Matrix2d pp_inv = pp.inverse();
  const Eigen::Vector2d u = -(t_inv * c) / std::numbers::sqrt2;

  const Eigen::Matrix2d g = Eigen::Matrix2d::Identity() + t.transpose() * t;
  const Eigen::Vector2d tc = t.transpose() * c;
  const double c00 = 2.0 * std::sqrt(std::abs(t.determinant())) / std::sqrt(g.determinant()) *
                     std::exp(0.5 * tc.dot(g.ldlt().solve(tc)) - 0.5 * c.squaredNorm());

  // Each raising step in n consumes one order of m, so the vacuum row extends
  // 2 n_max beyond the requested excited truncation.
  const int side = m_max + 2 * n_max + 1;
  Table vac(side);
  vac.ref(0, 0) = c00;
  // Targets in order of total excited quantum number; each is raised from the
  // neighbour below it along m2, or along m1 on the m2 = 0 edge.
  for (int total = 1; total <= 2 * (side - 1); ++total) {
    for (int a = std::max(0, total - side + 1); a <= std::min(total, side - 1); ++a) {
      const int b = total - a;
      const int j = b > 0 ? 1 : 0;
      const int m1 = j == 0 ? a - 1 : a;
      const int m2 = j == 1 ? b - 1 : b;
      const Eigen::Vector2d wv(std::sqrt(static_cast<double>(m1)) * vac.at(m1 - 1, m2),
                               std::sqrt(static_cast<double>(m2)) * vac.at(m1, m2 - 1));
      const Eigen::Vector2d v = -pp_inv * (rm * wv + u * vac.at(m1, m2));
      vac.ref(a, b) = v(j) / std::sqrt(static_cast<double>(j == 0 ? a : b));
    }
  }

  const int side_n = n_max + 1;
  const int side_m = m_max + 1;
  std::vector<Table> rows;
  rows.reserve(static_cast<std::size_t>(side_n * side_n));
  std::vector<double> out(static_cast<std::size_t>(side_n * side_n * side_m * side_m), 0.0);

  auto row_at = [&](int n1, int n2) -> Table& {
    return rows[static_cast<std::size_t>(n1 * side_n + n2)];
  };
  for (int k = 0; k < side_n * side_n; ++k) rows.emplace_back(side);
  row_at(0, 0) = vac;

  for (int n1 = 0; n1 <= n_max; ++n1) {
    for (int n2 = 0; n2 <= n_max; ++n2) {
      if (n1 == 0 && n2 == 0) continue;
      const int k = n1 > 0 ? 0 : 1;
      const Table& parent = k == 0 ? row_at(n1 - 1, n2) : row_at(n1, n2 - 1);
      const double nk = static_cast<double>(k == 0 ? n1 : n2);
      Table& child = row_at(n1, n2);
      // Valid range shrinks by one per step from the parent's.
      const int reach = side - 1 - (n1 + n2);
      for (int m1 = 0; m1 <= reach; ++m1) {
        for (int m2 = 0; m2 <= reach; ++m2) {
          const double s1 = std::sqrt(static_cast<double>(m1));
          const double s2 = std::sqrt(static_cast<double>(m2));
          const double r1 = std::sqrt(static_cast<double>(m1 + 1));
          const double r2 = std::sqrt(static_cast<double>(m2 + 1));
          const double val = pp(k, 0) * s1 * parent.at(m1 - 1, m2) +
                             pp(k, 1) * s2 * parent.at(m1, m2 - 1) +
                             rm(k, 0) * r1 * parent.at(m1 + 1, m2) +
                             rm(k, 1) * r2 * parent.at(m1, m2 + 1) + u(k) * parent.at(m1, m2);
          child.ref(m1, m2) = val / std::sqrt(nk);
        }
      }
    }
  }

  for (int n1 = 0; n1 <= n_max; ++n1) {
    for (int n2 = 0; n2 <= n_max; ++n2) {
      const Table& r = row_at(n1, n2);
      for (int m1 = 0; m1 <= m_max; ++m1) {
        for (int m2 = 0; m2 <= m_max; ++m2) {
          out[static_cast<std::size_t>(((n1 * side_n + n2) * side_m + m1) * side_m + m2)] =
              r.at(m1, m2);
        }
      }
    }
  }
  return FCMatrix(n_max, m_max, std::move(out), completeness_bound);
}

std::vector<double> fc_marginal(const FCMatrix& fc, std::array<int, 2> n, int mode_index) {
  if (mode_index != 1 && mode_index != 2) {
    throw PhysicsError(ErrorCode::IndexOutOfRange, "mode_index must be 1 or 2");
  }
  std::vector<double> dist(static_cast<std::size_t>(fc.m_max() + 1));
  for (int m = 0; m <= fc.m_max(); ++m) {
    const double c = mode_index == 2 ? fc(n[0], n[1], 0, m) : fc(n[0], n[1], m, 0);
    dist[static_cast<std::size_t>(m)] = c * c;
  }
  return dist;
}

}  // namespace vibron
