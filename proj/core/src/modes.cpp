#include "vibron/modes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "vibron/errors.hpp"

namespace vibron {

namespace {

constexpr double kStationaryTolerance = 1e-8;  // scaled gradient norm

template <typename Vec>
void fix_sign(Vec& v) {
  const double vmax = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= vmax * (1.0 - 1e-12)) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

double signed_sqrt(double s) { return s >= 0.0 ? std::sqrt(s) : -std::sqrt(-s); }

Vector6 embed_x(const Eigen::Vector3d& v) {
  Vector6 out = Vector6::Zero();
  out.head<3>() = v;
  return out;
}

Vector6 embed_z(const Eigen::Vector3d& v) {
  Vector6 out = Vector6::Zero();
  out.tail<3>() = v;
  return out;
}

struct RawMode {
  double squared;
  Vector6 vec;
  std::string label;
};

// Descending squared frequency inside each block, blocks kept in input order.
ModeSet assemble(std::vector<std::vector<RawMode>> blocks, const IonPositions& ref) {
  ModeSet set;
  set.reference_equilibrium = ref;
  std::size_t n = 0;
  for (const auto& b : blocks) n += b.size();
  set.eigenvectors.resize(6, static_cast<Eigen::Index>(n));
  Eigen::Index col = 0;
  for (auto& b : blocks) {
    std::stable_sort(b.begin(), b.end(),
                     [](const RawMode& a, const RawMode& c) { return a.squared > c.squared; });
    for (auto& m : b) {
      fix_sign(m.vec);
      set.squared_frequencies.push_back(m.squared);
      set.frequencies.push_back(signed_sqrt(m.squared));
      set.labels.push_back(m.label);
      set.eigenvectors.col(col++) = m.vec;
    }
  }
  return set;
}

Eigen::Matrix3d radial_block(const PesModel& pes) {
  const IonPositions lin = equilibrium_linear_analytic(pes).positions;
  return potential_hessian(lin, pes).topLeftCorner<3, 3>() / pes.mass;
}

std::string best_label(const Eigen::Vector3d& v, const Eigen::Matrix3d& basis,
                       const std::array<const char*, 3>& names) {
  Eigen::Index best = 0;
  (basis * v).cwiseAbs().maxCoeff(&best);
  return names[static_cast<std::size_t>(best)];
}

Eigen::Matrix3d axial_mode_basis() {
  Eigen::Matrix3d b;
  b << 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0),
      1.0 / std::sqrt(2.0), 0.0, -1.0 / std::sqrt(2.0),
      1.0 / std::sqrt(6.0), -2.0 / std::sqrt(6.0), 1.0 / std::sqrt(6.0);
  return b;
}

constexpr std::array<const char*, 3> kRadialNames{"cm", "zz", "rocking"};
constexpr std::array<const char*, 3> kAxialNames{"axial_cm", "axial_stretch", "axial_egyptian"};

}  // namespace

bool ModeSet::stable() const noexcept {
  return std::all_of(squared_frequencies.begin(), squared_frequencies.end(),
                     [](double s) { return s > 0.0; });
}

std::size_t ModeSet::index_of(const std::string& label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) {
    throw PhysicsError(ErrorCode::IndexOutOfRange, "no mode labelled " + label);
  }
  return static_cast<std::size_t>(it - labels.begin());
}

Eigen::Matrix3d radial_mode_basis() {
  Eigen::Matrix3d u;
  u << 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0),
      1.0 / std::sqrt(6.0), -std::sqrt(2.0 / 3.0), 1.0 / std::sqrt(6.0),
      -1.0 / std::sqrt(2.0), 0.0, 1.0 / std::sqrt(2.0);
  return u;
}

HessianMatrix hessian(const PesModel& pes, const IonPositions& eq) {
  const double g = potential_gradient(eq, pes).norm() / pes.force_scale();
  if (!(g < kStationaryTolerance)) {
    throw PhysicsError(ErrorCode::NotAtEquilibrium,
                       "scaled gradient " + std::to_string(g) + " at Hessian reference");
  }
  HessianMatrix h;
  h.entries = potential_hessian(eq, pes) / pes.mass;
  h.block_diagonal = h.entries.topRightCorner<3, 3>().cwiseAbs().maxCoeff() == 0.0 &&
                     h.entries.bottomLeftCorner<3, 3>().cwiseAbs().maxCoeff() == 0.0;
  return h;
}

double lowest_radial_eigenvalue(const PesModel& pes) {
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(radial_block(pes),
                                                           Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

ModeSet ground_radial_modes(const PesModel& pes) {
  const double wx2 = pes.freqs.omega_x * pes.freqs.omega_x;
  const double wz2 = pes.freqs.omega_z * pes.freqs.omega_z;
  const double zz2 = wx2 - 12.0 / 5.0 * wz2;
  if (zz2 < -1e-12 * wx2) {
    throw PhysicsError(ErrorCode::Unstable, "zigzag mode is unstable on the ground surface");
  }
  const Eigen::Matrix3d u = radial_mode_basis();
  std::vector<RawMode> block{
      {wx2, embed_x(u.row(0).transpose()), "cm"},
      {std::max(zz2, 0.0), embed_x(u.row(1).transpose()), "zz"},
      {wx2 - wz2, embed_x(u.row(2).transpose()), "rocking"},
  };
  return assemble({std::move(block)}, equilibrium_linear_analytic(pes).positions);
}

ModeSet rydberg_radial_modes(const PesModel& pes) {
  const double wx2 = pes.freqs.omega_x * pes.freqs.omega_x;
  const double wz2 = pes.freqs.omega_z * pes.freqs.omega_z;
  const Eigen::Matrix3d u = radial_mode_basis();
  const Eigen::Vector3d cm = u.row(0).transpose();
  const Eigen::Vector3d zz = u.row(1).transpose();
  // Central-ion softening a enters as -a * c c^T with c the central unit vector.
  const double a = wx2 - pes.central_radial_sq();
  const double m11 = wx2 - a * cm(1) * cm(1);
  const double m22 = wx2 - 12.0 / 5.0 * wz2 - a * zz(1) * zz(1);
  const double m12 = -a * cm(1) * zz(1);
  const double phi = 0.5 * std::atan2(2.0 * m12, m11 - m22);
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  const double upper = m11 * c * c + 2.0 * m12 * s * c + m22 * s * s;
  const double lower = m11 * s * s - 2.0 * m12 * s * c + m22 * c * c;
  if (!(lower > 0.0)) {
    throw PhysicsError(ErrorCode::Unstable,
                       "soft radial mode on the excited surface; the crystal is zigzag");
  }
  const Eigen::Vector3d v_upper = c * cm + s * zz;
  const Eigen::Vector3d v_lower = -s * cm + c * zz;
  std::vector<RawMode> block{
      {upper, embed_x(v_upper), "cm"},
      {lower, embed_x(v_lower), "zz"},
      {wx2 - wz2, embed_x(u.row(2).transpose()), "rocking"},
  };
  return assemble({std::move(block)}, equilibrium_linear_analytic(pes).positions);
}

ModeSet full_mode_analysis(const PesModel& pes, const IonPositions& eq) {
  const HessianMatrix h = hessian(pes, eq);
  if (h.block_diagonal) {
    std::vector<RawMode> xs;
    std::vector<RawMode> zs;
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> ex(h.entries.topLeftCorner<3, 3>());
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> ez(h.entries.bottomRightCorner<3, 3>());
    const Eigen::Matrix3d ub = radial_mode_basis();
    const Eigen::Matrix3d ab = axial_mode_basis();
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector3d vx = ex.eigenvectors().col(k);
      const Eigen::Vector3d vz = ez.eigenvectors().col(k);
      xs.push_back({ex.eigenvalues()(k), embed_x(vx), best_label(vx, ub, kRadialNames)});
      zs.push_back({ez.eigenvalues()(k), embed_z(vz), best_label(vz, ab, kAxialNames)});
    }
    return assemble({std::move(xs), std::move(zs)}, eq);
  }

  const Eigen::SelfAdjointEigenSolver<Matrix6> eig(h.entries);
  const Vector6 axial_cm = embed_z(axial_mode_basis().row(0).transpose());
  std::vector<RawMode> all;
  for (int k = 0; k < 6; ++k) {
    const Vector6 v = eig.eigenvectors().col(k);
    all.push_back({eig.eigenvalues()(k), v, ""});
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const RawMode& a, const RawMode& b) { return a.squared > b.squared; });
  for (std::size_t k = 0; k < all.size(); ++k) {
    all[k].label = std::abs(all[k].vec.dot(axial_cm)) > 1.0 - 1e-6
                       ? std::string("axial_cm")
                       : "numeric_" + std::to_string(k);
  }
  return assemble({std::move(all)}, eq);
}

double softening_scan(double omega_z, std::span<const double> grid, const PesBuilder& build) {
  if (grid.size() < 2 || !(omega_z > 0.0)) {
    throw PhysicsError(ErrorCode::NoBracket, "scan needs at least two grid points");
  }
  auto f = [&](double wx) { return lowest_radial_eigenvalue(build(wx)); };
  double lo = grid[0];
  double flo = f(lo);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double hi = grid[i];
    const double fhi = f(hi);
    if ((flo <= 0.0) != (fhi <= 0.0)) {
      double a = lo;
      double b = hi;
      double fa = flo;
      for (int it = 0; it < 200 && std::abs(b - a) > 1e-15 * std::abs(b); ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = f(mid);
        if ((fm <= 0.0) == (fa <= 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      return 0.5 * (a + b);
    }
    lo = hi;
    flo = fhi;
  }
  throw PhysicsError(ErrorCode::NoBracket, "lowest radial eigenvalue keeps its sign on the grid");
}

Polarisability polarisability_for_critical_frequency(double target, double omega_z,
                                                     double omega_rf, const IonConstants& ions) {
  const SecularFrequencies freqs{target, omega_z};
  const TrapGradients g = gradients_from_frequencies(freqs, omega_rf, ions);
  const double per_unit = polarisability_shift_sq(g, Polarisability{1.0}, ions);
  auto f = [&](double p) {
    return lowest_radial_eigenvalue(make_pes(ions, freqs, omega_rf, Polarisability{p}, true));
  };
  double lo = 0.0;
  if (!(f(lo) > 0.0)) {
    throw PhysicsError(ErrorCode::NoRoot, "target lies below the ground-surface critical frequency");
  }
  // Just short of the central ion's radial collapse the soft mode is unstable.
  double hi = (1.0 - 1e-9) * target * target / per_unit;
  if (!(f(hi) < 0.0)) {
    throw PhysicsError(ErrorCode::NoRoot, "no softening below radial collapse");
  }
  for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return Polarisability{0.5 * (lo + hi)};
}

}  // namespace vibron
