#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fixtures.hpp"
#include "vibron/errors.hpp"

namespace vibron {
namespace {

using testing::pes_at;

TEST(Modes, GroundLinearFrequenciesClosedForm) {
  const double wx = 1.42, wz = testing::kOmegaZMhz;
  const PesModel pes = pes_at(wx, false);
  const ModeSet m = full_mode_analysis(pes, equilibrium_linear_analytic(pes).positions);
  std::vector<double> got;
  for (double f : m.frequencies) got.push_back(units::rad_to_mhz(f));
  std::vector<double> want = {wx, std::sqrt(wx * wx - wz * wz), std::sqrt(wx * wx - 2.4 * wz * wz),
                              wz, std::sqrt(3.0) * wz, std::sqrt(29.0 / 5.0) * wz};
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-9);
}

TEST(Modes, EigenvectorsOrthonormal) {
  for (double wx : {1.0, 1.2, 1.346}) {
    for (bool excited : {false, true}) {
      const PesModel pes = pes_at(wx, excited);
      const IonPositions eq = lowest_radial_eigenvalue(pes) > 0 ? equilibrium_linear_analytic(pes).positions
                                                                : equilibrium_zigzag_analytic(pes).positions;
      const ModeSet m = full_mode_analysis(pes, eq);
      const Eigen::MatrixXd g = m.eigenvectors.transpose() * m.eigenvectors;
      EXPECT_LT((g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff(), 1e-10);
      EXPECT_TRUE(m.stable());
    }
  }
}

TEST(Modes, HessianBlockDiagonalOnLinearChain) {
  const PesModel pes = pes_at(1.3, true);
  EXPECT_TRUE(hessian(pes, equilibrium_linear_analytic(pes).positions).block_diagonal);
  const PesModel soft = pes_at(1.1, true);
  EXPECT_FALSE(hessian(soft, equilibrium_zigzag_analytic(soft).positions).block_diagonal);
}

TEST(Modes, RadialLabels) {
  const ModeSet g = ground_radial_modes(pes_at(1.346, false));
  EXPECT_NO_THROW((void)g.index_of("cm"));
  EXPECT_NO_THROW((void)g.index_of("zz"));
  EXPECT_NEAR(g.frequencies[g.index_of("cm")], units::mhz_to_rad(1.346), 1e-6);
  EXPECT_THROW((void)g.index_of("breathing"), PhysicsError);
  const ModeSet r = rydberg_radial_modes(pes_at(1.346, true));
  EXPECT_LT(r.frequencies[r.index_of("zz")], g.frequencies[g.index_of("zz")]);
}

TEST(Modes, SofteningGround) {
  std::vector<double> grid;
  for (int i = 0; i <= 50; ++i) grid.push_back(units::mhz_to_rad(1.0 + 0.01 * i));
  const double wc = softening_scan(testing::omega_z(), grid, [](double wx) {
    return pes_at(units::rad_to_mhz(wx), false);
  });
  EXPECT_NEAR(wc / critical_frequency_exact3(testing::omega_z()), 1.0, 1e-9);
}

TEST(Modes, SofteningNoBracket) {
  std::vector<double> grid{units::mhz_to_rad(1.3), units::mhz_to_rad(1.4)};
  EXPECT_THROW(softening_scan(testing::omega_z(), grid,
                              [](double wx) { return pes_at(units::rad_to_mhz(wx), false); }),
               PhysicsError);
}

TEST(Modes, CalibrationHitsTarget) {
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(units::mhz_to_rad(1.1 + 0.005 * i));
  const double wc = softening_scan(testing::omega_z(), grid, [](double wx) {
    return pes_at(units::rad_to_mhz(wx), true);
  });
  EXPECT_NEAR(units::rad_to_mhz(wc), testing::kRydbergCriticalMhz, 1e-9);
}

TEST(Modes, LowestEigenvalueSign) {
  EXPECT_GT(lowest_radial_eigenvalue(pes_at(1.25, true)), 0.0);
  EXPECT_LT(lowest_radial_eigenvalue(pes_at(1.22, true)), 0.0);
  EXPECT_GT(lowest_radial_eigenvalue(pes_at(1.21, false)), 0.0);
}

TEST(Modes, HessianSymmetric) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 10; ++k) {
    const PesModel pes = pes_at(1.2 + 0.02 * k, k % 2 == 0);
    const Matrix6 h = potential_hessian(testing::random_configuration(rng), pes);
    EXPECT_LT((h - h.transpose()).norm(), 1e-12 * h.norm());
  }
}

TEST(Modes, GroundRadialClosedFormAndCmVector) {
  const ModeSet g = ground_radial_modes(pes_at(1.42, false));
  const double wx = units::mhz_to_rad(1.42), wz = testing::omega_z();
  EXPECT_EQ(g.frequencies[g.index_of("cm")], wx);
  EXPECT_NEAR(g.squared_frequencies[g.index_of("zz")] / (wx * wx - 2.4 * wz * wz), 1.0, 1e-12);
  EXPECT_NEAR(g.squared_frequencies[g.index_of("rocking")] / (wx * wx - wz * wz), 1.0, 1e-12);
  const Vector6 cm = g.vector(g.index_of("cm"));
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(cm(i), 1.0 / std::sqrt(3.0), 1e-12);
  const ModeSet soft = ground_radial_modes(pes_at(std::sqrt(2.4) * testing::kOmegaZMhz, false));
  EXPECT_NEAR(soft.squared_frequencies[soft.index_of("zz")], 0.0, 1e-12 * wx * wx);
}

TEST(Modes, RydbergModesReduceToGroundWithoutPolarisability) {
  const Polarisability zero{0.0};
  const ModeSet g = ground_radial_modes(pes_at(1.3, false, testing::kOmegaZMhz, zero));
  const ModeSet r = rydberg_radial_modes(pes_at(1.3, true, testing::kOmegaZMhz, zero));
  for (const char* label : {"cm", "zz", "rocking"}) {
    EXPECT_NEAR(r.frequencies[r.index_of(label)] / g.frequencies[g.index_of(label)], 1.0, 1e-12);
  }
}

TEST(Modes, RydbergModesMatchNumericEigensolve) {
  const PesModel pes = pes_at(1.3, true);
  const ModeSet r = rydberg_radial_modes(pes);
  const ModeSet full = full_mode_analysis(pes, equilibrium_linear_analytic(pes).positions);
  const ModeSet g = ground_radial_modes(pes_at(1.3, false));
  EXPECT_NEAR(r.frequencies[r.index_of("rocking")] / g.frequencies[g.index_of("rocking")], 1.0, 1e-12);
  for (double f : r.frequencies) {
    double best = 1.0;
    for (double h : full.frequencies) best = std::min(best, std::abs(h / f - 1.0));
    EXPECT_LT(best, 1e-10);
  }
}

TEST(Modes, ZigzagModesMixAndStayStable) {
  const PesModel pes = pes_at(1.2, true);
  const ModeSet m = full_mode_analysis(pes, equilibrium_zigzag_analytic(pes).positions);
  ASSERT_EQ(m.size(), 6u);
  bool mixed = false, axial_cm = false;
  for (std::size_t k = 0; k < m.size(); ++k) {
    const Vector6 v = m.vector(k);
    if (v.head<3>().norm() > 1e-3 && v.tail<3>().norm() > 1e-3) mixed = true;
    if (std::abs(m.frequencies[k] / testing::omega_z() - 1.0) < 1e-9) axial_cm = true;
    EXPECT_GT(m.frequencies[k], 0.0);
  }
  EXPECT_TRUE(mixed);
  EXPECT_TRUE(axial_cm);
}

}  // namespace
}  // namespace vibron
