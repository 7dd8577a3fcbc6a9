#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "vibron/errors.hpp"
#include "vibron/franck_condon.hpp"
#include "vibron/surfaces.hpp"

namespace vibron {
namespace {

Eigen::Matrix2d rotation(double phi) {
  Eigen::Matrix2d s;
  s << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
  return s;
}

DuschinskyMap random_map(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(-0.6, 0.6), disp(-1.2, 1.2), ratio(0.7, 1.3);
  return DuschinskyMap::make(rotation(angle(rng)), {disp(rng), disp(rng)}, {1.0, 0.6},
                             {ratio(rng), 0.6 * ratio(rng)});
}

TEST(FranckCondon, RecursionMatchesQuadrature) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 4; ++trial) {
    const DuschinskyMap map = random_map(rng);
    const FCMatrix fc = fc_matrix(map, 2, 2, 1.0);
    for (int n1 = 0; n1 <= 2; ++n1)
      for (int n2 = 0; n2 <= 2; ++n2)
        for (int m1 = 0; m1 <= 2; ++m1)
          for (int m2 = 0; m2 <= 2; ++m2)
            EXPECT_NEAR(fc(n1, n2, m1, m2), fc_oracle_grid(map, {n1, n2}, {m1, m2}), 1e-8);
  }
}

TEST(FranckCondon, PoissonLimit) {
  const double d = 1.7;
  const DuschinskyMap map = DuschinskyMap::make(Eigen::Matrix2d::Identity(), {d, 0.0}, {1.0, 0.5}, {1.0, 0.5});
  const FCMatrix fc = fc_matrix(map, 0, 40);
  const double lambda = 0.5 * d * d;
  for (int m = 0; m <= 40; ++m) {
    const double poisson = std::exp(-lambda + m * std::log(lambda) - std::lgamma(m + 1.0));
    EXPECT_NEAR(fc(0, 0, m, 0) * fc(0, 0, m, 0), poisson, 1e-8);
    EXPECT_NEAR(fc(0, 0, m, 1), 0.0, 1e-14);
  }
}

TEST(FranckCondon, SqueezedVacuumOverlap) {
  // <0|0'> for a pure frequency change is (4 w w')^(1/4) / sqrt(w + w') per mode.
  const double w = 1.0, wp = 0.35;
  const DuschinskyMap map = DuschinskyMap::make(Eigen::Matrix2d::Identity(), {0.0, 0.0}, {w, w}, {wp, w});
  const FCMatrix fc = fc_matrix(map, 0, 10);
  EXPECT_NEAR(fc(0, 0, 0, 0), std::pow(4.0 * w * wp, 0.25) / std::sqrt(w + wp), 1e-13);
}

TEST(FranckCondon, ParitySelection) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> angle(-0.6, 0.6), ratio(0.6, 1.4);
  for (int trial = 0; trial < 5; ++trial) {
    const DuschinskyMap rotated =
        DuschinskyMap::make(rotation(angle(rng)), {0.0, 0.0}, {1.0, 0.7}, {ratio(rng), ratio(rng)});
    const DuschinskyMap aligned =
        DuschinskyMap::make(Eigen::Matrix2d::Identity(), {0.0, 0.0}, {1.0, 0.7}, {ratio(rng), ratio(rng)});
    const FCMatrix a = fc_matrix(rotated, 3, 12, 1.0);
    const FCMatrix b = fc_matrix(aligned, 3, 12, 1.0);
    for (int n1 = 0; n1 <= 3; ++n1)
      for (int n2 = 0; n2 <= 3; ++n2)
        for (int m1 = 0; m1 <= 12; ++m1)
          for (int m2 = 0; m2 <= 12; ++m2) {
            if ((n1 + n2 + m1 + m2) % 2 == 1) EXPECT_LT(std::abs(a(n1, n2, m1, m2)), 1e-12);
            if ((n1 + m1) % 2 == 1 || (n2 + m2) % 2 == 1) EXPECT_LT(std::abs(b(n1, n2, m1, m2)), 1e-12);
          }
  }
}

TEST(FranckCondon, IdentityMapIsDelta) {
  const DuschinskyMap map = DuschinskyMap::make(Eigen::Matrix2d::Identity(), {0, 0}, {1.0, 0.5}, {1.0, 0.5});
  const FCMatrix fc = fc_matrix(map, 3, 5);
  for (int n1 = 0; n1 <= 3; ++n1)
    for (int n2 = 0; n2 <= 3; ++n2)
      for (int m1 = 0; m1 <= 5; ++m1)
        for (int m2 = 0; m2 <= 5; ++m2)
          EXPECT_NEAR(fc(n1, n2, m1, m2), (n1 == m1 && n2 == m2) ? 1.0 : 0.0, 1e-13);
}

TEST(FranckCondon, CompletenessAndUnitarity) {
  std::mt19937_64 rng(9);
  const DuschinskyMap map = random_map(rng);
  const FCMatrix fc = fc_matrix(map, 3, 60);
  EXPECT_TRUE(fc.meets_bound());
  EXPECT_LT(fc.max_completeness_defect(4, 4), 1e-10);
  // Rows of W restricted to a complete column set are orthonormal.
  const Eigen::MatrixXd w = fc.overlap_matrix(4, 4);
  EXPECT_LT((w * w.transpose() - Eigen::MatrixXd::Identity(16, 16)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(FranckCondon, TruncationDetected) {
  const DuschinskyMap map = DuschinskyMap::make(Eigen::Matrix2d::Identity(), {4.0, 0.0}, {1.0, 0.5}, {1.0, 0.5});
  const FCMatrix fc = fc_matrix(map, 1, 5, 1e-6);
  EXPECT_FALSE(fc.meets_bound());
  EXPECT_THROW(fc.require_complete(2, 2, 1e-6), PhysicsError);
  EXPECT_THROW((void)fc(2, 0, 0, 0), PhysicsError);
}

TEST(FranckCondon, InvalidMapRejected) {
  Eigen::Matrix2d bad;
  bad << 1.0, 0.1, 0.0, 1.0;
  EXPECT_THROW(DuschinskyMap::make(bad, {0, 0}, {1, 1}, {1, 1}), PhysicsError);
  EXPECT_THROW(DuschinskyMap::make(Eigen::Matrix2d::Identity(), {0, 0}, {1, -1}, {1, 1}), PhysicsError);
}

TEST(FranckCondon, QuadratureGridGuard) {
  const DuschinskyMap map = DuschinskyMap::make(Eigen::Matrix2d::Identity(), {0, 0}, {1, 1}, {1, 1});
  EXPECT_THROW(fc_oracle_grid(map, {0, 0}, {0, 0}, GridSpec{4.0, 401}), PhysicsError);
  EXPECT_THROW(fc_oracle_grid(map, {0, 0}, {0, 0}, GridSpec{8.0, 100}), PhysicsError);
}

TEST(FranckCondon, CrystalMapIsNearlyIdentityFarFromCritical) {
  const SurfacePair sp = make_surface_pair(testing::sr88(), {units::mhz_to_rad(1.42), testing::omega_z()},
                                           testing::omega_rf(), testing::calibrated_pol());
  EXPECT_NEAR(std::abs(sp.map.rotation(0, 0)), 1.0, 1e-2);
  EXPECT_LT(sp.map.displacement.norm(), 1e-9);
  EXPECT_GT(sp.map.projection_singular_values.minCoeff(), 0.99);
}

TEST(FranckCondon, MarginalModes) {
  const DuschinskyMap map = DuschinskyMap::make(Eigen::Matrix2d::Identity(), {1.0, 2.0}, {1, 1}, {1, 1});
  const FCMatrix fc = fc_matrix(map, 0, 30);
  const auto m1 = fc_marginal(fc, {0, 0}, 1);
  const auto m2 = fc_marginal(fc, {0, 0}, 2);
  ASSERT_EQ(m1.size(), 31u);
  EXPECT_NEAR(m1[1] / m1[0], 0.5, 1e-12);
  EXPECT_NEAR(m2[1] / m2[0], 2.0, 1e-12);
  EXPECT_THROW(fc_marginal(fc, {0, 0}, 3), PhysicsError);
}

SurfacePair pair_at(double mhz, Polarisability pol = testing::calibrated_pol()) {
  return make_surface_pair(testing::sr88(), {units::mhz_to_rad(mhz), testing::omega_z()}, testing::omega_rf(), pol);
}

TEST(FranckCondon, DuschinskyFromCrystalModes) {
  const SurfacePair same = pair_at(1.3, Polarisability{0.0});
  EXPECT_LT((same.map.rotation - Eigen::Matrix2d::Identity()).norm(), 1e-10);
  EXPECT_LT(same.map.displacement.norm(), 1e-10);

  const SurfacePair lin = pair_at(1.3);
  EXPECT_LT(lin.map.displacement.norm(), 1e-10);
  EXPECT_GT((lin.map.rotation.cwiseAbs() - Eigen::Matrix2d::Identity()).norm(), 1e-6);
  EXPECT_LT((lin.map.rotation.transpose() * lin.map.rotation - Eigen::Matrix2d::Identity()).norm(), 1e-10);

  const SurfacePair zz = pair_at(1.225);
  EXPECT_EQ(zz.excited_equilibrium.configuration, Configuration::Zigzag);
  EXPECT_GT(zz.map.displacement.norm(), 1.0);
}

TEST(FranckCondon, OracleIdentityAndConvergence) {
  const DuschinskyMap id = DuschinskyMap::make(Eigen::Matrix2d::Identity(), {0, 0}, {1, 1}, {1, 1});
  EXPECT_NEAR(fc_oracle_grid(id, {0, 0}, {0, 0}), 1.0, 1e-9);
  EXPECT_NEAR(fc_oracle_grid(id, {0, 0}, {0, 1}), 0.0, 1e-9);
  std::mt19937_64 rng(77);
  const DuschinskyMap map = random_map(rng);
  const double coarse = fc_oracle_grid(map, {2, 1}, {1, 3}, GridSpec{8.0, 401});
  const double fine = fc_oracle_grid(map, {2, 1}, {1, 3}, GridSpec{8.0, 801});
  EXPECT_LT(std::abs(coarse - fine), 1e-9);
}

TEST(FranckCondon, CrystalMarginalsAtFigureFrequencies) {
  auto marginal = [](double mhz) { return fc_marginal(fc_matrix(pair_at(mhz).map, 0, 200), {0, 0}, 2); };
  const auto a = marginal(1.346);
  EXPECT_EQ(std::max_element(a.begin(), a.end()) - a.begin(), 0);
  const auto b = marginal(1.234);
  double total = 0.0;
  for (std::size_t m = 0; m < b.size(); ++m) {
    if (m % 2 == 1) EXPECT_LT(b[m], 1e-24);
    total += b[m];
  }
  EXPECT_LE(total, 1.0 + 1e-12);
  EXPECT_GT(b[2], b[4]);
  const auto c = marginal(1.225);
  EXPECT_NEAR(static_cast<double>(std::max_element(c.begin(), c.end()) - c.begin()), 50.0, 10.0);
}

}  // namespace
}  // namespace vibron
