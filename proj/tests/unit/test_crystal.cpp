#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "vibron/errors.hpp"

namespace vibron {
namespace {

using testing::pes_at;

double max_abs_diff(const IonPositions& a, const IonPositions& b) {
  return (a.as_vector() - b.as_vector()).cwiseAbs().maxCoeff();
}

TEST(Crystal, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const PesModel pes = pes_at(1.1 + 0.004 * trial, trial % 2 == 1);
    const IonPositions p = testing::random_configuration(rng);
    const Vector6 g = potential_gradient(p, pes);
    Vector6 fd;
    const double h = 1e-11;
    for (int k = 0; k < 6; ++k) {
      Vector6 up = p.as_vector(), dn = p.as_vector();
      up(k) += h;
      dn(k) -= h;
      fd(k) = (potential_energy(IonPositions::from_vector(up), pes) -
               potential_energy(IonPositions::from_vector(dn), pes)) / (2 * h);
    }
    EXPECT_LT((g - fd).norm() / g.norm(), 1e-6) << "trial " << trial;
  }
}

TEST(Crystal, HessianMatchesSecondDifferences) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const PesModel pes = pes_at(1.15 + 0.01 * trial, trial % 2 == 0);
    const IonPositions p = testing::random_configuration(rng);
    const Matrix6 h = potential_hessian(p, pes);
    Matrix6 fd;
    const double step = 2e-9;
    for (int k = 0; k < 6; ++k) {
      Vector6 up = p.as_vector(), dn = p.as_vector();
      up(k) += step;
      dn(k) -= step;
      fd.col(k) = (potential_gradient(IonPositions::from_vector(up), pes) -
                   potential_gradient(IonPositions::from_vector(dn), pes)) / (2 * step);
    }
    EXPECT_LT((h - fd).norm() / h.norm(), 1e-5) << "trial " << trial;
    EXPECT_LT((h - h.transpose()).norm(), 1e-12 * h.norm());
  }
}

TEST(Crystal, LinearAnalyticMatchesMinimizer) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> noise(0.0, 2e-8);
  for (double wx : {1.3, 1.346, 1.42}) {
    for (bool excited : {false, true}) {
      const PesModel pes = pes_at(wx, excited);
      const EquilibriumResult a = equilibrium_linear_analytic(pes);
      EXPECT_EQ(a.configuration, Configuration::Linear);
      EXPECT_LT(a.scaled_gradient_norm, 1e-10);
      IonPositions seed = a.positions;
      for (std::size_t i = 0; i < 3; ++i) {
        seed.x[i] += noise(rng);
        seed.z[i] += noise(rng);
      }
      const EquilibriumResult n = equilibrium_numeric(pes, seed);
      EXPECT_LT(max_abs_diff(a.positions, n.positions), 1e-9);
    }
  }
}

TEST(Crystal, AxialSpacingClosedForm) {
  // Three ions: z = +-(5/4)^(1/3) l with l^3 = K0 / (M omega_z^2).
  const PesModel pes = pes_at(1.42, false);
  const EquilibriumResult a = equilibrium_linear_analytic(pes);
  const double expected = std::cbrt(1.25) * pes.length_scale();
  EXPECT_NEAR(a.positions.z[2], expected, 1e-15);
  EXPECT_NEAR(a.positions.z[0], -expected, 1e-15);
  EXPECT_NEAR(a.positions.z[2] * 1e6, 4.36, 0.01);
}

TEST(Crystal, ZigzagAnalyticMatchesMinimizerBothBranches) {
  for (double wx : {1.0, 1.1, 1.2, 1.22}) {
    const PesModel pes = pes_at(wx, true);
    const EquilibriumResult a = equilibrium_zigzag_analytic(pes);
    EXPECT_EQ(a.configuration, Configuration::Zigzag);
    EXPECT_GT(a.positions.x[1], 0.0);
    EXPECT_LT(a.scaled_gradient_norm, 1e-10);

    IonPositions seed = a.positions;
    seed.x[1] *= 0.7;
    const EquilibriumResult n = equilibrium_numeric(pes, seed);
    EXPECT_LT(max_abs_diff(a.positions, n.positions), 1e-9) << wx;

    IonPositions mirror = a.positions;
    for (auto& x : mirror.x) x = -0.8 * x;
    const EquilibriumResult m = equilibrium_numeric(pes, mirror);
    EXPECT_LT(m.positions.x[1], 0.0);
    EXPECT_NEAR(m.energy / n.energy, 1.0, 1e-12);

    const EquilibriumResult lin = equilibrium_linear_analytic(pes);
    EXPECT_LT(a.energy, lin.energy);
  }
}

TEST(Crystal, ZigzagRequiresSoftenedSurface) {
  EXPECT_THROW(equilibrium_zigzag_analytic(pes_at(1.3, false, testing::kOmegaZMhz, Polarisability{0.0})),
               PhysicsError);
  try {
    equilibrium_zigzag_analytic(pes_at(1.3, true, testing::kOmegaZMhz, Polarisability{0.0}));
  } catch (const PhysicsError& e) {
    EXPECT_EQ(e.code(), ErrorCode::LinearRegime);
  }
}

TEST(Crystal, CoincidentSeedRejected) {
  const PesModel pes = pes_at(1.3, false);
  IonPositions seed;
  seed.z = {0.0, 0.0, 4e-6};
  EXPECT_THROW(equilibrium_numeric(pes, seed), PhysicsError);
}

TEST(Crystal, ClassificationThreshold) {
  IonPositions p;
  EXPECT_EQ(classify_configuration(p), Configuration::Linear);
  p.x[1] = 1e-9;
  EXPECT_EQ(classify_configuration(p), Configuration::Zigzag);
  p.x[1] = 0.999e-9;
  EXPECT_EQ(classify_configuration(p), Configuration::Linear);
  EXPECT_EQ(classify_configuration(equilibrium_zigzag_analytic(pes_at(1.2, true)).positions),
            Configuration::Zigzag);
}

TEST(Crystal, PackingRoundTrip) {
  std::mt19937_64 rng(1);
  const IonPositions p = testing::random_configuration(rng);
  EXPECT_EQ(max_abs_diff(p, IonPositions::from_vector(p.as_vector())), 0.0);
}

}  // namespace
}  // namespace vibron
