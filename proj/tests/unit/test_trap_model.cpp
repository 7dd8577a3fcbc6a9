#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "vibron/errors.hpp"

namespace vibron {
namespace {

using testing::omega_rf;
using testing::omega_z;
using testing::sr88;

TEST(TrapModel, GradientRoundTrip) {
  const SecularFrequencies f{units::mhz_to_rad(1.346), omega_z()};
  const TrapGradients g = gradients_from_frequencies(f, omega_rf(), sr88());
  const SecularFrequencies back = frequencies_from_gradients(g, sr88());
  EXPECT_NEAR(back.omega_x / f.omega_x, 1.0, 1e-12);
  EXPECT_NEAR(back.omega_z / f.omega_z, 1.0, 1e-12);
}

TEST(TrapModel, AxialGradientFromDefinition) {
  // omega_z^2 = 4 e beta / M
  const TrapGradients g = gradients_from_frequencies({units::mhz_to_rad(1.4), omega_z()}, omega_rf(), sr88());
  const double wz = std::sqrt(4.0 * sr88().charge() * g.beta / sr88().mass());
  EXPECT_NEAR(wz / omega_z(), 1.0, 1e-12);
}

TEST(TrapModel, ExactCriticalFrequency) {
  EXPECT_NEAR(units::rad_to_mhz(critical_frequency_exact3(omega_z())), std::sqrt(12.0 / 5.0) * 0.778, 1e-12);
}

TEST(TrapModel, ScalingLaw) {
  EXPECT_NEAR(critical_frequency_scaling(3, 1.0), 0.81 * std::pow(3.0, 0.87), 1e-12);
}

TEST(TrapModel, PositivePolarisabilityWeakensRadialConfinement) {
  const SecularFrequencies f{units::mhz_to_rad(1.3), omega_z()};
  const TrapGradients g = gradients_from_frequencies(f, omega_rf(), sr88());
  EXPECT_LT(rydberg_radial_frequency(f, g, testing::calibrated_pol(), sr88()), f.omega_x);
  EXPECT_GT(rydberg_radial_frequency(f, g, Polarisability{-1e7}, sr88()), f.omega_x);
  EXPECT_DOUBLE_EQ(rydberg_radial_frequency(f, g, Polarisability{0.0}, sr88()), f.omega_x);
}

TEST(TrapModel, CriticalRydbergAboveGround) {
  const double wc = critical_frequency_exact3(omega_z());
  const auto g = gradients_from_frequencies({wc, omega_z()}, omega_rf(), sr88());
  EXPECT_GT(critical_frequency_rydberg(wc, g, testing::calibrated_pol(), sr88()), wc);
}

TEST(TrapModel, MhzConversion) {
  EXPECT_NEAR(units::mhz_to_rad(1.0), 2.0 * std::numbers::pi * 1e6, 1e-6);
  EXPECT_NEAR(units::rad_to_mhz(units::mhz_to_rad(0.778)), 0.778, 1e-15);
}

TEST(TrapModel, CoulombConstantConsistent) {
  const IonConstants ions = sr88();
  const double k0 = ions.charge() * ions.charge() / (4.0 * std::numbers::pi * ions.vacuum_permittivity());
  EXPECT_NEAR(ions.coulomb_constant() / k0, 1.0, 1e-12);
  EXPECT_NEAR(ions.mass() / units::kAtomicMassUnit, 87.9, 0.1);
}

TEST(TrapModel, Fig1SettingsRoundTrip) {
  for (double wx : {1.42, 1.35, 1.23}) {
    const SecularFrequencies f{units::mhz_to_rad(wx), omega_z()};
    const SecularFrequencies back =
        frequencies_from_gradients(gradients_from_frequencies(f, omega_rf(), sr88()), sr88());
    EXPECT_NEAR(back.omega_x / f.omega_x, 1.0, 1e-10);
  }
}

TEST(TrapModel, UnstableTrapRejected) {
  TrapGradients g = gradients_from_frequencies({units::mhz_to_rad(1.4), omega_z()}, omega_rf(), sr88());
  g.beta = 0.0;
  EXPECT_THROW(frequencies_from_gradients(g, sr88()), PhysicsError);
}

TEST(TrapModel, RadialCollapseAtInvertedTrap) {
  const SecularFrequencies f{units::mhz_to_rad(1.3), omega_z()};
  const TrapGradients g = gradients_from_frequencies(f, omega_rf(), sr88());
  const double unit_shift = polarisability_shift_sq(g, Polarisability{1.0}, sr88());
  try {
    rydberg_radial_frequency(f, g, Polarisability{f.omega_x * f.omega_x / unit_shift * (1.0 + 1e-12)}, sr88());
    FAIL() << "no error";
  } catch (const PhysicsError& e) {
    EXPECT_EQ(e.code(), ErrorCode::RadialCollapse);
  }
}

TEST(TrapModel, ScalingLawValues) {
  EXPECT_NEAR(units::rad_to_mhz(critical_frequency_scaling(3, omega_z())), 1.639, 1e-3);
  EXPECT_THROW(critical_frequency_scaling(2, omega_z()), PhysicsError);
  EXPECT_NEAR(critical_frequency_exact3(1.0), std::sqrt(12.0 / 5.0), 1e-15);
  for (double wz = 0.1; wz < 5.0; wz += 0.1) {
    EXPECT_LT(critical_frequency_exact3(wz), critical_frequency_scaling(3, wz));
  }
}

TEST(TrapModel, RydbergCriticalLinearInPolarisability) {
  const double wc = critical_frequency_exact3(omega_z());
  const TrapGradients g = gradients_from_frequencies({wc, omega_z()}, omega_rf(), sr88());
  EXPECT_EQ(critical_frequency_rydberg(wc, g, Polarisability{0.0}, sr88()), wc);
  const Polarisability p = testing::calibrated_pol();
  const double a = critical_frequency_rydberg(wc, g, p, sr88());
  const double b = critical_frequency_rydberg(wc, g, Polarisability{2.0 * p.value}, sr88());
  EXPECT_NEAR((b * b - wc * wc) / (a * a - wc * wc), 2.0, 1e-10);
  // Same magnitude, opposite sign as the shift of the excited ion's radial frequency.
  const double wr = rydberg_radial_frequency({wc, omega_z()}, g, p, sr88());
  EXPECT_NEAR((wr * wr - wc * wc) / (a * a - wc * wc), -1.0, 1e-12);
}

TEST(TrapModel, PolarisabilityInvertsClosedForm) {
  const double wc = units::mhz_to_rad(1.205);
  const double target = units::mhz_to_rad(1.23);
  const TrapGradients g = gradients_from_frequencies({wc, omega_z()}, omega_rf(), sr88());
  const Polarisability p{(target * target - wc * wc) / polarisability_shift_sq(g, Polarisability{1.0}, sr88())};
  EXPECT_NEAR(critical_frequency_rydberg(wc, g, p, sr88()) / target, 1.0, 1e-12);
}

}  // namespace
}  // namespace vibron
