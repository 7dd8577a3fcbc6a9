#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "vibron/dressing.hpp"
#include "vibron/errors.hpp"
#include "vibron/trap_model.hpp"

namespace vibron {
namespace {

constexpr double kHbar = units::kHbar;
const double kOmega = units::mhz_to_rad(154.0);

TEST(Dressing, MixingAngleLimits) {
  EXPECT_NEAR(mixing_angle(kOmega, -1e15), 0.0, 1e-6);
  EXPECT_NEAR(mixing_angle(kOmega, 1e15), std::numbers::pi / 2, 1e-6);
  EXPECT_NEAR(mixing_angle(kOmega, 0.0), std::numbers::pi / 4, 1e-15);
  EXPECT_THROW(mixing_angle(0.0, 0.0), PhysicsError);
}

TEST(Dressing, MixingAngleSatisfiesDefinition) {
  for (double d : {-300.0, -95.0, -10.0, 10.0, 95.0, 300.0}) {
    const double delta = units::mhz_to_rad(d);
    const double th = mixing_angle(kOmega, delta);
    EXPECT_NEAR(std::tan(2 * th), -kOmega / delta, 1e-9 * std::abs(kOmega / delta));
  }
}

TEST(Dressing, MixingAngleMonotoneAndContinuous) {
  double prev = -1.0;
  const int n = 6001;
  for (int i = 0; i < n; ++i) {
    const double delta = units::mhz_to_rad(-300.0 + 600.0 * i / (n - 1));
    const double th = mixing_angle(kOmega, delta);
    ASSERT_GE(th, 0.0);
    ASSERT_LT(th, std::numbers::pi / 2);
    if (prev >= 0.0) {
      ASSERT_GT(th, prev);
      ASSERT_LT(th - prev, 1e-3);
    }
    prev = th;
  }
}

TEST(Dressing, DressedPolarisabilityEndpoints) {
  EXPECT_DOUBLE_EQ(dressed_polarisability(0.0, 2.0, -5.0).value, 2.0);
  EXPECT_NEAR(dressed_polarisability(std::numbers::pi / 2, 2.0, -5.0).value, -5.0, 1e-15);
  EXPECT_THROW(dressed_polarisability(-0.1, 1.0, 1.0), PhysicsError);
  EXPECT_THROW(dressed_polarisability(2.0, 1.0, 1.0), PhysicsError);
}

TEST(Dressing, CalibrationAndZeroCrossing) {
  const double th = mixing_angle(kOmega, units::mhz_to_rad(-95.0));
  const double pp = calibrate_pol_p(th, 0.048, 1.0);
  EXPECT_NEAR(dressed_polarisability(th, 1.0, pp).value, 0.048, 1e-14);
  const DressingParams params{kOmega, 0.0, 1.0, pp};
  const double d0 = zero_polarisability_detuning(params);
  EXPECT_NEAR(dressed_polarisability(mixing_angle(kOmega, d0), 1.0, pp).value, 0.0, 1e-12);
  EXPECT_GT(d0, units::mhz_to_rad(-95.0));
  EXPECT_THROW(zero_polarisability_detuning({kOmega, 0.0, 1.0, 2.0}), PhysicsError);
}

TEST(Dressing, StarkShiftSignAndScaling) {
  const Polarisability p{1e-30};
  EXPECT_LT(stark_shift(p, 1e8, 1e-6, kHbar), 0.0);
  EXPECT_NEAR(stark_shift(p, 1e8, 2e-6, kHbar) / stark_shift(p, 1e8, 1e-6, kHbar), 4.0, 1e-12);
}

std::vector<ShiftMeasurement> synthetic(double pol, double alpha, double offset, double sigma) {
  std::vector<ShiftMeasurement> out;
  for (double dx : {0.5e-6, 1.0e-6, 1.5e-6, 2.0e-6, 2.5e-6, 3.0e-6}) {
    out.push_back({dx, offset + stark_shift({pol}, alpha, dx, kHbar), sigma});
  }
  return out;
}

TEST(Dressing, FitExactOnNoiselessData) {
  const double alpha = 3e8, pol = 4.2e-33;
  const auto data = synthetic(pol, alpha, 125.0, 10.0);
  const PolarisabilityFit f = fit_polarisability(data, alpha, kHbar);
  EXPECT_NEAR(f.value / pol, 1.0, 1e-12);
  EXPECT_NEAR(f.intercept, 125.0, 1e-6);
  EXPECT_LT(f.reduced_chi2, 1e-12);
}

TEST(Dressing, FitUncertaintyMatchesScatter) {
  const double alpha = 3e8, pol = 4.2e-33, sigma = 2000.0;
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> estimates;
  double reported = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    auto data = synthetic(pol, alpha, 0.0, sigma);
    for (auto& m : data) m.shift += sigma * g(rng);
    const PolarisabilityFit f = fit_polarisability(data, alpha, kHbar);
    estimates.push_back(f.value);
    reported = f.std_error;
  }
  double mean = 0.0, var = 0.0;
  for (double e : estimates) mean += e;
  mean /= static_cast<double>(estimates.size());
  for (double e : estimates) var += (e - mean) * (e - mean);
  const double sd = std::sqrt(var / static_cast<double>(estimates.size() - 1));
  EXPECT_NEAR(mean / pol, 1.0, 4.0 * sd / std::sqrt(2000.0) / pol);
  EXPECT_NEAR(sd / reported, 1.0, 0.08);
}

TEST(Dressing, FitDegenerate) {
  std::vector<ShiftMeasurement> same{{1e-6, 1.0, 1.0}, {1e-6, 2.0, 1.0}};
  EXPECT_THROW(fit_polarisability(same, 1e8, kHbar), PhysicsError);
  std::vector<ShiftMeasurement> bad{{1e-6, 1.0, 0.0}, {2e-6, 2.0, 1.0}};
  EXPECT_THROW(fit_polarisability(bad, 1e8, kHbar), PhysicsError);
}

TEST(Dressing, CurveFitRecoversScaleAndOffset) {
  const double ps = 2.0, pp = -6.0, scale = 1.37, offset = units::mhz_to_rad(12.5);
  std::vector<CurvePoint> pts;
  for (int i = 0; i < 31; ++i) {
    const double d = units::mhz_to_rad(-300.0 + 20.0 * i);
    pts.push_back({d, scale * dressed_polarisability(mixing_angle(kOmega, d + offset), ps, pp).value});
  }
  const CurveFit f = fit_polarisability_curve(pts, kOmega, ps, pp);
  EXPECT_NEAR(f.scale, scale, 1e-6 * scale);
  EXPECT_NEAR(f.detuning_offset, offset, 1e-6 * std::abs(offset));
  EXPECT_LT(f.residual_norm, 1e-8);
}

}  // namespace
}  // namespace vibron
