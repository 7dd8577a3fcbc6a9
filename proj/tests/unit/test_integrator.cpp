#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "vibron/errors.hpp"
#include "vibron/integrator.hpp"

namespace vibron {
namespace {

using cd = std::complex<double>;

OdeRhs linear(cd lambda) {
  return [lambda](double, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) { dy = lambda * y; };
}

TEST(Integrator, AdaptiveDecayAndRotation) {
  const cd lambda(-0.7, 3.0);
  Eigen::VectorXcd y(1);
  y(0) = 1.0;
  IntegratorOptions opt;
  opt.rtol = 1e-10;
  opt.atol = 1e-14;
  const IntegrationStats st = integrate(linear(lambda), y, 0.0, 2.0, opt);
  EXPECT_LT(std::abs(y(0) - std::exp(lambda * 2.0)), 1e-9);
  EXPECT_GT(st.accepted, 0u);
}

TEST(Integrator, FixedStepFourthOrder) {
  const cd lambda(-1.0, 2.0);
  auto error_for = [&](double h) {
    Eigen::VectorXcd y(1);
    y(0) = 1.0;
    IntegratorOptions opt;
    opt.mode = IntegratorOptions::Mode::FixedStep;
    opt.fixed_step = h;
    integrate(linear(lambda), y, 0.0, 1.0, opt);
    return std::abs(y(0) - std::exp(lambda));
  };
  const double ratio = error_for(0.02) / error_for(0.01);
  EXPECT_NEAR(std::log2(ratio), 4.0, 0.2);
}

TEST(Integrator, FixedStepIsDeterministic) {
  Eigen::VectorXcd a(2), b(2);
  a << 1.0, cd(0.0, 1.0);
  b = a;
  IntegratorOptions opt;
  opt.mode = IntegratorOptions::Mode::FixedStep;
  opt.fixed_step = 0.013;
  integrate(linear(cd(-0.3, 1.0)), a, 0.0, 1.0, opt);
  integrate(linear(cd(-0.3, 1.0)), b, 0.0, 1.0, opt);
  EXPECT_EQ(a, b);
}

TEST(Integrator, ObserverSeesEveryAcceptedStep) {
  Eigen::VectorXcd y(1);
  y(0) = 1.0;
  std::size_t calls = 0;
  double last_t = 0.0;
  const IntegrationStats st =
      integrate(linear(cd(-1.0, 0.0)), y, 0.0, 1.0, {}, [&](double t, Eigen::VectorXcd&) {
        ++calls;
        EXPECT_GT(t, last_t);
        last_t = t;
      });
  EXPECT_EQ(calls, st.accepted);
  EXPECT_DOUBLE_EQ(last_t, 1.0);
}

TEST(Integrator, StepBudgetExhausted) {
  Eigen::VectorXcd y(1);
  y(0) = 1.0;
  IntegratorOptions opt;
  opt.max_steps = 3;
  EXPECT_THROW(integrate(linear(cd(0.0, 1e4)), y, 0.0, 10.0, opt), PhysicsError);
}

TEST(Integrator, BlowUpRejected) {
  // y' = y^2 diverges at t = 1.
  Eigen::VectorXcd y(1);
  y(0) = 1.0;
  IntegratorOptions opt;
  opt.min_step = 1e-10;
  EXPECT_THROW(integrate([](double, const Eigen::VectorXcd& v, Eigen::VectorXcd& d) { d = v.cwiseProduct(v); },
                         y, 0.0, 2.0, opt),
               PhysicsError);
}

}  // namespace
}  // namespace vibron
