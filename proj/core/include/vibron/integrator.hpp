#pragma once

#include <cstddef>
#include <functional>

#include <Eigen/Core>

namespace vibron {

struct IntegratorOptions {
  enum class Mode { Adaptive, FixedStep };
  Mode mode = Mode::Adaptive;
  double rtol = 1e-8;
  double atol = 1e-12;
  double initial_step = 0.0;  ///< 0 selects a step from the initial derivative
  double fixed_step = 1e-9;   ///< upper bound on the step in FixedStep mode
  double min_step = 0.0;      ///< 0 means 1e-12 of the interval
  std::size_t max_steps = 50'000'000;
};

struct IntegrationStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
  double last_step = 0.0;
};

using OdeRhs = std::function<void(double t, const Eigen::VectorXcd& y, Eigen::VectorXcd& dydt)>;
/// Called after every accepted step; may project the state in place.
using StepObserver = std::function<void(double t, Eigen::VectorXcd& y)>;

/// Integrates y' = f(t, y) from t0 to t1 in place.
///
/// Adaptive mode uses the Dormand-Prince 5(4) pair with a mixed
/// absolute/relative RMS error norm. FixedStep mode uses classical RK4 with
/// the interval split evenly, so results depend only on the inputs.
/// Throws StepRejected once the adaptive step falls below min_step.
IntegrationStats integrate(const OdeRhs& f, Eigen::VectorXcd& y, double t0, double t1,
                           const IntegratorOptions& options, const StepObserver& observer = {});

}  // namespace vibron
