#include "vibron/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "vibron/errors.hpp"

namespace vibron {

namespace {

double error_norm(const Eigen::VectorXcd& err, const Eigen::VectorXcd& y0,
                  const Eigen::VectorXcd& y1, double atol, double rtol) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double scale = atol + rtol * std::sqrt(std::max(std::norm(y0(i)), std::norm(y1(i))));
    acc += std::norm(err(i)) / (scale * scale);
  }
  return std::sqrt(acc / static_cast<double>(std::max<Eigen::Index>(err.size(), 1)));
}

IntegrationStats integrate_rk4(const OdeRhs& f, Eigen::VectorXcd& y, double t0, double t1,
                               const IntegratorOptions& opt, const StepObserver& observer) {
  if (!(opt.fixed_step > 0.0)) {
    throw PhysicsError(ErrorCode::InvalidArgument, "fixed step must be positive");
  }
  const double span = t1 - t0;
  const auto steps = static_cast<std::size_t>(std::max(1.0, std::ceil(span / opt.fixed_step - 1e-9)));
  const double h = span / static_cast<double>(steps);
  Eigen::VectorXcd k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), tmp(y.size());
  IntegrationStats stats;
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = t0 + h * static_cast<double>(s);
    f(t, y, k1);
    tmp = y + (0.5 * h) * k1;
    f(t + 0.5 * h, tmp, k2);
    tmp = y + (0.5 * h) * k2;
    f(t + 0.5 * h, tmp, k3);
    tmp = y + h * k3;
    f(t + h, tmp, k4);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    stats.rhs_evaluations += 4;
    ++stats.accepted;
    if (observer) observer(t0 + h * static_cast<double>(s + 1), y);
  }
  stats.last_step = h;
  return stats;
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

IntegrationStats integrate_dp45(const OdeRhs& f, Eigen::VectorXcd& y, double t0, double t1,
                                const IntegratorOptions& opt, const StepObserver& observer) {
  const double span = t1 - t0;
  const double min_step = opt.min_step > 0.0 ? opt.min_step : 1e-12 * span;
  const Eigen::Index n = y.size();
  Eigen::VectorXcd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y_new(n), err(n);

  IntegrationStats stats;
  f(t0, y, k1);
  ++stats.rhs_evaluations;

  double h = opt.initial_step;
  if (!(h > 0.0)) {
    const double d0 = y.norm();
    const double d1 = k1.norm();
    h = (d0 > 1e-300 && d1 > 1e-300) ? 0.01 * d0 / d1 : 1e-6 * span;
  }
  h = std::min(h, span);

  double t = t0;
  while (t < t1) {
    if (stats.accepted + stats.rejected >= opt.max_steps) {
      throw PhysicsError(ErrorCode::StepRejected, "integrator exceeded the step budget");
    }
    const bool last = t + h >= t1 - 1e-12 * span;
    if (last) h = t1 - t;

    tmp = y + h * (a21 * k1);
    f(t + c2 * h, tmp, k2);
    tmp = y + h * (a31 * k1 + a32 * k2);
    f(t + c3 * h, tmp, k3);
    tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f(t + c4 * h, tmp, k4);
    tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(t + c5 * h, tmp, k5);
    tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(t + h, tmp, k6);
    y_new = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    f(t + h, y_new, k7);
    stats.rhs_evaluations += 6;
    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double en = error_norm(err, y, y_new, opt.atol, opt.rtol);
    if (!std::isfinite(en)) {
      throw PhysicsError(ErrorCode::StepRejected, "non-finite error estimate");
    }
    if (en <= 1.0) {
      t = last ? t1 : t + h;
      y.swap(y_new);
      // First-same-as-last reuse; observer projections are at roundoff level.
      k1.swap(k7);
      if (observer) observer(t, y);
      ++stats.accepted;
      stats.last_step = h;
      const double grow = en > 0.0 ? 0.9 * std::pow(en, -0.2) : 5.0;
      h *= std::clamp(grow, 0.2, 5.0);
    } else {
      ++stats.rejected;
      h *= std::clamp(0.9 * std::pow(en, -0.2), 0.2, 1.0);
      if (h < min_step) {
        throw PhysicsError(ErrorCode::StepRejected, "adaptive step fell below the floor");
      }
    }
  }
  return stats;
}

}  // namespace

IntegrationStats integrate(const OdeRhs& f, Eigen::VectorXcd& y, double t0, double t1,
                           const IntegratorOptions& options, const StepObserver& observer) {
  if (!(t1 >= t0)) {
    throw PhysicsError(ErrorCode::InvalidArgument, "integration interval is reversed");
  }
  if (t1 == t0) return {};
  return options.mode == IntegratorOptions::Mode::FixedStep
             ? integrate_rk4(f, y, t0, t1, options, observer)
             : integrate_dp45(f, y, t0, t1, options, observer);
}

}  // namespace vibron
