#pragma once

#include <functional>

#include "vibron/crystal.hpp"

namespace vibron::detail {

/// Smooth 6-dimensional objective in dimensionless coordinates.
struct Objective6 {
  std::function<double(const Vector6&)> value;  ///< +inf when undefined
  std::function<Vector6(const Vector6&)> gradient;
  std::function<Matrix6(const Vector6&)> hessian;
};

struct MinimizeReport {
  Vector6 x = Vector6::Zero();
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// BFGS with backtracking, then Newton polishing with saddle escape.
MinimizeReport minimize_bfgs_newton(const Objective6& f, Vector6 x0, double tolerance,
                                    int max_iterations);

}  // namespace vibron::detail
