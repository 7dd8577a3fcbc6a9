#include "minimizer.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace vibron::detail {

namespace {

constexpr double kMaxStep = 0.05;     // dimensionless, keeps ions from crossing
constexpr double kBfgsHandoff = 1e-7;  // Armijo tests lose meaning below this

// Plain BFGS until the gradient is small enough for Newton to take over.
int run_bfgs(const Objective6& f, Vector6& x, int budget) {
  double fx = f.value(x);
  Vector6 g = f.gradient(x);
  Matrix6 hinv = Matrix6::Identity();
  int it = 0;
  for (; it < budget; ++it) {
    if (g.norm() < kBfgsHandoff) break;
    Vector6 p = -hinv * g;
    if (g.dot(p) >= 0.0) {
      hinv.setIdentity();
      p = -g;
    }
    if (p.norm() > kMaxStep) p *= kMaxStep / p.norm();
    double t = 1.0;
    Vector6 xn;
    double fn = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      xn = x + t * p;
      fn = f.value(xn);
      if (std::isfinite(fn) && fn <= fx + 1e-4 * t * g.dot(p) + 1e-15 * std::abs(fx)) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    const Vector6 gn = f.gradient(xn);
    const Vector6 s = xn - x;
    const Vector6 y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      const double rho = 1.0 / sy;
      const Matrix6 id = Matrix6::Identity();
      hinv = (id - rho * s * y.transpose()) * hinv * (id - rho * y * s.transpose()) +
             rho * s * s.transpose();
    }
    x = xn;
    fx = fn;
    g = gn;
  }
  return it;
}

}  // namespace

MinimizeReport minimize_bfgs_newton(const Objective6& f, Vector6 x0, double tolerance,
                                    int max_iterations) {
  MinimizeReport report;
  Vector6 x = std::move(x0);
  int used = 0;
  for (int escape = 0; escape < 4 && used < max_iterations; ++escape) {
    used += run_bfgs(f, x, max_iterations - used);

    // Newton polishing with acceptance on the gradient norm only.
    Vector6 g = f.gradient(x);
    for (int k = 0; k < 30 && used < max_iterations; ++k, ++used) {
      if (g.norm() < 1e-3 * tolerance) break;
      const Eigen::SelfAdjointEigenSolver<Matrix6> eig(f.hessian(x));
      if (eig.eigenvalues().minCoeff() <= 0.0) break;
      Vector6 dx = -eig.eigenvectors() *
                   (eig.eigenvalues().cwiseInverse().asDiagonal() *
                    (eig.eigenvectors().transpose() * g));
      if (dx.norm() > kMaxStep) dx *= kMaxStep / dx.norm();
      const Vector6 xn = x + dx;
      if (!std::isfinite(f.value(xn))) break;
      const Vector6 gn = f.gradient(xn);
      if (gn.norm() >= g.norm() && g.norm() < tolerance) break;
      x = xn;
      g = gn;
    }

    const Eigen::SelfAdjointEigenSolver<Matrix6> eig(f.hessian(x));
    const double lowest = eig.eigenvalues()(0);
    if (lowest > 0.0 || g.norm() >= tolerance) {
      report.gradient_norm = g.norm();
      report.converged = g.norm() < tolerance && lowest > 0.0;
      if (report.converged || used >= max_iterations) break;
      continue;
    }
    // Stationary but not a minimum: leave along the unstable direction.
    Vector6 v = eig.eigenvectors().col(0);
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0.0) v = -v;
    x += 1e-3 * v;
    report.gradient_norm = g.norm();
  }
  report.x = x;
  report.iterations = used;
  return report;
}

}  // namespace vibron::detail
