#include "vibron/dressing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include <Eigen/Core>
#include <unsupported/Eigen/NonLinearOptimization>

#include "vibron/errors.hpp"

namespace vibron {

double mixing_angle(double omega_mw, double delta_mw) {
  if (omega_mw == 0.0 && delta_mw == 0.0) {
    throw PhysicsError(ErrorCode::Undefined, "mixing angle undefined for zero coupling and detuning");
  }
  if (!std::isfinite(omega_mw) || std::isnan(delta_mw)) {
    throw PhysicsError(ErrorCode::InvalidArgument, "non-finite dressing parameters");
  }
  return 0.5 * std::atan2(omega_mw, -delta_mw);
}

double mixing_angle(const DressingParams& params) {
  return mixing_angle(params.omega_mw, params.delta_mw);
}

Polarisability dressed_polarisability(double theta, double pol_s, double pol_p) {
  if (!(theta >= 0.0 && theta <= 0.5 * std::numbers::pi)) {
    throw PhysicsError(ErrorCode::InvalidArgument, "mixing angle outside [0, pi/2]");
  }
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return Polarisability{pol_s * c * c + pol_p * s * s};
}

double stark_shift(const Polarisability& pol, double alpha, double dx, double hbar) {
  return -pol.value * alpha * alpha * dx * dx / hbar;
}

PolarisabilityFit fit_polarisability(std::span<const ShiftMeasurement> measurements, double alpha,
                                     double hbar) {
  std::set<double> distinct;
  for (const auto& m : measurements) {
    if (!(m.uncertainty > 0.0)) {
      throw PhysicsError(ErrorCode::InvalidArgument, "shift uncertainty must be positive");
    }
    distinct.insert(m.displacement * m.displacement);
  }
  if (distinct.size() < 2) {
    throw PhysicsError(ErrorCode::Degenerate, "need at least two distinct displacements");
  }

  // Normal equations for shift = a + b * dx^2 with weights 1/sigma^2.
  double s = 0.0, sx = 0.0, sxx = 0.0, sy = 0.0, sxy = 0.0;
  for (const auto& m : measurements) {
    const double w = 1.0 / (m.uncertainty * m.uncertainty);
    const double x = m.displacement * m.displacement;
    s += w;
    sx += w * x;
    sxx += w * x * x;
    sy += w * m.shift;
    sxy += w * x * m.shift;
  }
  const double det = s * sxx - sx * sx;
  const double a = (sxx * sy - sx * sxy) / det;
  const double b = (s * sxy - sx * sy) / det;
  const double var_b = s / det;

  double chi2 = 0.0;
  for (const auto& m : measurements) {
    const double r = (m.shift - a - b * m.displacement * m.displacement) / m.uncertainty;
    chi2 += r * r;
  }
  const double conv = hbar / (alpha * alpha);
  PolarisabilityFit fit;
  fit.value = -b * conv;
  fit.std_error = std::sqrt(var_b) * conv;
  fit.intercept = a;
  const auto dof = static_cast<double>(measurements.size()) - 2.0;
  fit.reduced_chi2 = dof > 0.0 ? chi2 / dof : 0.0;
  return fit;
}

namespace {

struct CurveFunctor {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  std::span<const CurvePoint> points;
  double omega_mw;
  double pol_s;
  double pol_p;

  [[nodiscard]] int inputs() const { return 2; }
  [[nodiscard]] int values() const { return static_cast<int>(points.size()); }

  // Parameters: scale and offset / omega_mw; residuals in units of |P_S|.
  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r) const {
    const double norm = std::abs(pol_s);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double theta = 0.5 * std::atan2(omega_mw, -(points[i].delta_mw + p(1) * omega_mw));
      const double c = std::cos(theta), s = std::sin(theta);
      r(static_cast<Eigen::Index>(i)) =
          (p(0) * (pol_s * c * c + pol_p * s * s) - points[i].polarisability) / norm;
    }
    return 0;
  }

  int df(const Eigen::VectorXd& p, Eigen::MatrixXd& jac) const {
    const double norm = std::abs(pol_s);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double x = points[i].delta_mw / omega_mw + p(1);
      const double theta = 0.5 * std::atan2(1.0, -x);
      const double c = std::cos(theta), s = std::sin(theta);
      const double model = pol_s * c * c + pol_p * s * s;
      // d theta / dx = 1 / (2 (1 + x^2)); d(model)/d theta = (P_P - P_S) sin(2 theta).
      const double dmodel = (pol_p - pol_s) * std::sin(2.0 * theta) * 0.5 / (1.0 + x * x);
      const auto row = static_cast<Eigen::Index>(i);
      jac(row, 0) = model / norm;
      jac(row, 1) = p(0) * dmodel / norm;
    }
    return 0;
  }
};

}  // namespace

CurveFit fit_polarisability_curve(std::span<const CurvePoint> points, double omega_mw,
                                  double pol_s, double pol_p) {
  if (points.size() < 3) {
    throw PhysicsError(ErrorCode::InvalidArgument, "curve fit needs at least three points");
  }
  if (!(omega_mw > 0.0) || pol_s == 0.0) {
    throw PhysicsError(ErrorCode::InvalidArgument, "curve fit needs omega_mw > 0 and P_S != 0");
  }
  CurveFunctor f{points, omega_mw, pol_s, pol_p};
  Eigen::VectorXd p(2);
  p << 1.0, 0.0;
  Eigen::LevenbergMarquardt<CurveFunctor> lm(f);
  lm.parameters.xtol = 1e-15;
  lm.parameters.ftol = 1e-15;
  lm.parameters.maxfev = 2000;
  const auto status = lm.minimize(p);
  using Status = Eigen::LevenbergMarquardtSpace::Status;
  const bool ok = status == Status::RelativeReductionTooSmall ||
                  status == Status::RelativeErrorTooSmall ||
                  status == Status::RelativeErrorAndReductionTooSmall ||
                  status == Status::CosinusTooSmall || status == Status::FtolTooSmall ||
                  status == Status::XtolTooSmall || status == Status::GtolTooSmall;
  if (!ok || !p.allFinite()) {
    throw PhysicsError(ErrorCode::NoConvergence,
                       "curve fit did not converge (status " + std::to_string(static_cast<int>(status)) + ")");
  }
  Eigen::VectorXd r(static_cast<Eigen::Index>(points.size()));
  f(p, r);
  CurveFit out;
  out.scale = p(0);
  out.detuning_offset = p(1) * omega_mw;
  out.residual_norm = r.norm();
  out.iterations = static_cast<int>(lm.iter);
  return out;
}

double zero_polarisability_detuning(const DressingParams& params) {
  if (!(params.omega_mw > 0.0)) {
    throw PhysicsError(ErrorCode::InvalidArgument, "omega_mw must be positive");
  }
  if (!(params.pol_s * params.pol_p < 0.0)) {
    throw PhysicsError(ErrorCode::NoRoot, "bare polarisabilities must have opposite signs");
  }
  const double theta = std::atan(std::sqrt(-params.pol_s / params.pol_p));
  return -params.omega_mw * std::cos(2.0 * theta) / std::sin(2.0 * theta);
}

double calibrate_pol_p(double theta, double residual_fraction, double pol_s) {
  const double c = std::cos(theta), s = std::sin(theta);
  if (s == 0.0) {
    throw PhysicsError(ErrorCode::Degenerate, "pure S state cannot be calibrated");
  }
  return pol_s * (residual_fraction - c * c) / (s * s);
}

}  // namespace vibron
