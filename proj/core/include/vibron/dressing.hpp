#pragma once

#include <span>
#include <utility>
#include <vector>

#include "vibron/trap_model.hpp"

namespace vibron {

/// Two-level microwave dressing of the S-type Rydberg state by a P-type state.
struct DressingParams {
  double omega_mw = 0.0;  ///< Rabi frequency, rad/s, > 0
  double delta_mw = 0.0;  ///< signed detuning, rad/s
  double pol_s = 0.0;     ///< bare S-state polarisability
  double pol_p = 0.0;     ///< bare P-state polarisability
};

/// Resonance shift of the Rydberg line for one radial displacement.
struct ShiftMeasurement {
  double displacement = 0.0;  ///< m
  double shift = 0.0;         ///< Hz
  double uncertainty = 1.0;   ///< Hz, > 0
};

/// theta in [0, pi/2) from tan(2 theta) = -Omega / Delta.
///
/// theta -> 0 (pure S) as Delta -> -infinity and theta -> pi/2 (pure P) as
/// Delta -> +infinity. Undefined when both arguments vanish.
double mixing_angle(double omega_mw, double delta_mw);
double mixing_angle(const DressingParams& params);

/// P_S cos^2(theta) + P_P sin^2(theta).
Polarisability dressed_polarisability(double theta, double pol_s, double pol_p);

/// -P alpha^2 dx^2 / hbar.
double stark_shift(const Polarisability& pol, double alpha, double dx, double hbar);

struct PolarisabilityFit {
  double value = 0.0;      ///< polarisability estimate
  double std_error = 0.0;  ///< one-sigma from the weighted normal equations
  double intercept = 0.0;  ///< fitted shift at zero displacement, Hz
  double reduced_chi2 = 0.0;
};

/// Weighted straight-line fit of shift against dx^2; slope -P alpha^2 / hbar.
PolarisabilityFit fit_polarisability(std::span<const ShiftMeasurement> measurements, double alpha,
                                     double hbar);

struct CurvePoint {
  double delta_mw = 0.0;        ///< rad/s
  double polarisability = 0.0;  ///< measured total polarisability
};

struct CurveFit {
  double scale = 1.0;
  double detuning_offset = 0.0;  ///< rad/s, added to every detuning
  double residual_norm = 0.0;    ///< in units of |P_S|
  int iterations = 0;
};

/// Levenberg-Marquardt fit of scale * P_r(theta(Delta + offset)).
CurveFit fit_polarisability_curve(std::span<const CurvePoint> points, double omega_mw,
                                  double pol_s, double pol_p);

/// Detuning at which the dressed polarisability vanishes.
double zero_polarisability_detuning(const DressingParams& params);

/// P-state polarisability that leaves `residual_fraction` times P_S at angle theta.
double calibrate_pol_p(double theta, double residual_fraction, double pol_s);

}  // namespace vibron
