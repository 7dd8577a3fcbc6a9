#include "vibron/crystal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "minimizer.hpp"
#include "vibron/errors.hpp"

namespace vibron {

namespace {

constexpr std::array<std::array<int, 2>, 3> kPairs{{{0, 1}, {0, 2}, {1, 2}}};

void check_distinct(const IonPositions& p) {
  for (const auto& [i, j] : kPairs) {
    const double dx = p.x[i] - p.x[j];
    const double dz = p.z[i] - p.z[j];
    if (!(dx * dx + dz * dz > 0.0)) {
      throw PhysicsError(ErrorCode::CoincidentIons, "ions " + std::to_string(i) + " and " +
                                                        std::to_string(j) + " coincide");
    }
  }
}

double radial_sq(const PesModel& pes, int ion) {
  return ion == 1 ? pes.central_radial_sq() : pes.freqs.omega_x * pes.freqs.omega_x;
}

EquilibriumResult finish(const IonPositions& p, const PesModel& pes) {
  EquilibriumResult r;
  r.positions = p;
  r.configuration = classify_configuration(p);
  r.energy = potential_energy(p, pes);
  r.gradient_norm = potential_gradient(p, pes).norm();
  r.scaled_gradient_norm = r.gradient_norm / pes.force_scale();
  return r;
}

}  // namespace

PesModel PesModel::ground(const SecularFrequencies& freqs, const IonConstants& ions) {
  return {freqs, freqs.omega_x, ions.coulomb_constant(), ions.mass(), false};
}

PesModel PesModel::excited(const SecularFrequencies& freqs, double omega_x_rydberg,
                           const IonConstants& ions) {
  return {freqs, omega_x_rydberg, ions.coulomb_constant(), ions.mass(), true};
}

double PesModel::central_radial_sq() const noexcept {
  const double w = central_ion_excited ? omega_x_rydberg : freqs.omega_x;
  return w * w;
}

double PesModel::length_scale() const noexcept {
  return std::cbrt(coulomb_constant / (mass * freqs.omega_z * freqs.omega_z));
}

double PesModel::force_scale() const noexcept {
  return mass * freqs.omega_z * freqs.omega_z * length_scale();
}

PesModel make_pes(const IonConstants& ions, const SecularFrequencies& freqs, double omega_rf,
                  const Polarisability& pol, bool excited) {
  if (!excited) return PesModel::ground(freqs, ions);
  const TrapGradients g = gradients_from_frequencies(freqs, omega_rf, ions);
  return PesModel::excited(freqs, rydberg_radial_frequency(freqs, g, pol, ions), ions);
}

Vector6 IonPositions::as_vector() const {
  Vector6 v;
  v << x[0], x[1], x[2], z[0], z[1], z[2];
  return v;
}

IonPositions IonPositions::from_vector(const Vector6& v) {
  return {{v(0), v(1), v(2)}, {v(3), v(4), v(5)}};
}

const char* to_string(Configuration c) noexcept {
  return c == Configuration::Linear ? "linear" : "zigzag";
}

double potential_energy(const IonPositions& p, const PesModel& pes) {
  check_distinct(p);
  const double m = pes.mass;
  const double wz2 = pes.freqs.omega_z * pes.freqs.omega_z;
  double v = 0.0;
  for (int i = 0; i < 3; ++i) {
    v += 0.5 * m * (radial_sq(pes, i) * p.x[i] * p.x[i] + wz2 * p.z[i] * p.z[i]);
  }
  for (const auto& [i, j] : kPairs) {
    v += pes.coulomb_constant / std::hypot(p.x[i] - p.x[j], p.z[i] - p.z[j]);
  }
  return v;
}

Vector6 potential_gradient(const IonPositions& p, const PesModel& pes) {
  check_distinct(p);
  const double m = pes.mass;
  const double wz2 = pes.freqs.omega_z * pes.freqs.omega_z;
  Vector6 g;
  for (int i = 0; i < 3; ++i) {
    g(i) = m * radial_sq(pes, i) * p.x[i];
    g(3 + i) = m * wz2 * p.z[i];
  }
  for (const auto& [i, j] : kPairs) {
    const double dx = p.x[i] - p.x[j];
    const double dz = p.z[i] - p.z[j];
    const double r = std::hypot(dx, dz);
    const double c = pes.coulomb_constant / (r * r * r);
    g(i) -= c * dx;
    g(j) += c * dx;
    g(3 + i) -= c * dz;
    g(3 + j) += c * dz;
  }
  return g;
}

Matrix6 potential_hessian(const IonPositions& p, const PesModel& pes) {
  check_distinct(p);
  const double m = pes.mass;
  const double wz2 = pes.freqs.omega_z * pes.freqs.omega_z;
  Matrix6 h = Matrix6::Zero();
  for (int i = 0; i < 3; ++i) {
    h(i, i) = m * radial_sq(pes, i);
    h(3 + i, 3 + i) = m * wz2;
  }
  for (const auto& [i, j] : kPairs) {
    const double dx = p.x[i] - p.x[j];
    const double dz = p.z[i] - p.z[j];
    const double r2 = dx * dx + dz * dz;
    const double c = pes.coulomb_constant / (r2 * r2 * std::sqrt(r2));
    // Second derivatives of K0/r with respect to the separation (dx, dz).
    const double hxx = c * (2.0 * dx * dx - dz * dz);
    const double hzz = c * (2.0 * dz * dz - dx * dx);
    const double hxz = c * 3.0 * dx * dz;
    const std::array<int, 2> ions{i, j};
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        const double s = (a == b) ? 1.0 : -1.0;
        const int ia = ions[a];
        const int ib = ions[b];
        h(ia, ib) += s * hxx;
        h(3 + ia, 3 + ib) += s * hzz;
        h(ia, 3 + ib) += s * hxz;
        h(3 + ia, ib) += s * hxz;
      }
    }
  }
  return h;
}

EquilibriumResult equilibrium_linear_analytic(const PesModel& pes) {
  const double wz2 = pes.freqs.omega_z * pes.freqs.omega_z;
  const double zs = std::cbrt(5.0 * pes.coulomb_constant / (4.0 * pes.mass * wz2));
  IonPositions p{{0.0, 0.0, 0.0}, {-zs, 0.0, zs}};
  EquilibriumResult r = finish(p, pes);
  if (!(r.scaled_gradient_norm < 1e-12)) {
    throw PhysicsError(ErrorCode::NotStationary, "linear ansatz is not stationary");
  }
  return r;
}

EquilibriumResult equilibrium_zigzag_analytic(const PesModel& pes) {
  const double k = pes.coulomb_constant / pes.mass;
  const double wx2 = pes.freqs.omega_x * pes.freqs.omega_x;
  const double wz2 = pes.freqs.omega_z * pes.freqs.omega_z;
  const double a1 = pes.central_radial_sq();
  // CM balance in x fixes X_1 = -(2 wx^2 / A1) X_0; the outer ions' radial
  // balance fixes the outer-central distance r; their axial balance fixes Z.
  const double r = std::cbrt(k * (2.0 * wx2 + a1) / (wx2 * a1));
  const double denom = 4.0 * wz2 - 4.0 * wx2 * a1 / (2.0 * wx2 + a1);
  if (!(denom > 0.0)) {
    throw PhysicsError(ErrorCode::LinearRegime, "no axial zigzag solution");
  }
  const double zs = std::cbrt(k / denom);
  const double radicand = r * r - zs * zs;
  if (!(radicand > 0.0)) {
    throw PhysicsError(ErrorCode::LinearRegime, "zigzag radicand is not positive");
  }
  const double x_outer = -(a1 / (2.0 * wx2 + a1)) * std::sqrt(radicand);
  const double x_central = -(2.0 * wx2 / a1) * x_outer;
  IonPositions p{{x_outer, x_central, x_outer}, {-zs, 0.0, zs}};
  EquilibriumResult res = finish(p, pes);
  if (!(res.scaled_gradient_norm < 1e-10)) {
    throw PhysicsError(ErrorCode::NotStationary, "zigzag solution is not stationary");
  }
  return res;
}

EquilibriumResult equilibrium_numeric(const PesModel& pes, const IonPositions& seed,
                                      const MinimizerOptions& options) {
  check_distinct(seed);
  const double len = pes.length_scale();
  const double force = pes.force_scale();
  const double energy = force * len;

  detail::Objective6 obj;
  obj.value = [&](const Vector6& u) {
    const IonPositions p = IonPositions::from_vector(u * len);
    for (const auto& [i, j] : kPairs) {
      if (p.x[i] == p.x[j] && p.z[i] == p.z[j]) return std::numeric_limits<double>::infinity();
    }
    return potential_energy(p, pes) / energy;
  };
  obj.gradient = [&](const Vector6& u) {
    return Vector6(potential_gradient(IonPositions::from_vector(u * len), pes) / force);
  };
  obj.hessian = [&](const Vector6& u) {
    return Matrix6(potential_hessian(IonPositions::from_vector(u * len), pes) * (len / force));
  };

  const auto report = detail::minimize_bfgs_newton(obj, seed.as_vector() / len,
                                                   options.gradient_tolerance,
                                                   options.max_iterations);
  if (!report.converged) {
    throw PhysicsError(ErrorCode::NoConvergence,
                       "minimizer stopped at scaled gradient " + std::to_string(report.gradient_norm));
  }
  return finish(IonPositions::from_vector(report.x * len), pes);
}

Configuration classify_configuration(const IonPositions& p, double tol_x) {
  const double m = std::max({std::abs(p.x[0]), std::abs(p.x[1]), std::abs(p.x[2])});
  return m < tol_x ? Configuration::Linear : Configuration::Zigzag;
}

}  // namespace vibron
