#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/LU>

#include "vibron/errors.hpp"
#include "vibron/franck_condon.hpp"

namespace vibron {

namespace {

// Normalized oscillator eigenfunction psi_n(x) by the three-term recurrence.
double hermite_function(int n, double x) {
  const double norm = 1.0 / std::sqrt(std::sqrt(std::numbers::pi));
  double prev = 0.0;
  double cur = norm * std::exp(-0.5 * x * x);
  for (int k = 0; k < n; ++k) {
    const double next = std::sqrt(2.0 / (k + 1)) * x * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace

double fc_oracle_grid(const DuschinskyMap& map, std::array<int, 2> n, std::array<int, 2> m,
                      const GridSpec& grid) {
  if (grid.half_width < 8.0 || grid.points < 400) {
    throw PhysicsError(ErrorCode::GridTooCoarse,
                       "quadrature needs half_width >= 8 and >= 400 points per axis");
  }
  if (n[0] < 0 || n[1] < 0 || m[0] < 0 || m[1] < 0) {
    throw PhysicsError(ErrorCode::IndexOutOfRange, "negative oscillator index");
  }
  const Eigen::Matrix2d t = map.transform();
  const Eigen::Vector2d c = map.offset();
  const double jac = std::sqrt(std::abs(t.determinant()));

  const int np = grid.points;
  const double h = 2.0 * grid.half_width / (np - 1);
  std::vector<double> xs(static_cast<std::size_t>(np));
  std::vector<double> g1(xs.size());
  std::vector<double> g2(xs.size());
  for (int i = 0; i < np; ++i) {
    xs[static_cast<std::size_t>(i)] = -grid.half_width + h * i;
    g1[static_cast<std::size_t>(i)] = hermite_function(n[0], xs[static_cast<std::size_t>(i)]);
    g2[static_cast<std::size_t>(i)] = hermite_function(n[1], xs[static_cast<std::size_t>(i)]);
  }

  double sum = 0.0;
  for (int i = 0; i < np; ++i) {
    const double wi = (i == 0 || i == np - 1) ? 0.5 : 1.0;
    for (int j = 0; j < np; ++j) {
      const double wj = (j == 0 || j == np - 1) ? 0.5 : 1.0;
      const double x1 = xs[static_cast<std::size_t>(i)];
      const double x2 = xs[static_cast<std::size_t>(j)];
      const double y1 = t(0, 0) * x1 + t(0, 1) * x2 + c(0);
      const double y2 = t(1, 0) * x1 + t(1, 1) * x2 + c(1);
      const double lower = g1[static_cast<std::size_t>(i)] * g2[static_cast<std::size_t>(j)];
      sum += wi * wj * lower * hermite_function(m[0], y1) * hermite_function(m[1], y2);
    }
  }
  return jac * sum * h * h;
}

}  // namespace vibron
