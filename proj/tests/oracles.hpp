#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the library code paths being checked.

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace stride::oracle {

/// Fixed-step classical Runge-Kutta integration of x'' = c2 * x.
inline std::pair<double, double> rk4_pendulum(double x, double v, double c2, double horizon, double step = 1e-5)
{
  const auto n = static_cast<long>(std::ceil(horizon / step - 1e-9));
  if (n == 0) {
    return {x, v};
  }
  const double h = horizon / static_cast<double>(n);
  for (long i = 0; i < n; ++i) {
    const double k1x = v;
    const double k1v = c2 * x;
    const double k2x = v + 0.5 * h * k1v;
    const double k2v = c2 * (x + 0.5 * h * k1x);
    const double k3x = v + 0.5 * h * k2v;
    const double k3v = c2 * (x + 0.5 * h * k2x);
    const double k4x = v + h * k3v;
    const double k4v = c2 * (x + h * k3x);
    x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  }
  return {x, v};
}

struct GridResult
{
  double best_error = std::numeric_limits<double>::infinity();
  double time = 0.0;
  double location = 0.0;
};

/// Brute-force search over exchange time and step location for the smallest
/// post-exchange energy error. Only steps that leave the CoM moving toward the
/// new pivot count (u * v <= 0); with non-negative target energy the other
/// branch is the diverging manifold. Propagation uses the matrix exponential
/// of the linear system written out directly.
inline GridResult grid_capture(double x, double v, double c, double target_energy, double t_min = 0.05,
                               double t_max = 1.0, double s_max = 0.5, double res = 1e-3)
{
  GridResult r;
  const long nt = std::lround((t_max - t_min) / res);
  const long ns = std::lround(2.0 * s_max / res);
  for (long i = 0; i <= nt; ++i) {
    const double t = t_min + static_cast<double>(i) * res;
    const double e_pos = std::exp(c * t);
    const double e_neg = std::exp(-c * t);
    const double xt = 0.5 * (x + v / c) * e_pos + 0.5 * (x - v / c) * e_neg;
    const double vt = 0.5 * c * (x + v / c) * e_pos - 0.5 * c * (x - v / c) * e_neg;
    const double kinetic = 0.5 * vt * vt;
    for (long j = 0; j <= ns; ++j) {
      const double s = -s_max + static_cast<double>(j) * res;
      const double u = xt - s;
      if (u * vt > 0.0) {
        continue;
      }
      const double err = std::abs(kinetic - 0.5 * c * c * u * u - target_energy);
      if (err < r.best_error) {
        r = {err, t, s};
      }
    }
  }
  return r;
}

/// Ballistic flight of a point mass: positive roots of h(t) = v t - g t^2 / 2.
inline double ballistic_airtime(double v, double g)
{
  // bisection on the descending branch, independent of the closed form
  if (v <= 0.0) {
    return 0.0;
  }
  double lo = v / g;
  double hi = 10.0 * v / g + 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double h = v * mid - 0.5 * g * mid * mid;
    (h > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace stride::oracle
