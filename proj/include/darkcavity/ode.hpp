#pragma once

// Adaptive Dormand-Prince 5(4) integrator for complex vector ODEs
// dy/dt = f(t, y).  Error control is per-component with mixed
// absolute/relative tolerance and a PI step-size controller.

#include "darkcavity/types.hpp"

#include <algorithm>
#include <cmath>

namespace darkcavity {

struct OdeOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  double max_step = 0.0;   // 0 = unlimited
  double min_step = 1e-14; // underflow guard -> SolverError
};

template <typename RHS>
Vec integrate_adaptive(RHS&& f, Vec y, double t0, double t1,
                       const OdeOptions& opt = {}) {
  if (t1 < t0) throw ValidationError("integrate_adaptive: t1 < t0");
  if (t1 == t0) return y;

  // Dormand-Prince coefficients
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  double t = t0;
  double h = (t1 - t0) / 100.0;
  if (opt.max_step > 0) h = std::min(h, opt.max_step);
  Vec k1 = f(t, y);
  double err_prev = 1.0;

  while (t < t1) {
    h = std::min(h, t1 - t);
    if (h < opt.min_step)
      throw SolverError("integrate_adaptive: step size underflow (stiffness)");

    Vec k2 = f(t + c2 * h, y + h * (a21 * k1));
    Vec k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    Vec k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    Vec k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    Vec k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 +
                               a65 * k5));
    Vec y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    Vec k7 = f(t + h, y5);
    Vec errv =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double err = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double sc =
          opt.abs_tol +
          opt.rel_tol * std::max(std::abs(y(i)), std::abs(y5(i)));
      const double r = std::abs(errv(i)) / sc;
      err = std::max(err, r);
    }

    if (err <= 1.0) {
      t += h;
      y = std::move(y5);
      k1 = std::move(k7);  // FSAL
      const double fac = 0.9 * std::pow(err > 1e-30 ? err : 1e-30, -0.7 / 5.0) *
                         std::pow(err_prev, 0.4 / 5.0);
      h *= std::clamp(fac, 0.2, 6.0);
      if (opt.max_step > 0) h = std::min(h, opt.max_step);
      err_prev = std::max(err, 1e-30);
    } else {
      h *= std::max(0.2, 0.9 * std::pow(err, -1.0 / 5.0));
    }
  }
  return y;
}

}  // namespace darkcavity
