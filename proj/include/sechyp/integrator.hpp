#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>

#include "sechyp/errors.hpp"

namespace sechyp {

struct IntegratorOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-10;
  std::int64_t max_steps = 20'000'000;
  double initial_step = 0.0;  // 0 -> choose automatically
};

namespace detail {

// Dormand-Prince 5(4) tableau (the ode45 pair).
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// 5th-order minus embedded 4th-order weights.
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace detail

/// Adaptive Dormand-Prince 5(4) step on a flat complex state vector.
///
/// rhs(t, y, dydt) fills dydt with y'(t). Steps are accepted when the embedded
/// 4th-order error estimate satisfies, per component,
///   |err_i| <= abs_tol + rel_tol * |y_i|
/// (elementwise scaled max-norm). The controller uses safety factor 0.9 and a
/// step-change clamp of [0.2, 5.0]. Throws IntegrationError when max_steps is
/// exhausted (carrying the last reached (t, y)) and NumericalError when the
/// right-hand side produces non-finite values that persist under step reduction.
template <class Rhs>
Eigen::VectorXcd integrate(Rhs&& rhs, Eigen::VectorXcd y0, double t0, double t1,
                           const IntegratorOptions& opts = {}) {
  using Eigen::VectorXcd;
  using namespace detail;

  if (!(t1 > t0)) throw std::invalid_argument("integrate: t1 must exceed t0");
  if (!(opts.rel_tol > 0) || !(opts.abs_tol > 0))
    throw std::invalid_argument("integrate: tolerances must be positive");

  const Eigen::Index dim = y0.size();
  VectorXcd y = std::move(y0);
  VectorXcd k1(dim), k2(dim), k3(dim), k4(dim), k5(dim), k6(dim), k7(dim);
  VectorXcd ytmp(dim), y5(dim);

  double t = t0;
  rhs(t, y, k1);

  double h = opts.initial_step;
  if (h <= 0.0) {
    // Cheap starting-step heuristic from the initial derivative magnitude.
    double d0 = 0.0, d1 = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) {
      double sc = opts.abs_tol + opts.rel_tol * std::abs(y[i]);
      d0 = std::max(d0, std::abs(y[i]) / sc);
      d1 = std::max(d1, std::abs(k1[i]) / sc);
    }
    h = (d1 > 1e-30) ? 0.01 * d0 / d1 : 1e-6 * (t1 - t0);
    if (!(h > 0.0)) h = 1e-6 * (t1 - t0);
    h = std::min(h, t1 - t0);
  }

  std::int64_t steps = 0;
  int consecutive_bad = 0;
  while (t < t1) {
    if (++steps > opts.max_steps)
      throw IntegrationError("integrate: step limit exceeded", t, y);
    if (h > t1 - t) h = t1 - t;
    const double hh = h;

    // Stage times are clamped to t1 so a right-hand side with a hard domain
    // boundary never sees t1 + (round-off).
    const double t_end = std::min(t + hh, t1);
    ytmp = y + hh * (a21 * k1);
    rhs(std::min(t + c2 * hh, t1), ytmp, k2);
    ytmp = y + hh * (a31 * k1 + a32 * k2);
    rhs(std::min(t + c3 * hh, t1), ytmp, k3);
    ytmp = y + hh * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(std::min(t + c4 * hh, t1), ytmp, k4);
    ytmp = y + hh * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(std::min(t + c5 * hh, t1), ytmp, k5);
    ytmp = y + hh * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t_end, ytmp, k6);
    y5 = y + hh * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t_end, y5, k7);  // FSAL stage

    double err = 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) {
      std::complex<double> e = e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                               e6 * k6[i] + e7 * k7[i];
      double tol =
          opts.abs_tol + opts.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
      double r = hh * std::abs(e) / tol;
      if (!(r <= err)) err = r;  // NaN-propagating max
    }

    if (!std::isfinite(err)) {
      if (++consecutive_bad > 20)
        throw NumericalError("integrate: non-finite right-hand side", t);
      h *= 0.1;
      continue;
    }
    consecutive_bad = 0;

    if (err <= 1.0) {
      t += hh;
      y.swap(y5);
      k1.swap(k7);  // FSAL
      double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
      h = hh * std::clamp(fac, 0.2, 5.0);
    } else {
      h = hh * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      if (!(h > 0.0) || t + h == t)
        throw NumericalError("integrate: step size underflow", t);
    }
  }
  return y;
}

}  // namespace sechyp
