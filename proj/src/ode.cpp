#include "finsler/ode.hpp"

#include <cmath>

#include "finsler/errors.hpp"

namespace finsler {

namespace {

// Dormand-Prince 5(4) tableau.
const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
const double a21 = 1.0 / 5;
const double a31 = 3.0 / 40, a32 = 9.0 / 40;
const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
             a53 = 64448.0 / 6561, a54 = -212.0 / 729;
const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
             a64 = 49.0 / 176, a65 = -5103.0 / 18656;
const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
             b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// 4th-order weights for the error estimate.
const double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
             e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

}  // namespace

OdeStats integrate_adaptive(const OdeRhs& f, double t0, double t1, VectorXd& s,
                            const OdeOptions& opts,
                            const OdeObserver& observer) {
  OdeStats stats;
  const double span = t1 - t0;
  if (span == 0.0) return stats;
  const double dir = span > 0 ? 1.0 : -1.0;
  const double h_min = std::abs(span) * 1e-14;

  double t = t0;
  VectorXd k1(s.size()), k2(s.size()), k3(s.size()), k4(s.size()),
      k5(s.size()), k6(s.size()), k7(s.size());
  f(t, s, k1);
  if (observer) observer(t, s, k1);

  double h = dir * std::abs(span) / 100.0;
  VectorXd tmp(s.size()), s5(s.size());

  while (dir * (t1 - t) > 0.0) {
    if (std::abs(h) > std::abs(t1 - t)) h = t1 - t;
    if (stats.steps + stats.rejected >= opts.max_steps)
      throw StepFailure("step budget exhausted before reaching the end point");

    tmp = s + h * a21 * k1;
    f(t + c2 * h, tmp, k2);
    tmp = s + h * (a31 * k1 + a32 * k2);
    f(t + c3 * h, tmp, k3);
    tmp = s + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f(t + c4 * h, tmp, k4);
    tmp = s + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(t + c5 * h, tmp, k5);
    tmp = s + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(t + h, tmp, k6);
    s5 = s + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    f(t + h, s5, k7);

    VectorXd s4 =
        s + h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double err = 0.0;
    for (int i = 0; i < s.size(); ++i) {
      double scale =
          opts.abs_tol +
          opts.rel_tol * std::max(std::abs(s[i]), std::abs(s5[i]));
      double e = (s5[i] - s4[i]) / scale;
      err += e * e;
    }
    err = std::sqrt(err / s.size());

    if (err <= 1.0) {
      t += h;
      s = s5;
      k1 = k7;  // first-same-as-last
      ++stats.steps;
      stats.max_error_estimate = std::max(stats.max_error_estimate, err);
      if (observer) observer(t, s, k1);
    } else {
      ++stats.rejected;
    }
    double factor = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
    factor = std::min(5.0, std::max(0.2, factor));
    h *= factor;
    if (std::abs(h) < h_min && dir * (t1 - t) > 0.0)
      throw StepFailure("step size underflow: tolerance unreachable");
  }
  return stats;
}

}  // namespace finsler
