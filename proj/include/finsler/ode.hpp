#pragma once

#include <functional>

#include "finsler/types.hpp"

namespace finsler {

struct OdeOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-11;
  int max_steps = 200000;
};

struct OdeStats {
  int steps = 0;
  int rejected = 0;
  double max_error_estimate = 0.0;

  OdeStats& operator+=(const OdeStats& o) {
    steps += o.steps;
    rejected += o.rejected;
    max_error_estimate = std::max(max_error_estimate, o.max_error_estimate);
    return *this;
  }
};

using OdeRhs = std::function<void(double t, const VectorXd& s, VectorXd& ds)>;
// Called after each accepted step with (t, state, derivative at t).
using OdeObserver = std::function<void(double t, const VectorXd& s,
                                       const VectorXd& ds)>;

// Adaptive embedded Runge-Kutta 5(4) (Dormand-Prince pair) over [t0, t1].
// The observer also fires once at t0. Throws StepFailure when the tolerance
// cannot be met within the step budget or the step size underflows.
OdeStats integrate_adaptive(const OdeRhs& f, double t0, double t1, VectorXd& s,
                            const OdeOptions& opts,
                            const OdeObserver& observer = nullptr);

}  // namespace finsler
