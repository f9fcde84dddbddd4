#pragma once

#include <memory>
#include <vector>

#include "finsler/types.hpp"

namespace finsler {

// Piecewise-C^1 base curve with explicit position and velocity. Integrations
// restart at the listed breakpoints so corners never sit inside an adaptive
// step.
class Curve {
 public:
  virtual ~Curve() = default;
  virtual int dim() const = 0;
  virtual double t_end() const = 0;
  virtual void eval(double t, VectorXd& x, VectorXd& v) const = 0;
  // Sorted interior parameter values where the velocity may jump.
  virtual std::vector<double> breakpoints() const { return {}; }

  VectorXd position(double t) const {
    VectorXd x(dim()), v(dim());
    eval(t, x, v);
    return x;
  }
  VectorXd start() const { return position(0.0); }
  VectorXd end() const { return position(t_end()); }
};

using CurvePtr = std::shared_ptr<const Curve>;

// Straight segments between waypoints, parameter uniform per segment on [0,1].
CurvePtr polyline_curve(const std::vector<VectorXd>& waypoints);

// Catmull-Rom cubic through the waypoints (clamped end tangents), on [0,1].
CurvePtr cubic_curve(const std::vector<VectorXd>& waypoints);

// Closed axis-plane rectangle: corner -> +a along axis i -> +b along axis j
// -> back, on [0,1].
CurvePtr rectangle_loop(const VectorXd& corner, double a, double b, int axis_i,
                        int axis_j);

// Cubic Hermite interpolation of integration samples (t_k, x_k, v_k).
CurvePtr sampled_curve(std::vector<double> t, std::vector<VectorXd> x,
                       std::vector<VectorXd> v);

// Same trace traversed backwards.
CurvePtr reversed(CurvePtr c);

}  // namespace finsler
