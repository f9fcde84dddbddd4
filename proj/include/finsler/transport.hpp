#pragma once

#include <functional>
#include <optional>

#include "finsler/connections.hpp"
#include "finsler/curves.hpp"
#include "finsler/metric.hpp"
#include "finsler/ode.hpp"

namespace finsler {

struct GeodesicResult {
  CurvePtr curve;        // unit-speed solution x(s) with velocities
  VectorXd x_end, v_end;
  double f_drift;        // max |F(x, x') - 1| over accepted steps
  OdeStats stats;
};

// Unit-speed geodesic of the spray from (x0, y0); y0 is normalized to F = 1.
// Integrates x'' = -G(x, x') for the given arc length, staying inside the
// chart box (LeftChart otherwise).
GeodesicResult integrate_geodesic(const FinslerStructure& fs,
                                  const VectorXd& x0, const VectorXd& y0,
                                  double length,
                                  const OdeOptions& opts = {});

struct TransportResult {
  VectorXd x_end;
  VectorXd y_end;          // horizontally lifted direction at the end point
  MatrixXd sections_end;   // transported section columns (may be 0 columns)
  double f_drift;          // max |F(x(t), y(t)) - F(x(0), y(0))| along the solve
  double f_start;
  OdeStats stats;
};

// Horizontal transport along a base curve: the direction follows
// dy/dt = -N(x, y) x'(t); optional section columns follow
// dS/dt = -Gamma(x, y)(x', S) with the chern or berwald coefficients.
TransportResult horizontal_transport(
    const FinslerStructure& fs, ConnectionKind kind, const Curve& curve,
    const VectorXd& y_start,
    const std::optional<MatrixXd>& sections = std::nullopt,
    const OdeOptions& opts = {});

// y-independent connection coefficients as a field over the chart.
using AffineConnectionField = std::function<Tensor3(const VectorXd& x)>;

// Frame transport of an affine connection along a curve:
// dM/dt = -Gamma(x(t))(x'(t), M columns), M(0) = I.
MatrixXd affine_frame_transport(const AffineConnectionField& field,
                                const Curve& curve, const OdeOptions& opts = {},
                                OdeStats* stats = nullptr);

struct IndicatrixDriftResult {
  VectorXd x_end;
  double max_drift;   // max |F(x_end, S_end) - 1|
  double mean_drift;
  std::vector<double> drifts;
  MatrixXd frame;     // the transport matrix that was applied
};

// Transports `sample_count` unit-F directions (equal parameter angles) from
// the curve start with an affine connection and measures how far they leave
// the indicatrix at the end point.
IndicatrixDriftResult transport_indicatrix_samples(
    const FinslerStructure& fs, const AffineConnectionField& field,
    const Curve& curve, int sample_count, const OdeOptions& opts = {});

// Field adapters.
AffineConnectionField constant_connection_field(Tensor3 gamma);

// Levi-Civita connection of a metric field by central differences of the
// field (step scaled to the coordinate magnitude).
using MetricField = std::function<MatrixXd(const VectorXd& x)>;
Tensor3 levi_civita_of_field(const MetricField& h, const VectorXd& x,
                             double step = 1e-5);
AffineConnectionField levi_civita_field(MetricField h, double step = 1e-5);

}  // namespace finsler
