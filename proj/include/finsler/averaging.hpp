#pragma once

#include <span>
#include <vector>

#include "finsler/connections.hpp"
#include "finsler/metric.hpp"

namespace finsler {

// Quadrature over the indicatrix I_x = {y : F(x, y) = 1}.
// trapezoid_2d: N equal parameter angles (periodic trapezoid rule).
// latlong_3d: N midpoint latitudes x 2N uniform longitudes; the midpoint rule
// keeps nodes off the poles.
enum class SchemeKind { trapezoid_2d, latlong_3d };

struct QuadratureScheme {
  SchemeKind kind;
  int nodes;  // N above

  static QuadratureScheme for_dim(int n, int nodes) {
    return {n == 2 ? SchemeKind::trapezoid_2d : SchemeKind::latlong_3d, nodes};
  }
};

struct IndicatrixSampling {
  VectorXd x;
  std::vector<VectorXd> nodes;   // points with F(x, node) = 1
  std::vector<double> weights;   // induced volume weights, sum = total_volume
  double total_volume;
  QuadratureScheme scheme;
};

// Samples the indicatrix by pushing the coordinate sphere through u / F(x, u)
// and weighting with the volume induced by g(x, y(u)).
IndicatrixSampling sample_indicatrix(const FinslerStructure& fs,
                                     const VectorXd& x,
                                     const QuadratureScheme& scheme);

struct AveragedConnection {
  VectorXd x;
  Tensor3 gamma;
  ConnectionKind source;       // which y-dependent connection was averaged
  QuadratureScheme scheme;
  double quadrature_error;     // max coefficient change from N to 2N nodes
};

// Indicatrix average of the chern or berwald coefficients at x, volume
// weighted. The error estimate compares the N-node and 2N-node results.
AveragedConnection averaged_connection(const FinslerStructure& fs,
                                       const VectorXd& x, ConnectionKind source,
                                       const QuadratureScheme& scheme);

// Average without the doubled-node error pass (field evaluations inside ODE
// right-hand sides).
Tensor3 averaged_connection_gamma(const FinslerStructure& fs, const VectorXd& x,
                                  ConnectionKind source,
                                  const QuadratureScheme& scheme);

// Indicatrix average of the fundamental tensor at x.
MatrixXd averaged_metric(const FinslerStructure& fs, const VectorXd& x,
                         const QuadratureScheme& scheme);

// Convex combination of coefficient arrays with nonnegative weights summing
// to 1 (BadWeights otherwise). Torsion-freeness survives by linearity.
ConnectionCoefficients convex_combination(
    std::span<const ConnectionCoefficients> connections,
    std::span<const double> weights);

}  // namespace finsler
