#include "finsler/averaging.hpp"

#include <cmath>

#include "finsler/errors.hpp"

namespace finsler {

namespace {

// Node on the indicatrix from a coordinate-sphere point u, with the tangent
// of theta -> u(theta)/F pushed forward exactly via dF/dy.
struct NodeFrame {
  VectorXd y;               // u / F(x, u)
  MatrixXd g;               // g(x, y) = g(x, u) by 0-homogeneity
  std::vector<VectorXd> tangents;
};

NodeFrame node_frame(const FinslerStructure& fs, const VectorXd& x,
                     const VectorXd& u, const std::vector<VectorXd>& du) {
  const int n = fs.dim();
  Jet Fj = fs.eval(x, u, 2);
  double F = Fj.value();
  if (F <= 0.0)
    throw StrongConvexityViolation("F non-positive on the coordinate sphere");
  VectorXd dF(n);
  for (int i = 0; i < n; ++i) dF[i] = Fj.partial({n + i});
  Jet L = Fj * Fj;
  NodeFrame f;
  f.y = u / F;
  f.g = MatrixXd(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) f.g(i, j) = 0.5 * L.partial({n + i, n + j});
  for (const VectorXd& d : du)
    f.tangents.push_back(d / F - u * (dF.dot(d)) / (F * F));
  return f;
}

IndicatrixSampling sample_2d(const FinslerStructure& fs, const VectorXd& x,
                             int N, const QuadratureScheme& scheme) {
  IndicatrixSampling s;
  s.x = x;
  s.scheme = scheme;
  s.total_volume = 0.0;
  const double dth = 2.0 * M_PI / N;
  for (int k = 0; k < N; ++k) {
    double th = dth * k;
    VectorXd u(2), du(2);
    u << std::cos(th), std::sin(th);
    du << -std::sin(th), std::cos(th);
    NodeFrame f = node_frame(fs, x, u, {du});
    double w = std::sqrt(f.tangents[0].dot(f.g * f.tangents[0])) * dth;
    s.nodes.push_back(f.y);
    s.weights.push_back(w);
    s.total_volume += w;
  }
  return s;
}

IndicatrixSampling sample_3d(const FinslerStructure& fs, const VectorXd& x,
                             int N, const QuadratureScheme& scheme) {
  IndicatrixSampling s;
  s.x = x;
  s.scheme = scheme;
  s.total_volume = 0.0;
  const int n_phi = 2 * N;
  const double dth = M_PI / N, dph = 2.0 * M_PI / n_phi;
  for (int a = 0; a < N; ++a) {
    double th = dth * (a + 0.5);  // midpoint rule keeps nodes off the poles
    for (int b = 0; b < n_phi; ++b) {
      double ph = dph * b;
      VectorXd u(3), ut(3), up(3);
      u << std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
          std::cos(th);
      ut << std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph),
          -std::sin(th);
      up << -std::sin(th) * std::sin(ph), std::sin(th) * std::cos(ph), 0.0;
      NodeFrame f = node_frame(fs, x, u, {ut, up});
      MatrixXd J(3, 2);
      J.col(0) = f.tangents[0];
      J.col(1) = f.tangents[1];
      MatrixXd m = J.transpose() * f.g * J;
      double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
      double w = std::sqrt(std::max(det, 0.0)) * dth * dph;
      s.nodes.push_back(f.y);
      s.weights.push_back(w);
      s.total_volume += w;
    }
  }
  return s;
}

}  // namespace

IndicatrixSampling sample_indicatrix(const FinslerStructure& fs,
                                     const VectorXd& x,
                                     const QuadratureScheme& scheme) {
  const int n = fs.dim();
  if (scheme.nodes < 4)
    throw InsufficientSamples("indicatrix quadrature needs at least 4 nodes");
  if (scheme.kind == SchemeKind::trapezoid_2d) {
    if (n != 2)
      throw UnsupportedDimension("trapezoid_2d requires a 2-dimensional base");
    return sample_2d(fs, x, scheme.nodes, scheme);
  }
  if (n != 3)
    throw UnsupportedDimension("latlong_3d requires a 3-dimensional base");
  return sample_3d(fs, x, scheme.nodes, scheme);
}

namespace {

Tensor3 node_gamma(const FinslerStructure& fs, const VectorXd& x,
                   const VectorXd& y, ConnectionKind source) {
  if (source == ConnectionKind::chern) return chern_data(fs, x, y).chern;
  if (source == ConnectionKind::berwald)
    return berwald_coefficients(fs, x, y).coefficients.gamma;
  throw Error("averaging expects the chern or berwald connection");
}

}  // namespace

Tensor3 averaged_connection_gamma(const FinslerStructure& fs, const VectorXd& x,
                                  ConnectionKind source,
                                  const QuadratureScheme& scheme) {
  IndicatrixSampling s = sample_indicatrix(fs, x, scheme);
  Tensor3 acc(fs.dim());
  for (size_t k = 0; k < s.nodes.size(); ++k)
    acc += node_gamma(fs, x, s.nodes[k], source) *
           (s.weights[k] / s.total_volume);
  return acc;
}

AveragedConnection averaged_connection(const FinslerStructure& fs,
                                       const VectorXd& x, ConnectionKind source,
                                       const QuadratureScheme& scheme) {
  AveragedConnection out;
  out.x = x;
  out.source = source;
  out.scheme = scheme;
  out.gamma = averaged_connection_gamma(fs, x, source, scheme);
  QuadratureScheme doubled{scheme.kind, 2 * scheme.nodes};
  Tensor3 fine = averaged_connection_gamma(fs, x, source, doubled);
  out.quadrature_error = (out.gamma - fine).max_abs();
  return out;
}

MatrixXd averaged_metric(const FinslerStructure& fs, const VectorXd& x,
                         const QuadratureScheme& scheme) {
  IndicatrixSampling s = sample_indicatrix(fs, x, scheme);
  const int n = fs.dim();
  MatrixXd acc = MatrixXd::Zero(n, n);
  for (size_t k = 0; k < s.nodes.size(); ++k)
    acc += fundamental_tensor(fs, x, s.nodes[k]).g *
           (s.weights[k] / s.total_volume);
  return acc;
}

ConnectionCoefficients convex_combination(
    std::span<const ConnectionCoefficients> connections,
    std::span<const double> weights) {
  if (connections.empty() || connections.size() != weights.size())
    throw BadWeights("need one weight per connection");
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw BadWeights("negative weight in convex combination");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw BadWeights("weights must sum to 1");
  const int n = connections[0].dim();
  Tensor3 acc(n);
  for (size_t i = 0; i < connections.size(); ++i) {
    if (connections[i].dim() != n)
      throw DimensionMismatch("convex combination of unequal dimensions");
    acc += connections[i].gamma * weights[i];
  }
  ConnectionCoefficients out;
  out.kind = ConnectionKind::averaged_affine;
  out.x = connections[0].x;
  out.gamma = acc;
  return out;
}

}  // namespace finsler
