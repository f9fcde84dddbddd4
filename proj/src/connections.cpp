#include "finsler/connections.hpp"

#include <cmath>
#include <numeric>

#include "finsler/errors.hpp"

namespace finsler {

namespace {

// Shared pointwise data. `order` is the jet order of F^2; 2 suffices for the
// metric, 3 adds the x/y derivative arrays, 4 adds what the Cartan-derivative
// terms need.
struct Geometry {
  int n;
  VectorXd x, y;
  double F;
  VectorXd dFdx, dFdy;
  Jet L;
  MatrixXd g, g_inv;
  Tensor3 dgdx, dgdy;  // dgdx(i,j,k) = dg_ij/dx_k
  Tensor3 A, A_raised;
  Tensor3 gamma;   // formal Christoffel gamma^i_jk
  VectorXd spray;  // G^i = gamma^i_jk y^j y^k

  Geometry(const FinslerStructure& fs, const VectorXd& x_, const VectorXd& y_,
           int order)
      : n(fs.dim()), x(x_), y(y_) {
    if (y.norm() == 0.0)
      throw DegenerateDirection("connection requested at y = 0");
    Jet Fj = fs.eval(x, y, order);
    L = Fj * Fj;
    F = Fj.value();
    if (F <= 0.0)
      throw NonSmoothPoint("F non-positive where a connection was requested");
    dFdx = VectorXd(n);
    dFdy = VectorXd(n);
    for (int i = 0; i < n; ++i) {
      dFdx[i] = Fj.partial({i});
      dFdy[i] = Fj.partial({n + i});
    }
    g = MatrixXd(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = 0.5 * L.partial({n + i, n + j});
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(g);
    if (es.eigenvalues().minCoeff() <= kConvexityEps)
      throw StrongConvexityViolation(
          "fundamental tensor degenerate where a connection was requested");
    g_inv = g.partialPivLu().inverse();
    if (order < 3) return;

    dgdx = Tensor3(n);
    dgdy = Tensor3(n);
    A = Tensor3(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          dgdx(i, j, k) = 0.5 * L.partial({n + i, n + j, k});
          dgdy(i, j, k) = 0.5 * L.partial({n + i, n + j, n + k});
          A(i, j, k) = 0.5 * F * dgdy(i, j, k);
        }
    A_raised = Tensor3(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double s = 0.0;
          for (int l = 0; l < n; ++l) s += g_inv(i, l) * A(l, j, k);
          A_raised(i, j, k) = s;
        }
    gamma = Tensor3(n);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        VectorXd rhs(n);
        for (int s = 0; s < n; ++s)
          rhs[s] = dgdx(s, j, k) - dgdx(j, k, s) + dgdx(s, k, j);
        VectorXd col = 0.5 * (g_inv * rhs);
        for (int i = 0; i < n; ++i) gamma(i, j, k) = col[i];
      }
    spray = VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) spray[i] += gamma(i, j, k) * y[j] * y[k];
  }

  MatrixXd corrected_nonlinear() const {
    MatrixXd N(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = 0.0;
        for (int k = 0; k < n; ++k)
          v += gamma(i, j, k) * y[k] - A_raised(i, j, k) * spray[k] / F;
        N(i, j) = v;
      }
    return N;
  }

  // delta_c g_ab = dg_ab/dx_c - N^m_c dg_ab/dy_m
  Tensor3 horizontal_dg(const MatrixXd& N) const {
    Tensor3 D(n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          double v = dgdx(a, b, c);
          for (int m = 0; m < n; ++m) v -= N(m, c) * dgdy(a, b, m);
          D(a, b, c) = v;
        }
    return D;
  }

  Tensor3 chern_from(const Tensor3& D) const {
    Tensor3 G(n);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        VectorXd rhs(n);
        for (int s = 0; s < n; ++s)
          rhs[s] = D(s, k, j) + D(s, j, k) - D(j, k, s);
        VectorXd col = 0.5 * (g_inv * rhs);
        for (int l = 0; l < n; ++l) G(l, j, k) = col[l];
      }
    return G;
  }
};

// d^2 G^i / dy_j dy_k (and first derivatives) through fiber-order-2 jets of
// the spray, assembled from the order-4 jet of F^2 with the metric inverted
// over the jet ring.
struct SprayFiberJets {
  std::vector<Jet> G;  // jets in the n fiber variables
  int n;

  SprayFiberJets(const FinslerStructure& fs, const VectorXd& x,
                 const VectorXd& y, int fiber_order) {
    n = fs.dim();
    const int ord = fiber_order;
    Jet Fj = fs.eval(x, y, ord + 2);
    Jet L = Fj * Fj;
    std::vector<int> yvars(n);
    std::iota(yvars.begin(), yvars.end(), n);

    auto fiber_jet = [&](std::initializer_list<int> dvars) {
      return L.derivative(dvars, ord).restrict_vars(yvars, ord);
    };

    std::vector<std::vector<Jet>> gj(n, std::vector<Jet>(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) gj[i][j] = fiber_jet({n + i, n + j}) * 0.5;
    std::vector<std::vector<Jet>> ginv = jet_matrix_inverse(gj);

    std::vector<Jet> dLdx(n);
    for (int l = 0; l < n; ++l) dLdx[l] = fiber_jet({l});
    std::vector<std::vector<Jet>> d2Ldxdy(n, std::vector<Jet>(n));
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) d2Ldxdy[k][l] = fiber_jet({k, n + l});

    std::vector<Jet> yv(n);
    for (int k = 0; k < n; ++k) yv[k] = Jet::variable(n, ord, k, y[k]);

    G.resize(n);
    for (int i = 0; i < n; ++i) {
      Jet acc = Jet::constant(n, ord, 0.0);
      for (int l = 0; l < n; ++l) {
        Jet inner = -dLdx[l];
        for (int k = 0; k < n; ++k) inner += d2Ldxdy[k][l] * yv[k];
        acc += ginv[i][l] * inner;
      }
      G[i] = acc * 0.5;
    }
  }
};

// Cartan tensor derivative arrays from the order-4 geometry:
// dA(i,j,k, s) with respect to x_s resp. y_m.
struct CartanDerivatives {
  std::vector<Tensor3> dAdx, dAdy;  // outer index = derivative direction

  CartanDerivatives(const Geometry& geo) {
    const int n = geo.n;
    dAdx.assign(n, Tensor3(n));
    dAdy.assign(n, Tensor3(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          double L3 = geo.L.partial({n + i, n + j, n + k});
          for (int s = 0; s < n; ++s) {
            dAdx[s](i, j, k) =
                0.25 * (geo.dFdx[s] * L3 +
                        geo.F * geo.L.partial({n + i, n + j, n + k, s}));
            dAdy[s](i, j, k) =
                0.25 * (geo.dFdy[s] * L3 +
                        geo.F * geo.L.partial({n + i, n + j, n + k, n + s}));
          }
        }
  }
};

// Covariant horizontal derivative of the Cartan tensor contracted with the
// unit flag direction, for an arbitrary linear connection over N.
Tensor3 flag_cartan_derivative(const Geometry& geo,
                               const CartanDerivatives& dA, const MatrixXd& N,
                               const Tensor3& Gamma) {
  const int n = geo.n;
  VectorXd l = geo.y / geo.F;
  Tensor3 r(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double v = 0.0;
        for (int s = 0; s < n; ++s) {
          double delta = dA.dAdx[s](i, j, k);
          for (int m = 0; m < n; ++m) delta -= N(m, s) * dA.dAdy[m](i, j, k);
          double corr = 0.0;
          for (int m = 0; m < n; ++m)
            corr += Gamma(m, i, s) * geo.A(m, j, k) +
                    Gamma(m, j, s) * geo.A(i, m, k) +
                    Gamma(m, k, s) * geo.A(i, j, m);
          v += l[s] * (delta - corr);
        }
        r(i, j, k) = v;
      }
  return r;
}

}  // namespace

SprayData formal_christoffel(const FinslerStructure& fs, const VectorXd& x,
                             const VectorXd& y) {
  Geometry geo(fs, x, y, 3);
  SprayData s;
  s.x = x;
  s.y = y;
  s.christoffel = geo.gamma;
  s.spray = geo.spray;
  return s;
}

NonlinearConnection nonlinear_connection(const FinslerStructure& fs,
                                         const VectorXd& x, const VectorXd& y,
                                         NonlinearVariant variant) {
  NonlinearConnection nc;
  nc.x = x;
  nc.y = y;
  nc.variant = variant;
  if (variant == NonlinearVariant::cartan_corrected) {
    Geometry geo(fs, x, y, 3);
    nc.coefficients = geo.corrected_nonlinear();
  } else {
    SprayFiberJets sj(fs, x, y, 1);
    const int n = sj.n;
    nc.coefficients = MatrixXd(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        nc.coefficients(i, j) = 0.5 * sj.G[i].partial({j});
  }
  return nc;
}

ChernConnection chern_coefficients(const FinslerStructure& fs,
                                   const VectorXd& x, const VectorXd& y) {
  Geometry geo(fs, x, y, 3);
  const int n = geo.n;
  MatrixXd N = geo.corrected_nonlinear();
  Tensor3 D = geo.horizontal_dg(N);
  Tensor3 Gamma = geo.chern_from(D);

  ChernConnection out;
  out.coefficients = {ConnectionKind::chern, x, y, Gamma};
  out.nonlinear = N;
  out.torsion_residual = out.coefficients.torsion_residual();
  double hres = 0.0, vres = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double r = D(i, j, k);
        for (int m = 0; m < n; ++m)
          r -= Gamma(m, i, k) * geo.g(m, j) + Gamma(m, j, k) * geo.g(i, m);
        hres = std::max(hres, std::abs(r));
        vres = std::max(vres, std::abs(geo.F * geo.dgdy(i, j, k) -
                                       2.0 * geo.A(i, j, k)));
      }
  out.horizontal_residual = hres;
  out.vertical_residual = vres;
  return out;
}

BerwaldConnection berwald_coefficients(const FinslerStructure& fs,
                                       const VectorXd& x, const VectorXd& y) {
  Geometry geo(fs, x, y, 4);
  const int n = geo.n;
  SprayFiberJets sj(fs, x, y, 2);
  Tensor3 Gamma(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        Gamma(i, j, k) = 0.5 * sj.G[i].partial({j, k});

  BerwaldConnection out;
  out.coefficients = {ConnectionKind::berwald, x, y, Gamma};

  MatrixXd N = geo.corrected_nonlinear();
  CartanDerivatives dA(geo);
  Tensor3 flag_dA = flag_cartan_derivative(geo, dA, N, Gamma);
  Tensor3 D = geo.horizontal_dg(N);
  Tensor3 defect(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double hg = D(i, j, k);
        for (int m = 0; m < n; ++m)
          hg -= Gamma(m, i, k) * geo.g(m, j) + Gamma(m, j, k) * geo.g(i, m);
        defect(i, j, k) = hg + 2.0 * flag_dA(i, j, k);
      }
  out.h_compatibility_defect = defect;
  return out;
}

ConnectionCoefficients pullback_connection(const ConnectionCoefficients& c) {
  if (c.y_dependent())
    throw Error("pullback re-tagging requires a y-independent connection");
  ConnectionCoefficients out = c;
  out.kind = ConnectionKind::pullback_affine;
  return out;
}

DifferenceTensor difference_tensor(const ConnectionCoefficients& a,
                                   const ConnectionCoefficients& b) {
  if (a.dim() != b.dim())
    throw DimensionMismatch("difference of connections with unequal dimensions");
  const int n = a.dim();
  DifferenceTensor d;
  d.difference = a.gamma - b.gamma;
  d.symmetric = Tensor3(n);
  d.antisymmetric = Tensor3(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        d.symmetric(i, j, k) =
            0.5 * (d.difference(i, j, k) + d.difference(i, k, j));
        d.antisymmetric(i, j, k) =
            0.5 * (d.difference(i, j, k) - d.difference(i, k, j));
      }
  double res = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double tor_a = a.gamma(i, j, k) - a.gamma(i, k, j);
        double tor_b = b.gamma(i, j, k) - b.gamma(i, k, j);
        res = std::max(res, std::abs(2.0 * d.antisymmetric(i, j, k) -
                                     (tor_a - tor_b)));
      }
  d.torsion_identity_residual = res;
  return d;
}

Tensor3 landsberg_tensor(const FinslerStructure& fs, const VectorXd& x,
                         const VectorXd& y) {
  Geometry geo(fs, x, y, 4);
  MatrixXd N = geo.corrected_nonlinear();
  Tensor3 Gamma = geo.chern_from(geo.horizontal_dg(N));
  CartanDerivatives dA(geo);
  return flag_cartan_derivative(geo, dA, N, Gamma);
}

PointConnectionData chern_data(const FinslerStructure& fs, const VectorXd& x,
                               const VectorXd& y) {
  Geometry geo(fs, x, y, 3);
  PointConnectionData d;
  d.nonlinear = geo.corrected_nonlinear();
  d.chern = geo.chern_from(geo.horizontal_dg(d.nonlinear));
  return d;
}

}  // namespace finsler
