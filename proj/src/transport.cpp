#include "finsler/transport.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "finsler/errors.hpp"

namespace finsler {

namespace {

void require_inside(const ChartBox& box, const VectorXd& x) {
  if (!box.contains(x)) {
    std::ostringstream os;
    os << "integration left the chart box at x = [" << x.transpose() << "]";
    throw LeftChart(os.str());
  }
}

std::vector<double> segment_grid(const Curve& c) {
  std::vector<double> grid = c.breakpoints();
  grid.insert(grid.begin(), 0.0);
  grid.push_back(c.t_end());
  return grid;
}

}  // namespace

GeodesicResult integrate_geodesic(const FinslerStructure& fs,
                                  const VectorXd& x0, const VectorXd& y0,
                                  double length, const OdeOptions& opts) {
  const int n = fs.dim();
  double f0 = fs.norm(x0, y0);
  if (f0 <= 0.0)
    throw DegenerateDirection("geodesic initial direction has F <= 0");
  VectorXd state(2 * n);
  state.head(n) = x0;
  state.tail(n) = y0 / f0;

  auto rhs = [&](double, const VectorXd& s, VectorXd& ds) {
    VectorXd x = s.head(n), v = s.tail(n);
    SprayData sp = formal_christoffel(fs, x, v);
    ds.head(n) = v;
    ds.tail(n) = -sp.spray;
  };

  GeodesicResult out;
  out.f_drift = 0.0;
  std::vector<double> ts;
  std::vector<VectorXd> xs, vs;
  auto observer = [&](double t, const VectorXd& s, const VectorXd&) {
    VectorXd x = s.head(n), v = s.tail(n);
    require_inside(fs.chart(), x);
    out.f_drift = std::max(out.f_drift, std::abs(fs.norm(x, v) - 1.0));
    ts.push_back(t);
    xs.push_back(x);
    vs.push_back(v);
  };

  out.stats = integrate_adaptive(rhs, 0.0, length, state, opts, observer);
  out.x_end = state.head(n);
  out.v_end = state.tail(n);
  if (ts.size() < 2) {
    // Degenerate span: synthesize a two-sample segment for the curve object.
    ts = {0.0, std::max(length, 1e-12)};
    xs = {out.x_end, out.x_end};
    vs = {out.v_end, out.v_end};
  }
  out.curve = sampled_curve(ts, xs, vs);
  return out;
}

TransportResult horizontal_transport(const FinslerStructure& fs,
                                     ConnectionKind kind, const Curve& curve,
                                     const VectorXd& y_start,
                                     const std::optional<MatrixXd>& sections,
                                     const OdeOptions& opts) {
  const int n = fs.dim();
  if (kind != ConnectionKind::chern && kind != ConnectionKind::berwald)
    throw Error("horizontal transport expects the chern or berwald connection");
  const int cols = sections ? int(sections->cols()) : 0;
  const double y_scale = y_start.norm();
  if (y_scale == 0.0)
    throw DegenerateDirection("horizontal transport from y = 0");

  VectorXd state(n + n * cols);
  state.head(n) = y_start;
  for (int c = 0; c < cols; ++c)
    state.segment(n + c * n, n) = sections->col(c);

  // The velocity of a piecewise curve is one-sided at breakpoints; stages
  // that land exactly on a segment's right edge must keep that segment's
  // velocity, so the parameter is clamped one ulp inside the segment.
  double seg_lo = 0.0, seg_hi = 0.0;
  VectorXd cx(n), cv(n);
  auto rhs = [&](double t, const VectorXd& s, VectorXd& ds) {
    curve.eval(std::clamp(t, seg_lo, std::nextafter(seg_hi, seg_lo)), cx, cv);
    VectorXd y = s.head(n);
    if (y.norm() < 1e-10 * y_scale)
      throw DegenerateDirection("transported direction collapsed toward zero");
    MatrixXd N;
    Tensor3 gamma;
    if (kind == ConnectionKind::chern) {
      PointConnectionData d = chern_data(fs, cx, y);
      N = d.nonlinear;
      gamma = d.chern;
    } else {
      N = nonlinear_connection(fs, cx, y).coefficients;
      gamma = berwald_coefficients(fs, cx, y).coefficients.gamma;
    }
    ds.head(n) = -N * cv;
    for (int c = 0; c < cols; ++c) {
      VectorXd S = s.segment(n + c * n, n);
      VectorXd dS = VectorXd::Zero(n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) dS[i] -= gamma(i, j, k) * cv[j] * S[k];
      ds.segment(n + c * n, n) = dS;
    }
  };

  TransportResult out;
  out.f_start = fs.norm(curve.start(), y_start);
  out.f_drift = 0.0;
  auto observer = [&](double t, const VectorXd& s, const VectorXd&) {
    VectorXd x(n), v(n);
    curve.eval(t, x, v);
    require_inside(fs.chart(), x);
    out.f_drift = std::max(
        out.f_drift, std::abs(fs.norm(x, s.head(n)) - out.f_start));
  };

  std::vector<double> grid = segment_grid(curve);
  for (size_t k = 0; k + 1 < grid.size(); ++k) {
    seg_lo = grid[k];
    seg_hi = grid[k + 1];
    out.stats +=
        integrate_adaptive(rhs, grid[k], grid[k + 1], state, opts, observer);
  }

  out.x_end = curve.end();
  out.y_end = state.head(n);
  out.sections_end = MatrixXd(n, cols);
  for (int c = 0; c < cols; ++c)
    out.sections_end.col(c) = state.segment(n + c * n, n);
  return out;
}

MatrixXd affine_frame_transport(const AffineConnectionField& field,
                                const Curve& curve, const OdeOptions& opts,
                                OdeStats* stats) {
  const int n = curve.dim();
  VectorXd state(n * n);
  MatrixXd I = MatrixXd::Identity(n, n);
  for (int c = 0; c < n; ++c) state.segment(c * n, n) = I.col(c);

  double seg_lo = 0.0, seg_hi = 0.0;
  VectorXd cx(n), cv(n);
  auto rhs = [&](double t, const VectorXd& s, VectorXd& ds) {
    curve.eval(std::clamp(t, seg_lo, std::nextafter(seg_hi, seg_lo)), cx, cv);
    Tensor3 gamma = field(cx);
    for (int c = 0; c < n; ++c) {
      VectorXd S = s.segment(c * n, n);
      VectorXd dS = VectorXd::Zero(n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) dS[i] -= gamma(i, j, k) * cv[j] * S[k];
      ds.segment(c * n, n) = dS;
    }
  };

  OdeStats st;
  std::vector<double> grid = segment_grid(curve);
  for (size_t k = 0; k + 1 < grid.size(); ++k) {
    seg_lo = grid[k];
    seg_hi = grid[k + 1];
    st += integrate_adaptive(rhs, grid[k], grid[k + 1], state, opts);
  }
  if (stats) *stats = st;

  MatrixXd M(n, n);
  for (int c = 0; c < n; ++c) M.col(c) = state.segment(c * n, n);
  return M;
}

IndicatrixDriftResult transport_indicatrix_samples(
    const FinslerStructure& fs, const AffineConnectionField& field,
    const Curve& curve, int sample_count, const OdeOptions& opts) {
  const int n = fs.dim();
  if (n != 2 && n != 3)
    throw UnsupportedDimension("indicatrix transport supports n = 2 or 3");
  if (sample_count < 4)
    throw InsufficientSamples("need at least 4 indicatrix samples");

  VectorXd x0 = curve.start();
  std::vector<VectorXd> samples;
  if (n == 2) {
    for (int k = 0; k < sample_count; ++k) {
      double th = 2.0 * M_PI * k / sample_count;
      VectorXd u(2);
      u << std::cos(th), std::sin(th);
      samples.push_back(u / fs.norm(x0, u));
    }
  } else {
    int m = int(std::round(std::sqrt(double(sample_count))));
    m = std::max(m, 2);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < 2 * m; ++b) {
        double th = M_PI * (a + 0.5) / m, ph = M_PI * b / m;
        VectorXd u(3);
        u << std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
            std::cos(th);
        samples.push_back(u / fs.norm(x0, u));
      }
  }

  IndicatrixDriftResult out;
  out.frame = affine_frame_transport(field, curve, opts);
  out.x_end = curve.end();
  out.max_drift = 0.0;
  out.mean_drift = 0.0;
  for (const VectorXd& s : samples) {
    VectorXd s_end = out.frame * s;
    double d = std::abs(fs.norm(out.x_end, s_end) - 1.0);
    out.drifts.push_back(d);
    out.max_drift = std::max(out.max_drift, d);
    out.mean_drift += d;
  }
  out.mean_drift /= double(out.drifts.size());
  return out;
}

AffineConnectionField constant_connection_field(Tensor3 gamma) {
  return [gamma = std::move(gamma)](const VectorXd&) { return gamma; };
}

Tensor3 levi_civita_of_field(const MetricField& h, const VectorXd& x,
                             double step) {
  const int n = int(x.size());
  MatrixXd h0 = h(x);
  std::vector<MatrixXd> dh(n);
  for (int k = 0; k < n; ++k) {
    VectorXd xp = x, xm = x;
    double s = step * std::max(1.0, std::abs(x[k]));
    xp[k] += s;
    xm[k] -= s;
    dh[k] = (h(xp) - h(xm)) / (2.0 * s);
  }
  MatrixXd hinv = h0.partialPivLu().inverse();
  Tensor3 gamma(n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      VectorXd rhs(n);
      for (int s = 0; s < n; ++s)
        rhs[s] = dh[k](s, j) - dh[s](j, k) + dh[j](s, k);
      VectorXd col = 0.5 * (hinv * rhs);
      for (int i = 0; i < n; ++i) gamma(i, j, k) = col[i];
    }
  return gamma;
}

AffineConnectionField levi_civita_field(MetricField h, double step) {
  return [h = std::move(h), step](const VectorXd& x) {
    return levi_civita_of_field(h, x, step);
  };
}

}  // namespace finsler
