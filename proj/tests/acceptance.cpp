// Acceptance gate: one pass/fail line per criterion, with the measured
// quantities printed so regressions are visible in the log. Exits nonzero if
// any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "finsler/averaging.hpp"
#include "finsler/classify.hpp"
#include "finsler/connections.hpp"
#include "finsler/random.hpp"
#include "finsler/transport.hpp"
#include "oracles.hpp"

using namespace finsler;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// 1. Chern coefficients of the hyperbolic half-plane against a
//    finite-difference Levi-Civita route through the raw metric field, at 50
//    sampled points; Cartan tensor at machine zero. Budget: 5 s.
Outcome criterion_levi_civita_reduction() {
  auto t0 = std::chrono::steady_clock::now();
  FinslerStructure fs = ts::hyperbolic_half_plane();
  Rng rng(101);
  double max_gap = 0.0, max_cartan = 0.0;
  for (int k = 0; k < 50; ++k) {
    VectorXd x = rng.in_box(fs.chart(), 0.05);
    VectorXd y = rng.on_sphere(2);
    Tensor3 chern = chern_coefficients(fs, x, y).coefficients.gamma;
    Tensor3 lc = levi_civita_of_field(ts::hyperbolic_field(), x);
    max_gap = std::max(max_gap, (chern - lc).max_abs());
    max_cartan = std::max(max_cartan, cartan_tensor(fs, x, y).lowered.max_abs());
  }
  double secs = seconds_since(t0);
  std::ostringstream os;
  os << "max |chern - fd levi-civita| = " << max_gap << " (tol 1e-6), max |cartan| = "
     << max_cartan << " (tol 1e-10), " << secs << " s (budget 5)";
  return {max_gap <= 1e-6 && max_cartan <= 1e-10 && secs < 5.0, os.str()};
}

// 2. Chern horizontal transport preserves F along 20 seeded curves on each of
//    the four fixture metrics; relative drift within 1e-6. Budget: 30 s.
Outcome criterion_transport_invariance() {
  auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int count = 0;
  for (const FinslerStructure& fs : ts::all_fixtures()) {
    auto curves = random_curves(fs, 20, 202);
    Rng rng(203);
    for (const CurvePtr& c : curves) {
      VectorXd y0 = rng.on_sphere(2) * (0.5 + rng.uniform01());
      TransportResult t =
          horizontal_transport(fs, ConnectionKind::chern, *c, y0);
      worst = std::max(worst, t.f_drift / t.f_start);
      ++count;
    }
  }
  double secs = seconds_since(t0);
  std::ostringstream os;
  os << "max relative F drift = " << worst << " over " << count
     << " transports (tol 1e-6), " << secs << " s (budget 30)";
  return {worst <= 1e-6 && secs < 30.0, os.str()};
}

// 3. The averaged connection is torsion-free to 1e-10 on every fixture.
Outcome criterion_averaged_torsion() {
  double worst = 0.0;
  for (const FinslerStructure& fs : ts::all_fixtures()) {
    Rng rng(303);
    QuadratureScheme scheme = QuadratureScheme::for_dim(2, 32);
    for (int k = 0; k < 3; ++k) {
      VectorXd x = rng.in_box(fs.chart(), 0.1);
      Tensor3 gamma =
          averaged_connection_gamma(fs, x, ConnectionKind::chern, scheme);
      ConnectionCoefficients c{ConnectionKind::averaged_affine, x,
                               std::nullopt, gamma};
      worst = std::max(worst, c.torsion_residual());
    }
  }
  std::ostringstream os;
  os << "max torsion residual = " << worst << " (tol 1e-10)";
  return {worst <= 1e-10, os.str()};
}

// 4. Direction-independence detection: on the three berwald-type fixtures the
//    chern coefficients match their indicatrix average to 1e-5; the
//    position-dependent drift fixture responds above 1e-3.
Outcome criterion_berwald_detection() {
  double worst_yes = 0.0;
  QuadratureScheme scheme = QuadratureScheme::for_dim(2, 32);
  for (const FinslerStructure& fs : ts::berwald_fixtures()) {
    Rng rng(404);
    for (int p = 0; p < 4; ++p) {
      VectorXd x = rng.in_box(fs.chart(), 0.1);
      Tensor3 avg =
          averaged_connection_gamma(fs, x, ConnectionKind::chern, scheme);
      for (int d = 0; d < 8; ++d) {
        VectorXd y = rng.on_sphere(2);
        Tensor3 gamma = chern_coefficients(fs, x, y).coefficients.gamma;
        worst_yes = std::max(worst_yes, (gamma - avg).max_abs());
      }
    }
  }

  FinslerStructure drift = ts::nonberwald_randers();
  Rng rng(405);
  double best_no = 0.0;
  for (int p = 0; p < 4; ++p) {
    VectorXd x = rng.in_box(drift.chart(), 0.1);
    Tensor3 avg =
        averaged_connection_gamma(drift, x, ConnectionKind::chern, scheme);
    double here = 0.0;
    for (int d = 0; d < 8; ++d) {
      VectorXd y = rng.on_sphere(2);
      here = std::max(
          here,
          (chern_coefficients(drift, x, y).coefficients.gamma - avg).max_abs());
    }
    best_no = std::max(best_no, here);
  }
  std::ostringstream os;
  os << "berwald-type max |chern - average| = " << worst_yes
     << " (tol 1e-5); drift fixture deviation = " << best_no << " (must exceed 1e-3)";
  return {worst_yes <= 1e-5 && best_no > 1e-3, os.str()};
}

// 5. Rigidity: averaged-metric transports keep berwald-type indicatrices
//    within 1e-6 (square loop of side 0.5 included), and move the drift
//    fixture's by at least 1e-3.
Outcome criterion_rigidity() {
  QuadratureScheme scheme = QuadratureScheme::for_dim(2, 24);
  auto field_of = [&scheme](const FinslerStructure& fs) {
    return MetricField([fs, scheme](const VectorXd& x) {
      return averaged_metric(fs, x, scheme);
    });
  };
  double worst_yes = 0.0;
  for (const FinslerStructure& fs : ts::berwald_fixtures()) {
    std::vector<CurvePtr> curves = {
        rectangle_loop(fs.chart().center(), 0.5, 0.5, 0, 1),
        random_curves(fs, 1, 505)[0]};
    RigidityTest r = rigidity_test(fs, field_of(fs), curves, 1e-6, 10);
    worst_yes = std::max(worst_yes, r.max_drift);
  }

  // the loop avoids the chart center, where the drift term vanishes and the
  // norm degenerates to a circle that any orthogonal holonomy preserves
  FinslerStructure drift = ts::nonberwald_randers();
  VectorXd corner(2);
  corner << 0.3, -1.2;
  std::vector<CurvePtr> loop = {rectangle_loop(corner, 0.5, 0.5, 0, 1)};
  RigidityTest r = rigidity_test(drift, field_of(drift), loop, 1e-6, 10);
  std::ostringstream os;
  os << "berwald-type max drift = " << worst_yes
     << " (tol 1e-6); drift fixture loop drift = " << r.max_drift
     << " (must exceed 1e-3)";
  return {worst_yes <= 1e-6 && r.max_drift >= 1e-3, os.str()};
}

// 6. Indicatrix interpolation F_t = (1-t)F + t sqrt(h): the locally minkowski
//    fixture passes every t in {0, .25, .5, .75, 1}; the drift fixture fails
//    at t=0 and passes at t=1.
Outcome criterion_interpolation() {
  QuadratureScheme scheme = QuadratureScheme::for_dim(2, 24);
  auto field_of = [&scheme](const FinslerStructure& fs) {
    return MetricField([fs, scheme](const VectorXd& x) {
      return averaged_metric(fs, x, scheme);
    });
  };
  std::vector<double> grid = {0.0, 0.25, 0.5, 0.75, 1.0};

  FinslerStructure flat = ts::berwald_randers();
  auto flat_curves = random_curves(flat, 2, 606);
  InterpolationTest ft = interpolated_indicatrix_test(
      flat, field_of(flat), grid, flat_curves, 1e-6, 10);
  double flat_worst = 0.0;
  for (const InterpolationRow& row : ft.rows)
    flat_worst = std::max(flat_worst, row.max_drift);

  FinslerStructure drift = ts::nonberwald_randers();
  VectorXd corner(2);
  corner << 0.3, -1.2;
  std::vector<CurvePtr> loop = {rectangle_loop(corner, 0.5, 0.5, 0, 1)};
  InterpolationTest dt = interpolated_indicatrix_test(
      drift, field_of(drift), grid, loop, 1e-6, 10);

  std::ostringstream os;
  os << "berwald all-t max drift = " << flat_worst
     << " (tol 1e-6); drift t=0 -> " << dt.rows.front().max_drift
     << " (must exceed 1e-5), t=1 -> " << dt.rows.back().max_drift
     << " (tol 1e-6)";
  bool pass = flat_worst <= 1e-6 && dt.rows.front().max_drift > 1e-5 &&
              dt.rows.front().verdict == Verdict::no &&
              dt.rows.back().max_drift <= 1e-6;
  return {pass, os.str()};
}

// 7. Holonomy sampling and classification: flat structure -> trivial;
//    sphere patch -> metric_preserving with form fit within 1e-6; an
//    sl(2)-generated sample -> special_linear.
Outcome criterion_holonomy_classes() {
  OdeOptions ode;
  ode.rel_tol = 1e-9;
  ode.abs_tol = 1e-11;

  FinslerStructure flat = ts::euclidean2();
  HolonomyClassification flat_cls = holonomy_classify(
      holonomy_sample(flat, flat.chart().center(), {0.1, 0.2}, 6, 24, ode),
      1e-6);

  FinslerStructure sphere = ts::sphere_patch();
  HolonomyClassification sphere_cls = holonomy_classify(
      holonomy_sample(sphere, sphere.chart().center(), {0.15, 0.3}, 6, 24,
                      ode),
      1e-6);

  HolonomySample sl;
  sl.x = VectorXd::Zero(2);
  MatrixXd stretch(2, 2), shear(2, 2);
  stretch << 2.0, 0.0, 0.0, 0.5;
  shear << 1.0, 0.3, 0.0, 1.0;
  sl.matrices = {stretch, shear, stretch * shear, shear * stretch,
                 stretch.inverse(), shear.inverse()};
  for (const MatrixXd& m : sl.matrices)
    sl.determinants.push_back(m.determinant());
  HolonomyClassification sl_cls = holonomy_classify(sl, 1e-6);

  std::ostringstream os;
  os << "flat -> " << to_string(flat_cls.cls) << " (identity residual "
     << flat_cls.identity_residual << "), sphere patch -> "
     << to_string(sphere_cls.cls) << " (form fit "
     << sphere_cls.form_fit_residual << ", tol 1e-6), sl sample -> "
     << to_string(sl_cls.cls);
  bool pass = flat_cls.cls == HolonomyClass::trivial &&
              sphere_cls.cls == HolonomyClass::metric_preserving &&
              sphere_cls.form_fit_residual <= 1e-6 &&
              sl_cls.cls == HolonomyClass::special_linear;
  return {pass, os.str()};
}

// 8. Derived-value oracles: jets against nested finite differences, the
//    adaptive geodesic against a tenfold-finer fixed-step rk4, the sphere
//    patch holonomy angle against the closed-form enclosed area. The whole
//    binary must finish within 5 minutes.
Outcome criterion_oracles(std::chrono::steady_clock::time_point start) {
  // second-order jet of the drift norm vs value-level finite differences
  FinslerStructure fs = ts::nonberwald_randers();
  VectorXd x(2), y(2);
  x << 0.4, -0.7;
  y << 0.8, 0.6;
  double jet_gap = 0.0;
  FundamentalTensor g = fundamental_tensor(fs, x, y);
  auto lsq = [&fs](const VectorXd& p) {
    double f = fs.norm(p.head(2), p.tail(2));
    return 0.5 * f * f;
  };
  VectorXd z(4);
  z.head(2) = x;
  z.tail(2) = y;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      std::vector<int> orders(4, 0);
      orders[size_t(2 + i)] += 1;
      orders[size_t(2 + j)] += 1;
      jet_gap = std::max(
          jet_gap, std::abs(g.g(i, j) - ts::fd_partial(lsq, z, orders, 1e-4)));
    }

  // adaptive geodesic endpoint vs fixed-step rk4 at ten times the steps
  VectorXd x0(2), y0(2);
  x0 << -0.4, 0.3;
  y0 << 0.8, -0.6;
  GeodesicResult geo = integrate_geodesic(fs, x0, y0, 1.0);
  VectorXd state(4);
  state.head(2) = x0;
  state.tail(2) = y0 / fs.norm(x0, y0);
  ts::Rhs rhs = [&fs](double, const VectorXd& s, VectorXd& ds) {
    ds.resize(4);
    ds.head(2) = s.tail(2);
    ds.tail(2) = -formal_christoffel(fs, s.head(2), s.tail(2)).spray;
  };
  VectorXd ref = ts::rk4(rhs, 0.0, 1.0, state, 10 * geo.stats.steps);
  double geo_gap = (geo.x_end - ref.head(2)).cwiseAbs().maxCoeff();

  // holonomy rotation angle of one sphere-patch loop vs the enclosed area
  FinslerStructure sphere = ts::sphere_patch();
  VectorXd corner(2);
  corner << 1.2, 0.0;
  double a = 0.4, b = 0.5;
  QuadratureScheme scheme = QuadratureScheme::for_dim(2, 24);
  AffineConnectionField field = [&sphere, &scheme](const VectorXd& p) {
    return averaged_connection_gamma(sphere, p, ConnectionKind::chern, scheme);
  };
  CurvePtr loop = rectangle_loop(corner, a, b, 0, 1);
  MatrixXd H = affine_frame_transport(field, *loop);
  // rotation angle in the orthonormal frame of g at the anchor
  MatrixXd gm = ts::sphere_field()(corner);
  MatrixXd sqrt_g = gm.llt().matrixL();
  MatrixXd R = sqrt_g.transpose() * H * sqrt_g.transpose().inverse();
  double angle = std::abs(std::atan2(R(1, 0), R(0, 0)));
  // gauss-bonnet: the area b (cos x1 - cos(x1 + a)) on the unit sphere
  double area = b * (std::cos(corner[0]) - std::cos(corner[0] + a));
  double angle_gap = std::abs(angle - std::abs(area));

  double secs = seconds_since(start);
  std::ostringstream os;
  os << "jet vs fd = " << jet_gap << " (tol 1e-6), geodesic vs rk4 = "
     << geo_gap << " (tol 1e-8), holonomy angle vs area = " << angle_gap
     << " (tol 1e-4), total " << secs << " s (budget 300)";
  bool pass = jet_gap <= 1e-6 && geo_gap <= 1e-8 && angle_gap <= 1e-4 &&
              secs < 300.0;
  return {pass, os.str()};
}

}  // namespace

int main() {
  auto start = std::chrono::steady_clock::now();
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"chern reduces to levi-civita on a riemannian metric",
       criterion_levi_civita_reduction},
      {"chern transport preserves the norm", criterion_transport_invariance},
      {"averaged connection is torsion-free", criterion_averaged_torsion},
      {"direction-independence detection separates the fixtures",
       criterion_berwald_detection},
      {"averaged-metric rigidity matches the berwald verdict",
       criterion_rigidity},
      {"indicatrix interpolation isolates the failing blend",
       criterion_interpolation},
      {"holonomy classes: trivial, metric-preserving, special linear",
       criterion_holonomy_classes},
      {"derived values agree with their oracles within budget",
       [&] { return criterion_oracles(start); }},
  };

  int failures = 0;
  for (size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] criterion %zu: %s -- %s\n", o.pass ? "PASS" : "FAIL",
                k + 1, criteria[k].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  double total = seconds_since(start);
  std::printf("%d/%zu criteria passed in %.1f s\n",
              int(criteria.size()) - failures, criteria.size(), total);
  return failures == 0 ? 0 : 1;
}
