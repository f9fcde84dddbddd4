#include "finsler/classify.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "finsler/errors.hpp"
#include "finsler/random.hpp"

namespace finsler {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::yes:
      return "yes";
    case Verdict::no:
      return "no";
    default:
      return "inconclusive";
  }
}

Verdict banded_verdict(double residual, double tol) {
  if (residual <= tol) return Verdict::yes;
  if (residual >= 10.0 * tol) return Verdict::no;
  return Verdict::inconclusive;
}

std::vector<CurvePtr> random_curves(const FinslerStructure& fs, int count,
                                    uint64_t seed, double margin) {
  Rng rng(seed);
  std::vector<CurvePtr> curves;
  for (int c = 0; c < count; ++c) {
    std::vector<VectorXd> w;
    for (int k = 0; k < 4; ++k) w.push_back(rng.in_box(fs.chart(), margin));
    curves.push_back(cubic_curve(w));
  }
  return curves;
}

BerwaldTest berwald_test(const FinslerStructure& fs, int sample_points,
                         int sample_dirs, double tol, uint64_t seed,
                         int quadrature_nodes) {
  if (sample_points < 3 || sample_dirs < 8)
    throw InsufficientSamples("berwald test needs >= 3 points and >= 8 directions");
  const int n = fs.dim();
  Rng rng(seed);
  BerwaldTest out;
  out.points = sample_points;
  out.dirs = sample_dirs;
  out.direct_residual = 0.0;
  out.averaged_residual = 0.0;
  double magnitude = 0.0;
  QuadratureScheme scheme = QuadratureScheme::for_dim(n, quadrature_nodes);

  for (int p = 0; p < sample_points; ++p) {
    VectorXd x = rng.in_box(fs.chart(), 0.2);
    std::vector<Tensor3> gammas;
    for (int d = 0; d < sample_dirs; ++d) {
      VectorXd y = rng.on_sphere(n);
      gammas.push_back(chern_data(fs, x, y).chern);
      magnitude = std::max(magnitude, gammas.back().max_abs());
    }
    for (size_t a = 0; a < gammas.size(); ++a)
      for (size_t b = a + 1; b < gammas.size(); ++b)
        out.direct_residual =
            std::max(out.direct_residual, (gammas[a] - gammas[b]).max_abs());
    Tensor3 avg = averaged_connection_gamma(fs, x, ConnectionKind::chern,
                                            scheme);
    for (const Tensor3& g : gammas)
      out.averaged_residual =
          std::max(out.averaged_residual, (g - avg).max_abs());
  }
  out.scale = 1.0 + magnitude;
  double worst = std::max(out.direct_residual, out.averaged_residual);
  out.verdict = banded_verdict(worst, tol * out.scale);
  return out;
}

LandsbergTest landsberg_test(const FinslerStructure& fs, int sample_points,
                             int sample_dirs, double tol, uint64_t seed) {
  if (sample_points < 3 || sample_dirs < 8)
    throw InsufficientSamples("landsberg test needs >= 3 points and >= 8 directions");
  const int n = fs.dim();
  Rng rng(seed);
  LandsbergTest out;
  out.points = sample_points;
  out.dirs = sample_dirs;
  out.max_residual = 0.0;
  double magnitude = 0.0;
  for (int p = 0; p < sample_points; ++p) {
    VectorXd x = rng.in_box(fs.chart(), 0.2);
    for (int d = 0; d < sample_dirs; ++d) {
      VectorXd y = rng.on_sphere(n);
      out.max_residual =
          std::max(out.max_residual, landsberg_tensor(fs, x, y).max_abs());
      magnitude =
          std::max(magnitude, cartan_tensor(fs, x, y).lowered.max_abs());
    }
  }
  out.verdict = banded_verdict(out.max_residual, tol * (1.0 + magnitude));
  return out;
}

RigidityTest rigidity_test(const FinslerStructure& fs, const MetricField& h,
                           const std::vector<CurvePtr>& curves, double tol,
                           int samples_per_curve, const OdeOptions& ode) {
  if (curves.empty()) throw InsufficientSamples("rigidity test needs curves");
  RigidityTest out;
  out.curves = int(curves.size());
  out.samples_per_curve = samples_per_curve;
  out.max_drift = 0.0;
  out.mean_drift = 0.0;
  AffineConnectionField field = levi_civita_field(h);
  int total = 0;
  for (const CurvePtr& c : curves) {
    IndicatrixDriftResult r =
        transport_indicatrix_samples(fs, field, *c, samples_per_curve, ode);
    out.max_drift = std::max(out.max_drift, r.max_drift);
    for (double d : r.drifts) {
      out.mean_drift += d;
      ++total;
    }
  }
  out.mean_drift /= std::max(total, 1);
  out.verdict = banded_verdict(out.max_drift, tol);
  return out;
}

namespace {

double blended_norm(const FinslerStructure& fs, const MetricField& h, double t,
                    const VectorXd& x, const VectorXd& y) {
  double quad = std::sqrt(y.dot(h(x) * y));
  return (1.0 - t) * fs.norm(x, y) + t * quad;
}

}  // namespace

InterpolationTest interpolated_indicatrix_test(
    const FinslerStructure& fs, const MetricField& h,
    const std::vector<double>& t_grid, const std::vector<CurvePtr>& curves,
    double tol, int samples_per_curve, const OdeOptions& ode) {
  if (curves.empty() || t_grid.empty())
    throw InsufficientSamples("interpolation test needs curves and a t grid");
  const int n = fs.dim();
  if (n != 2 && n != 3)
    throw UnsupportedDimension("interpolation test supports n = 2 or 3");

  InterpolationTest out;
  out.min_slope = std::numeric_limits<double>::infinity();
  out.max_slope = -std::numeric_limits<double>::infinity();
  std::vector<double> drift(t_grid.size(), 0.0);

  AffineConnectionField field = levi_civita_field(h);
  for (const CurvePtr& c : curves) {
    VectorXd x0 = c->start();
    VectorXd x1 = c->end();
    MatrixXd M = affine_frame_transport(field, *c, ode);
    for (int k = 0; k < samples_per_curve; ++k) {
      double th = 2.0 * M_PI * k / samples_per_curve;
      VectorXd u = VectorXd::Zero(n);
      u[0] = std::cos(th);
      u[1] = std::sin(th);
      if (n == 3) {
        // Tilt out of the plane on alternating samples.
        double ps = (k % 2) ? 0.5 : -0.5;
        u[2] = ps;
        u.normalize();
      }
      double slope =
          std::sqrt(u.dot(h(x0) * u)) - fs.norm(x0, u);
      out.min_slope = std::min(out.min_slope, slope);
      out.max_slope = std::max(out.max_slope, slope);
      for (size_t ti = 0; ti < t_grid.size(); ++ti) {
        double t = t_grid[ti];
        double f0 = blended_norm(fs, h, t, x0, u);
        if (f0 <= 0.0)
          throw StrongConvexityViolation(
              "interpolated norm non-positive at a sampled ray");
        VectorXd y = u / f0;
        VectorXd S = M * y;
        drift[ti] = std::max(
            drift[ti], std::abs(blended_norm(fs, h, t, x1, S) - 1.0));
      }
    }
  }
  for (size_t ti = 0; ti < t_grid.size(); ++ti)
    out.rows.push_back(
        {t_grid[ti], drift[ti], banded_verdict(drift[ti], tol)});
  double cross_tol = 1e-9;
  out.radially_ordered =
      !(out.min_slope < -cross_tol && out.max_slope > cross_tol);
  return out;
}

HolonomySample holonomy_sample(const FinslerStructure& fs, const VectorXd& x,
                               const std::vector<double>& loop_sizes,
                               int loop_count, int quadrature_nodes,
                               const OdeOptions& ode) {
  if (fs.dim() != 2)
    throw UnsupportedDimension("holonomy sampling is implemented for n = 2");
  if (loop_sizes.empty() || loop_count < 1)
    throw InsufficientSamples("holonomy sampling needs loop sizes");

  QuadratureScheme scheme = QuadratureScheme::for_dim(2, quadrature_nodes);
  AffineConnectionField field = [&fs, scheme](const VectorXd& p) {
    return averaged_connection_gamma(fs, p, ConnectionKind::chern, scheme);
  };

  const double aspects[] = {1.0, 0.6, 1.4};
  HolonomySample out;
  out.x = x;
  for (int i = 0; i < loop_count; ++i) {
    double a = loop_sizes[i % loop_sizes.size()];
    double b = a * aspects[(i / loop_sizes.size()) % 3];
    CurvePtr loop = rectangle_loop(x, a, b, 0, 1);
    MatrixXd H = affine_frame_transport(field, *loop, ode);
    MatrixXd Hrev = affine_frame_transport(field, *reversed(loop), ode);
    out.loop_a.push_back(a);
    out.loop_b.push_back(b);
    out.matrices.push_back(H);
    out.inverse_loop_matrices.push_back(Hrev);
    out.determinants.push_back(H.determinant());
    Eigen::EigenSolver<MatrixXd> es(H);
    bool ok = true;
    for (int e = 0; e < H.rows(); ++e) {
      auto ev = es.eigenvalues()[e];
      if (std::abs(ev.imag()) < 1e-14 && ev.real() <= 0.0) ok = false;
    }
    out.log_defined.push_back(ok);
    out.log_matrices.push_back(ok ? MatrixXd(H.log())
                                  : MatrixXd::Zero(H.rows(), H.cols()));
  }
  return out;
}

std::string to_string(HolonomyClass c) {
  switch (c) {
    case HolonomyClass::trivial:
      return "trivial";
    case HolonomyClass::metric_preserving:
      return "metric_preserving";
    case HolonomyClass::special_linear:
      return "special_linear";
    default:
      return "general_linear";
  }
}

namespace {

double form_residual(const std::vector<MatrixXd>& hs, const MatrixXd& Q) {
  double r = 0.0;
  double scale = Q.norm();
  for (const MatrixXd& H : hs)
    r = std::max(r, (H.transpose() * Q * H - Q).norm() / scale);
  return r;
}

// Least-squares common invariant symmetric form for 2x2 matrices: stack the
// linear constraints H^T Q H - Q = 0 over (q00, q01, q11) and take the
// smallest right singular vector. If that direction is indefinite but the
// nullspace is (numerically) two-dimensional, search it for a positive
// candidate.
struct FormFit {
  MatrixXd Q;
  double residual;
  bool positive;
};

FormFit fit_invariant_form(const std::vector<MatrixXd>& hs) {
  const int k = int(hs.size());
  MatrixXd M(3 * k, 3);
  for (int i = 0; i < k; ++i) {
    const MatrixXd& H = hs[i];
    double h00 = H(0, 0), h01 = H(0, 1), h10 = H(1, 0), h11 = H(1, 1);
    M.row(3 * i + 0) << h00 * h00 - 1.0, 2.0 * h00 * h10, h10 * h10;
    M.row(3 * i + 1) << h00 * h01, h00 * h11 + h10 * h01 - 1.0, h10 * h11;
    M.row(3 * i + 2) << h01 * h01, 2.0 * h01 * h11, h11 * h11 - 1.0;
  }
  Eigen::JacobiSVD<MatrixXd> svd(M, Eigen::ComputeFullV);
  auto candidate = [&](const VectorXd& v) {
    MatrixXd Q(2, 2);
    Q << v[0], v[1], v[1], v[2];
    if (Q.trace() < 0.0) Q = -Q;
    return Q;
  };

  MatrixXd best = candidate(svd.matrixV().col(2));
  auto positive = [](const MatrixXd& Q) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(Q);
    return es.eigenvalues().minCoeff() > 0.0;
  };

  if (!positive(best) && svd.singularValues()[1] < 1e-7 * (1.0 + svd.singularValues()[0])) {
    VectorXd v1 = svd.matrixV().col(2), v2 = svd.matrixV().col(1);
    double best_res = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 180; ++a) {
      double phi = M_PI * a / 180.0;
      MatrixXd Q = candidate(std::cos(phi) * v1 + std::sin(phi) * v2);
      if (!positive(Q)) continue;
      double r = form_residual(hs, Q);
      if (r < best_res) {
        best_res = r;
        best = Q;
      }
    }
  }
  FormFit fit;
  fit.Q = best / best.norm();
  fit.residual = form_residual(hs, fit.Q);
  fit.positive = positive(fit.Q);
  return fit;
}

}  // namespace

HolonomyClassification holonomy_classify(const HolonomySample& sample,
                                         double tol) {
  if (sample.matrices.size() < 6)
    throw InsufficientSamples("holonomy classification needs >= 6 matrices");
  const int n = int(sample.matrices[0].rows());
  if (n != 2)
    throw UnsupportedDimension("holonomy classification is implemented for n = 2");

  HolonomyClassification out;
  out.identity_residual = 0.0;
  out.det_residual = 0.0;
  for (const MatrixXd& H : sample.matrices) {
    out.identity_residual = std::max(
        out.identity_residual,
        (H - MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff());
  }
  for (double d : sample.determinants)
    out.det_residual = std::max(out.det_residual, std::abs(d - 1.0));

  FormFit fit = fit_invariant_form(sample.matrices);
  out.form_fit_residual = fit.residual;
  out.fitted_form = fit.Q;
  out.form_positive = fit.positive;

  if (out.identity_residual <= tol)
    out.cls = HolonomyClass::trivial;
  else if (fit.positive && fit.residual <= tol)
    out.cls = HolonomyClass::metric_preserving;
  else if (out.det_residual <= tol)
    out.cls = HolonomyClass::special_linear;
  else
    out.cls = HolonomyClass::general_linear;

  out.note =
      "class of the sampled loop transports only, not a proof for the full "
      "holonomy group; a pure Landsberg structure requires special_linear or "
      "general_linear";
  return out;
}

ClassificationReport classify_structure(const FinslerStructure& fs,
                                        const ClassifyOptions& opt) {
  const int n = fs.dim();
  ClassificationReport rep;
  rep.metric_id = fs.family();
  rep.seed = opt.seed;
  rep.sample_points = opt.sample_points;
  rep.sample_dirs = opt.sample_dirs;
  rep.curve_count = opt.curve_count;

  QuadratureScheme scheme = QuadratureScheme::for_dim(n, opt.quadrature_nodes);
  BerwaldTest bt = berwald_test(fs, opt.sample_points, opt.sample_dirs,
                                opt.tol, opt.seed, opt.quadrature_nodes);
  rep.verdicts["is_berwald"] = {to_string(bt.verdict),
                                std::max(bt.direct_residual,
                                         bt.averaged_residual),
                                opt.tol * bt.scale,
                                opt.sample_points * opt.sample_dirs};
  rep.residuals.push_back(
      {"berwald_direct_spread", bt.direct_residual, opt.tol * bt.scale});
  rep.residuals.push_back(
      {"berwald_averaged_deviation", bt.averaged_residual, opt.tol * bt.scale});

  LandsbergTest lt =
      landsberg_test(fs, opt.sample_points, opt.sample_dirs, opt.tol, opt.seed);
  rep.verdicts["is_landsberg"] = {to_string(lt.verdict), lt.max_residual,
                                  opt.tol,
                                  opt.sample_points * opt.sample_dirs};
  rep.residuals.push_back({"landsberg_derivative", lt.max_residual, opt.tol});

  MetricField h = [&fs, scheme](const VectorXd& x) {
    return averaged_metric(fs, x, scheme);
  };
  std::vector<CurvePtr> curves = random_curves(fs, opt.curve_count, opt.seed);
  double side = 0.25 * (fs.chart().hi - fs.chart().lo).minCoeff();
  side = std::min(side, 0.5);
  VectorXd corner = fs.chart().center();
  curves.push_back(rectangle_loop(corner, side, side, 0, 1));

  RigidityTest rt = rigidity_test(fs, h, curves, opt.tol, opt.sample_dirs,
                                  opt.ode);
  rep.verdicts["rigidity_holds"] = {to_string(rt.verdict), rt.max_drift,
                                    opt.tol, rt.curves * rt.samples_per_curve};
  rep.residuals.push_back({"rigidity_drift", rt.max_drift, opt.tol});

  if (!opt.t_grid.empty()) {
    InterpolationTest it = interpolated_indicatrix_test(
        fs, h, opt.t_grid, curves, opt.tol, opt.sample_dirs, opt.ode);
    for (const InterpolationRow& row : it.rows) {
      std::ostringstream os;
      os << "interpolation_drift_t" << row.t;
      rep.residuals.push_back({os.str(), row.max_drift, opt.tol});
    }
  }

  if (n == 2) {
    HolonomySample hs = holonomy_sample(fs, fs.chart().center(),
                                        opt.loop_sizes, opt.loop_count,
                                        opt.quadrature_nodes, opt.ode);
    HolonomyClassification hc = holonomy_classify(hs, opt.tol);
    double residual = hc.cls == HolonomyClass::trivial ? hc.identity_residual
                      : hc.cls == HolonomyClass::metric_preserving
                          ? hc.form_fit_residual
                          : hc.det_residual;
    rep.verdicts["holonomy_class"] = {to_string(hc.cls), residual, opt.tol,
                                      int(hs.matrices.size())};
    rep.residuals.push_back(
        {"holonomy_form_fit", hc.form_fit_residual, opt.tol});
    rep.residuals.push_back(
        {"holonomy_det_deviation", hc.det_residual, opt.tol});
  }

  std::sort(rep.residuals.begin(), rep.residuals.end(),
            [](const ResidualEntry& a, const ResidualEntry& b) {
              return a.name < b.name;
            });
  return rep;
}

}  // namespace finsler
