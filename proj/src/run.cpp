#include "finsler/run.hpp"

#include <chrono>
#include <limits>
#include <sstream>

#include "finsler/averaging.hpp"
#include "finsler/classify.hpp"
#include "finsler/connections.hpp"
#include "finsler/errors.hpp"
#include "finsler/random.hpp"
#include "finsler/registry.hpp"
#include "finsler/transport.hpp"

namespace finsler {

namespace {

std::string error_name(const Error& e) {
  if (dynamic_cast<const UnknownSymbol*>(&e)) return "UnknownSymbol";
  if (dynamic_cast<const SyntaxError*>(&e)) return "SyntaxError";
  if (dynamic_cast<const NonSmoothPoint*>(&e)) return "NonSmoothPoint";
  if (dynamic_cast<const StrongConvexityViolation*>(&e))
    return "StrongConvexityViolation";
  if (dynamic_cast<const DimensionMismatch*>(&e)) return "DimensionMismatch";
  if (dynamic_cast<const LeftChart*>(&e)) return "LeftChart";
  if (dynamic_cast<const StepFailure*>(&e)) return "StepFailure";
  if (dynamic_cast<const DegenerateDirection*>(&e))
    return "DegenerateDirection";
  if (dynamic_cast<const UnsupportedDimension*>(&e))
    return "UnsupportedDimension";
  if (dynamic_cast<const BadWeights*>(&e)) return "BadWeights";
  if (dynamic_cast<const InsufficientSamples*>(&e))
    return "InsufficientSamples";
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  return "Error";
}

JsonValue vector_json(const VectorXd& v) {
  JsonValue arr = JsonValue::array();
  for (int i = 0; i < v.size(); ++i) arr.push(JsonValue::number(v[i]));
  return arr;
}

JsonValue matrix_json(const MatrixXd& m) {
  JsonValue arr = JsonValue::array();
  for (int i = 0; i < m.rows(); ++i) {
    JsonValue row = JsonValue::array();
    for (int j = 0; j < m.cols(); ++j) row.push(JsonValue::number(m(i, j)));
    arr.push(std::move(row));
  }
  return arr;
}

// Mutable state threaded through the analyses.
struct Driver {
  const Config& cfg;
  const FinslerStructure& fs;
  std::map<std::string, VerdictEntry> verdicts;
  std::vector<ResidualEntry> residuals;
  JsonValue samples = JsonValue::object();
  std::vector<std::vector<double>> csv_rows;

  OdeOptions ode() const {
    OdeOptions o;
    o.rel_tol = cfg.numeric.ode_rel_tol;
    o.abs_tol = cfg.numeric.ode_abs_tol;
    return o;
  }
  ClassifyOptions classify_options() const {
    ClassifyOptions o;
    o.sample_points = cfg.numeric.sample_points;
    o.sample_dirs = cfg.numeric.sample_dirs;
    o.curve_count = cfg.numeric.curve_count;
    o.tol = cfg.numeric.tol;
    o.seed = cfg.numeric.seed;
    o.quadrature_nodes = cfg.numeric.quadrature_nodes;
    o.t_grid = cfg.numeric.t_grid;
    o.loop_sizes = cfg.numeric.loop_sizes;
    o.loop_count = cfg.numeric.loop_count;
    o.ode = ode();
    return o;
  }
};

void run_tensors(Driver& d) {
  const int n = d.fs.dim();
  Rng rng(d.cfg.numeric.seed);
  double min_eig = std::numeric_limits<double>::infinity();
  double max_cartan = 0.0;
  double min_f = std::numeric_limits<double>::infinity();
  for (int p = 0; p < d.cfg.numeric.sample_points; ++p) {
    VectorXd x = rng.in_box(d.fs.chart(), 0.1);
    for (int k = 0; k < d.cfg.numeric.sample_dirs; ++k) {
      VectorXd y = rng.on_sphere(n);
      FundamentalTensor g = fundamental_tensor(d.fs, x, y);
      CartanTensor a = cartan_tensor(d.fs, x, y);
      double f = d.fs.norm(x, y);
      min_eig = std::min(min_eig, g.min_eigenvalue);
      max_cartan = std::max(max_cartan, a.lowered.max_abs());
      min_f = std::min(min_f, f);
      if (!d.cfg.output.csv.empty()) {
        std::vector<double> row;
        for (int i = 0; i < n; ++i) row.push_back(x[i]);
        for (int i = 0; i < n; ++i) row.push_back(y[i]);
        row.push_back(f);
        row.push_back(g.min_eigenvalue);
        row.push_back(a.lowered.max_abs());
        d.csv_rows.push_back(std::move(row));
      }
    }
  }
  HomogeneityCheck h = check_homogeneity(d.fs.expression(), 64, 1e-9,
                                         d.fs.chart(), d.cfg.numeric.seed);
  d.residuals.push_back({"homogeneity", h.max_residual, 1e-9});
  JsonValue t = JsonValue::object();
  t.set("min_eigenvalue", JsonValue::number(min_eig));
  t.set("max_cartan_norm", JsonValue::number(max_cartan));
  t.set("min_f", JsonValue::number(min_f));
  t.set("homogeneity_residual", JsonValue::number(h.max_residual));
  d.samples.set("tensors", std::move(t));
}

void run_connections(Driver& d) {
  const int n = d.fs.dim();
  Rng rng(d.cfg.numeric.seed + 1);
  double variant_gap = 0.0, torsion = 0.0, chern_vs_berwald = 0.0;
  double landsberg = 0.0, berwald_defect = 0.0;
  for (int p = 0; p < d.cfg.numeric.sample_points; ++p) {
    VectorXd x = rng.in_box(d.fs.chart(), 0.1);
    VectorXd y = rng.on_sphere(n);
    NonlinearConnection na =
        nonlinear_connection(d.fs, x, y, NonlinearVariant::cartan_corrected);
    NonlinearConnection nb =
        nonlinear_connection(d.fs, x, y, NonlinearVariant::spray_derivative);
    variant_gap = std::max(
        variant_gap,
        (na.coefficients - nb.coefficients).cwiseAbs().maxCoeff());
    ChernConnection ch = chern_coefficients(d.fs, x, y);
    BerwaldConnection bw = berwald_coefficients(d.fs, x, y);
    torsion = std::max(torsion, ch.torsion_residual);
    chern_vs_berwald = std::max(
        chern_vs_berwald,
        (ch.coefficients.gamma - bw.coefficients.gamma).max_abs());
    landsberg = std::max(landsberg, landsberg_tensor(d.fs, x, y).max_abs());
    berwald_defect =
        std::max(berwald_defect, bw.h_compatibility_defect.max_abs());
  }
  d.residuals.push_back({"nonlinear_variant_gap", variant_gap, 1e-7});
  d.residuals.push_back({"chern_torsion", torsion, 1e-10});
  JsonValue c = JsonValue::object();
  c.set("nonlinear_variant_gap", JsonValue::number(variant_gap));
  c.set("chern_torsion", JsonValue::number(torsion));
  c.set("chern_vs_berwald", JsonValue::number(chern_vs_berwald));
  c.set("landsberg_norm", JsonValue::number(landsberg));
  c.set("berwald_compatibility_defect", JsonValue::number(berwald_defect));
  d.samples.set("connections", std::move(c));
}

void run_geodesic(Driver& d) {
  GeodesicResult g = integrate_geodesic(d.fs, d.cfg.geodesic.x,
                                        d.cfg.geodesic.y,
                                        d.cfg.geodesic.length, d.ode());
  d.residuals.push_back({"geodesic_f_drift", g.f_drift, 1e-7});
  JsonValue j = JsonValue::object();
  j.set("x_end", vector_json(g.x_end));
  j.set("v_end", vector_json(g.v_end));
  j.set("f_drift", JsonValue::number(g.f_drift));
  j.set("steps", JsonValue::integer(g.stats.steps));
  d.samples.set("geodesic", std::move(j));
}

void run_transport(Driver& d) {
  // Chern horizontal transport along the configured geodesic's base path and
  // along seeded curves; the invariant is F along the solve.
  GeodesicResult g = integrate_geodesic(d.fs, d.cfg.geodesic.x,
                                        d.cfg.geodesic.y,
                                        d.cfg.geodesic.length, d.ode());
  double drift = 0.0;
  Rng rng(d.cfg.numeric.seed + 2);
  std::vector<CurvePtr> curves =
      random_curves(d.fs, std::min(d.cfg.numeric.curve_count, 4),
                    d.cfg.numeric.seed + 2);
  curves.push_back(g.curve);
  int transports = 0;
  for (const CurvePtr& c : curves) {
    for (int k = 0; k < 4; ++k) {
      VectorXd y0 = rng.on_sphere(d.fs.dim());
      TransportResult t =
          horizontal_transport(d.fs, ConnectionKind::chern, *c, y0,
                               std::nullopt, d.ode());
      drift = std::max(drift, t.f_drift / std::max(t.f_start, 1e-12));
      ++transports;
    }
  }
  d.residuals.push_back({"transport_f_drift", drift, 1e-6});
  JsonValue j = JsonValue::object();
  j.set("relative_f_drift", JsonValue::number(drift));
  j.set("transports", JsonValue::integer(transports));
  d.samples.set("transport", std::move(j));
}

void run_average(Driver& d) {
  QuadratureScheme scheme =
      QuadratureScheme::for_dim(d.fs.dim(), d.cfg.numeric.quadrature_nodes);
  Rng rng(d.cfg.numeric.seed + 3);
  double quad_error = 0.0, torsion = 0.0, volume = 0.0;
  for (int p = 0; p < std::min(d.cfg.numeric.sample_points, 3); ++p) {
    VectorXd x = rng.in_box(d.fs.chart(), 0.1);
    AveragedConnection avg =
        averaged_connection(d.fs, x, ConnectionKind::chern, scheme);
    quad_error = std::max(quad_error, avg.quadrature_error);
    ConnectionCoefficients c{ConnectionKind::averaged_affine, x, std::nullopt,
                             avg.gamma};
    torsion = std::max(torsion, c.torsion_residual());
    volume = sample_indicatrix(d.fs, x, scheme).total_volume;
  }
  d.residuals.push_back({"averaged_torsion", torsion, 1e-10});
  d.residuals.push_back({"averaging_quadrature_error", quad_error, 1e-6});
  JsonValue j = JsonValue::object();
  j.set("quadrature_error", JsonValue::number(quad_error));
  j.set("averaged_torsion", JsonValue::number(torsion));
  j.set("last_indicatrix_volume", JsonValue::number(volume));
  d.samples.set("average", std::move(j));
}

void run_classify(Driver& d) {
  ClassificationReport rep = classify_structure(d.fs, d.classify_options());
  for (const auto& [name, entry] : rep.verdicts) d.verdicts[name] = entry;
  for (const ResidualEntry& r : rep.residuals) d.residuals.push_back(r);
  JsonValue j = JsonValue::object();
  j.set("metric_id", JsonValue::string(rep.metric_id));
  j.set("seed", JsonValue::integer(int64_t(rep.seed)));
  j.set("sample_points", JsonValue::integer(rep.sample_points));
  j.set("sample_dirs", JsonValue::integer(rep.sample_dirs));
  j.set("curve_count", JsonValue::integer(rep.curve_count));
  d.samples.set("classify", std::move(j));
}

void run_holonomy(Driver& d) {
  HolonomySample hs = holonomy_sample(
      d.fs, d.fs.chart().center(), d.cfg.numeric.loop_sizes,
      d.cfg.numeric.loop_count, d.cfg.numeric.quadrature_nodes, d.ode());
  HolonomyClassification hc = holonomy_classify(hs, d.cfg.numeric.tol);
  double residual = hc.cls == HolonomyClass::trivial ? hc.identity_residual
                    : hc.cls == HolonomyClass::metric_preserving
                        ? hc.form_fit_residual
                        : hc.det_residual;
  d.verdicts["holonomy_class"] = {to_string(hc.cls), residual,
                                  d.cfg.numeric.tol, int(hs.matrices.size())};
  d.residuals.push_back(
      {"holonomy_form_fit", hc.form_fit_residual, d.cfg.numeric.tol});
  d.residuals.push_back(
      {"holonomy_det_deviation", hc.det_residual, d.cfg.numeric.tol});
  JsonValue j = JsonValue::object();
  j.set("x", vector_json(hs.x));
  JsonValue dets = JsonValue::array();
  for (double det : hs.determinants) dets.push(JsonValue::number(det));
  j.set("determinants", std::move(dets));
  j.set("identity_residual", JsonValue::number(hc.identity_residual));
  j.set("form_fit_residual", JsonValue::number(hc.form_fit_residual));
  j.set("fitted_form", matrix_json(hc.fitted_form));
  j.set("note", JsonValue::string(hc.note));
  d.samples.set("holonomy", std::move(j));
}

}  // namespace

RunResult run_analysis(const Config& cfg_in, const RunOptions& opt) {
  Config cfg = cfg_in;
  if (opt.has_seed) {
    cfg.numeric.seed = opt.seed;
    cfg.raw["numeric.seed"] = std::to_string(opt.seed);
  }
  if (!opt.assert_verdict.empty()) {
    cfg.analysis.assert_verdict = opt.assert_verdict;
    cfg.raw["analysis.assert"] = opt.assert_verdict;
    if (!cfg.analysis.wants("classify")) cfg.analysis.run.push_back("classify");
  }
  if (!opt.force_run.empty()) {
    cfg.analysis.run = opt.force_run;
    std::string joined;
    for (const std::string& r : opt.force_run)
      joined += (joined.empty() ? "" : ",") + r;
    cfg.raw["analysis.run"] = joined;
  }
  if (!opt.out_path.empty()) cfg.output.report = opt.out_path;

  RunResult result;
  JsonValue report = JsonValue::object();
  report.set("schema_version", JsonValue::string("1"));
  report.set("config", config_json(cfg));

  JsonValue timings = JsonValue::object();
  std::map<std::string, VerdictEntry> verdicts;
  std::vector<ResidualEntry> residuals;
  JsonValue samples = JsonValue::object();
  JsonValue error = JsonValue::null();
  std::vector<std::vector<double>> csv_rows;

  try {
    FinslerStructure fs =
        MetricRegistry::instance().build(cfg.metric).with_chart(cfg.chart);
    ValidationResult val = validate_structure(fs, 128, cfg.numeric.seed);
    if (!val.ok) {
      std::ostringstream os;
      os << "structure validation failed: homogeneity residual "
         << val.homogeneity_residual << ", min F " << val.min_f;
      throw StrongConvexityViolation(os.str());
    }
    Driver d{cfg, fs, {}, {}, JsonValue::object(), {}};
    for (const std::string& name : known_analyses()) {
      if (!cfg.analysis.wants(name)) continue;
      auto t0 = std::chrono::steady_clock::now();
      if (name == "tensors") run_tensors(d);
      else if (name == "connections") run_connections(d);
      else if (name == "geodesic") run_geodesic(d);
      else if (name == "transport") run_transport(d);
      else if (name == "average") run_average(d);
      else if (name == "classify") run_classify(d);
      else if (name == "holonomy") run_holonomy(d);
      if (opt.timings) {
        double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
        timings.set(name, JsonValue::number(ms));
      }
    }
    verdicts = std::move(d.verdicts);
    residuals = std::move(d.residuals);
    samples = std::move(d.samples);
    csv_rows = std::move(d.csv_rows);
  } catch (const Error& e) {
    JsonValue err = JsonValue::object();
    err.set("type", JsonValue::string(error_name(e)));
    err.set("message", JsonValue::string(e.what()));
    error = std::move(err);
    result.exit_code = 1;
  }

  report.set("verdicts", verdicts_json(verdicts));
  report.set("residuals", residuals_json(residuals));
  report.set("samples", std::move(samples));
  report.set("timings", std::move(timings));
  if (error.kind != JsonValue::Kind::null)
    report.set("error", std::move(error));

  if (result.exit_code == 0 && !cfg.analysis.assert_verdict.empty()) {
    std::string key = cfg.analysis.assert_verdict == "berwald" ? "is_berwald"
                      : cfg.analysis.assert_verdict == "landsberg"
                          ? "is_landsberg"
                          : "rigidity_holds";
    auto it = verdicts.find(key);
    if (it == verdicts.end() || it->second.verdict != "yes")
      result.exit_code = 2;
  }

  result.report_text = report.dump();
  result.report = std::move(report);
  if (!cfg.output.report.empty())
    write_text_file(cfg.output.report, result.report_text);
  if (!cfg.output.csv.empty() && !csv_rows.empty()) {
    std::vector<std::string> header;
    const int n = cfg.metric.dimension;
    for (int i = 1; i <= n; ++i) header.push_back("x" + std::to_string(i));
    for (int i = 1; i <= n; ++i) header.push_back("y" + std::to_string(i));
    header.push_back("f");
    header.push_back("min_eigenvalue");
    header.push_back("cartan_norm");
    write_csv(cfg.output.csv, header, csv_rows);
  }
  return result;
}

RunResult run_analysis_file(const std::string& config_path,
                            const RunOptions& opt) {
  return run_analysis(load_config(config_path), opt);
}

}  // namespace finsler
