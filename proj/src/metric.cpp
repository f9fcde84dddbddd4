#include "finsler/metric.hpp"

#include <cmath>
#include <sstream>

#include "finsler/errors.hpp"
#include "finsler/random.hpp"

namespace finsler {

namespace {

ChartBox default_chart(int n) { return ChartBox::cube(n, -1e6, 1e6); }

std::string wrap(const std::string& e) { return "(" + e + ")"; }

void reject_fiber_entries(const std::vector<std::string>& entries, int n,
                          const char* what) {
  for (const auto& e : entries) {
    MetricExpression m = parse_metric(e, n);
    if (m.references_fiber())
      throw Error(std::string(what) + " entry '" + e +
                  "' must not reference fiber coordinates");
  }
}

std::string quadratic_form_source(int n, const std::vector<std::string>& g) {
  // sum_ij g_ij * yi * yj, row-major entries.
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (!first) os << " + ";
      first = false;
      os << wrap(g[i * n + j]) << "*y" << (i + 1) << "*y" << (j + 1);
    }
  return os.str();
}

}  // namespace

FinslerStructure FinslerStructure::euclidean(int n) {
  std::ostringstream os;
  os << "sqrt(";
  for (int i = 0; i < n; ++i) {
    if (i) os << " + ";
    os << "y" << (i + 1) << "^2";
  }
  os << ")";
  FinslerStructure fs;
  fs.expr_ = parse_metric(os.str(), n);
  fs.family_ = "euclidean";
  fs.chart_ = default_chart(n);
  return fs;
}

FinslerStructure FinslerStructure::riemannian(
    int n, const std::vector<std::string>& entries) {
  if (int(entries.size()) != n * n)
    throw DimensionMismatch("riemannian family expects n*n entries");
  reject_fiber_entries(entries, n, "riemannian metric");
  FinslerStructure fs;
  fs.expr_ = parse_metric("sqrt(" + quadratic_form_source(n, entries) + ")", n);
  fs.family_ = "riemannian";
  fs.chart_ = default_chart(n);
  return fs;
}

FinslerStructure FinslerStructure::randers(
    int n, const std::vector<std::string>& alpha,
    const std::vector<std::string>& beta) {
  if (int(alpha.size()) != n * n || int(beta.size()) != n)
    throw DimensionMismatch("randers family expects n*n alpha and n beta entries");
  reject_fiber_entries(alpha, n, "randers alpha");
  reject_fiber_entries(beta, n, "randers beta");
  std::ostringstream os;
  os << "sqrt(" << quadratic_form_source(n, alpha) << ")";
  for (int i = 0; i < n; ++i)
    os << " + " << wrap(beta[i]) << "*y" << (i + 1);
  FinslerStructure fs;
  fs.expr_ = parse_metric(os.str(), n);
  fs.family_ = "randers";
  fs.chart_ = default_chart(n);
  return fs;
}

FinslerStructure FinslerStructure::custom(const std::string& expression,
                                          int n) {
  FinslerStructure fs;
  fs.expr_ = parse_metric(expression, n);
  fs.family_ = "custom";
  fs.chart_ = default_chart(n);
  return fs;
}

namespace {

MatrixXd metric_matrix(const Jet& L, int n) {
  MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double v = 0.5 * L.partial({n + i, n + j});
      g(i, j) = v;
      g(j, i) = v;
    }
  return g;
}

}  // namespace

FundamentalTensor fundamental_tensor(const FinslerStructure& fs,
                                     const VectorXd& x, const VectorXd& y) {
  const int n = fs.dim();
  if (y.norm() == 0.0)
    throw DegenerateDirection("fundamental tensor requested at y = 0");
  Jet F = fs.eval(x, y, 2);
  Jet L = F * F;
  FundamentalTensor t;
  t.x = x;
  t.y = y;
  t.g = metric_matrix(L, n);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(t.g);
  t.min_eigenvalue = es.eigenvalues().minCoeff();
  if (t.min_eigenvalue <= kConvexityEps) {
    std::ostringstream os;
    os << "fundamental tensor degenerate (min eigenvalue " << t.min_eigenvalue
       << ") at direction [" << y.transpose() << "]";
    throw StrongConvexityViolation(os.str());
  }
  t.g_inv = t.g.partialPivLu().inverse();
  return t;
}

CartanTensor cartan_tensor(const FinslerStructure& fs, const VectorXd& x,
                           const VectorXd& y) {
  const int n = fs.dim();
  FundamentalTensor ft = fundamental_tensor(fs, x, y);
  Jet F = fs.eval(x, y, 3);
  Jet L = F * F;
  double Fv = F.value();
  CartanTensor c;
  c.x = x;
  c.y = y;
  c.lowered = Tensor3(n);
  c.raised = Tensor3(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        c.lowered(i, j, k) =
            0.25 * Fv * L.partial({n + i, n + j, n + k});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) s += ft.g_inv(i, l) * c.lowered(l, j, k);
        c.raised(i, j, k) = s;
      }
  return c;
}

namespace {

// Uniform sweep of the coordinate unit sphere: equal angles in 2D, a Fibonacci
// lattice in 3D.
std::vector<VectorXd> sphere_sweep(int n, int samples) {
  std::vector<VectorXd> dirs;
  dirs.reserve(samples);
  if (n == 2) {
    for (int k = 0; k < samples; ++k) {
      double th = 2.0 * M_PI * k / samples;
      VectorXd y(2);
      y << std::cos(th), std::sin(th);
      dirs.push_back(y);
    }
  } else if (n == 3) {
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    for (int k = 0; k < samples; ++k) {
      double z = 1.0 - 2.0 * (k + 0.5) / samples;
      double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      double phi = 2.0 * M_PI * k / golden;
      VectorXd y(3);
      y << r * std::cos(phi), r * std::sin(phi), z;
      dirs.push_back(y);
    }
  } else {
    Rng rng(7);
    for (int k = 0; k < samples; ++k) dirs.push_back(rng.on_sphere(n));
  }
  return dirs;
}

}  // namespace

ConvexityScan convexity_scan(const FinslerStructure& fs, const VectorXd& x,
                             int samples) {
  const int n = fs.dim();
  ConvexityScan scan;
  scan.samples = samples;
  scan.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (const VectorXd& y : sphere_sweep(n, samples)) {
    double f = fs.norm(x, y);
    if (f <= 0.0) {
      std::ostringstream os;
      os << "F non-positive (" << f << ") at direction [" << y.transpose()
         << "]";
      throw StrongConvexityViolation(os.str());
    }
    Jet F = fs.eval(x, y, 2);
    Jet L = F * F;
    MatrixXd g = metric_matrix(L, n);
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(g);
    double mineig = es.eigenvalues().minCoeff();
    if (mineig < scan.min_eigenvalue) {
      scan.min_eigenvalue = mineig;
      scan.worst_direction = y;
    }
  }
  if (scan.min_eigenvalue <= kConvexityEps) {
    std::ostringstream os;
    os << "fundamental tensor degenerate (min eigenvalue "
       << scan.min_eigenvalue << ") at direction ["
       << scan.worst_direction.transpose() << "]";
    throw StrongConvexityViolation(os.str());
  }
  return scan;
}

ValidationResult validate_structure(const FinslerStructure& fs, int samples,
                                    uint64_t seed) {
  HomogeneityCheck h =
      check_homogeneity(fs.expression(), samples, 1e-9, fs.chart(), seed);
  Rng rng(seed + 1);
  double min_f = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    VectorXd x = rng.in_box(fs.chart());
    VectorXd y = rng.on_sphere(fs.dim());
    min_f = std::min(min_f, fs.norm(x, y));
  }
  return {h.ok && min_f > 0.0, h.max_residual, min_f, samples};
}

}  // namespace finsler
