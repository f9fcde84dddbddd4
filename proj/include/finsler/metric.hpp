#pragma once

#include <memory>
#include <string>
#include <vector>

#include "finsler/expr.hpp"
#include "finsler/types.hpp"

namespace finsler {

// Positive convexity threshold: the fundamental tensor counts as degenerate
// when an eigenvalue falls at or below this value.
inline constexpr double kConvexityEps = 1e-10;

// A Finsler structure on a coordinate chart: a positive, 1-homogeneous,
// strongly convex norm F(x, y) on the fibers, given by an expression in the
// base coordinates x1..xn and fiber coordinates y1..yn. Built-in families
// synthesize their expression, so every structure evaluates through the same
// pipeline.
class FinslerStructure {
 public:
  static FinslerStructure euclidean(int n);
  // entries: row-major n*n expressions in x only; must be symmetric.
  static FinslerStructure riemannian(int n,
                                     const std::vector<std::string>& entries);
  // alpha: row-major n*n Riemannian entries; beta: n covector entries (x only).
  static FinslerStructure randers(int n,
                                  const std::vector<std::string>& alpha,
                                  const std::vector<std::string>& beta);
  static FinslerStructure custom(const std::string& expression, int n);

  int dim() const { return expr_.dimension(); }
  const MetricExpression& expression() const { return expr_; }
  const std::string& family() const { return family_; }

  const ChartBox& chart() const { return chart_; }
  FinslerStructure& with_chart(ChartBox box) {
    chart_ = std::move(box);
    return *this;
  }

  Jet eval(const VectorXd& x, const VectorXd& y, int order) const {
    return expr_.eval(x, y, order);
  }
  double norm(const VectorXd& x, const VectorXd& y) const {
    return expr_.value(x, y);
  }

 private:
  MetricExpression expr_;
  std::string family_;
  ChartBox chart_;
};

struct FundamentalTensor {
  VectorXd x, y;
  MatrixXd g;
  MatrixXd g_inv;
  double min_eigenvalue;
};

// g_ij = 1/2 d^2(F^2)/dy_i dy_j at (x, y), with inverse by dense solve.
// Throws StrongConvexityViolation when an eigenvalue falls below the
// convexity threshold and NonSmoothPoint off the smooth locus.
FundamentalTensor fundamental_tensor(const FinslerStructure& fs,
                                     const VectorXd& x, const VectorXd& y);

struct CartanTensor {
  VectorXd x, y;
  Tensor3 lowered;  // A_ijk = (F/2) dg_ij/dy_k, totally symmetric
  Tensor3 raised;   // A^i_jk = g^il A_ljk
};

CartanTensor cartan_tensor(const FinslerStructure& fs, const VectorXd& x,
                           const VectorXd& y);

struct ConvexityScan {
  double min_eigenvalue;
  VectorXd worst_direction;
  int samples;
};

// Sweeps fiber directions uniformly on the coordinate unit sphere and reports
// the smallest fundamental-tensor eigenvalue. Throws StrongConvexityViolation
// (with the offending direction in the message) if any sampled direction is
// degenerate or F is non-positive there.
ConvexityScan convexity_scan(const FinslerStructure& fs, const VectorXd& x,
                             int samples);

struct ValidationResult {
  bool ok;
  double homogeneity_residual;
  double min_f;  // smallest sampled F value
  int samples;
};

// Spot-checks positivity and 1-homogeneity of F over the chart box.
ValidationResult validate_structure(const FinslerStructure& fs, int samples,
                                    uint64_t seed = 42);

}  // namespace finsler
