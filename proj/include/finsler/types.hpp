#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "finsler/errors.hpp"

namespace finsler {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Dense rank-3 array of coefficients, e.g. connection coefficients G(i,j,k)
// with the upper index first.
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int n) : n_(n), d_(static_cast<size_t>(n) * n * n, 0.0) {}

  int dim() const { return n_; }
  double& operator()(int i, int j, int k) { return d_[idx(i, j, k)]; }
  double operator()(int i, int j, int k) const { return d_[idx(i, j, k)]; }

  double max_abs() const {
    double m = 0.0;
    for (double v : d_) m = std::max(m, std::abs(v));
    return m;
  }

  Tensor3& operator+=(const Tensor3& o) {
    require_same(o);
    for (size_t i = 0; i < d_.size(); ++i) d_[i] += o.d_[i];
    return *this;
  }
  Tensor3& operator-=(const Tensor3& o) {
    require_same(o);
    for (size_t i = 0; i < d_.size(); ++i) d_[i] -= o.d_[i];
    return *this;
  }
  Tensor3& operator*=(double s) {
    for (double& v : d_) v *= s;
    return *this;
  }
  friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
  friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
  friend Tensor3 operator*(Tensor3 a, double s) { return a *= s; }

  const std::vector<double>& data() const { return d_; }

 private:
  size_t idx(int i, int j, int k) const {
    return (static_cast<size_t>(i) * n_ + j) * n_ + k;
  }
  void require_same(const Tensor3& o) const {
    if (n_ != o.n_) throw DimensionMismatch("tensor dimensions differ");
  }
  int n_ = 0;
  std::vector<double> d_;
};

// Axis-aligned validity box for the base coordinates of a structure.
struct ChartBox {
  VectorXd lo, hi;

  static ChartBox cube(int n, double lo_v, double hi_v) {
    ChartBox b;
    b.lo = VectorXd::Constant(n, lo_v);
    b.hi = VectorXd::Constant(n, hi_v);
    return b;
  }

  int dim() const { return static_cast<int>(lo.size()); }

  bool contains(const VectorXd& x) const {
    for (int i = 0; i < x.size(); ++i)
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    return true;
  }

  VectorXd center() const { return 0.5 * (lo + hi); }

  // Box shrunk toward its center by the given fraction per side.
  ChartBox shrunk(double margin_frac) const {
    ChartBox b;
    VectorXd half = 0.5 * (hi - lo) * (1.0 - margin_frac);
    b.lo = center() - half;
    b.hi = center() + half;
    return b;
  }
};

}  // namespace finsler
