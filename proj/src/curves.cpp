#include "finsler/curves.hpp"

#include <algorithm>
#include <cmath>

#include "finsler/errors.hpp"

namespace finsler {

namespace {

class Polyline : public Curve {
 public:
  explicit Polyline(std::vector<VectorXd> w) : w_(std::move(w)) {
    if (w_.size() < 2) throw Error("polyline needs at least two waypoints");
  }
  int dim() const override { return int(w_[0].size()); }
  double t_end() const override { return 1.0; }
  void eval(double t, VectorXd& x, VectorXd& v) const override {
    const int m = int(w_.size()) - 1;
    double u = std::clamp(t, 0.0, 1.0) * m;
    int seg = std::min(int(u), m - 1);
    double s = u - seg;
    x = w_[seg] + s * (w_[seg + 1] - w_[seg]);
    v = double(m) * (w_[seg + 1] - w_[seg]);
  }
  std::vector<double> breakpoints() const override {
    std::vector<double> b;
    const int m = int(w_.size()) - 1;
    for (int i = 1; i < m; ++i) b.push_back(double(i) / m);
    return b;
  }

 private:
  std::vector<VectorXd> w_;
};

class CatmullRom : public Curve {
 public:
  explicit CatmullRom(std::vector<VectorXd> w) : w_(std::move(w)) {
    if (w_.size() < 2) throw Error("cubic curve needs at least two waypoints");
    const int m = int(w_.size());
    tan_.resize(m);
    for (int i = 0; i < m; ++i) {
      if (i == 0)
        tan_[i] = w_[1] - w_[0];
      else if (i == m - 1)
        tan_[i] = w_[m - 1] - w_[m - 2];
      else
        tan_[i] = 0.5 * (w_[i + 1] - w_[i - 1]);
    }
  }
  int dim() const override { return int(w_[0].size()); }
  double t_end() const override { return 1.0; }
  void eval(double t, VectorXd& x, VectorXd& v) const override {
    const int m = int(w_.size()) - 1;
    double u = std::clamp(t, 0.0, 1.0) * m;
    int seg = std::min(int(u), m - 1);
    double s = u - seg;
    hermite(w_[seg], tan_[seg], w_[seg + 1], tan_[seg + 1], s, x, v);
    v *= double(m);
  }

 private:
  static void hermite(const VectorXd& p0, const VectorXd& m0,
                      const VectorXd& p1, const VectorXd& m1, double s,
                      VectorXd& x, VectorXd& v) {
    double s2 = s * s, s3 = s2 * s;
    x = (2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * m0 +
        (-2 * s3 + 3 * s2) * p1 + (s3 - s2) * m1;
    v = (6 * s2 - 6 * s) * p0 + (3 * s2 - 4 * s + 1) * m0 +
        (-6 * s2 + 6 * s) * p1 + (3 * s2 - 2 * s) * m1;
  }
  std::vector<VectorXd> w_;
  std::vector<VectorXd> tan_;
};

class Sampled : public Curve {
 public:
  Sampled(std::vector<double> t, std::vector<VectorXd> x,
          std::vector<VectorXd> v)
      : t_(std::move(t)), x_(std::move(x)), v_(std::move(v)) {
    if (t_.size() < 2 || t_.size() != x_.size() || t_.size() != v_.size())
      throw Error("sampled curve needs matching sample arrays");
  }
  int dim() const override { return int(x_[0].size()); }
  double t_end() const override { return t_.back(); }
  void eval(double t, VectorXd& x, VectorXd& v) const override {
    t = std::clamp(t, t_.front(), t_.back());
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    int seg = std::clamp(int(it - t_.begin()) - 1, 0, int(t_.size()) - 2);
    double h = t_[seg + 1] - t_[seg];
    double s = (t - t_[seg]) / h;
    double s2 = s * s, s3 = s2 * s;
    x = (2 * s3 - 3 * s2 + 1) * x_[seg] + h * (s3 - 2 * s2 + s) * v_[seg] +
        (-2 * s3 + 3 * s2) * x_[seg + 1] + h * (s3 - s2) * v_[seg + 1];
    v = ((6 * s2 - 6 * s) * x_[seg] + h * (3 * s2 - 4 * s + 1) * v_[seg] +
         (-6 * s2 + 6 * s) * x_[seg + 1] + h * (3 * s2 - 2 * s) * v_[seg + 1]) /
        h;
  }

 private:
  std::vector<double> t_;
  std::vector<VectorXd> x_;
  std::vector<VectorXd> v_;
};

class Reversed : public Curve {
 public:
  explicit Reversed(CurvePtr c) : c_(std::move(c)) {}
  int dim() const override { return c_->dim(); }
  double t_end() const override { return c_->t_end(); }
  void eval(double t, VectorXd& x, VectorXd& v) const override {
    c_->eval(c_->t_end() - t, x, v);
    v = -v;
  }
  std::vector<double> breakpoints() const override {
    std::vector<double> b = c_->breakpoints();
    for (double& t : b) t = c_->t_end() - t;
    std::sort(b.begin(), b.end());
    return b;
  }

 private:
  CurvePtr c_;
};

}  // namespace

CurvePtr polyline_curve(const std::vector<VectorXd>& waypoints) {
  return std::make_shared<Polyline>(waypoints);
}

CurvePtr cubic_curve(const std::vector<VectorXd>& waypoints) {
  return std::make_shared<CatmullRom>(waypoints);
}

CurvePtr rectangle_loop(const VectorXd& corner, double a, double b, int axis_i,
                        int axis_j) {
  VectorXd ea = VectorXd::Zero(corner.size());
  VectorXd eb = VectorXd::Zero(corner.size());
  ea[axis_i] = a;
  eb[axis_j] = b;
  std::vector<VectorXd> w = {corner, corner + ea, corner + ea + eb,
                             corner + eb, corner};
  return polyline_curve(w);
}

CurvePtr sampled_curve(std::vector<double> t, std::vector<VectorXd> x,
                       std::vector<VectorXd> v) {
  return std::make_shared<Sampled>(std::move(t), std::move(x), std::move(v));
}

CurvePtr reversed(CurvePtr c) { return std::make_shared<Reversed>(std::move(c)); }

}  // namespace finsler
