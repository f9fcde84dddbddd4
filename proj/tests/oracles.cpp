#include "oracles.hpp"

#include <cmath>

namespace ts {

using finsler::Tensor3;

FinslerStructure euclidean2() {
  return FinslerStructure::euclidean(2).with_chart(ChartBox::cube(2, -2, 2));
}

FinslerStructure euclidean3() {
  return FinslerStructure::euclidean(3).with_chart(ChartBox::cube(3, -2, 2));
}

FinslerStructure hyperbolic_half_plane() {
  ChartBox box;
  box.lo = VectorXd(2);
  box.hi = VectorXd(2);
  box.lo << -2.0, 0.3;
  box.hi << 2.0, 3.0;
  return FinslerStructure::riemannian(2, {"1/(x2^2)", "0", "0", "1/(x2^2)"})
      .with_chart(box);
}

FinslerStructure sphere_patch() {
  ChartBox box;
  box.lo = VectorXd(2);
  box.hi = VectorXd(2);
  box.lo << 0.4, -3.0;
  box.hi << 2.7, 3.0;
  return FinslerStructure::riemannian(2, {"1", "0", "0", "sin(x1)^2"})
      .with_chart(box);
}

FinslerStructure berwald_randers() {
  return FinslerStructure::randers(2, {"1", "0", "0", "1"}, {"0.5", "0"})
      .with_chart(ChartBox::cube(2, -2, 2));
}

FinslerStructure nonberwald_randers() {
  return FinslerStructure::randers(2, {"1", "0", "0", "1"}, {"0.3*x2", "0"})
      .with_chart(ChartBox::cube(2, -2, 2));
}

std::vector<FinslerStructure> all_fixtures() {
  return {euclidean2(), hyperbolic_half_plane(), berwald_randers(),
          nonberwald_randers()};
}

std::vector<FinslerStructure> berwald_fixtures() {
  return {euclidean2(), hyperbolic_half_plane(), berwald_randers()};
}

namespace {

double central(const std::function<double(const VectorXd&)>& f,
               const VectorXd& z, int var, double h) {
  VectorXd zp = z, zm = z;
  zp[var] += h;
  zm[var] -= h;
  return (f(zp) - f(zm)) / (2.0 * h);
}

double richardson(const std::function<double(const VectorXd&)>& f,
                  const VectorXd& z, int var, double h) {
  double coarse = central(f, z, var, h);
  double fine = central(f, z, var, h / 2.0);
  return (4.0 * fine - coarse) / 3.0;
}

}  // namespace

double fd_partial(const std::function<double(const VectorXd&)>& f,
                  const VectorXd& z, const std::vector<int>& orders,
                  double step) {
  int var = -1;
  for (size_t k = 0; k < orders.size(); ++k)
    if (orders[k] > 0) {
      var = int(k);
      break;
    }
  if (var < 0) return f(z);
  std::vector<int> rest = orders;
  rest[size_t(var)] -= 1;
  auto inner = [&](const VectorXd& p) { return fd_partial(f, p, rest, step); };
  return richardson(inner, z, var, step);
}

double fd_norm_partial(const FinslerStructure& fs, const VectorXd& x,
                       const VectorXd& y, const std::vector<int>& orders,
                       double step) {
  const int n = fs.dim();
  VectorXd z(2 * n);
  z.head(n) = x;
  z.tail(n) = y;
  auto f = [&fs, n](const VectorXd& p) {
    return fs.norm(p.head(n), p.tail(n));
  };
  return fd_partial(f, z, orders, step);
}

VectorXd rk4(const Rhs& f, double t0, double t1, VectorXd state, int steps) {
  const double h = (t1 - t0) / steps;
  VectorXd k1(state.size()), k2(state.size()), k3(state.size()),
      k4(state.size());
  double t = t0;
  for (int s = 0; s < steps; ++s) {
    f(t, state, k1);
    f(t + h / 2, state + (h / 2) * k1, k2);
    f(t + h / 2, state + (h / 2) * k2, k3);
    f(t + h, state + h * k3, k4);
    state += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
  }
  return state;
}

Tensor3 hyperbolic_symbols(const VectorXd& x) {
  Tensor3 g(2);
  const double inv = 1.0 / x[1];
  g(0, 0, 1) = -inv;
  g(0, 1, 0) = -inv;
  g(1, 0, 0) = inv;
  g(1, 1, 1) = -inv;
  return g;
}

finsler::MetricField hyperbolic_field() {
  return [](const VectorXd& x) {
    MatrixXd h = MatrixXd::Zero(2, 2);
    h(0, 0) = h(1, 1) = 1.0 / (x[1] * x[1]);
    return h;
  };
}

finsler::MetricField sphere_field() {
  return [](const VectorXd& x) {
    MatrixXd h = MatrixXd::Zero(2, 2);
    h(0, 0) = 1.0;
    h(1, 1) = std::sin(x[0]) * std::sin(x[0]);
    return h;
  };
}

}  // namespace ts
