#pragma once

#include <initializer_list>
#include <span>
#include <vector>

namespace finsler {

class JetTable;

// Truncated multivariate Taylor arithmetic. A Jet carries the value of an
// intermediate quantity together with all of its partial derivatives up to a
// fixed total order (<= 4) in a fixed set of variables. Arithmetic and the
// supported elementary functions propagate derivatives exactly; no step-size
// truncation error enters anywhere.
//
// Coefficients are stored per multi-index in Taylor normalization
// (c_alpha = d^alpha f / alpha!), so index-permutation symmetry of mixed
// partials holds by construction.
class Jet {
 public:
  Jet() = default;

  static Jet constant(int nvars, int order, double value);
  static Jet variable(int nvars, int order, int var, double value);

  int nvars() const;
  int order() const;
  double value() const { return c_[0]; }
  bool finite() const;

  // Partial derivative by differentiation-variable list, e.g. {0, 0, 3} for
  // d^3 f / dv0^2 dv3. The list may be in any order.
  double partial(std::span<const int> vars) const;
  double partial(std::initializer_list<int> vars) const {
    return partial(std::span<const int>(vars.begin(), vars.size()));
  }
  // Partial derivative by exponent vector (one entry per variable).
  double partial_exponents(std::span<const int> expo) const;

  // Jet of the derivative d^kappa f in the same variable space, truncated at
  // new_order (requires new_order + |kappa| <= order()).
  Jet derivative(std::span<const int> vars, int new_order) const;
  Jet derivative(std::initializer_list<int> vars, int new_order) const {
    return derivative(std::span<const int>(vars.begin(), vars.size()),
                      new_order);
  }

  Jet truncate(int new_order) const;

  // Jet in the variables listed in `keep` only, all others held fixed.
  Jet restrict_vars(std::span<const int> keep, int new_order) const;

  Jet operator-() const;
  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator+=(double s);
  Jet& operator-=(double s);
  Jet& operator*=(double s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a -= s; }
  friend Jet operator-(double s, const Jet& a) { return -a + s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);
  friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }
  friend Jet operator/(double s, const Jet& b);

  friend Jet sqrt(const Jet& u);
  friend Jet sin(const Jet& u);
  friend Jet cos(const Jet& u);
  friend Jet exp(const Jet& u);
  friend Jet log(const Jet& u);
  friend Jet pow_int(const Jet& u, int e);

  // Composition with a scalar function given its Taylor coefficients
  // series[k] = f^(k)(value()) / k! for k = 0..order().
  friend Jet compose_series(const Jet& u, std::span<const double> series);

 private:
  const JetTable* tab_ = nullptr;
  std::vector<double> c_;
  friend class JetTable;
};

// Inverse of an n x n matrix with Jet entries (Gauss-Jordan over the jet
// ring). Requires the value-part matrix to be invertible.
std::vector<std::vector<Jet>> jet_matrix_inverse(
    std::vector<std::vector<Jet>> m);

}  // namespace finsler
