#include "finsler/jet.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

#include "finsler/errors.hpp"

namespace finsler {

namespace {

constexpr int kMaxVars = 8;
constexpr int kMaxOrder = 4;

using Expo = std::array<uint8_t, kMaxVars>;

uint32_t pack_key(const Expo& e) {
  // Base-5 packing; valid for exponents <= 4 and up to 8 variables.
  uint32_t k = 0;
  for (int i = kMaxVars - 1; i >= 0; --i) k = k * 5 + e[i];
  return k;
}

double factorial(int k) {
  static const double f[] = {1, 1, 2, 6, 24};
  return f[k];
}

}  // namespace

class JetTable {
 public:
  int nvars, order;
  std::vector<Expo> expo;
  std::vector<int> degree;
  std::vector<double> fact;  // alpha! per monomial
  std::unordered_map<uint32_t, int> index;
  struct MulEntry {
    int a, b, dst;
  };
  std::vector<MulEntry> mul;

  JetTable(int nv, int ord) : nvars(nv), order(ord) {
    enumerate();
    for (size_t i = 0; i < expo.size(); ++i) index[pack_key(expo[i])] = int(i);
    for (size_t i = 0; i < expo.size(); ++i) {
      double f = 1.0;
      for (int v = 0; v < nvars; ++v) f *= factorial(expo[i][v]);
      fact.push_back(f);
    }
    for (size_t a = 0; a < expo.size(); ++a)
      for (size_t b = 0; b < expo.size(); ++b) {
        if (degree[a] + degree[b] > order) continue;
        Expo sum{};
        for (int v = 0; v < nvars; ++v) sum[v] = expo[a][v] + expo[b][v];
        mul.push_back({int(a), int(b), index.at(pack_key(sum))});
      }
  }

  int lookup(const Expo& e) const {
    auto it = index.find(pack_key(e));
    return it == index.end() ? -1 : it->second;
  }

 private:
  void enumerate() {
    // Graded order: all monomials of total degree d, d = 0..order.
    for (int d = 0; d <= order; ++d) {
      Expo e{};
      gen(e, 0, d);
    }
  }
  void gen(Expo& e, int var, int remaining) {
    if (var == nvars) {
      if (remaining == 0) {
        expo.push_back(e);
        int d = 0;
        for (int v = 0; v < nvars; ++v) d += e[v];
        degree.push_back(d);
      }
      return;
    }
    for (int k = 0; k <= remaining; ++k) {
      e[var] = uint8_t(k);
      gen(e, var + 1, remaining - k);
    }
    e[var] = 0;
  }
};

namespace {

const JetTable& table_for(int nvars, int order) {
  if (nvars < 1 || nvars > kMaxVars || order < 0 || order > kMaxOrder)
    throw Error("jet space out of range (vars <= 8, order <= 4)");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<JetTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  int key = nvars * 16 + order;
  auto& slot = cache[key];
  if (!slot) slot = std::make_unique<JetTable>(nvars, order);
  return *slot;
}

}  // namespace

Jet Jet::constant(int nvars, int order, double value) {
  const JetTable& t = table_for(nvars, order);
  Jet j;
  j.tab_ = &t;
  j.c_.assign(t.expo.size(), 0.0);
  j.c_[0] = value;
  return j;
}

Jet Jet::variable(int nvars, int order, int var, double value) {
  if (var < 0 || var >= nvars) throw Error("jet variable index out of range");
  Jet j = constant(nvars, order, value);
  if (order >= 1) {
    Expo e{};
    e[var] = 1;
    j.c_[j.tab_->lookup(e)] = 1.0;
  }
  return j;
}

int Jet::nvars() const { return tab_ ? tab_->nvars : 0; }
int Jet::order() const { return tab_ ? tab_->order : 0; }

bool Jet::finite() const {
  for (double v : c_)
    if (!std::isfinite(v)) return false;
  return true;
}

double Jet::partial(std::span<const int> vars) const {
  Expo e{};
  for (int v : vars) {
    if (v < 0 || v >= nvars()) throw Error("derivative variable out of range");
    e[v]++;
  }
  int i = tab_->lookup(e);
  if (i < 0) throw Error("derivative order exceeds jet order");
  return c_[i] * tab_->fact[i];
}

double Jet::partial_exponents(std::span<const int> expo) const {
  Expo e{};
  for (size_t v = 0; v < expo.size(); ++v) e[v] = uint8_t(expo[v]);
  int i = tab_->lookup(e);
  if (i < 0) throw Error("derivative order exceeds jet order");
  return c_[i] * tab_->fact[i];
}

Jet Jet::derivative(std::span<const int> vars, int new_order) const {
  Expo kappa{};
  int k_deg = 0;
  for (int v : vars) {
    kappa[v]++;
    k_deg++;
  }
  if (new_order + k_deg > order())
    throw Error("derivative jet order exceeds source order");
  const JetTable& dst = table_for(nvars(), new_order);
  Jet r;
  r.tab_ = &dst;
  r.c_.assign(dst.expo.size(), 0.0);
  for (size_t b = 0; b < dst.expo.size(); ++b) {
    Expo src{};
    double scale = 1.0;
    for (int v = 0; v < nvars(); ++v) {
      src[v] = uint8_t(dst.expo[b][v] + kappa[v]);
      // (beta + kappa)! / beta! per variable
      for (int t = dst.expo[b][v] + 1; t <= src[v]; ++t) scale *= t;
    }
    int i = tab_->lookup(src);
    r.c_[b] = c_[i] * scale;
  }
  return r;
}

Jet Jet::truncate(int new_order) const {
  if (new_order == order()) return *this;
  if (new_order > order()) throw Error("cannot raise jet order");
  const JetTable& dst = table_for(nvars(), new_order);
  Jet r;
  r.tab_ = &dst;
  r.c_.assign(dst.expo.size(), 0.0);
  for (size_t b = 0; b < dst.expo.size(); ++b)
    r.c_[b] = c_[tab_->lookup(dst.expo[b])];
  return r;
}

Jet Jet::restrict_vars(std::span<const int> keep, int new_order) const {
  if (new_order > order()) throw Error("cannot raise jet order");
  const JetTable& dst = table_for(int(keep.size()), new_order);
  Jet r;
  r.tab_ = &dst;
  r.c_.assign(dst.expo.size(), 0.0);
  for (size_t b = 0; b < dst.expo.size(); ++b) {
    Expo src{};
    for (size_t v = 0; v < keep.size(); ++v) src[keep[v]] = dst.expo[b][v];
    r.c_[b] = c_[tab_->lookup(src)];
  }
  return r;
}

Jet Jet::operator-() const {
  Jet r = *this;
  for (double& v : r.c_) v = -v;
  return r;
}

static void require_same_space(const Jet& a, const Jet& b) {
  if (a.nvars() != b.nvars() || a.order() != b.order())
    throw Error("jet operands live in different spaces");
}

Jet& Jet::operator+=(const Jet& o) {
  require_same_space(*this, o);
  for (size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}
Jet& Jet::operator-=(const Jet& o) {
  require_same_space(*this, o);
  for (size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}
Jet& Jet::operator+=(double s) {
  c_[0] += s;
  return *this;
}
Jet& Jet::operator-=(double s) {
  c_[0] -= s;
  return *this;
}
Jet& Jet::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  require_same_space(a, b);
  Jet r;
  r.tab_ = a.tab_;
  r.c_.assign(a.c_.size(), 0.0);
  for (const auto& e : a.tab_->mul) r.c_[e.dst] += a.c_[e.a] * b.c_[e.b];
  return r;
}

Jet compose_series(const Jet& u, std::span<const double> series) {
  // Horner evaluation of sum_k series[k] * (u - u0)^k.
  Jet uhat = u;
  uhat.c_[0] = 0.0;
  int p = u.order();
  Jet r = Jet::constant(u.nvars(), p, series[p]);
  for (int k = p - 1; k >= 0; --k) {
    r = r * uhat;
    r += series[k];
  }
  return r;
}

static Jet reciprocal(const Jet& b) {
  double v = b.value();
  if (v == 0.0) throw NonSmoothPoint("division by zero during evaluation");
  std::vector<double> s(b.order() + 1);
  double p = 1.0 / v;
  for (int k = 0; k <= b.order(); ++k) {
    s[k] = p;
    p *= -1.0 / v;
  }
  return compose_series(b, s);
}

Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

Jet operator/(double s, const Jet& b) { return reciprocal(b) * s; }

Jet sqrt(const Jet& u) {
  double v = u.value();
  if (v <= 0.0)
    throw NonSmoothPoint("sqrt of a non-positive quantity during evaluation");
  std::vector<double> s(u.order() + 1);
  double root = std::sqrt(v);
  // binom(1/2, k) * v^(1/2 - k)
  double c = root;
  for (int k = 0; k <= u.order(); ++k) {
    s[k] = c;
    c *= (0.5 - k) / double(k + 1) / v;
  }
  return compose_series(u, s);
}

Jet exp(const Jet& u) {
  std::vector<double> s(u.order() + 1);
  double e = std::exp(u.value());
  for (int k = 0; k <= u.order(); ++k) s[k] = e / factorial(k);
  return compose_series(u, s);
}

Jet log(const Jet& u) {
  double v = u.value();
  if (v <= 0.0)
    throw NonSmoothPoint("log of a non-positive quantity during evaluation");
  std::vector<double> s(u.order() + 1);
  s[0] = std::log(v);
  double p = 1.0 / v;
  for (int k = 1; k <= u.order(); ++k) {
    s[k] = (k % 2 == 1 ? 1.0 : -1.0) * p / k;
    p /= v;
  }
  return compose_series(u, s);
}

Jet sin(const Jet& u) {
  std::vector<double> s(u.order() + 1);
  double sv = std::sin(u.value()), cv = std::cos(u.value());
  const double cycle[4] = {sv, cv, -sv, -cv};
  for (int k = 0; k <= u.order(); ++k) s[k] = cycle[k % 4] / factorial(k);
  return compose_series(u, s);
}

Jet cos(const Jet& u) {
  std::vector<double> s(u.order() + 1);
  double sv = std::sin(u.value()), cv = std::cos(u.value());
  const double cycle[4] = {cv, -sv, -cv, sv};
  for (int k = 0; k <= u.order(); ++k) s[k] = cycle[k % 4] / factorial(k);
  return compose_series(u, s);
}

Jet pow_int(const Jet& u, int e) {
  if (e < 0) throw Error("negative integer exponent: use division");
  Jet r = Jet::constant(u.nvars(), u.order(), 1.0);
  Jet base = u;
  int k = e;
  while (k > 0) {
    if (k & 1) r = r * base;
    k >>= 1;
    if (k) base = base * base;
  }
  return r;
}

std::vector<std::vector<Jet>> jet_matrix_inverse(
    std::vector<std::vector<Jet>> m) {
  const int n = int(m.size());
  std::vector<std::vector<Jet>> inv(n, std::vector<Jet>(n));
  const int nv = m[0][0].nvars();
  const int ord = m[0][0].order();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      inv[i][j] = Jet::constant(nv, ord, i == j ? 1.0 : 0.0);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m[r][col].value()) > std::abs(m[piv][col].value())) piv = r;
    if (m[piv][col].value() == 0.0)
      throw StrongConvexityViolation("singular matrix in jet inversion");
    std::swap(m[piv], m[col]);
    std::swap(inv[piv], inv[col]);
    Jet inv_piv = 1.0 / m[col][col];
    for (int j = 0; j < n; ++j) {
      m[col][j] = m[col][j] * inv_piv;
      inv[col][j] = inv[col][j] * inv_piv;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      Jet f = m[r][col];
      for (int j = 0; j < n; ++j) {
        m[r][j] -= f * m[col][j];
        inv[r][j] -= f * inv[col][j];
      }
    }
  }
  return inv;
}

}  // namespace finsler
