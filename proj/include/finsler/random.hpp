#pragma once

#include <cstdint>
#include <random>

#include "finsler/types.hpp"

namespace finsler {

// Seeded sampler built on mt19937_64 with explicit output mapping, so streams
// are reproducible independent of standard-library distribution internals.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Marsaglia polar method on the explicit uniform stream.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  VectorXd in_box(const ChartBox& box, double margin_frac = 0.0) {
    ChartBox b = margin_frac > 0.0 ? box.shrunk(margin_frac) : box;
    VectorXd x(b.dim());
    for (int i = 0; i < b.dim(); ++i) x[i] = uniform(b.lo[i], b.hi[i]);
    return x;
  }

  VectorXd on_sphere(int n) {
    VectorXd y(n);
    double norm2;
    do {
      for (int i = 0; i < n; ++i) y[i] = normal();
      norm2 = y.squaredNorm();
    } while (norm2 < 1e-12);
    return y / std::sqrt(norm2);
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace finsler
