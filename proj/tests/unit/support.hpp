#pragma once

#include "nullkit/core.hpp"

#include <cmath>
#include <random>

namespace testing {

using nullkit::Mat;
using nullkit::Vec;

inline std::mt19937_64& rng() {
  static std::mt19937_64 gen(20240611ULL);
  return gen;
}

inline double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }

inline Vec random_vec(int n, double a = -1.0, double b = 1.0) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = uniform(a, b);
  return v;
}

/// Levi-Civita symbols by plain central differences of a metric callable.
template <class G>
double christoffel_oracle(const G& metric, const Vec& x, int k, int i, int j) {
  const int n = static_cast<int>(x.size());
  const double h = 1e-6;
  auto d = [&](int l) {
    Vec p = x, m = x;
    p[l] += h;
    m[l] -= h;
    return Mat((metric(p) - metric(m)) / (2 * h));
  };
  const Mat ginv = metric(x).inverse();
  double acc = 0.0;
  for (int l = 0; l < n; ++l) acc += 0.5 * ginv(k, l) * (d(i)(j, l) + d(j)(i, l) - d(l)(i, j));
  return acc;
}

}  // namespace testing
