#include "nullkit/core.hpp"

#include <functional>

namespace nullkit {

Vec Christoffel::contract(const Vec& u, const Vec& v) const {
  Vec out = Vec::Zero(n_);
  for (int k = 0; k < n_; ++k) {
    double acc = 0.0;
    for (int i = 0; i < n_; ++i) {
      if (u[i] == 0.0) continue;
      for (int j = 0; j < n_; ++j) acc += (*this)(k, i, j) * u[i] * v[j];
    }
    out[k] = acc;
  }
  return out;
}

Christoffel& Christoffel::operator+=(const Christoffel& o) {
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

Christoffel& Christoffel::operator*=(double a) {
  for (double& d : data_) d *= a;
  return *this;
}

Vec Riemann::apply(const Vec& x, const Vec& y, const Vec& z) const {
  Vec out = Vec::Zero(n_);
  for (int a = 0; a < n_; ++a) {
    double acc = 0.0;
    for (int b = 0; b < n_; ++b) {
      if (z[b] == 0.0) continue;
      for (int c = 0; c < n_; ++c) {
        if (x[c] == 0.0) continue;
        for (int d = 0; d < n_; ++d) acc += (*this)(a, b, c, d) * z[b] * x[c] * y[d];
      }
    }
    out[a] = acc;
  }
  return out;
}

Mat Riemann::ricci() const {
  Mat ric = Mat::Zero(n_, n_);
  for (int b = 0; b < n_; ++b)
    for (int d = 0; d < n_; ++d) {
      double acc = 0.0;
      for (int a = 0; a < n_; ++a) acc += (*this)(a, b, a, d);
      ric(b, d) = acc;
    }
  return ric;
}

Christoffel christoffel_from_jet(const MetricJet& jet) {
  const int n = static_cast<int>(jet.g.rows());
  Eigen::FullPivLU<Mat> lu(jet.g);
  if (!lu.isInvertible()) throw DegenerateError("metric is not invertible at this point");
  const Mat ginv = lu.inverse();
  // first kind: [ij,l] = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
  Christoffel out(n);
  std::vector<double> first(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      for (int l = 0; l < n; ++l)
        first[l] = 0.5 * (jet.deriv[i](j, l) + jet.deriv[j](i, l) - jet.deriv[l](i, j));
      for (int k = 0; k < n; ++k) {
        double acc = 0.0;
        for (int l = 0; l < n; ++l) acc += ginv(k, l) * first[l];
        out(k, i, j) = acc;
        out(k, j, i) = acc;
      }
    }
  return out;
}

bool ChartBox::contains(const Vec& x) const {
  if (x.size() != lo.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lo[i] && x[i] <= hi[i])) return false;
  }
  return true;
}

Riemann constant_curvature_riemann(double k, const Mat& g) {
  const int n = static_cast<int>(g.rows());
  Riemann R(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          R(a, b, c, d) = k * ((a == c ? g(b, d) : 0.0) - (a == d ? g(b, c) : 0.0));
  return R;
}

Riemann riemann_from_christoffel(const std::function<Christoffel(const Vec&)>& gamma, const Vec& x) {
  const int n = static_cast<int>(x.size());
  const Christoffel G = gamma(x);
  // dG[c](a, b, d) = d_c Gamma^a_{bd}
  std::vector<Christoffel> dG;
  dG.reserve(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) {
    const double h = fd_step(x[c], 1e-3);
    Vec y = x;
    Christoffel acc(n);
    const double w[4] = {1.0, -8.0, 8.0, -1.0};
    const double off[4] = {-2.0, -1.0, 1.0, 2.0};
    for (int q = 0; q < 4; ++q) {
      y[c] = x[c] + off[q] * h;
      Christoffel s = gamma(y);
      s *= w[q] / (12.0 * h);
      acc += s;
    }
    dG.push_back(std::move(acc));
  }
  Riemann R(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          if (c == d) continue;
          double v = dG[static_cast<std::size_t>(c)](a, d, b) - dG[static_cast<std::size_t>(d)](a, c, b);
          for (int e = 0; e < n; ++e) v += G(a, c, e) * G(e, d, b) - G(a, d, e) * G(e, c, b);
          R(a, b, c, d) = v;
        }
  return R;
}

}  // namespace nullkit
