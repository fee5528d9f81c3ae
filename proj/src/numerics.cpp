#include "nullkit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace nullkit::num {

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.0};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<double(double)>& fn, double a, double b, int& evals) {
  const double c = 0.5 * (a + b);
  const double hl = 0.5 * (b - a);
  const double fc = fn(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = hl * kXgk[j];
    const double f1 = fn(c - dx);
    const double f2 = fn(c + dx);
    kron += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  evals += 15;
  return {a, b, kron * hl, std::abs((kron - gauss) * hl)};
}

QuadResult integrate_finite(const std::function<double(double)>& fn, double a, double b,
                            const QuadOptions& opts) {
  QuadResult res;
  if (a == b) {
    res.converged = true;
    return res;
  }
  std::priority_queue<Segment> heap;
  heap.push(gk15(fn, a, b, res.evaluations));
  double total = heap.top().value;
  double err = heap.top().error;
  int intervals = 1;
  while (err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total)) &&
         intervals < opts.max_intervals) {
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= std::min(worst.a, worst.b) || mid >= std::max(worst.a, worst.b)) {
      heap.push(worst);
      break;
    }
    Segment left = gk15(fn, worst.a, mid, res.evaluations);
    Segment right = gk15(fn, mid, worst.b, res.evaluations);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // re-sum to shed accumulated cancellation
  total = 0.0;
  err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  res.value = total;
  res.error = err;
  res.converged = err <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total)) * 1.0000001;
  return res;
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& fn, double a, double b,
                     const QuadOptions& opts) {
  if (a > b) {
    QuadResult r = integrate(fn, b, a, opts);
    r.value = -r.value;
    return r;
  }
  const bool lo_inf = std::isinf(a);
  const bool hi_inf = std::isinf(b);
  if (!lo_inf && !hi_inf) return integrate_finite(fn, a, b, opts);
  if (lo_inf && hi_inf) {
    QuadResult l = integrate(fn, a, 0.0, opts);
    QuadResult r = integrate(fn, 0.0, b, opts);
    return {l.value + r.value, l.error + r.error, l.converged && r.converged,
            l.evaluations + r.evaluations};
  }
  if (hi_inf) {
    // t = a + u/(1-u), u in [0, 1)
    auto g = [&](double u) {
      const double om = 1.0 - u;
      return fn(a + u / om) / (om * om);
    };
    return integrate_finite(g, 0.0, 1.0, opts);
  }
  auto g = [&](double u) {
    const double om = 1.0 - u;
    return fn(b - u / om) / (om * om);
  };
  return integrate_finite(g, 0.0, 1.0, opts);
}

double brent(const std::function<double(double)>& fn, double a, double b, const RootOptions& opts) {
  double fa = fn(a);
  double fb = fn(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) throw ConvergenceError("brent: root is not bracketed", std::min(std::abs(fa), std::abs(fb)));
  double c = a, fc = fa, d = b - a, e = d;
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * opts.x_tol;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      else p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol ? d : (m > 0.0 ? tol : -tol);
    fb = fn(b);
  }
  throw ConvergenceError("brent: iteration limit", std::abs(fb));
}

double bisect(const std::function<double(double)>& fn, double a, double b, double x_tol, int max_iter) {
  double fa = fn(a);
  const double fb = fn(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) throw ConvergenceError("bisect: root is not bracketed", std::min(std::abs(fa), std::abs(fb)));
  for (int i = 0; i < max_iter && std::abs(b - a) > x_tol; ++i) {
    const double m = 0.5 * (a + b);
    const double fm = fn(m);
    if (fm == 0.0) return m;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

// ---------------------------------------------------------------------------

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

Vec dense_eval(const DenseSolution::Step& st, double s) {
  const double th = (s - st.s0) / st.h;
  const double th1 = 1.0 - th;
  return st.r1 + th * (st.r2 + th1 * (st.r3 + th * (st.r4 + th1 * st.r5)));
}

}  // namespace

Vec DenseSolution::operator()(double s) const {
  if (steps_.empty()) throw Error("empty ODE solution");
  const bool forward = end_ >= begin_;
  const double lo = std::min(begin_, end_), hi = std::max(begin_, end_);
  const double slack = 1e-12 * std::max(1.0, std::abs(hi - lo));
  if (s < lo - slack || s > hi + slack) throw RangeError("ODE solution evaluated outside its span", s);
  // binary search on step start
  std::size_t lo_i = 0, hi_i = steps_.size();
  while (hi_i - lo_i > 1) {
    const std::size_t mid = (lo_i + hi_i) / 2;
    const bool after = forward ? s >= steps_[mid].s0 : s <= steps_[mid].s0;
    if (after) lo_i = mid;
    else hi_i = mid;
  }
  return dense_eval(steps_[lo_i], s);
}

DenseSolution integrate_ode(const OdeRhs& rhs, double s0, const Vec& y0, double s1,
                            const OdeOptions& opts, const OdeGuard& guard,
                            std::span<const double> breakpoints) {
  DenseSolution sol;
  sol.begin_ = s0;
  sol.end_ = s0;
  const int n = static_cast<int>(y0.size());
  const double dir = s1 >= s0 ? 1.0 : -1.0;
  std::vector<double> stops;
  for (double b : breakpoints)
    if ((b - s0) * dir > 0.0 && (s1 - b) * dir > 0.0) stops.push_back(b);
  std::sort(stops.begin(), stops.end(), [dir](double a, double b) { return a * dir < b * dir; });
  stops.push_back(s1);
  std::size_t next_stop = 0;

  Vec y = y0, k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);
  if (s0 == s1) {
    DenseSolution::Step st{s0, 0.0, y, Vec::Zero(n), Vec::Zero(n), Vec::Zero(n), Vec::Zero(n)};
    sol.steps_.push_back(st);
    return sol;
  }
  rhs(s0, y, k1);
  auto scale = [&](const Vec& a, const Vec& b, int i) {
    return opts.atol + opts.rtol * std::max(std::abs(a[i]), std::abs(b[i]));
  };
  double h = opts.initial_step;
  if (h <= 0.0) {
    double d0 = 0.0, d1n = 0.0;
    for (int i = 0; i < n; ++i) {
      const double sc = opts.atol + opts.rtol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1n += (k1[i] / sc) * (k1[i] / sc);
    }
    d0 = std::sqrt(d0 / n);
    d1n = std::sqrt(d1n / n);
    h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h = std::min(h, std::abs(s1 - s0));
  }
  h = std::min(h, opts.max_step);
  double s = s0;
  int steps = 0;
  while ((stops.back() - s) * dir > 0.0) {
    if (++steps > opts.max_steps) throw ConvergenceError("ODE step limit reached", s);
    const double target = stops[next_stop];
    bool hits_stop = false;
    double hs = dir * h;
    if ((s + hs - target) * dir >= 0.0) {
      hs = target - s;
      hits_stop = true;
    }
    ytmp = y + hs * a21 * k1;
    rhs(s + c2 * hs, ytmp, k2);
    ytmp = y + hs * (a31 * k1 + a32 * k2);
    rhs(s + c3 * hs, ytmp, k3);
    ytmp = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(s + c4 * hs, ytmp, k4);
    ytmp = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(s + c5 * hs, ytmp, k5);
    ytmp = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(s + hs, ytmp, k6);
    ynew = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    rhs(s + hs, ynew, k7);
    err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double en = 0.0;
    for (int i = 0; i < n; ++i) {
      const double q = err[i] / scale(y, ynew, i);
      en += q * q;
    }
    en = std::sqrt(en / n);
    if (!std::isfinite(en)) {
      h *= 0.25;
      if (h < 1e-14 * std::max(1.0, std::abs(s))) throw ConvergenceError("ODE step underflow", s);
      continue;
    }
    const double fac = std::clamp(0.9 * std::pow(std::max(en, 1e-10), -0.2), 0.2, 5.0);
    if (en > 1.0) {
      h = std::abs(hs) * std::max(0.2, fac);
      if (h < 1e-14 * std::max(1.0, std::abs(s))) throw ConvergenceError("ODE step underflow", s);
      continue;
    }
    DenseSolution::Step st;
    st.s0 = s;
    st.h = hs;
    st.r1 = y;
    st.r2 = ynew - y;
    st.r3 = hs * k1 - st.r2;
    st.r4 = st.r2 - hs * k7 - st.r3;
    st.r5 = hs * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
    const double s_new = hits_stop ? target : s + hs;
    if (guard && !guard(s_new, ynew)) {
      // locate exit within this step
      double in = s, out = s_new;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (in + out);
        if (guard(mid, dense_eval(st, mid))) in = mid;
        else out = mid;
      }
      st.h = hs;
      sol.steps_.push_back(st);
      sol.end_ = in;
      sol.stopped_ = true;
      sol.stop_param_ = out;
      return sol;
    }
    sol.steps_.push_back(std::move(st));
    s = s_new;
    y = ynew;
    k1 = k7;
    sol.end_ = s;
    if (hits_stop) ++next_stop;
    h = std::min(std::abs(hs) * fac, opts.max_step);
  }
  return sol;
}

std::vector<double> sign_changes(const DenseSolution& sol,
                                 const std::function<double(double, const Vec&)>& g,
                                 int probes_per_step, double s_tol) {
  std::vector<double> out;
  const auto& steps = sol.steps();
  if (steps.empty()) return out;
  double prev_s = sol.begin();
  double prev_g = g(prev_s, sol(prev_s));
  for (const auto& st : steps) {
    for (int p = 1; p <= probes_per_step; ++p) {
      double s = st.s0 + st.h * static_cast<double>(p) / probes_per_step;
      if ((s - sol.end()) * (sol.end() - sol.begin()) > 0.0) s = sol.end();
      const double gv = g(s, sol(s));
      if (prev_g == 0.0 && s != prev_s) {
        if (out.empty() || out.back() != prev_s) out.push_back(prev_s);
      } else if ((gv > 0.0) != (prev_g > 0.0) && gv != 0.0) {
        auto fn = [&](double x) { return g(x, sol(x)); };
        out.push_back(bisect(fn, prev_s, s, s_tol));
      }
      prev_s = s;
      prev_g = gv;
    }
  }
  return out;
}

double richardson(std::span<const double> values, double ratio, int order) {
  const std::size_t n = values.size();
  if (n == 0) throw Error("richardson: no samples");
  std::vector<double> row(values.begin(), values.end());
  for (std::size_t level = 1; level < n; ++level) {
    const double factor = std::pow(ratio, -static_cast<double>(order + static_cast<int>(level) - 1));
    for (std::size_t i = n - 1; i >= level; --i) {
      row[i] = (factor * row[i] - row[i - 1]) / (factor - 1.0);
      if (i == level) break;
    }
  }
  return row[n - 1];
}

double hermite(double x0, double x1, double y0, double y1, double d0, double d1, double x) {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 +
         (t3 - t2) * h * d1;
}

double hermite_derivative(double x0, double x1, double y0, double y1, double d0, double d1, double x) {
  const double h = x1 - x0;
  const double t = (x - x0) / h;
  const double t2 = t * t;
  return ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * h * d0 + (-6 * t2 + 6 * t) * y1 +
          (3 * t2 - 2 * t) * h * d1) /
         h;
}

}  // namespace nullkit::num
