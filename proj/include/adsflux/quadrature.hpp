#pragma once

#include <cmath>
#include <utility>
#include <vector>

namespace adsflux {

struct QuadResult {
  double value = 0;
  double error = 0;  // |S_2n - S_n| / 15
  int intervals = 0;
  bool converged = false;
};

struct QuadOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-13;
  int min_intervals = 16;
  int max_intervals = 1 << 15;
  // per-step bound on |f| * h; stays below pi/2 for fibre increments
  double max_increment = 0;
};

// Composite Simpson on [a,b], doubling the grid until two successive
// estimates agree (Richardson error estimate).
template <class F>
QuadResult simpson(F&& f, double a, double b, const QuadOptions& opt = {}) {
  int n = opt.min_intervals + (opt.min_intervals % 2);
  std::vector<double> vals(n + 1);
  double h = (b - a) / n;
  for (int i = 0; i <= n; ++i) vals[i] = f(a + i * h);
  auto rule = [&](const std::vector<double>& v, double step) {
    double s = v.front() + v.back();
    for (std::size_t i = 1; i + 1 < v.size(); ++i) s += (i % 2 ? 4.0 : 2.0) * v[i];
    return s * step / 3.0;
  };
  auto increment_ok = [&](const std::vector<double>& v, double step) {
    if (opt.max_increment <= 0) return true;
    for (double x : v)
      if (std::abs(x) * step >= opt.max_increment) return false;
    return true;
  };
  QuadResult r;
  double prev = rule(vals, h);
  while (true) {
    int n2 = 2 * n;
    if (n2 > opt.max_intervals) {
      r.value = prev;
      r.intervals = n;
      r.converged = false;
      return r;
    }
    double h2 = h / 2;
    std::vector<double> v2(n2 + 1);
    for (int i = 0; i <= n; ++i) v2[2 * i] = vals[i];
    for (int i = 0; i < n; ++i) v2[2 * i + 1] = f(a + (2 * i + 1) * h2);
    double cur = rule(v2, h2);
    double err = std::abs(cur - prev) / 15.0;
    vals = std::move(v2);
    n = n2;
    h = h2;
    if (err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(cur)) && increment_ok(vals, h)) {
      r.value = cur + (cur - prev) / 15.0;
      r.error = err;
      r.intervals = n;
      r.converged = true;
      return r;
    }
    prev = cur;
  }
}

// Gauss-Legendre nodes and weights on [-1, 1]
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = z;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double pn = n == 1 ? z : p1;
      double pm = n == 1 ? 1 : p0;
      dp = n * (z * pn - pm) / (z * z - 1);
      double dz = pn / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1 - z * z) * dp * dp);
  }
  return {x, w};
}

}  // namespace adsflux
