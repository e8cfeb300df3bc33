#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <vector>

#include "fracwave/errors.hpp"

namespace fracwave::quad {

struct Rule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1]. Rules are cached per n.
inline const Rule& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, Rule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  if (n < 1) throw DomainError("gauss_legendre: n must be positive");
  // P_n(x) and P_n'(x) by the three-term recurrence.
  auto legendre = [n](double x, double& dp) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    return p1;
  };
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double dx = legendre(x, dp) / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(x, dp);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[n - 1 - i] = x;
    rule.nodes[i] = -x;
    rule.weights[i] = rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return cache.emplace(n, std::move(rule)).first->second;
}

/// Composite Gauss-Legendre nodes/weights over consecutive panels [edges[i], edges[i+1]].
inline void composite_gauss(const std::vector<double>& edges, int order,
                            std::vector<double>& x, std::vector<double>& w) {
  const Rule& r = gauss_legendre(order);
  x.clear();
  w.clear();
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    double c = 0.5 * (edges[p] + edges[p + 1]), h = 0.5 * (edges[p + 1] - edges[p]);
    for (int i = 0; i < order; ++i) {
      x.push_back(c + h * r.nodes[i]);
      w.push_back(h * r.weights[i]);
    }
  }
}

struct Options {
  double abs_tol = 1e-15;
  double rel_tol = 1e-13;
  int max_intervals = 4000;
  bool throw_on_failure = true;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
  bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk15(F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWgk[7], gauss = fc * kWg[3], asc = std::abs(fc) * kWgk[7];
  double fv1[7], fv2[7];
  for (int j = 0; j < 7; ++j) {
    double dx = h * kXgk[j];
    fv1[j] = f(c - dx);
    fv2[j] = f(c + dx);
    kron += kWgk[j] * (fv1[j] + fv2[j]);
    if (j % 2 == 1) gauss += kWg[j / 2] * (fv1[j] + fv2[j]);
  }
  double mean = 0.5 * kron;
  asc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) asc += kWgk[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));
  double err = std::abs((kron - gauss) * h);
  asc *= std::abs(h);
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  err = std::max(err, 4.0 * std::numeric_limits<double>::epsilon() * std::abs(kron * h));
  return {a, b, kron * h, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) quadrature of f over [a, b].
template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
  Result res;
  if (a == b) {
    res.converged = true;
    return res;
  }
  std::priority_queue<detail::Panel> heap;
  auto first = detail::gk15(f, a, b);
  heap.push(first);
  double total = first.value, err = first.error;
  int n = 1;
  while (err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total)) && n < opt.max_intervals) {
    auto worst = heap.top();
    heap.pop();
    double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {  // interval cannot be split further
      heap.push(worst);
      break;
    }
    auto left = detail::gk15(f, worst.a, mid);
    auto right = detail::gk15(f, mid, worst.b);
    heap.push(left);
    heap.push(right);
    ++n;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
  }
  // Exact resummation in a fixed order for reproducibility.
  std::vector<detail::Panel> panels;
  panels.reserve(heap.size());
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(), [](const auto& p, const auto& q) { return p.a < q.a; });
  total = 0.0;
  err = 0.0;
  for (const auto& p : panels) {
    total += p.value;
    err += p.error;
  }
  res.value = total;
  res.error = err;
  res.intervals = n;
  // The loop tracks err incrementally; after resummation it may differ slightly.
  res.converged = err <= 2.0 * std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
  if (!res.converged && opt.throw_on_failure)
    throw ConvergenceError("adaptive quadrature budget exceeded", err);
  return res;
}

/// Integral over [a, inf) via x = a + u/(1-u).
template <class F>
Result integrate_to_infinity(F&& f, double a, const Options& opt = {}) {
  auto g = [&](double u) {
    double v = 1.0 - u;
    if (v <= 0.0) return 0.0;
    double x = a + u / v;
    double fx = f(x);
    return fx == 0.0 ? 0.0 : fx / (v * v);
  };
  return integrate(g, 0.0, 1.0, opt);
}

/// Integral over [a, b] of (x-a)^p g(x), p > -1, via x = a + (b-a) w^(1/(p+1)).
template <class G>
Result integrate_left_power(G&& g, double p, double a, double b, const Options& opt = {}) {
  if (!(p > -1.0)) throw DomainError("integrate_left_power: exponent must exceed -1");
  const double q = 1.0 / (p + 1.0), L = b - a;
  auto h = [&](double w) { return g(a + L * std::pow(w, q)); };
  Result r = integrate(h, 0.0, 1.0, opt);
  double scale = std::pow(L, p + 1.0) * q;
  r.value *= scale;
  r.error *= std::abs(scale);
  return r;
}

}  // namespace fracwave::quad
