#pragma once

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <boost/math/special_functions/digamma.hpp>

#include "fracwave/errors.hpp"
#include "fracwave/kernels.hpp"
#include "fracwave/quadrature.hpp"
#include "fracwave/specfun.hpp"
#include "fracwave/wright.hpp"

namespace fracwave {

/// First (G) or second (H) fundamental solution.
enum class Which { G, H };

inline std::string to_string(Which w) { return w == Which::G ? "G" : "H"; }

inline Which parse_which(const std::string& s) {
  if (s == "G" || s == "g") return Which::G;
  if (s == "H" || s == "h") return Which::H;
  throw DomainError("which must be G or H, got '" + s + "'");
}

namespace detail {

/// Piecewise Chebyshev interpolant on [a, b]. Panels are bisected until probes
/// between the nodes agree with the function to tolerance.
class ChebTable {
 public:
  static constexpr int kN = 17;

  ChebTable() = default;

  template <class F>
  ChebTable(F&& f, double a, double b, double max_width, double abs_tol, double rel_tol,
            int max_depth = 24) {
    if (!(b > a)) throw DomainError("ChebTable: empty range");
    const int n0 = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
    for (int i = 0; i < n0; ++i)
      build(f, a + (b - a) * i / n0, a + (b - a) * (i + 1) / n0, abs_tol, rel_tol, max_depth);
  }

  double lo() const { return panels_.front().a; }
  double hi() const { return panels_.back().b; }
  std::size_t size() const { return panels_.size(); }

  double operator()(double v) const {
    std::size_t lo = 0, hi = panels_.size();
    while (hi - lo > 1) {  // last panel with a <= v
      std::size_t mid = (lo + hi) / 2;
      if (panels_[mid].a <= v) lo = mid; else hi = mid;
    }
    return interp(panels_[lo], v);
  }

 private:
  struct Panel {
    double a, b;
    std::array<double, kN> f;
  };
  std::vector<Panel> panels_;

  static double node(int j) { return std::cos(std::numbers::pi * j / (kN - 1)); }

  static double interp(const Panel& p, double v) {
    const double x = (2.0 * v - p.a - p.b) / (p.b - p.a);
    double num = 0.0, den = 0.0;
    for (int j = 0; j < kN; ++j) {
      const double d = x - node(j);
      if (d == 0.0) return p.f[j];
      double w = (j % 2 == 0 ? 1.0 : -1.0) / d;
      if (j == 0 || j == kN - 1) w *= 0.5;
      num += w * p.f[j];
      den += w;
    }
    return num / den;
  }

  template <class F>
  void build(F& f, double a, double b, double abs_tol, double rel_tol, int depth) {
    Panel p{a, b, {}};
    for (int j = 0; j < kN; ++j) p.f[j] = f(0.5 * (a + b) + 0.5 * (b - a) * node(j));
    bool ok = true;
    for (int j : {0, kN / 2 - 1, kN - 2}) {
      const double v = 0.5 * (a + b) + 0.5 * (b - a) * std::cos(std::numbers::pi * (j + 0.5) / (kN - 1));
      const double exact = f(v);
      if (std::abs(interp(p, v) - exact) > abs_tol + rel_tol * std::abs(exact)) ok = false;
    }
    if (ok || depth == 0) {
      panels_.push_back(p);
      return;
    }
    const double m = 0.5 * (a + b);
    build(f, a, m, abs_tol, rel_tol, depth - 1);
    build(f, m, b, abs_tol, rel_tol, depth - 1);
  }
};

}  // namespace detail

/// Mainardi weight W(xi) = M_gamma(xi) (G) or N_gamma(xi) (H) in the log variable
/// s = ln xi. Interpolated on [kTableStart, s_max]; below that the series is cheap.
/// Beyond s_max the weight stays below `tail` and is treated as zero.
class ScalingWeight {
 public:
  static constexpr double kTableStart = -3.0;

  ScalingWeight(double gamma, Which which, double tail = 1e-17) : gamma_(gamma) {
    if (!(tail > 0.0)) throw DomainError("ScalingWeight: tail threshold must be positive");
    if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("ScalingWeight: gamma must lie in (0, 1)");
    mu_ = (which == Which::G ? 1.0 : 2.0) - gamma;
    auto f = [this](double s) { return mainardi_w(gamma_, mu_, std::exp(s)); };
    // Past the mode the weight decays like exp(-c xi^(1/(1-gamma))).
    s_max_ = 0.0;
    while (std::abs(f(s_max_)) > tail || std::abs(f(s_max_ + 0.25)) > tail) {
      s_max_ += 0.25;
      if (s_max_ > 12.0) throw ConvergenceError("ScalingWeight: weight tail does not decay", f(s_max_));
    }
    table_ = detail::ChebTable(f, kTableStart, s_max_, 0.25, 2e-15, 1e-12, 12);
  }

  double gamma() const { return gamma_; }
  double s_max() const { return s_max_; }
  double xi_cutoff() const { return std::exp(s_max_); }

  double operator()(double s) const {
    if (s > s_max_) return 0.0;
    if (s < kTableStart) return mainardi_w(gamma_, mu_, std::exp(s));
    return table_(s);
  }

  /// Shared instance per (gamma, which); tables are immutable once built.
  static const ScalingWeight& cached(double gamma, Which which, double tail = 1e-17) {
    static std::mutex mutex;
    static std::map<std::tuple<double, int, double>, std::unique_ptr<ScalingWeight>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto key = std::make_tuple(gamma, static_cast<int>(which), tail);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, std::make_unique<ScalingWeight>(gamma, which, tail)).first;
    return *it->second;
  }

 private:
  double gamma_, mu_, s_max_ = 0.0;
  detail::ChebTable table_;
};

namespace detail {

/// 1/Gamma and its derivative, finite at the poles of Gamma.
inline double rgamma_prime(double x) {
  if (is_nonpositive_integer(x)) {
    const double k = -x;
    return (static_cast<long>(k) % 2 == 0 ? 1.0 : -1.0) * std::tgamma(k + 1.0);
  }
  return -boost::math::digamma(x) * rgamma(x);
}

}  // namespace detail

/// Convergent residue expansion at the origin of the unit-coefficient 1D solution
/// (t = 1, spectrum E_{beta,mu0}(-|k|^alpha), mu0 = 1 for G, 2 for H):
///   sum_{m odd} a_m y^(m-1) + sum_{n >= 1} b_n y^(alpha n - 1),
/// with y^(m-1)(c + l ln y) terms where alpha n = m (double poles).
class OriginSeries {
 public:
  struct Term {
    double coef, log_coef, power;
  };

  OriginSeries(double beta, double alpha, Which which, double max_power = 64.0)
      : beta_(beta), alpha_(alpha) {
    if (!(alpha > 0.0 && alpha <= 2.0 && beta > 0.0 && beta <= alpha))
      throw DomainError("OriginSeries: need 0 < beta <= alpha <= 2");
    const double mu0 = which == Which::G ? 1.0 : 2.0;
    const double pi = std::numbers::pi;
    auto R = [&](double s) { return rgamma(alpha * s) * rgamma(mu0 - beta * s); };
    auto Rp = [&](double s) {
      return alpha * detail::rgamma_prime(alpha * s) * rgamma(mu0 - beta * s) -
             beta * rgamma(alpha * s) * detail::rgamma_prime(mu0 - beta * s);
    };
    auto odd_integer = [](double v, long& m) {
      m = std::lround(v);
      return std::abs(v - m) < 1e-12 * std::max(1.0, v) && (m % 2 != 0);
    };
    // Poles s = n of Gamma(1-s).
    for (int n = 1; alpha * n - 1.0 <= max_power; ++n) {
      long m = 0;
      if (odd_integer(alpha * n, m)) {
        const double sign = (n % 2 == 0 ? 1.0 : -1.0) * ((m - 1) / 2 % 2 == 0 ? 1.0 : -1.0);
        const double den = pi * alpha * sign;
        terms_.push_back({Rp(n) / den, alpha * R(n) / den, static_cast<double>(m - 1)});
        continue;
      }
      const double c = std::cos(pi * alpha * n / 2.0);
      terms_.push_back({(n % 2 == 1 ? 1.0 : -1.0) * R(n) / (2.0 * c), 0.0, alpha * n - 1.0});
      if (n == 1) b1_ = terms_.back().coef;
    }
    // Poles s = m/alpha (m odd) of Gamma(1 - alpha s); even m cancel against sin.
    for (int m = 1; m - 1.0 <= max_power; m += 2) {
      const double n = m / alpha;
      if (std::abs(n - std::round(n)) < 1e-12 * std::max(1.0, n)) continue;  // merged above
      const double sm = ((m - 1) / 2 % 2 == 0 ? 1.0 : -1.0);
      terms_.push_back({rgamma(m) * rgamma(mu0 - beta * m / alpha) / (alpha * std::sin(pi * n) * sm), 0.0,
                        m - 1.0});
    }
    std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) { return a.power < b.power; });
  }

  const std::vector<Term>& terms() const { return terms_; }

  /// Coefficient of y^(alpha-1), the leading non-smooth term.
  double b1() const { return b1_; }

  /// deriv-th derivative at y > 0 (y = 0 allowed for deriv = 0 when alpha > 1).
  /// skip_power drops the term with that exact power (used to remove the singular part).
  double eval(double y, int deriv, double skip_power = std::numeric_limits<double>::quiet_NaN()) const {
    double sum = 0.0, comp = 0.0;
    const double ly = y > 0.0 ? std::log(y) : 0.0;
    for (const auto& t : terms_) {
      if (t.power == skip_power) continue;
      const double p = t.power;
      double v = 0.0;
      if (y == 0.0) {
        if (deriv == 0 && p == 0.0) v = t.coef;
        else if (p - deriv < 0.0 && (t.coef != 0.0 || t.log_coef != 0.0) && !(deriv > 0 && p == 0.0))
          throw SingularityError("OriginSeries: singular at y = 0", p - deriv);
        sum += v;
        continue;
      }
      const double yp = std::pow(y, p - deriv);
      switch (deriv) {
        case 0: v = yp * (t.coef + t.log_coef * ly); break;
        case 1: v = yp * (t.coef * p + t.log_coef * (p * ly + 1.0)); break;
        case 2:
          v = yp * (t.coef * p * (p - 1.0) + t.log_coef * (p * (p - 1.0) * ly + 2.0 * p - 1.0));
          break;
        default: throw DomainError("OriginSeries: derivative order must be 0, 1 or 2");
      }
      // Kahan summation: the terms are of mixed sign.
      const double yk = v - comp;
      const double tk = sum + yk;
      comp = (tk - sum) - yk;
      sum = tk;
    }
    return sum;
  }

 private:
  double beta_, alpha_, b1_ = 0.0;
  std::vector<Term> terms_;
};

/// Tolerances for the Mellin convolution in s = ln xi.
struct MellinOptions {
  double rel_tol = 1e-12;
  int max_intervals = 4000;
  double tail = 1e-17;  // weight threshold defining the xi cutoff
};

namespace detail {

/// int_0^inf W(xi) K(y/xi) xi^(-p) dxi = int W(e^s) K(y e^(-s)) e^((1-p)s) ds for y > 0.
/// K must decay at least like u^(-alpha-1-(p-1)) at infinity. The kernel peak sits near
/// s = ln y, which is used as a breakpoint.
template <class K>
double mellin(const ScalingWeight& w, K&& kernel, double y, double p, double alpha, const MellinOptions& opt) {
  const double ly = std::log(y);
  const double s_hi = w.s_max();
  const double s_lo = std::min(ly, s_hi) - 40.0 / (alpha + 1.0) - 1.0;
  auto f = [&](double s) {
    const double ws = w(s);
    if (ws == 0.0) return 0.0;
    return ws * kernel(y * std::exp(-s)) * std::exp((1.0 - p) * s);
  };
  std::vector<double> cuts{s_lo};
  if (ly > s_lo && ly < s_hi) cuts.push_back(ly);
  cuts.push_back(s_hi);
  // First pass fixes the absolute scale from the L1 norm of the integrand.
  quad::Options coarse;
  coarse.rel_tol = 1e-3;
  coarse.abs_tol = 0.0;
  coarse.max_intervals = 200;
  coarse.throw_on_failure = false;
  double l1 = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    l1 += quad::integrate([&](double s) { return std::abs(f(s)); }, cuts[i], cuts[i + 1], coarse).value;
  // Kernel roundoff limits the attainable error to about 1e-13 of the L1 norm; the
  // budget is only reported as a failure well above that floor.
  quad::Options fine;
  fine.rel_tol = opt.rel_tol;
  fine.abs_tol = 10.0 * opt.rel_tol * l1;
  fine.max_intervals = opt.max_intervals;
  fine.throw_on_failure = false;
  double total = 0.0, err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    auto r = quad::integrate(f, cuts[i], cuts[i + 1], fine);
    total += r.value;
    err += r.error;
  }
  if (err > 100.0 * fine.abs_tol && err > 1e3 * opt.rel_tol * std::abs(total))
    throw ConvergenceError("Mellin convolution did not converge", err);
  return total;
}

}  // namespace detail

/// Unit-coefficient 1D solution at t = 1 for (beta, alpha) and its derivatives:
/// G1 = int M_gamma(xi) X_alpha(y/xi) dxi/xi, H1 = the same with N_gamma.
/// gamma = 1 and alpha = 2 are closed-form branches.
class Profile1D {
 public:
  Profile1D(double beta, double alpha, Which which, MellinOptions opt = {})
      : beta_(beta), alpha_(alpha), gamma_(beta / alpha), which_(which), opt_(opt) {
    if (!(alpha > 0.0 && alpha <= 2.0 && beta > 0.0 && beta <= alpha))
      throw DomainError("Profile1D: need 0 < beta <= alpha <= 2");
    if (gamma_ < 1.0) {
      weight_ = &ScalingWeight::cached(gamma_, which, opt.tail);
      if (alpha < 2.0) series_ = std::make_shared<OriginSeries>(beta, alpha, which);
    }
  }

  double beta() const { return beta_; }
  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }
  Which which() const { return which_; }
  bool neutral() const { return gamma_ == 1.0; }
  const OriginSeries* series() const { return series_.get(); }

  double value(double y) const {
    const double u = std::abs(y);
    if (neutral()) {
      if (alpha_ == 2.0) {
        if (which_ == Which::G) throw DomainError("Profile1D: beta = alpha = 2 gives the d'Alembert delta pair");
        return u < 1.0 ? 0.5 : (u == 1.0 ? 0.25 : 0.0);
      }
      return which_ == Which::G ? x_alpha(alpha_, u) : y_alpha(alpha_, u);
    }
    if (alpha_ == 2.0) return 0.5 * weight_value(u);
    if (u == 0.0) return series_->eval(0.0, 0);
    return detail::mellin(*weight_, [&](double v) { return x_alpha(alpha_, v); }, u, 1.0, alpha_, opt_);
  }

  /// Derivative, odd in y.
  double d1(double y) const {
    const double u = std::abs(y);
    double d = 0.0;
    if (neutral()) {
      check_not_elastic();
      d = which_ == Which::G ? x_alpha_d1(alpha_, u) : y_alpha_d1(alpha_, u);
    } else if (alpha_ == 2.0) {
      d = 0.5 * weight_d1(u);
    } else {
      if (u == 0.0) throw SingularityError("Profile1D: derivative singular at 0", alpha_ - 2.0);
      d = detail::mellin(*weight_, [&](double v) { return x_alpha_d1(alpha_, v); }, u, 2.0, alpha_, opt_);
    }
    return y < 0.0 ? -d : d;
  }

  double d2(double y) const {
    const double u = std::abs(y);
    if (u == 0.0) throw SingularityError("Profile1D: second derivative singular at 0", alpha_ - 3.0);
    if (neutral()) {
      check_not_elastic();
      return which_ == Which::G ? x_alpha_d2(alpha_, u) : y_alpha_d2(alpha_, u);
    }
    if (alpha_ == 2.0) throw DomainError("Profile1D: alpha = 2 uses the ellipsoidal closed form");
    return detail::mellin(*weight_, [&](double v) { return x_alpha_d2(alpha_, v); }, u, 3.0, alpha_, opt_);
  }

  /// Radial lift -f'(r)/(2 pi r), computed as a Mellin convolution with X^(3).
  double lift3(double r) const {
    if (!(r > 0.0)) throw SingularityError("Profile1D: 3D solution singular at the origin", alpha_ - 3.0);
    if (neutral()) {
      check_not_elastic();
      return which_ == Which::G ? x3_alpha(alpha_, r) : y3_alpha(alpha_, r);
    }
    if (alpha_ == 2.0) return -0.5 * weight_d1(r) / (2.0 * std::numbers::pi * r);
    return detail::mellin(*weight_, [&](double v) { return x3_alpha(alpha_, v); }, r, 3.0, alpha_, opt_);
  }

  /// r^(3-alpha) times the radial lift, from the origin series; accurate for small r.
  double lift3_factored(double r) const {
    if (!(r >= 0.0)) throw DomainError("Profile1D: r must be nonnegative");
    const double pi2 = 2.0 * std::numbers::pi;
    if (neutral()) {
      check_not_elastic();
      if (which_ == Which::G) return z_alpha(alpha_, r);
      if (r == 0.0) return std::sin(alpha_ * std::numbers::pi / 2) / (std::numbers::pi * pi2);
      return x_alpha(alpha_, r) * std::pow(r, 1.0 - alpha_) / pi2;
    }
    if (alpha_ == 2.0) return -0.5 * weight_d1(r) / pi2;
    // -(1/(2 pi)) sum c_p p r^(p-1) r^(2-alpha); each term carries r^(p-alpha+1) >= r^0.
    double sum = 0.0;
    for (const auto& t : series_->terms()) {
      const double p = t.power;
      if (p == 0.0) continue;
      const double e = p + 1.0 - alpha_;
      const double re = e == 0.0 ? 1.0 : std::pow(r, e);
      double lr = r > 0.0 ? std::log(r) : 0.0;
      if (t.log_coef != 0.0 && r == 0.0) continue;
      sum += re * (t.coef * p + t.log_coef * (p * lr + 1.0));
    }
    return -sum / pi2;
  }

 private:
  double beta_, alpha_, gamma_;
  Which which_;
  MellinOptions opt_;
  const ScalingWeight* weight_ = nullptr;
  std::shared_ptr<OriginSeries> series_;

  void check_not_elastic() const {
    if (alpha_ == 2.0) throw DomainError("Profile1D: beta = alpha = 2 solution is a distribution");
  }
  double mu() const { return (which_ == Which::G ? 1.0 : 2.0) - gamma_; }
  double weight_value(double z) const { return mainardi_w(gamma_, mu(), z); }
  // d/dz W_{-g,mu}(-z) = -W_{-g,mu-g}(-z)
  double weight_d1(double z) const { return -mainardi_w(gamma_, mu() - gamma_, z); }
};

}  // namespace fracwave
