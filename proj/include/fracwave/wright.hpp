#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "fracwave/errors.hpp"
#include "fracwave/quadrature.hpp"
#include "fracwave/specfun.hpp"

namespace fracwave {

struct WrightParams {
  double lambda;
  double mu;

  void validate() const {
    if (!(lambda > -1.0)) throw DomainError("WrightParams: lambda must exceed -1");
    if (!std::isfinite(mu)) throw DomainError("WrightParams: mu must be finite");
  }
};

/// gamma = beta/alpha, restricted to (0, 1).
struct GammaIndex {
  double gamma;

  explicit GammaIndex(double g) : gamma(g) {
    if (!(g > 0.0 && g < 1.0)) throw DomainError("GammaIndex: gamma must lie in (0, 1)");
  }
};

namespace detail {

/// log|1/Gamma(a)| and its sign; sign 0 at the poles of Gamma.
inline double log_abs_rgamma(double a, int& sign) {
  if (is_nonpositive_integer(a)) {
    sign = 0;
    return -std::numeric_limits<double>::infinity();
  }
  if (a > 0.0) {
    sign = 1;
    return -std::lgamma(a);
  }
  // 1/Gamma(a) = Gamma(1-a) sin(pi a)/pi
  double s = sinpi(a);
  sign = s > 0.0 ? 1 : -1;
  return std::lgamma(1.0 - a) + std::log(std::abs(s)) - std::log(std::numbers::pi);
}

}  // namespace detail

/// Wright function W_{lambda,mu}(z) = sum z^n / (n! Gamma(lambda n + mu)).
inline double wright_w(const WrightParams& p, double z, Precision prec = {}) {
  p.validate();
  prec.validate();
  if (z == 0.0) return rgamma(p.mu);
  const double lz = std::log(std::abs(z));
  double sum = 0.0, comp = 0.0, last = 0.0;
  int small = 0;
  for (int n = 0; n < prec.max_terms; ++n) {
    int sg = 0;
    double lr = detail::log_abs_rgamma(p.lambda * n + p.mu, sg);
    double term = 0.0;
    if (sg != 0) {
      double mag = std::exp(n * lz - std::lgamma(n + 1.0) + lr);
      term = sg * ((z < 0.0 && n % 2 == 1) ? -mag : mag);
    }
    double y = term - comp, t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    last = std::abs(term);
    // Terms eventually decay monotonically once n exceeds |z|.
    if (n > std::abs(z) && last <= prec.rel_tol * 1e-3 * std::abs(sum) + prec.abs_tol) {
      if (++small >= 3) return sum;
    } else {
      small = 0;
    }
  }
  throw ConvergenceError("wright_w: series did not converge", last);
}

/// W_{-gamma,mu}(-z) for z >= 0 by trapezoid quadrature on the parabolic
/// Hankel contour xi = lam (1 + i u)^2 through the saddle of xi - z xi^gamma.
inline double wright_contour(double gamma, double mu, double z) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("wright_contour: gamma must lie in (0, 1)");
  if (!(z >= 0.0)) throw DomainError("wright_contour: z must be >= 0");
  const double saddle = z > 0.0 ? std::pow(z * gamma, 1.0 / (1.0 - gamma)) : 0.0;
  const double lam = std::max(saddle, 1.0);
  // Beyond the saddle the value is bounded by exp(xi_s (1 - 1/gamma)) up to algebraic factors.
  if (saddle > 1.0 && saddle * (1.0 - 1.0 / gamma) - std::abs(mu) * std::log(saddle) < -760.0) return 0.0;
  const double shift = lam - z * std::pow(lam, gamma) - mu * std::log(lam);
  auto f = [&](double u) {
    cplx w(1.0, u);
    cplx xi = lam * w * w;
    cplx lxi = std::log(xi);
    cplx e = xi - z * std::exp(gamma * lxi) - mu * lxi - shift;
    if (e.real() < -745.0) return 0.0;
    return std::real(std::exp(e) * w);
  };
  // Gaussian width of the integrand in u at the saddle.
  const double width = 0.5 / std::sqrt(std::max((1.0 - gamma) * lam, 0.5));
  auto sweep = [&](double h, double offset, double& l1) {
    double s = 0.0, peak = 0.0;
    int quiet = 0;
    for (int j = 0; j < 2000000; ++j) {
      double u = offset + j * h;
      double v = f(u);
      double a = std::abs(v);
      peak = std::max(peak, a);
      s += v;
      l1 += a;
      if (u > 4.0 * width && a <= 1e-18 * peak) {
        if (++quiet >= 4) break;
      } else {
        quiet = 0;
      }
    }
    return s;
  };
  double h = width;
  double l1 = 0.0;
  double sum = sweep(h, h, l1) + 0.5 * f(0.0);
  double t_prev = h * sum;
  double diff = std::numeric_limits<double>::infinity();
  for (int level = 0; level < 14; ++level) {
    double odd_l1 = 0.0;
    double odd = sweep(h, 0.5 * h, odd_l1);
    sum += odd;
    l1 += odd_l1;
    h *= 0.5;
    double t = h * sum;
    diff = std::abs(t - t_prev);
    t_prev = t;
    // The exponent carries absolute roundoff ~ eps * lam, which sets the noise floor.
    if (level >= 1 && diff <= (1e-14 + 2e-15 * lam) * std::max(std::abs(t), h * l1)) {
      return 2.0 * lam / std::numbers::pi * t * std::exp(shift);
    }
  }
  throw ConvergenceError("wright_contour: trapezoid refinement did not converge",
                         2.0 * lam / std::numbers::pi * diff * std::exp(shift));
}

/// W_{-gamma,mu}(-z), z >= 0: series where it is free of cancellation, contour otherwise.
inline double mainardi_w(double gamma, double mu, double z) {
  if (!(z >= 0.0)) throw DomainError("mainardi: z must be >= 0");
  if (z == 0.0) return rgamma(mu);
  const bool series_ok = z <= 0.5 || (gamma <= 2.0 / 3.0 + 1e-12 && z <= 1.5);
  if (series_ok) return wright_w({-gamma, mu}, -z);
  return wright_contour(gamma, mu, z);
}

/// Mainardi function M_gamma(z) = W_{-gamma,1-gamma}(-z).
inline double m_wright(GammaIndex g, double z) { return mainardi_w(g.gamma, 1.0 - g.gamma, z); }

/// N_gamma(z) = W_{-gamma,2-gamma}(-z).
inline double n_wright(GammaIndex g, double z) { return mainardi_w(g.gamma, 2.0 - g.gamma, z); }

/// dM_gamma/dz = -W_{-gamma,1-2gamma}(-z).
inline double m_wright_d1(GammaIndex g, double z) { return -mainardi_w(g.gamma, 1.0 - 2.0 * g.gamma, z); }

/// dN_gamma/dz = -W_{-gamma,2-2gamma}(-z).
inline double n_wright_d1(GammaIndex g, double z) { return -mainardi_w(g.gamma, 2.0 - 2.0 * g.gamma, z); }

namespace detail {
inline constexpr double kZMin23 = 0.05;
}

/// M_{2/3} in Bessel form (z^2/(3^{3/2} pi)) [K_{1/3}(w) + K_{2/3}(w)] e^{-w}, w = 2z^3/27.
inline double m_wright_23(double z) {
  if (!(z >= 0.0)) throw DomainError("m_wright_23: z must be >= 0");
  if (z <= detail::kZMin23) return wright_w({-2.0 / 3.0, 1.0 / 3.0}, -z);
  const double w = 2.0 * z * z * z / 27.0;
  const double ks = bessel_k_scaled(1.0 / 3.0, w) + bessel_k_scaled(2.0 / 3.0, w);
  return z * z / (std::pow(3.0, 1.5) * std::numbers::pi) * ks * std::exp(-2.0 * w);
}

/// M_{2/3} in Airy form [3^{-1/3} z Ai(v) - 3^{1/3} Ai'(v)] e^{-2z^3/27}, v = z^2/3^{4/3}.
inline double m_wright_23_airy(double z) {
  if (!(z >= 0.0)) throw DomainError("m_wright_23_airy: z must be >= 0");
  const double v = z * z / std::pow(3.0, 4.0 / 3.0);
  return (std::cbrt(1.0 / 3.0) * z * airy_ai(v) - std::cbrt(3.0) * airy_ai_prime(v)) *
         std::exp(-2.0 * z * z * z / 27.0);
}

/// N_{2/3}(z) = (sqrt 3/(2^{2/3} pi)) int_{2z^3/27}^inf y^{-1/3} K_{1/3}(y) e^{-y} dy,
/// written as 1/Gamma(4/3) minus the head integral when the lower limit is small.
inline double n_wright_23(double z) {
  if (!(z >= 0.0)) throw DomainError("n_wright_23: z must be >= 0");
  const double gam43 = std::tgamma(4.0 / 3.0);
  if (z == 0.0) return 1.0 / gam43;
  const double pref = std::sqrt(3.0) / (std::cbrt(4.0) * std::numbers::pi);
  const double Y = 2.0 * z * z * z / 27.0;
  quad::Options opt;
  opt.abs_tol = 1e-17;
  opt.rel_tol = 1e-14;
  if (Y <= 1.0) {
    // y^{-1/3} K_{1/3}(y) ~ y^{-2/3}: factor out y^{-2/3}.
    auto g = [](double y) { return std::cbrt(y) * bessel_k_scaled(1.0 / 3.0, y) * std::exp(-2.0 * y); };
    double head = quad::integrate_left_power(g, -2.0 / 3.0, 0.0, Y, opt).value;
    return 1.0 / gam43 - pref * head;
  }
  auto tail = [Y](double y) {
    return std::pow(y, -1.0 / 3.0) * bessel_k_scaled(1.0 / 3.0, y) * std::exp(-2.0 * (y - Y));
  };
  double t = quad::integrate_to_infinity(tail, Y, opt).value;
  return pref * t * std::exp(-2.0 * Y);
}

/// f_2^{(3)}(t, l1, l2) = (3^{2/3}/t^{1/3}) Ai((3t)^{-1/3}(l2 + l1^2/(3t))) exp(-(l1/(3t))(l2 + 2 l1^2/(9t))).
inline double f23(double t, double l1, double l2) {
  if (!(t > 0.0)) throw DomainError("f23: t must be positive");
  if (!(l1 >= 0.0) || !(l2 >= 0.0)) throw DomainError("f23: lambda1, lambda2 must be >= 0");
  const double arg = std::cbrt(1.0 / (3.0 * t)) * (l2 + l1 * l1 / (3.0 * t));
  return std::cbrt(9.0) / std::cbrt(t) * airy_ai(arg) *
         std::exp(-(l1 / (3.0 * t)) * (l2 + 2.0 * l1 * l1 / (9.0 * t)));
}

/// f_1^{(3)} = -d f_2^{(3)}/d lambda2 by central difference with step 1e-5.
inline double f13(double t, double l1, double l2) {
  const double h = 1e-5;
  if (l2 < h) return -(f23(t, l1, l2 + h) - f23(t, l1, l2)) / h;  // one-sided at the boundary
  return -(f23(t, l1, l2 + h) - f23(t, l1, l2 - h)) / (2.0 * h);
}

}  // namespace fracwave
