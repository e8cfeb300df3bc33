#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>
#include <vector>

#include "fracwave/errors.hpp"
#include "fracwave/quadrature.hpp"

namespace fracwave {

using cplx = std::complex<double>;

struct Precision {
  double rel_tol = 1e-14;
  double abs_tol = 1e-300;
  int max_terms = 600;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || max_terms < 1)
      throw DomainError("Precision: tolerances must be positive and max_terms >= 1");
  }
};

/// sin(pi x) with exact zeros at integers.
inline double sinpi(double x) {
  double r = x - 2.0 * std::round(0.5 * x);  // r in [-1, 1]
  if (r == 0.0 || std::abs(r) == 1.0) return 0.0;
  if (r > 0.5) r = 1.0 - r;
  if (r < -0.5) r = -1.0 - r;
  return std::sin(std::numbers::pi * r);
}

inline bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

/// Gamma function; throws PoleError at 0, -1, -2, ...
inline double gamma(double x) {
  if (!std::isfinite(x)) throw DomainError("gamma: argument must be finite");
  if (is_nonpositive_integer(x)) throw PoleError("gamma: pole at non-positive integer");
  return std::tgamma(x);
}

/// 1/Gamma(x), entire: returns 0 at the poles of Gamma.
inline double rgamma(double x) {
  if (is_nonpositive_integer(x)) return 0.0;
  if (x > 171.0) return std::exp(-std::lgamma(x));
  if (x < -170.0) {
    // 1/Gamma(x) = Gamma(1-x) sin(pi x) / pi, with Gamma(1-x) taken in log form.
    return std::exp(std::lgamma(1.0 - x)) * sinpi(x) / std::numbers::pi;
  }
  return 1.0 / std::tgamma(x);
}

namespace detail {

inline constexpr double kLanczosG = 7.0;
inline constexpr double kLanczos[9] = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

/// log(sin(pi z)) on some branch; stable for large |Im z|.
inline cplx log_sinpi(cplx z) {
  const double pi = std::numbers::pi;
  const cplx I(0.0, 1.0);
  if (std::abs(z.imag()) < 5.0) return std::log(std::sin(pi * z));
  // sin(pi z) = (e^(i pi z) - e^(-i pi z))/(2i); keep the growing exponential outside the log.
  if (z.imag() > 0.0) return -I * pi * z - std::log(-2.0 * I) + std::log(1.0 - std::exp(2.0 * I * pi * z));
  return I * pi * z - std::log(2.0 * I) + std::log(1.0 - std::exp(-2.0 * I * pi * z));
}

}  // namespace detail

/// log Gamma(z) for complex z (Lanczos, g = 7) with reflection for Re z < 1/2.
/// The imaginary part is determined only modulo 2 pi.
inline cplx lgamma_complex(cplx z) {
  const double pi = std::numbers::pi;
  if (z.real() < 0.5) {
    if (z.imag() == 0.0 && is_nonpositive_integer(z.real()))
      throw PoleError("lgamma_complex: pole at non-positive integer");
    return std::log(pi) - detail::log_sinpi(z) - lgamma_complex(1.0 - z);
  }
  z -= 1.0;
  cplx a = detail::kLanczos[0];
  for (int i = 1; i < 9; ++i) a += detail::kLanczos[i] / (z + double(i));
  cplx t = z + detail::kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * pi) + (z + 0.5) * std::log(t) - t + std::log(a);
}

inline cplx gamma_complex(cplx z) { return std::exp(lgamma_complex(z)); }

/// Mittag-Leffler function E_{beta,mu}(z) for real z <= 0.
///
/// Regimes in s = |z|^(1/beta): power series for s <= kSeriesMax, asymptotic
/// expansion for s >= kAsymptoticMin, and in between the exact representation
/// obtained by collapsing the Hankel contour onto the negative real axis
/// (plus the residues of the poles on the principal sheet when beta > 1).
class MittagLeffler {
 public:
  static constexpr double kSeriesMax = 4.0;
  static constexpr double kAsymptoticMin = 40.0;

  MittagLeffler(double beta, double mu, Precision prec = {}) : beta_(beta), mu_(mu), prec_(prec) {
    prec_.validate();
    if (!(beta > 0.0 && beta <= 2.0)) throw DomainError("mittag_leffler: beta must lie in (0, 2]");
    if (!std::isfinite(mu)) throw DomainError("mittag_leffler: mu must be finite");
  }

  double beta() const { return beta_; }
  double mu() const { return mu_; }

  double operator()(double z) const {
    if (!(z <= 0.0)) throw DomainError("mittag_leffler: z must be <= 0");
    if (z == 0.0) return rgamma(mu_);
    const double x = -z;
    if (beta_ == 1.0 && (mu_ == 1.0 || mu_ == 2.0)) {
      if (mu_ == 1.0) return std::exp(z);
      return -std::expm1(z) / x;
    }
    if (beta_ == 2.0 && (mu_ == 1.0 || mu_ == 2.0)) {
      const double w = std::sqrt(x);
      return mu_ == 1.0 ? std::cos(w) : std::sin(w) / w;
    }
    const double s = std::pow(x, 1.0 / beta_);
    if (s <= kSeriesMax) return series(z);
    if (s >= kAsymptoticMin) return asymptotic(z);
    return integral(z);
  }

  /// Power series sum z^n / Gamma(beta n + mu).
  double series(double z) const {
    double sum = 0.0, comp = 0.0, zn = 1.0;
    int small = 0;
    for (int n = 0; n < prec_.max_terms; ++n) {
      double term = zn * rgamma(beta_ * n + mu_);
      // Kahan-compensated accumulation.
      double y = term - comp, t = sum + y;
      comp = (t - sum) - y;
      sum = t;
      if (std::abs(term) <= prec_.rel_tol * 1e-3 * std::abs(sum) || std::abs(term) < prec_.abs_tol) {
        if (++small >= 3) return sum;
      } else {
        small = 0;
      }
      zn *= z;
      if (!std::isfinite(zn)) break;
    }
    throw ConvergenceError("mittag_leffler: series did not converge", std::abs(zn));
  }

  /// Asymptotic expansion -sum_{n>=1} z^(-n)/Gamma(mu - beta n), plus the
  /// oscillating pole contribution when beta > 1. The coefficients change sign and pass
  /// through zeros, so truncation uses their envelope Gamma(beta n - mu + 1)/(pi x^n),
  /// which is smallest near beta n = x^(1/beta) + mu - 1 and is there about exp(-x^(1/beta)).
  double asymptotic(double z) const {
    if (!(z < 0.0)) throw DomainError("mittag_leffler: asymptotic regime needs z < 0");
    const double x = -z;
    // Integer orders with mu <= beta: every 1/Gamma(mu - beta n) vanishes and the expansion is exact.
    if (beta_ == std::round(beta_) && mu_ == std::round(mu_) && mu_ <= beta_) return pole_terms(x);
    const double lx = std::log(x);
    auto log_envelope = [&](int n) {
      const double a = beta_ * n - mu_ + 1.0;
      return a > 0.0 ? std::lgamma(a) - n * lx - std::log(std::numbers::pi) : -n * lx;
    };
    const double s = std::pow(x, 1.0 / beta_);
    const int n_opt = std::clamp(int((s + mu_ - 1.0) / beta_), 1, prec_.max_terms - 1);
    double sum = 0.0, zn = 1.0;
    const double zinv = 1.0 / z;
    int n = 1;
    for (; n <= n_opt; ++n) {
      zn *= zinv;
      sum += -zn * rgamma(mu_ - beta_ * n);
      if (std::exp(log_envelope(n + 1)) <= 1e-17 * std::abs(sum)) break;
    }
    const double remainder = std::exp(log_envelope(std::min(n, n_opt) + 1));
    if (remainder > 1e-12 * std::max(std::abs(sum), 1e-300))
      throw ConvergenceError("mittag_leffler: asymptotic expansion not accurate", remainder);
    return sum + pole_terms(x);
  }

  /// Exact real-line representation; valid for all z < 0 (beta != 1).
  double integral(double z) const {
    if (!(z < 0.0)) throw DomainError("mittag_leffler: integral regime needs z < 0");
    if (mu_ >= beta_ + 1.0) {
      // E_{b,m}(z) = (E_{b,m-b}(z) - 1/Gamma(m-b)) / z
      MittagLeffler lower(beta_, mu_ - beta_, prec_);
      return (lower.integral(z) - rgamma(mu_ - beta_)) / z;
    }
    if (beta_ == 1.0) throw DomainError("mittag_leffler: beta = 1 with non-integer mu outside series range");
    const double x = -z;
    const double pi = std::numbers::pi;
    const double s_mu = sinpi(mu_), s_bm = sinpi(beta_ - mu_), c_b = std::cos(pi * beta_);
    // Integrand without the r^(beta-mu) factor.
    auto core = [&](double r) {
      double rb = std::pow(r, beta_);
      double den = rb * rb + 2.0 * x * rb * c_b + x * x;
      return std::exp(-r) * (rb * s_mu - x * s_bm) / den;
    };
    const double p = beta_ - mu_;
    const double split = std::pow(x, 1.0 / beta_);
    quad::Options opt;
    opt.abs_tol = 1e-17;
    opt.rel_tol = 1e-14;
    double left = 0.0;
    if (p < 0.0) {
      left = quad::integrate_left_power(core, p, 0.0, split, opt).value;
    } else {
      left = quad::integrate([&](double r) { return std::pow(r, p) * core(r); }, 0.0, split, opt).value;
    }
    double right = quad::integrate([&](double r) { return std::pow(r, p) * core(r); }, split,
                                   split + 60.0, opt)
                       .value;
    return (left + right) / pi + pole_terms(x);
  }

 private:
  // Residues of t^(1-mu) e^t / beta at t = x^(1/beta) e^(+-i pi/beta), present for beta > 1.
  double pole_terms(double x) const {
    if (beta_ <= 1.0) return 0.0;
    const double rr = std::pow(x, 1.0 / beta_), th = std::numbers::pi / beta_;
    cplx t = std::polar(rr, th);
    return 2.0 / beta_ * std::real(std::pow(t, 1.0 - mu_) * std::exp(t));
  }

  double beta_, mu_;
  Precision prec_;
};

inline double mittag_leffler(double beta, double mu, double z, Precision prec = {}) {
  return MittagLeffler(beta, mu, prec)(z);
}

/// exp(x) K_nu(x) via trapezoid quadrature of int_0^inf exp(-x (cosh t - 1)) cosh(nu t) dt.
inline double bessel_k_scaled(double nu, double x) {
  if (!(x > 0.0)) throw DomainError("bessel_k: x must be positive");
  if (x < 1e-200) throw DomainError("bessel_k: x too close to 0 (K_nu diverges)");
  const double h = std::min(0.1, 0.5 / std::sqrt(x));
  double sum = 0.5;  // t = 0 term, cosh(0) = 1, weight 1/2
  for (int j = 1;; ++j) {
    double t = j * h;
    double term = std::exp(-x * 2.0 * std::sinh(0.5 * t) * std::sinh(0.5 * t)) * std::cosh(nu * t);
    sum += term;
    if (term < 1e-18 * sum) break;
    if (j > 100000) throw ConvergenceError("bessel_k: trapezoid did not terminate", term);
  }
  return h * sum;
}

/// Modified Bessel function of the second kind K_nu(x), x > 0.
inline double bessel_k(double nu, double x) {
  double v = bessel_k_scaled(nu, x);
  return x > 700.0 ? std::exp(std::log(v) - x) : v * std::exp(-x);
}

/// Airy function Ai(x) for x >= 0 via Ai(x) = (1/pi) sqrt(x/3) K_{1/3}(2 x^{3/2}/3).
inline double airy_ai(double x) {
  if (!(x >= 0.0)) throw DomainError("airy_ai: x must be >= 0");
  const double ai0 = 1.0 / (std::cbrt(9.0) * std::tgamma(2.0 / 3.0));
  const double aip0 = -1.0 / (std::cbrt(3.0) * std::tgamma(1.0 / 3.0));
  if (x < 1e-12) return ai0 + aip0 * x;
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  return std::sqrt(x / 3.0) / std::numbers::pi * bessel_k(1.0 / 3.0, zeta);
}

/// Ai'(x) for x >= 0 via Ai'(x) = -(x/(pi sqrt 3)) K_{2/3}(2 x^{3/2}/3).
inline double airy_ai_prime(double x) {
  if (!(x >= 0.0)) throw DomainError("airy_ai_prime: x must be >= 0");
  const double ai0 = 1.0 / (std::cbrt(9.0) * std::tgamma(2.0 / 3.0));
  const double aip0 = -1.0 / (std::cbrt(3.0) * std::tgamma(1.0 / 3.0));
  if (x < 1e-12) return aip0 + 0.5 * x * x * ai0;
  const double zeta = 2.0 / 3.0 * x * std::sqrt(x);
  return -x / (std::numbers::pi * std::sqrt(3.0)) * bessel_k(2.0 / 3.0, zeta);
}

}  // namespace fracwave
