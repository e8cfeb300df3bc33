#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/interpolators/barycentric_rational.hpp>

#include "fracwave/errors.hpp"
#include "fracwave/quadrature.hpp"

namespace fracwave {

enum class KernelKind { X, Y, X3, Z, G, H };

inline std::string to_string(KernelKind k) {
  switch (k) {
    case KernelKind::X: return "X";
    case KernelKind::Y: return "Y";
    case KernelKind::X3: return "X3";
    case KernelKind::Z: return "Z";
    case KernelKind::G: return "G";
    case KernelKind::H: return "H";
  }
  return "?";
}

namespace detail {

inline void check_alpha_open(double alpha, const char* who) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw DomainError(std::string(who) + ": alpha must lie in (0, 2); alpha = 2 is the delta-pair case");
}

// For y > 0 write X = (s/pi) [y^(a-1) - P(y)], P = N/D with
//   D = 1 + 2c y^a + y^(2a),  N = 2c y^(2a-1) + y^(3a-1).
// P carries everything beyond the leading power, so no cancellation near 0.
struct XParts {
  double a, s, c;
  double D, D1, D2, N, N1, N2;

  XParts(double alpha, double y) : a(alpha) {
    s = std::sin(alpha * std::numbers::pi / 2);
    c = std::cos(alpha * std::numbers::pi / 2);
    const double ya = std::pow(y, a);
    const double y2a = ya * ya;
    D = 1.0 + 2.0 * c * ya + y2a;
    D1 = (2.0 * c * a * ya + 2.0 * a * y2a) / y;
    D2 = (2.0 * c * a * (a - 1.0) * ya + 2.0 * a * (2.0 * a - 1.0) * y2a) / (y * y);
    N = (2.0 * c * y2a + y2a * ya) / y;
    N1 = (2.0 * c * (2.0 * a - 1.0) * y2a + (3.0 * a - 1.0) * y2a * ya) / (y * y);
    N2 = (2.0 * c * (2.0 * a - 1.0) * (2.0 * a - 2.0) * y2a +
          (3.0 * a - 1.0) * (3.0 * a - 2.0) * y2a * ya) / (y * y * y);
  }
  double P() const { return N / D; }
  double P1() const { return N1 / D - N * D1 / (D * D); }
  double P2() const {
    return N2 / D - 2.0 * N1 * D1 / (D * D) - N * D2 / (D * D) + 2.0 * N * D1 * D1 / (D * D * D);
  }
};

}  // namespace detail

/// X_alpha(y) = (1/pi) |y|^(a-1) sin(a pi/2) / (1 + 2|y|^a cos(a pi/2) + |y|^(2a)), 0 < a < 2.
inline double x_alpha(double alpha, double y) {
  detail::check_alpha_open(alpha, "x_alpha");
  const double u = std::abs(y);
  if (std::isinf(u)) return 0.0;
  if (u > 1.0) {
    const double v = 1.0 / u;  // X(u) = X(1/u)/u^2
    return v * v * x_alpha(alpha, v);
  }
  if (u == 0.0) {
    if (alpha < 1.0) return std::numeric_limits<double>::infinity();
    if (alpha > 1.0) return 0.0;
  }
  // 1 + 2c u^a + u^2a = (1 - u^a)^2 + 4 u^a h^2 with h = cos(a pi/4) = sin((2-a) pi/4);
  // this form keeps full relative accuracy at the near-delta peak when a -> 2.
  const double e = 2.0 - alpha;
  const double s = std::sin(e * std::numbers::pi / 2), h = std::sin(e * std::numbers::pi / 4);
  const double la = alpha * std::log(u);
  const double ua = std::exp(la), gap = -std::expm1(la);
  return s / std::numbers::pi * std::pow(u, alpha - 1.0) / (gap * gap + 4.0 * ua * h * h);
}

namespace detail {

// X, X', X'' at u > 0. For u > 1 the inversion X(u) = v^2 X(v), v = 1/u, keeps
// the algebraic tail free of cancellation.
struct XDerivs {
  double x, d1, d2;
};

inline XDerivs x_derivs(double alpha, double u) {
  if (u > 1.0) {
    const double v = 1.0 / u;
    XDerivs w = x_derivs(alpha, v);
    const double v2 = v * v, v3 = v2 * v, v4 = v2 * v2;
    return {v2 * w.x, -2.0 * v3 * w.x - v4 * w.d1, v4 * (6.0 * w.x + 6.0 * v * w.d1 + v2 * w.d2)};
  }
  XParts p(alpha, u);
  const double k = p.s / std::numbers::pi;
  const double lead = std::pow(u, alpha - 1.0);
  return {k * (lead - p.P()), k * ((alpha - 1.0) * lead / u - p.P1()),
          k * ((alpha - 1.0) * (alpha - 2.0) * lead / (u * u) - p.P2())};
}

}  // namespace detail

/// dX_alpha/dy (odd in y).
inline double x_alpha_d1(double alpha, double y) {
  detail::check_alpha_open(alpha, "x_alpha_d1");
  if (y == 0.0) {
    if (alpha == 1.0) return 0.0;
    throw SingularityError("x_alpha_d1: derivative singular at y = 0", alpha - 2.0);
  }
  const double u = std::abs(y);
  if (std::isinf(u)) return 0.0;
  double d = detail::x_derivs(alpha, u).d1;
  return y > 0.0 ? d : -d;
}

/// d^2 X_alpha/dy^2 (even in y).
inline double x_alpha_d2(double alpha, double y) {
  detail::check_alpha_open(alpha, "x_alpha_d2");
  if (y == 0.0) {
    if (alpha == 1.0) return -2.0 / std::numbers::pi;
    throw SingularityError("x_alpha_d2: second derivative singular at y = 0", alpha - 3.0);
  }
  const double u = std::abs(y);
  if (std::isinf(u)) return 0.0;
  return detail::x_derivs(alpha, u).d2;
}

/// Y_alpha(y) = int_{|y|}^inf X_alpha(z)/z dz: the spatial kernel of the second
/// fundamental solution in the neutral case. Unit mass, nonnegative.
inline double y_alpha(double alpha, double y) {
  detail::check_alpha_open(alpha, "y_alpha");
  const double u = std::abs(y);
  const double s = std::sin(alpha * std::numbers::pi / 2), c = std::cos(alpha * std::numbers::pi / 2);
  const double pref = s / std::numbers::pi;
  quad::Options opt;
  opt.abs_tol = 1e-17;
  opt.rel_tol = 1e-14;
  // Tail beyond max(u,1) in the variable w = 1/z: integrand w^a / D(w), w in (0, 1/max(u,1)].
  auto tail = [&](double wmax) {
    auto g = [&](double w) {
      double wa = std::pow(w, alpha);
      return 1.0 / (1.0 + 2.0 * c * wa + wa * wa);
    };
    return quad::integrate_left_power(g, alpha, 0.0, wmax, opt).value;
  };
  if (u >= 1.0) return pref * tail(1.0 / u);
  if (u == 0.0) {
    if (alpha <= 1.0) throw SingularityError("y_alpha: divergent at y = 0 for alpha <= 1", 0.0);
    auto g = [&](double z) {
      double za = std::pow(z, alpha);
      return 1.0 / (1.0 + 2.0 * c * za + za * za);
    };
    return pref * (quad::integrate_left_power(g, alpha - 2.0, 0.0, 1.0, opt).value + tail(1.0));
  }
  // [u, 1] in v = ln z: integrand z^(a-1)/D(z), smooth in v.
  auto h = [&](double v) {
    double z = std::exp(v), za = std::pow(z, alpha);
    return std::pow(z, alpha - 1.0) / (1.0 + 2.0 * c * za + za * za);
  };
  return pref * (quad::integrate(h, std::log(u), 0.0, opt).value + tail(1.0));
}

/// dY_alpha/dy = -X_alpha(y)/y.
inline double y_alpha_d1(double alpha, double y) {
  if (y == 0.0) throw SingularityError("y_alpha_d1: singular at y = 0", alpha - 2.0);
  return -x_alpha(alpha, y) / y;
}

/// d^2 Y_alpha/dy^2 = -X'(y)/y + X(y)/y^2.
inline double y_alpha_d2(double alpha, double y) {
  if (y == 0.0) throw SingularityError("y_alpha_d2: singular at y = 0", alpha - 3.0);
  return -x_alpha_d1(alpha, y) / y + x_alpha(alpha, y) / (y * y);
}

/// X^(3)_alpha(y) = -X'_alpha(y)/(2 pi y), the radial lift of X_alpha, y > 0.
inline double x3_alpha(double alpha, double y) {
  if (!(y > 0.0)) throw DomainError("x3_alpha: y must be positive");
  return -x_alpha_d1(alpha, y) / (2.0 * std::numbers::pi * y);
}

/// Z_alpha(y) = y^(3-a) X^(3)_alpha(y), regular at 0.
inline double z_alpha(double alpha, double y) {
  detail::check_alpha_open(alpha, "z_alpha");
  if (y < 0.0) throw DomainError("z_alpha: y must be >= 0");
  const double s = std::sin(alpha * std::numbers::pi / 2);
  const double k = -s / (2.0 * std::numbers::pi * std::numbers::pi);
  if (y == 0.0) return k * (alpha - 1.0);
  if (std::isinf(y)) return 0.0;
  if (y > 1.0) return -std::pow(y, 2.0 - alpha) * detail::x_derivs(alpha, y).d1 / (2.0 * std::numbers::pi);
  detail::XParts p(alpha, y);
  return k * ((alpha - 1.0) - std::pow(y, 2.0 - alpha) * p.P1());
}

/// Radial lift of the neutral second kernel: -Y'(y)/(2 pi y) = X(y)/(2 pi y^2).
inline double y3_alpha(double alpha, double y) {
  if (!(y > 0.0)) throw DomainError("y3_alpha: y must be positive");
  return x_alpha(alpha, y) / (2.0 * std::numbers::pi * y * y);
}

/// Second derivative of a plane-wave profile split as K''(y) = A |y|^(a-3) + R(y),
/// with R locally integrable at 0. Used by the sphere quadrature of the neutral case.
struct SplitSecondDerivative {
  double singular_coeff;             // A
  std::function<double(double)> regular;  // R(y), even
};

/// Split of X''_alpha: A = (s/pi)(a-1)(a-2), R = -(s/pi) P''.
inline SplitSecondDerivative split_x_d2(double alpha) {
  detail::check_alpha_open(alpha, "split_x_d2");
  const double s = std::sin(alpha * std::numbers::pi / 2) / std::numbers::pi;
  return {s * (alpha - 1.0) * (alpha - 2.0), [alpha, s](double y) {
            double u = std::abs(y);
            if (u == 0.0) return 0.0;
            return -s * detail::XParts(alpha, u).P2();
          }};
}

/// Split of Y''_alpha: A = (s/pi)(2-a), R = (s/pi)(P'/y - P/y^2).
inline SplitSecondDerivative split_y_d2(double alpha) {
  detail::check_alpha_open(alpha, "split_y_d2");
  const double s = std::sin(alpha * std::numbers::pi / 2) / std::numbers::pi;
  return {s * (2.0 - alpha), [alpha, s](double y) {
            double u = std::abs(y);
            if (u == 0.0) return 0.0;
            detail::XParts p(alpha, u);
            return s * (p.P1() / u - p.P() / (u * u));
          }};
}

/// Tabulated 1D profile.
struct KernelProfile {
  double alpha = 0.0;
  std::vector<double> ys;
  std::vector<double> values;
  KernelKind kind = KernelKind::X;

  void validate() const {
    if (ys.size() != values.size()) throw DomainError("KernelProfile: ys and values differ in length");
    for (std::size_t i = 1; i < ys.size(); ++i)
      if (!(ys[i] > ys[i - 1])) throw DomainError("KernelProfile: ys must be strictly increasing");
    for (std::size_t i = 1; i + 1 < values.size(); ++i)
      if (!std::isfinite(values[i])) throw DomainError("KernelProfile: non-finite interior value");
    if (kind == KernelKind::X)
      for (double v : values)
        if (v < 0.0) throw DomainError("KernelProfile: X profile must be nonnegative");
  }
};

/// Tabulate a kernel of the given kind (X, Y, X3, Z) on a grid.
inline KernelProfile make_profile(KernelKind kind, double alpha, const std::vector<double>& ys) {
  KernelProfile p{alpha, ys, {}, kind};
  p.values.reserve(ys.size());
  for (double y : ys) {
    switch (kind) {
      case KernelKind::X: p.values.push_back(x_alpha(alpha, y)); break;
      case KernelKind::Y: p.values.push_back(y_alpha(alpha, y)); break;
      case KernelKind::X3: p.values.push_back(x3_alpha(alpha, y)); break;
      case KernelKind::Z: p.values.push_back(z_alpha(alpha, y)); break;
      default: throw DomainError("make_profile: G and H profiles come from the green module");
    }
  }
  p.validate();
  return p;
}

/// F(r) = -f'(r)/(2 pi r) from an analytic derivative f'.
inline double radial_lift(const std::function<double(double)>& f_prime, double r) {
  if (!(r > 0.0)) throw DomainError("radial_lift: r must be positive (use radial_lift_origin)");
  return -f_prime(r) / (2.0 * std::numbers::pi * r);
}

/// Limit of the radial lift at r = 0: -f''(0)/(2 pi).
inline double radial_lift_origin(double f_second_at_zero) {
  return -f_second_at_zero / (2.0 * std::numbers::pi);
}

/// Radial lift of a tabulated profile; the derivative comes from a barycentric
/// rational interpolant through the samples.
inline double radial_lift(const KernelProfile& f, double r) {
  f.validate();
  if (f.ys.size() < 4) throw DomainError("radial_lift: profile needs at least 4 samples");
  if (!(r > f.ys.front() && r < f.ys.back())) throw DomainError("radial_lift: r outside profile range");
  boost::math::barycentric_rational<double> interp(f.ys.data(), f.values.data(),
                                                                  f.ys.size(), 5);
  return -interp.prime(r) / (2.0 * std::numbers::pi * r);
}

}  // namespace fracwave
