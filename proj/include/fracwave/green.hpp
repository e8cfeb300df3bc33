#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "fracwave/errors.hpp"
#include "fracwave/kernels.hpp"
#include "fracwave/mellin.hpp"
#include "fracwave/quadrature.hpp"
#include "fracwave/specfun.hpp"
#include "fracwave/symbols.hpp"
#include "fracwave/wright.hpp"

namespace fracwave {

/// Node counts and tolerances for the Mellin and sphere quadratures.
struct QuadratureSpec {
  int mellin_nodes = 4000;         // adaptive Gauss-Kronrod panel budget per Mellin integral
  int sphere_nodes_theta = 256;    // Gauss nodes in u = khat.xhat over (0, 1]
  int sphere_nodes_phi = 128;      // nodes per ring in the azimuth
  double xi_cutoff = 1e-17;        // Mainardi weight threshold beyond which xi is truncated
  double rel_tol = 1e-12;          // Mellin relative tolerance
  double origin_radius = 1e-3;     // below this the 3D isotropic value comes from the origin series
  bool self_check = false;         // re-run sphere quadratures with doubled nodes
  double self_check_tol = 1e-6;

  void validate() const {
    if (mellin_nodes <= 0 || sphere_nodes_theta < 16 || sphere_nodes_phi < 8)
      throw DomainError("QuadratureSpec: node counts too small (theta >= 16, phi >= 8)");
    if (!(xi_cutoff > 0.0 && xi_cutoff <= 1e-14))
      throw DomainError("QuadratureSpec: xi_cutoff must lie in (0, 1e-14]");
    if (!(rel_tol > 0.0 && rel_tol < 1e-3)) throw DomainError("QuadratureSpec: rel_tol must lie in (0, 1e-3)");
    if (!(origin_radius >= 0.0)) throw DomainError("QuadratureSpec: origin_radius must be >= 0");
    if (!(self_check_tol > 0.0)) throw DomainError("QuadratureSpec: self_check_tol must be positive");
  }

  MellinOptions mellin() const { return {rel_tol, mellin_nodes, xi_cutoff}; }
};

namespace detail {

inline void check_green_params(const FracParams& p, double t, int dim) {
  p.validate();
  if (!(t > 0.0)) throw DomainError("green: t must be positive");
  if (dim == 3 && !(p.alpha > 1.0)) throw DomainError("green: 3D solutions need alpha > 1");
}

/// Profiles are immutable after construction; share them per (beta, alpha, which, options).
inline std::shared_ptr<const Profile1D> profile(double beta, double alpha, Which which, const MellinOptions& o) {
  static std::mutex mutex;
  static std::map<std::tuple<double, double, int, double, int, double>, std::shared_ptr<const Profile1D>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_tuple(beta, alpha, static_cast<int>(which), o.rel_tol, o.max_intervals, o.tail);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_shared<Profile1D>(beta, alpha, which, o)).first;
  return it->second;
}

// Space and amplitude scales for coefficient a = M/rho and time t:
//   G^(d)(t,x) = t^(-d gamma) a^(-d/alpha) G^(d)_unit(x / (t^gamma a^(1/alpha))), H with t^(1 - d gamma).
struct Scales {
  double length, amplitude;
};

inline Scales scales(const FracParams& p, double t, Which which, int dim, double a) {
  const double g = p.gamma();
  const double len = std::pow(t, g) * std::pow(a, 1.0 / p.alpha);
  double amp = std::pow(len, -dim);
  if (which == Which::H) amp *= t;
  return {len, amp};
}

}  // namespace detail

/// Fundamental solution in 1D, isotropic coefficient M/rho.
inline double green1d(const FracParams& params, double t, double x, Which which, const QuadratureSpec& q = {}) {
  detail::check_green_params(params, t, 1);
  q.validate();
  const auto sc = detail::scales(params, t, which, 1, params.mass_m / params.rho);
  const auto prof = detail::profile(params.beta, params.alpha, which, q.mellin());
  return sc.amplitude * prof->value(x / sc.length);
}

/// r^(3-alpha) G^(3)(t, r) and the exponent alpha - 3; value = coefficient * r^exponent.
struct FactoredValue {
  double coefficient;
  double exponent;
  double value(double r) const { return coefficient * std::pow(r, exponent); }
};

/// 3D isotropic solution in factored form, from the residue series at the origin.
inline FactoredValue green3d_isotropic_factored(const FracParams& params, double t, double r, Which which,
                                                const QuadratureSpec& q = {}) {
  detail::check_green_params(params, t, 3);
  q.validate();
  if (!(r >= 0.0)) throw DomainError("green3d_isotropic_factored: r must be >= 0");
  const auto sc = detail::scales(params, t, which, 3, params.mass_m / params.rho);
  const auto prof = detail::profile(params.beta, params.alpha, which, q.mellin());
  const double e = params.alpha - 3.0;
  return {sc.amplitude * std::pow(sc.length, -e) * prof->lift3_factored(r / sc.length), e};
}

/// Fundamental solution in 3D, isotropic coefficient M/rho, as a function of r = |x| > 0.
/// For r below origin_radius the value is rebuilt from the factored form.
inline double green3d_isotropic(const FracParams& params, double t, double r, Which which,
                                const QuadratureSpec& q = {}) {
  detail::check_green_params(params, t, 3);
  q.validate();
  if (r == 0.0) throw SingularityError("green3d_isotropic: singular at r = 0", params.alpha - 3.0);
  if (!(r > 0.0)) throw DomainError("green3d_isotropic: r must be positive");
  const auto sc = detail::scales(params, t, which, 3, params.mass_m / params.rho);
  const auto prof = detail::profile(params.beta, params.alpha, which, q.mellin());
  const double y = r / sc.length;
  if (y < q.origin_radius && !(prof->neutral()) && params.alpha < 2.0)
    return green3d_isotropic_factored(params, t, r, which, q).value(r);
  return sc.amplitude * prof->lift3(y);
}

/// Plane-wave profile second derivative split as phi''(y) = A |y|^(alpha-3) + R(y).
/// The sphere integral of the singular part is taken as a Hadamard finite part.
class PlaneWaveSplit {
 public:
  static constexpr double kSeriesRadius = 0.5;
  static constexpr double kTableEnd = 1e4;

  PlaneWaveSplit(double beta, double alpha, Which which, const MellinOptions& o) : alpha_(alpha) {
    if (!(alpha > 1.0 && alpha < 2.0)) throw DomainError("PlaneWaveSplit: alpha must lie in (1, 2)");
    if (beta == alpha) {
      auto s = which == Which::G ? split_x_d2(alpha) : split_y_d2(alpha);
      A_ = s.singular_coeff;
      neutral_ = std::move(s.regular);
      return;
    }
    prof_ = detail::profile(beta, alpha, which, o);
    const double b1 = prof_->series()->b1();
    A_ = b1 * (alpha - 1.0) * (alpha - 2.0);
    auto f = [this](double v) {
      const double y = std::exp(v);
      return prof_->d2(y) - A_ * std::pow(y, alpha_ - 3.0);
    };
    table_ = detail::ChebTable(f, std::log(kSeriesRadius), std::log(kTableEnd), 0.5, 1e-13, 1e-10, 16);
  }

  double singular_coeff() const { return A_; }

  double regular(double y) const {
    const double u = std::abs(y);
    if (neutral_) return neutral_(u);
    if (u == 0.0) return 0.0;  // a null set of the sphere rule
    if (u < kSeriesRadius) return prof_->series()->eval(u, 2, alpha_ - 1.0);
    if (u > kTableEnd) return -A_ * std::pow(u, alpha_ - 3.0);
    return table_(std::log(u));
  }

  static std::shared_ptr<const PlaneWaveSplit> cached(double beta, double alpha, Which which, const MellinOptions& o) {
    static std::mutex mutex;
    static std::map<std::tuple<double, double, int, double, int, double>, std::shared_ptr<const PlaneWaveSplit>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto key = std::make_tuple(beta, alpha, static_cast<int>(which), o.rel_tol, o.max_intervals, o.tail);
    auto it = cache.find(key);
    if (it == cache.end())
      it = cache.emplace(key, std::make_shared<PlaneWaveSplit>(beta, alpha, which, o)).first;
    return it->second;
  }

 private:
  double alpha_, A_ = 0.0;
  std::function<double(double)> neutral_;
  std::shared_ptr<const Profile1D> prof_;
  detail::ChebTable table_;
};

namespace detail {

/// One ring u = khat.xhat of the sphere rule: azimuthal nodes carry c = F^(-1/alpha) and
/// w F^(-3/alpha); h = int F^(-1) dphi.
struct Ring {
  double u, wu, h;
  std::vector<double> c, w3;
};

struct SphereRule {
  std::vector<Ring> rings;  // u in (0, 1)
  double finite_part;       // 2 int_0^1 u^(a-3) (h(u) - h(0)) du - 2 h(0)/(2 - a)
};

// Azimuthal rule at height u. F is smooth between the kinks where khat.y = 0 for an atom y,
// so Gauss panels on those arcs converge spectrally; without kinks the periodic trapezoid does.
inline void azimuth_rule(const std::vector<Vec3>& atoms_local, double u, int n_phi, std::vector<double>& phi,
                         std::vector<double>& w) {
  const double pi2 = 2.0 * std::numbers::pi;
  const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
  std::vector<double> kinks;
  for (const auto& y : atoms_local) {
    const double rho = std::hypot(y.x(), y.y());
    if (rho < 1e-14 || s == 0.0) continue;
    const double cs = -u * y.z() / (s * rho);
    if (std::abs(cs) >= 1.0) continue;
    const double base = std::atan2(y.y(), y.x()), ang = std::acos(cs);
    for (double k : {base + ang, base - ang}) kinks.push_back(k - pi2 * std::floor(k / pi2));
  }
  phi.clear();
  w.clear();
  std::sort(kinks.begin(), kinks.end());
  kinks.erase(std::unique(kinks.begin(), kinks.end(), [](double a, double b) { return b - a < 1e-13; }),
              kinks.end());
  if (kinks.empty()) {
    for (int j = 0; j < n_phi; ++j) {
      phi.push_back(pi2 * j / n_phi);
      w.push_back(pi2 / n_phi);
    }
    return;
  }
  for (std::size_t i = 0; i < kinks.size(); ++i) {
    const double a = kinks[i];
    const double b = i + 1 < kinks.size() ? kinks[i + 1] : kinks[0] + pi2;
    const int n = std::max(4, static_cast<int>(std::ceil(n_phi * (b - a) / pi2)));
    const auto& gl = quad::gauss_legendre(n);
    for (int j = 0; j < n; ++j) {
      phi.push_back(0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[j]);
      w.push_back(0.5 * (b - a) * gl.weights[j]);
    }
  }
}

// Orthonormal frame with e3 = xhat and e1 along the first atom's component orthogonal to
// xhat, so the rule rotates with the measure.
inline Mat3 sphere_frame(const SphericalMeasure& mu, const Vec3& xhat) {
  Vec3 e1 = Vec3::Zero();
  for (const auto& a : mu.atoms) {
    Vec3 p = a.dir - a.dir.dot(xhat) * xhat;
    if (p.norm() > 1e-8) {
      e1 = p.normalized();
      break;
    }
  }
  if (e1.isZero()) {
    int k = 0;
    xhat.cwiseAbs().minCoeff(&k);
    Vec3 axis = Vec3::Unit(k);
    e1 = (axis - axis.dot(xhat) * xhat).normalized();
  }
  Mat3 frame;
  frame.col(0) = e1;
  frame.col(1) = xhat.cross(e1);
  frame.col(2) = xhat;
  return frame;
}

inline SphereRule build_sphere_rule(const SphericalMeasure& mu, double alpha, double rho, const Vec3& xhat,
                                    int n_theta, int n_phi) {
  const Mat3 frame = sphere_frame(mu, xhat);
  std::vector<Vec3> local;
  for (const auto& a : mu.atoms) local.push_back(frame.transpose() * a.dir);
  auto ring_at = [&](double u, double wu) {
    Ring r{u, wu, 0.0, {}, {}};
    std::vector<double> phi, w;
    azimuth_rule(local, u, n_phi, phi, w);
    const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
    for (std::size_t j = 0; j < phi.size(); ++j) {
      Vec3 k = frame * Vec3(s * std::cos(phi[j]), s * std::sin(phi[j]), u);
      const double F = f_direction(mu, alpha, k) / rho;
      r.h += w[j] / F;
      r.c.push_back(std::pow(F, -1.0 / alpha));
      r.w3.push_back(w[j] * std::pow(F, -3.0 / alpha));
    }
    return r;
  };
  // u in (0, 1]: uniform Gauss panels, the first one graded geometrically toward u = 0,
  // the innermost with u = u0 w^q absorbing the y^(2a-3) behavior of the remainder.
  constexpr int kOrder = 8, kLevels = 12;
  const int panels = std::max(2, n_theta / kOrder);
  const auto& gl = quad::gauss_legendre(kOrder);
  SphereRule rule;
  auto add_panel = [&](double a, double b) {
    for (int j = 0; j < kOrder; ++j)
      rule.rings.push_back(ring_at(0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[j], 0.5 * (b - a) * gl.weights[j]));
  };
  const double u1 = 1.0 / panels;
  const double u0 = u1 * std::ldexp(1.0, -kLevels);
  const double q = alpha < 1.5 ? 1.0 / (2.0 * alpha - 2.0) : 1.0;
  for (int j = 0; j < kOrder; ++j) {
    const double wv = 0.5 + 0.5 * gl.nodes[j];
    rule.rings.push_back(ring_at(u0 * std::pow(wv, q), 0.5 * gl.weights[j] * u0 * q * std::pow(wv, q - 1.0)));
  }
  for (int k = kLevels; k > 0; --k) add_panel(u1 * std::ldexp(1.0, -k), u1 * std::ldexp(1.0, 1 - k));
  for (int i = 1; i < panels; ++i) add_panel(static_cast<double>(i) / panels, static_cast<double>(i + 1) / panels);
  const double h0 = ring_at(0.0, 0.0).h;
  double fp = 0.0;
  for (const auto& r : rule.rings) fp += r.wu * std::pow(r.u, alpha - 3.0) * (r.h - h0);
  rule.finite_part = 2.0 * fp - 2.0 * h0 / (2.0 - alpha);
  return rule;
}

// -(1/(8 pi^2)) FP int_S F^(-3/a) phi''(r u F^(-1/a)) dS at unit time.
inline double sphere_superposition(const SphereRule& rule, const PlaneWaveSplit& split, double alpha, double r) {
  double reg = 0.0;
  for (const auto& ring : rule.rings) {
    double acc = 0.0;
    for (std::size_t j = 0; j < ring.c.size(); ++j) acc += ring.w3[j] * split.regular(r * ring.u * ring.c[j]);
    reg += ring.wu * acc;
  }
  const double total = split.singular_coeff() * std::pow(r, alpha - 3.0) * rule.finite_part + 2.0 * reg;
  return -total / (8.0 * std::numbers::pi * std::numbers::pi);
}

// Unit-time anisotropic solution for coefficient F/rho; beta = alpha selects the neutral kernels.
inline double aniso_unit(const SphericalMeasure& mu, double beta, double alpha, double rho, const Vec3& y,
                         Which which, const QuadratureSpec& q) {
  const double r = y.norm();
  if (r == 0.0) throw SingularityError("green3d_aniso: singular at x = 0", alpha - 3.0);
  const auto split = PlaneWaveSplit::cached(beta, alpha, which, q.mellin());
  const Vec3 xhat = y / r;
  auto rule = build_sphere_rule(mu, alpha, rho, xhat, q.sphere_nodes_theta, q.sphere_nodes_phi);
  const double v = sphere_superposition(rule, *split, alpha, r);
  if (!q.self_check) return v;
  auto fine = build_sphere_rule(mu, alpha, rho, xhat, 2 * q.sphere_nodes_theta, 2 * q.sphere_nodes_phi);
  const double v2 = sphere_superposition(fine, *split, alpha, r);
  if (std::abs(v2 - v) > q.self_check_tol * std::max(std::abs(v2), 1e-8))
    throw ConvergenceError("sphere quadrature self-check: doubling the nodes moved the result", std::abs(v2 - v));
  return v2;
}

inline void check_aniso(const SphericalMeasure& mu, double t) {
  mu.validate();
  if (!(t > 0.0)) throw DomainError("green3d_aniso: t must be positive");
  // F(khat) = sum w |khat.y|^a + M vanishes exactly on directions orthogonal to every atom,
  // which exist iff M = 0 and the atoms do not span R^3. Sphere nodes would straddle them.
  if (mu.uniform_mass == 0.0) {
    Eigen::SelfAdjointEigenSolver<Mat3> es(ellipsoidal_matrix(mu));
    if (es.eigenvalues()[0] <= 1e-12 * es.eigenvalues()[2]) f_direction(mu, 2.0, es.eigenvectors().col(0));
  }
}

}  // namespace detail

/// alpha = 2: Qhat = -k.A k with A = ellipsoidal_matrix / rho, so
/// G(t,x) = det(A)^(-1/2) G_iso(t, |A^(-1/2) x|) with the unit-coefficient isotropic solution.
inline double green3d_ellipsoidal(const SphericalMeasure& mu, const FracParams& params, double t, const Vec3& x,
                                  Which which, const QuadratureSpec& q = {}) {
  detail::check_aniso(mu, t);
  if (params.alpha != 2.0) throw DomainError("green3d_ellipsoidal: alpha must be 2");
  if (params.beta == 2.0) throw DomainError("green3d_ellipsoidal: beta = alpha = 2 gives a distribution");
  const Mat3 A = ellipsoidal_matrix(mu) / params.rho;
  Eigen::SelfAdjointEigenSolver<Mat3> es(A);
  if (es.eigenvalues().minCoeff() <= 0.0) throw DegeneracyError("green3d_ellipsoidal: symbol matrix not positive");
  const double r = (es.operatorInverseSqrt() * x).norm();
  FracParams unit = params;
  unit.rho = 1.0;
  unit.mass_m = 1.0;
  return green3d_isotropic(unit, t, r, which, q) / std::sqrt(A.determinant());
}

/// Neutral case beta = alpha: plane-wave superposition of X_alpha (G) or Y_alpha (H) over the
/// unit sphere, coefficient F(khat) of the measure, with the Hadamard finite part on k.x = 0.
inline double green3d_neutral_aniso(const SphericalMeasure& mu, double alpha, double t, const Vec3& x, Which which,
                                    const QuadratureSpec& q = {}) {
  detail::check_aniso(mu, t);
  q.validate();
  if (alpha == 2.0) throw DomainError("green3d_neutral_aniso: alpha = 2 is the elastic wave; use the mollified form");
  if (!(alpha > 1.0 && alpha < 2.0)) throw DomainError("green3d_neutral_aniso: alpha must lie in (1, 2)");
  // G(t,x) = t^-3 G(1, x/t), H(t,x) = t^-2 H(1, x/t).
  const double amp = which == Which::G ? std::pow(t, -3.0) : std::pow(t, -2.0);
  return amp * detail::aniso_unit(mu, alpha, alpha, 1.0, x / t, which, q);
}

/// General anisotropic solution, 0 < beta <= alpha, 1 < alpha <= 2. The measure (not
/// params.mass_m) sets the coefficient, divided by params.rho. gamma < 1 superposes the
/// Mellin-convolved 1D solution, which equals the outer Mellin integral over the neutral one.
inline double green3d_aniso(const SphericalMeasure& mu, const FracParams& params, double t, const Vec3& x, Which which,
                            const QuadratureSpec& q = {}) {
  detail::check_aniso(mu, t);
  detail::check_green_params(params, t, 3);
  q.validate();
  if (params.alpha == 2.0) return green3d_ellipsoidal(mu, params, t, x, which, q);
  const double g = params.gamma();
  const double len = std::pow(t, g);
  double amp = std::pow(len, -3.0);
  if (which == Which::H) amp *= t;
  return amp * detail::aniso_unit(mu, params.beta, params.alpha, params.rho, x / len, which, q);
}

/// Gaussian-mollified alpha = 2 solution: the mollifier has Fourier multiplier
/// exp(-eps^2 k.A k / 2), A = ellipsoidal_matrix / rho, i.e. an isotropic Gaussian of
/// width eps in the stretched variable z = A^(-1/2) x.
/// beta = 2 uses the classical shell formulas; beta < 2 integrates the radial convolution.
inline double green3d_mollified_alpha2(const SphericalMeasure& mu, const FracParams& params, double t, const Vec3& x,
                                       Which which, double eps, const QuadratureSpec& q = {}) {
  detail::check_aniso(mu, t);
  params.validate();
  if (params.alpha != 2.0) throw DomainError("green3d_mollified_alpha2: alpha must be 2");
  if (!(eps > 0.0)) throw DomainError("green3d_mollified_alpha2: eps must be positive");
  const Mat3 A = ellipsoidal_matrix(mu) / params.rho;
  Eigen::SelfAdjointEigenSolver<Mat3> es(A);
  if (es.eigenvalues().minCoeff() <= 0.0) throw DegeneracyError("green3d_mollified_alpha2: symbol matrix not positive");
  const double rho_s = (es.operatorInverseSqrt() * x).norm();
  const double det = std::sqrt(A.determinant());
  const double pi = std::numbers::pi;
  auto g1 = [eps, pi](double s) { return std::exp(-0.5 * s * s / (eps * eps)) / (std::sqrt(2.0 * pi) * eps); };
  if (rho_s == 0.0) throw DomainError("green3d_mollified_alpha2: evaluate at x != 0");
  if (params.beta == 2.0) {
    // H = delta(r - t)/(4 pi t), G = dH/dt.
    if (which == Which::H) return (g1(rho_s - t) - g1(rho_s + t)) / (4.0 * pi * rho_s) / det;
    const double e2 = eps * eps;
    return ((rho_s - t) * g1(rho_s - t) + (rho_s + t) * g1(rho_s + t)) / (4.0 * pi * rho_s * e2) / det;
  }
  // (1/rho) int_0^inf s f(s) [g(rho - s) - g(rho + s)] ds with f the isotropic unit solution.
  FracParams unit = params;
  unit.rho = 1.0;
  unit.mass_m = 1.0;
  auto f = [&](double s) {
    if (s == 0.0) return 0.0;
    return s * green3d_isotropic(unit, t, s, which, q) * (g1(rho_s - s) - g1(rho_s + s));
  };
  quad::Options o;
  o.abs_tol = 1e-13;
  o.rel_tol = 1e-10;
  // Outside rho +- 12 eps the Gaussian factor is below 1e-31.
  const double total = quad::integrate(f, std::max(0.0, rho_s - 12.0 * eps), rho_s + 12.0 * eps, o).value;
  return total / rho_s / det;
}

/// Closed representation of G^(1) at t = 1 for gamma = 2/3, unit coefficient, through
/// M_{2/3} in Bessel form: U(y) = c int_0^inf zeta^(-1/3) Z(zeta) X_a(2^(1/3) y / (3 zeta^(1/3))) dzeta,
/// Z = (K_{1/3} + K_{2/3}) e^(-zeta), c = 1/(2^(2/3) sqrt(3) pi).
inline double green_u23(double alpha, double r) {
  if (!(alpha > 1.0 && alpha < 2.0)) throw DomainError("green_u23: alpha must lie in (1, 2)");
  const double y = std::abs(r);
  const double c = 1.0 / (std::cbrt(4.0) * std::sqrt(3.0) * std::numbers::pi);
  const double k = std::cbrt(2.0) * y / 3.0;
  auto z = [](double zeta) {
    return (bessel_k_scaled(1.0 / 3.0, zeta) + bessel_k_scaled(2.0 / 3.0, zeta)) * std::exp(-2.0 * zeta);
  };
  quad::Options o;
  o.abs_tol = 1e-15;
  o.rel_tol = 1e-12;
  // Near 0, Z ~ zeta^(-2/3): zeta^(-1/3) Z ~ zeta^(-1); in w = zeta^(1/3) (zeta = w^3):
  // dzeta = 3 w^2 dw, so the integrand is 3 w Z(w^3) X(k/w), bounded.
  auto g = [&](double w) {
    if (w == 0.0) return 0.0;
    const double zeta = w * w * w;
    return 3.0 * w * z(zeta) * x_alpha(alpha, k / w);
  };
  const double head = quad::integrate(g, 0.0, 1.0, o).value;
  auto tail = [&](double zeta) { return std::pow(zeta, -1.0 / 3.0) * z(zeta) * x_alpha(alpha, k / std::cbrt(zeta)); };
  const double rest = quad::integrate_to_infinity(tail, 1.0, o).value;
  return c * (head + rest);
}

/// max over the grid of |E_beta(-k^a) - int M_gamma E_alpha(-(k xi)^a) dxi| and of the
/// E_{beta,2} / N_gamma analogue. Both sides use independent code paths.
struct IdentityResidual {
  double first, second;
};

inline IdentityResidual identity_check(double beta, double alpha, const std::vector<double>& kappa,
                                       const QuadratureSpec& q = {}) {
  if (!(alpha > 0.0 && alpha <= 2.0 && beta > 0.0 && beta <= alpha))
    throw DomainError("identity_check: need 0 < beta <= alpha <= 2");
  IdentityResidual res{0.0, 0.0};
  const double g = beta / alpha;
  for (double k : kappa) {
    if (!(k >= 0.0)) throw DomainError("identity_check: kappa must be >= 0");
    const double ka = std::pow(k, alpha);
    const double lhs1 = mittag_leffler(beta, 1.0, -ka), lhs2 = mittag_leffler(beta, 2.0, -ka);
    double rhs1 = 0.0, rhs2 = 0.0;
    if (g == 1.0) {
      rhs1 = mittag_leffler(alpha, 1.0, -ka);
      rhs2 = mittag_leffler(alpha, 2.0, -ka);
    } else {
      for (Which w : {Which::G, Which::H}) {
        const auto& W = ScalingWeight::cached(g, w, q.xi_cutoff);
        auto f = [&](double s) {
          const double xi = std::exp(s);
          const double ws = W(s);
          if (ws == 0.0) return 0.0;
          return ws * mittag_leffler(alpha, 1.0, -std::pow(k * xi, alpha)) * xi;
        };
        quad::Options o;
        o.abs_tol = 1e-13;  // both sides are O(1); this sits above the E_alpha roundoff floor
        o.rel_tol = 1e-12;
        o.max_intervals = q.mellin_nodes;
        const double v = quad::integrate(f, -40.0, 0.0, o).value + quad::integrate(f, 0.0, W.s_max(), o).value;
        (w == Which::G ? rhs1 : rhs2) = v;
      }
    }
    res.first = std::max(res.first, std::abs(lhs1 - rhs1));
    res.second = std::max(res.second, std::abs(lhs2 - rhs2));
  }
  return res;
}

/// A batch of evaluation points. 1D points use x[0].
struct SolutionRequest {
  FracParams params;
  std::optional<SphericalMeasure> measure;  // empty: isotropic with params.mass_m
  int dimension = 1;
  Which which = Which::G;
  double t = 1.0;
  std::vector<Vec3> points;

  void validate() const {
    params.validate();
    if (dimension != 1 && dimension != 3) throw DomainError("SolutionRequest: dimension must be 1 or 3");
    if (!(t > 0.0)) throw DomainError("SolutionRequest: t must be positive");
    if (measure && dimension != 3) throw DomainError("SolutionRequest: a measure needs dimension 3");
  }
};

/// Evaluate a request point by point, in order.
inline std::vector<double> evaluate(const SolutionRequest& req, const QuadratureSpec& q = {}) {
  req.validate();
  std::vector<double> out;
  out.reserve(req.points.size());
  for (const auto& p : req.points) {
    if (req.dimension == 1) out.push_back(green1d(req.params, req.t, p.x(), req.which, q));
    else if (req.measure) out.push_back(green3d_aniso(*req.measure, req.params, req.t, p, req.which, q));
    else out.push_back(green3d_isotropic(req.params, req.t, p.norm(), req.which, q));
  }
  return out;
}

}  // namespace fracwave
