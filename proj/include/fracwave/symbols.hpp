#pragma once

#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "fracwave/errors.hpp"
#include "fracwave/specfun.hpp"

namespace fracwave {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct Atom {
  Vec3 dir;
  double weight;
};

/// Measure on the unit sphere: point atoms plus a uniform part whose density is
/// M (alpha+1)/(4 pi), so that the uniform part contributes exactly -M|k|^alpha.
struct SphericalMeasure {
  std::vector<Atom> atoms;
  double uniform_mass = 0.0;

  void validate() const {
    if (!(uniform_mass >= 0.0)) throw DomainError("SphericalMeasure: uniform_mass must be >= 0");
    for (const auto& a : atoms) {
      if (std::abs(a.dir.norm() - 1.0) > 1e-12) throw DomainError("SphericalMeasure: atom direction not unit");
      if (!(a.weight > 0.0)) throw DomainError("SphericalMeasure: atom weight must be positive");
    }
    if (atoms.empty() && uniform_mass == 0.0) throw DomainError("SphericalMeasure: empty measure");
  }

  static SphericalMeasure uniform(double m) {
    SphericalMeasure mu;
    mu.uniform_mass = m;
    mu.validate();
    return mu;
  }

  /// Parse {"uniform_mass": M, "atoms": [{"dir": [x,y,z], "weight": w}, ...]}.
  static SphericalMeasure from_json(const nlohmann::json& j) {
    SphericalMeasure mu;
    try {
      mu.uniform_mass = j.value("uniform_mass", 0.0);
      if (j.contains("atoms")) {
        for (const auto& a : j.at("atoms")) {
          auto d = a.at("dir");
          if (d.size() != 3) throw IoError("measure: atom dir must have 3 components");
          Vec3 v(d[0].get<double>(), d[1].get<double>(), d[2].get<double>());
          if (std::abs(v.norm() - 1.0) > 1e-9) throw IoError("measure: atom dir is not a unit vector");
          mu.atoms.push_back({v.normalized(), a.at("weight").get<double>()});
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw IoError(std::string("measure: malformed JSON: ") + e.what());
    }
    try {
      mu.validate();
    } catch (const DomainError& e) {
      throw IoError(std::string("measure: ") + e.what());
    }
    return mu;
  }

  static SphericalMeasure load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("measure: cannot open " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw IoError(std::string("measure: malformed JSON: ") + e.what());
    }
    return from_json(j);
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["uniform_mass"] = uniform_mass;
    j["atoms"] = nlohmann::json::array();
    for (const auto& a : atoms) j["atoms"].push_back({{"dir", {a.dir[0], a.dir[1], a.dir[2]}}, {"weight", a.weight}});
    return j;
  }
};

/// Orders and material constants. The solution theory needs 0 < beta <= alpha <= 2.
struct FracParams {
  double beta = 2.0;
  double alpha = 2.0;
  double rho = 1.0;
  double mass_m = 1.0;

  double gamma() const { return beta / alpha; }

  void validate() const {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("FracParams: alpha must lie in (0, 2]");
    if (!(beta > 0.0 && beta <= alpha)) throw DomainError("FracParams: beta must lie in (0, alpha]");
    if (!(rho > 0.0) || !(mass_m > 0.0)) throw DomainError("FracParams: rho and M must be positive");
  }
};

namespace detail {
inline void check_symbol_alpha(double alpha) {
  if (!(alpha > 1.0 && alpha <= 2.0)) throw DomainError("symbols: alpha must lie in (1, 2]");
}
}  // namespace detail

/// Qhat(k) = -sum w |k.y|^alpha - M |k|^alpha  (<= 0).
inline double q_hat(const SphericalMeasure& mu, double alpha, const Vec3& k) {
  detail::check_symbol_alpha(alpha);
  double s = mu.uniform_mass * std::pow(k.norm(), alpha);
  for (const auto& a : mu.atoms) s += a.weight * std::pow(std::abs(k.dot(a.dir)), alpha);
  return -s;
}

/// F(khat) = -Qhat(khat); throws DegeneracyError below `floor`.
inline double f_direction(const SphericalMeasure& mu, double alpha, const Vec3& khat, double floor = 1e-12) {
  if (std::abs(khat.norm() - 1.0) > 1e-9) throw DomainError("f_direction: khat must be a unit vector");
  double f = -q_hat(mu, alpha, khat);
  if (!(f >= floor)) throw DegeneracyError("f_direction: symbol vanishes along this direction");
  return f;
}

/// A = int y y^T mu(dy) in the alpha = 2 convention: sum w y y^T + M I.
inline Mat3 ellipsoidal_matrix(const SphericalMeasure& mu) {
  Mat3 a = mu.uniform_mass * Mat3::Identity();
  for (const auto& at : mu.atoms) a += at.weight * at.dir * at.dir.transpose();
  return a;
}

/// Gradient of Qhat. The term of an atom with k.y = 0 vanishes (alpha > 1).
inline Vec3 q_hat_gradient(const SphericalMeasure& mu, double alpha, const Vec3& k) {
  detail::check_symbol_alpha(alpha);
  const double kn = k.norm();
  if (kn == 0.0) throw DomainError("q_hat_gradient: k must be nonzero");
  Vec3 g = -mu.uniform_mass * alpha * std::pow(kn, alpha - 2.0) * k;
  for (const auto& a : mu.atoms) {
    double p = k.dot(a.dir);
    if (p == 0.0) continue;
    g -= a.weight * alpha * std::copysign(std::pow(std::abs(p), alpha - 1.0), p) * a.dir;
  }
  return g;
}

/// Flux symbol Khat = grad Qhat/(i alpha) = i v; returns v = -grad Qhat/alpha, so Qhat = -k.v.
inline Vec3 flux_symbol(const SphericalMeasure& mu, double alpha, const Vec3& k) {
  return -q_hat_gradient(mu, alpha, k) / alpha;
}

/// C(k) = -Hess Qhat / (alpha (alpha-1)) = sum w |k.y|^(alpha-2) y y^T + uniform part.
/// Atoms with k.y = 0 are skipped when alpha < 2; their count goes to `skipped`.
inline Mat3 stiffness_symbol(const SphericalMeasure& mu, double alpha, const Vec3& k, int* skipped = nullptr) {
  detail::check_symbol_alpha(alpha);
  const double kn = k.norm();
  if (kn == 0.0) throw DomainError("stiffness_symbol: k must be nonzero");
  const Vec3 kh = k / kn;
  Mat3 c = mu.uniform_mass / (alpha - 1.0) * std::pow(kn, alpha - 2.0) *
           (Mat3::Identity() + (alpha - 2.0) * kh * kh.transpose());
  int skip = 0;
  for (const auto& a : mu.atoms) {
    double p = std::abs(k.dot(a.dir));
    if (p == 0.0 && alpha < 2.0) {
      ++skip;
      continue;
    }
    c += a.weight * std::pow(p, alpha - 2.0) * a.dir * a.dir.transpose();
  }
  if (skipped) *skipped = skip;
  return c;
}

/// V(k) = -(1/((alpha+1)(alpha+2))) int |k.y|^(alpha+2) mu(dy).
inline double generating_v(const SphericalMeasure& mu, double alpha, const Vec3& k) {
  detail::check_symbol_alpha(alpha);
  double s = 0.0;
  for (const auto& a : mu.atoms) s += a.weight * std::pow(std::abs(k.dot(a.dir)), alpha + 2.0);
  s /= (alpha + 1.0) * (alpha + 2.0);
  s += mu.uniform_mass * std::pow(k.norm(), alpha + 2.0) / ((alpha + 2.0) * (alpha + 3.0));
  return -s;
}

/// Gradient of V: -(1/(alpha+1)) sum w |k.y|^alpha (k.y) y - M |k|^alpha k/(alpha+3).
inline Vec3 generating_v_gradient(const SphericalMeasure& mu, double alpha, const Vec3& k) {
  detail::check_symbol_alpha(alpha);
  Vec3 g = -mu.uniform_mass / (alpha + 3.0) * std::pow(k.norm(), alpha) * k;
  for (const auto& a : mu.atoms) {
    const double p = k.dot(a.dir);
    g -= a.weight / (alpha + 1.0) * std::pow(std::abs(p), alpha) * p * a.dir;
  }
  return g;
}

/// Hessian of V: Q_kl(k) = -int |k.y|^alpha y_k y_l mu(dy).
inline Mat3 generating_v_hessian(const SphericalMeasure& mu, double alpha, const Vec3& k) {
  detail::check_symbol_alpha(alpha);
  const double kn = k.norm();
  Mat3 h = Mat3::Zero();
  if (kn > 0.0) {
    const Vec3 kh = k / kn;
    h = -mu.uniform_mass / (alpha + 3.0) * std::pow(kn, alpha) * (Mat3::Identity() + alpha * kh * kh.transpose());
  }
  for (const auto& a : mu.atoms) h -= a.weight * std::pow(std::abs(k.dot(a.dir)), alpha) * a.dir * a.dir.transpose();
  return h;
}

enum class Definiteness { PositiveDefinite, PositiveSemidefinite, NegativeDefinite, NegativeSemidefinite, Indefinite };

inline std::string to_string(Definiteness d) {
  switch (d) {
    case Definiteness::PositiveDefinite: return "positive definite";
    case Definiteness::PositiveSemidefinite: return "positive semidefinite";
    case Definiteness::NegativeDefinite: return "negative definite";
    case Definiteness::NegativeSemidefinite: return "negative semidefinite";
    case Definiteness::Indefinite: return "indefinite";
  }
  return "?";
}

/// Sign class of a symmetric matrix; eigenvalues within tol * max|lambda| count as zero.
inline Definiteness classify(const Mat3& m, double tol = 1e-12) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (m + m.transpose()));
  const auto ev = es.eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();
  const double eps = tol * (scale > 0.0 ? scale : 1.0);
  int pos = 0, neg = 0, zero = 0;
  for (int i = 0; i < 3; ++i) {
    if (ev[i] > eps) ++pos;
    else if (ev[i] < -eps) ++neg;
    else ++zero;
  }
  if (pos == 3) return Definiteness::PositiveDefinite;
  if (neg == 3) return Definiteness::NegativeDefinite;
  if (neg == 0) return Definiteness::PositiveSemidefinite;
  if (pos == 0) return Definiteness::NegativeSemidefinite;
  return Definiteness::Indefinite;
}

struct HHat {
  Mat3 matrix;
  Definiteness definiteness;
};

/// Hhat(k) = -M alpha |k|^(alpha-2) (I - (2-alpha) khat khat^T) for the isotropic symbol.
inline HHat h_hat_isotropic(double alpha, double mass_m, const Vec3& k) {
  detail::check_symbol_alpha(alpha);
  const double kn = k.norm();
  if (kn == 0.0) throw DomainError("h_hat_isotropic: k must be nonzero");
  const Vec3 kh = k / kn;
  Mat3 h = -mass_m * alpha * std::pow(kn, alpha - 2.0) * (Mat3::Identity() - (2.0 - alpha) * kh * kh.transpose());
  return {h, classify(h)};
}

struct Dispersion {
  std::complex<double> k;
  double attenuation;
  double phase_velocity;
};

/// Plane waves exp(i(k x - omega t)) of rho p^beta + M k^alpha = 0 with p = -i omega:
/// k = |k| exp(i pi (2-beta)/(2 alpha)), the root with Re k > 0 and Im k >= 0.
inline Dispersion dispersion(const FracParams& p, double omega) {
  p.validate();
  if (!(omega > 0.0)) throw DomainError("dispersion: omega must be positive");
  const double pi = std::numbers::pi;
  // k^alpha = -(rho/M) (-i omega)^beta = (rho/M) omega^beta exp(i pi (1 - beta/2)).
  const double mag = std::pow(p.rho / p.mass_m * std::pow(omega, p.beta), 1.0 / p.alpha);
  const double base = pi * (1.0 - 0.5 * p.beta);
  // Roots: arg = (base + 2 pi j)/alpha; pick the one in the first quadrant.
  for (int j = -2; j <= 2; ++j) {
    double th = (base + 2.0 * pi * j) / p.alpha;
    if (th >= 0.0 && th < 0.5 * pi) {
      std::complex<double> k = std::polar(mag, th);
      if (std::abs(th) < 1e-15) k = {mag, 0.0};
      return {k, k.imag(), omega / k.real()};
    }
  }
  throw DomainError("dispersion: no root with Re k > 0 and Im k >= 0");
}

/// Riemann-Liouville integral I^g f on a uniform grid by product integration
/// with piecewise-linear interpolation of f (exact for linear f).
inline std::vector<double> fractional_integral(double g, const std::vector<double>& f, double dt) {
  if (!(g > 0.0)) throw DomainError("fractional_integral: order must be positive");
  if (!(dt > 0.0)) throw DomainError("fractional_integral: dt must be positive");
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  const double c = std::pow(dt, g) / std::tgamma(g + 2.0);
  auto pw = [g](double m) { return std::pow(m, g + 1.0); };
  for (std::size_t i = 1; i < n; ++i) {
    const double m = double(i);
    double s = (pw(m - 1.0) - (m - g - 1.0) * std::pow(m, g)) * f[0];
    for (std::size_t j = 1; j < i; ++j) {
      const double d = double(i - j);
      s += (pw(d + 1.0) - 2.0 * pw(d) + pw(d - 1.0)) * f[j];
    }
    s += f[i];
    out[i] = c * s;
  }
  return out;
}

namespace detail {
/// n-th derivative (n = 1, 2) on a uniform grid, second-order accurate, one-sided at the ends.
inline std::vector<double> grid_derivative(int order, const std::vector<double>& f, double dt) {
  const std::size_t n = f.size();
  if (n < 4) throw DomainError("caputo_derivative: need at least 4 samples");
  std::vector<double> d(n);
  if (order == 1) {
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dt);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dt);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * dt);
  } else {
    const double h2 = dt * dt;
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
  }
  return d;
}
}  // namespace detail

/// Caputo derivative D^beta f = I^(n-beta) D^n f, n - 1 < beta < n, n in {1, 2};
/// integer beta returns the plain finite-difference derivative.
inline std::vector<double> caputo_derivative(double beta, const std::vector<double>& f, double dt) {
  if (!(beta > 0.0 && beta <= 2.0)) throw DomainError("caputo_derivative: beta must lie in (0, 2]");
  if (beta == 1.0 || beta == 2.0) return detail::grid_derivative(int(beta), f, dt);
  const int n = beta < 1.0 ? 1 : 2;
  return fractional_integral(n - beta, detail::grid_derivative(n, f, dt), dt);
}

}  // namespace fracwave
