#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <json.hpp>

#include "fracwave/csv.hpp"
#include "fracwave/green.hpp"
#include "fracwave/kernels.hpp"
#include "fracwave/oracle.hpp"
#include "fracwave/symbols.hpp"
#include "fracwave/wright.hpp"

namespace fracwave::validation {

inline constexpr const char* kReportSchema = "fracwave.validate/1";

/// One measured quantity against its limit; upper limits pass when value <= limit,
/// lower limits when value >= limit. Boolean shape assertions use value 1/0 against a lower limit 1.
struct Metric {
  std::string name;
  double value;
  double limit;
  bool upper = true;

  bool passed() const { return std::isfinite(value) && (upper ? value <= limit : value >= limit); }
};

struct CheckResult {
  int id = 0;
  std::string name;
  std::vector<Metric> metrics;
  double seconds = 0.0;
  std::string error;  // set when the check threw

  bool passed() const {
    if (!error.empty() || metrics.empty()) return false;
    return std::all_of(metrics.begin(), metrics.end(), [](const Metric& m) { return m.passed(); });
  }
  /// The metric with the largest value/limit ratio among upper limits, else the first failing one.
  const Metric* worst() const {
    const Metric* w = nullptr;
    for (const auto& m : metrics) {
      if (!m.passed()) return &m;
      if (m.upper && m.limit > 0.0 && (!w || m.value / m.limit > w->value / w->limit)) w = &m;
    }
    return w ? w : (metrics.empty() ? nullptr : &metrics.front());
  }
};

/// Deliberate defects for checking that the suite detects them.
enum class Mutation { None, FlipXSign };

inline Mutation parse_mutation(const std::string& s) {
  if (s.empty() || s == "none") return Mutation::None;
  if (s == "flip-x-sign") return Mutation::FlipXSign;
  throw DomainError("unknown mutation '" + s + "' (expected none or flip-x-sign)");
}

struct SuiteOptions {
  Mutation mutation = Mutation::None;
  std::string figure_dir;  // empty: figure CSVs are not written
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return v;
}

inline Metric flag(const std::string& name, bool ok) { return {name, ok ? 1.0 : 0.0, 1.0, false}; }

template <class F>
CheckResult timed(int id, const std::string& name, F&& body) {
  CheckResult r;
  r.id = id;
  r.name = name;
  const auto t0 = Clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return r;
}

/// int_0^inf f for f ~ y^a0 at 0 and f ~ y^(-b) at infinity (a0 > -1, b > 1).
template <class F>
double half_line_integral(F&& f, double a0, double b) {
  quad::Options o;
  o.abs_tol = 1e-13;
  o.rel_tol = 1e-11;
  const double head = quad::integrate_left_power([&](double y) { return f(y) * std::pow(y, -a0); }, a0, 0.0, 1.0, o).value;
  const double p = b - 2.0;
  auto g = [&](double w) {
    if (w == 0.0) return 0.0;
    return f(1.0 / w) / (w * w) * std::pow(w, -p);
  };
  const double tail = quad::integrate_left_power(g, p, 0.0, 1.0, o).value;
  return head + tail;
}

/// Wright series W_{lambda,mu}(z) summed in 50-digit arithmetic: the oracle for the
/// cancellation-prone range where double-precision summation fails.
inline double wright_series_mp(double lambda, double mu, double z, int terms = 400) {
  using mp = boost::multiprecision::cpp_bin_float_50;
  mp sum = 0, power = 1, fact = 1;
  const mp zz = z;
  for (int n = 0; n < terms; ++n) {
    const mp a = mp(lambda) * n + mp(mu);
    if (!(a <= 0 && a == floor(a))) sum += power / (fact * boost::math::tgamma(a));
    power *= zz;
    fact *= n + 1;
  }
  return static_cast<double>(sum);
}

/// Index of the largest sample.
inline std::size_t argmax(const std::vector<double>& v) {
  return std::size_t(std::max_element(v.begin(), v.end()) - v.begin());
}

inline int sign_changes(const std::vector<double>& v) {
  int n = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if ((v[i - 1] < 0.0) != (v[i] < 0.0)) ++n;
  return n;
}

inline void write_csv(const SuiteOptions& o, const std::string& file, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns) {
  if (o.figure_dir.empty()) return;
  std::filesystem::create_directories(o.figure_dir);
  auto f = open_output((std::filesystem::path(o.figure_dir) / file).string());
  CsvWriter w(f, header);
  for (std::size_t i = 0; i < columns.front().size(); ++i) {
    std::vector<CsvWriter::Cell> row;
    for (const auto& c : columns) row.emplace_back(c[i]);
    w.row(row);
  }
}

struct Pair {
  double beta, alpha;
};
inline const std::vector<Pair>& keystone_pairs() {
  static const std::vector<Pair> p{{1.2, 1.6}, {1.5, 2.0}, {1.3, 1.9}};
  return p;
}

inline std::string pair_tag(double beta, double alpha) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "(%g,%g)", beta, alpha);
  return buf;
}

}  // namespace detail

/// 1. Unit mass of X_alpha and Y_alpha.
inline CheckResult check_normalization(const SuiteOptions& o = {}) {
  return detail::timed(1, "probability normalization", [&](CheckResult& r) {
    const double sign = o.mutation == Mutation::FlipXSign ? -1.0 : 1.0;
    double ex = 0.0, ey = 0.0;
    const auto t0 = detail::Clock::now();
    for (double a : {0.5, 1.0, 1.2, 1.5, 1.9}) {
      const double ix =
          2.0 * detail::half_line_integral([&](double y) { return sign * x_alpha(a, y); }, a < 1.0 ? a - 1.0 : 0.0, a + 1.0);
      // Y ~ y^(a-1) below alpha = 1, log y at alpha = 1, bounded above.
      const double a0 = a < 1.0 ? a - 1.0 : (a == 1.0 ? -0.5 : 0.0);
      const double iy = 2.0 * detail::half_line_integral([&](double y) { return y_alpha(a, y); }, a0, a + 1.0);
      ex = std::max(ex, std::abs(ix - 1.0));
      ey = std::max(ey, std::abs(iy - 1.0));
    }
    r.metrics.push_back({"max |int X - 1|", ex, 1e-7});
    r.metrics.push_back({"max |int Y - 1|", ey, 1e-7});
    r.metrics.push_back({"seconds", std::chrono::duration<double>(detail::Clock::now() - t0).count(), 5.0});
  });
}

/// 2. E_beta(-k^a) = int M_gamma E_alpha(-(k xi)^a) dxi and the E_{beta,2} / N_gamma analogue.
inline CheckResult check_identity(const SuiteOptions& = {}) {
  return detail::timed(2, "keystone identity", [&](CheckResult& r) {
    const auto kappa = detail::linspace(0.0, 5.0, 101);
    double e1 = 0.0, e2 = 0.0;
    for (const auto& p : detail::keystone_pairs()) {
      const auto res = identity_check(p.beta, p.alpha, kappa);
      e1 = std::max(e1, res.first);
      e2 = std::max(e2, res.second);
    }
    r.metrics.push_back({"max residual E_beta / M_gamma", e1, 1e-6});
    r.metrics.push_back({"max residual E_beta2 / N_gamma", e2, 1e-5});
  });
}

/// 3. green1d and green3d_isotropic against the FFT oracle on |x| in [0.1, 4].
inline CheckResult check_fft_oracle(const SuiteOptions& = {}) {
  return detail::timed(3, "oracle equivalence", [&](CheckResult& r) {
    const auto t0 = detail::Clock::now();
    // Mollifier width 1e-3 shifts the fields by O(eps^2 f''), far below the tolerance.
    const FieldGrid grid = FieldGrid::with_extent(1, 1 << 20, 200.0);
    IfftOptions io;
    io.multiplier = gaussian_mollifier(1e-3);
    for (const auto& pr : detail::keystone_pairs()) {
      FracParams p;
      p.beta = pr.beta;
      p.alpha = pr.alpha;
      const FieldGrid f = ifft_green(isotropic_symbol(p), p.beta, 1.0, grid, Which::G, io);
      const RadialSamples s = ifft_green_radial3d(p, 1.0, grid, Which::G, io);
      double e1 = 0.0, e3 = 0.0;
      for (int j = grid.n / 2; j < grid.n; j += 97) {
        const double x = grid.coordinate(j);
        if (x < 0.1 || x > 4.0) continue;
        e1 = std::max(e1, std::abs(f.values[j] - green1d(p, 1.0, x, Which::G)));
        e1 = std::max(e1, std::abs(f.values[grid.n - j] - green1d(p, 1.0, -x, Which::G)));
        const std::size_t i = std::size_t(j - grid.n / 2 - 1);
        e3 = std::max(e3, std::abs(s.value[i] - green3d_isotropic(p, 1.0, s.r[i], Which::G)));
      }
      const std::string tag = detail::pair_tag(p.beta, p.alpha);
      r.metrics.push_back({"1D max abs error " + tag, e1, 1e-4});
      r.metrics.push_back({"3D max abs error " + tag, e3, 1e-4});
    }
    r.metrics.push_back({"seconds", std::chrono::duration<double>(detail::Clock::now() - t0).count(), 60.0});
  });
}

/// 4. Closed forms of M_{2/3}, M_{1/2}, E_1 and E_2.
inline CheckResult check_closed_forms(const SuiteOptions& = {}) {
  return detail::timed(4, "closed-form crosswalks", [&](CheckResult& r) {
    double e23 = 0.0, e12 = 0.0, ee1 = 0.0, ee2 = 0.0;
    for (double z : detail::linspace(0.05, 5.0, 100)) {
      const double ref = detail::wright_series_mp(-2.0 / 3.0, 1.0 / 3.0, -z);
      e23 = std::max({e23, std::abs(m_wright_23_airy(z) - ref), std::abs(m_wright_23(z) - ref),
                      std::abs(m_wright(GammaIndex(2.0 / 3.0), z) - ref)});
      const double gauss = std::exp(-z * z / 4.0) / std::sqrt(std::numbers::pi);
      e12 = std::max(e12, std::abs(m_wright(GammaIndex(0.5), z) - gauss));
    }
    const MittagLeffler ml1(1.0, 1.0), ml2(2.0, 1.0);
    for (double z : detail::linspace(0.0, 50.0, 501)) {
      ee1 = std::max(ee1, std::abs(mittag_leffler(1.0, 1.0, -z) - std::exp(-z)));
      if (z <= MittagLeffler::kSeriesMax) ee1 = std::max(ee1, std::abs(ml1.series(-z) - std::exp(-z)));
      // Every regime of the general evaluator, not only the closed-form shortcut.
      const double zz = -z * z;
      double general = z <= MittagLeffler::kSeriesMax        ? ml2.series(zz)
                       : z < MittagLeffler::kAsymptoticMin ? ml2.integral(zz)
                                                           : ml2.asymptotic(zz);
      ee2 = std::max({ee2, std::abs(mittag_leffler(2.0, 1.0, zz) - std::cos(z)), std::abs(general - std::cos(z))});
    }
    r.metrics.push_back({"M_2/3 Airy vs series on [0.05,5]", e23, 1e-8});
    r.metrics.push_back({"M_1/2 vs Gaussian", e12, 1e-10});
    r.metrics.push_back({"E_1(-z) vs exp(-z)", ee1, 1e-12});
    r.metrics.push_back({"E_2(-z^2) vs cos z", ee2, 1e-12});
  });
}

/// 5. alpha = 2 closed form against the Mellin-Barnes oracle, and the alpha -> 2 limit.
inline CheckResult check_alpha2(const SuiteOptions& = {}) {
  return detail::timed(5, "alpha=2 reduction", [&](CheckResult& r) {
    double ec = 0.0, el = 0.0;
    for (double beta : {1.2, 4.0 / 3.0, 1.5, 1.8}) {
      FracParams p;
      p.beta = beta;
      p.alpha = 2.0;
      FracParams q = p;
      q.alpha = 2.0 - 1e-6;
      for (double x : detail::linspace(0.1, 3.0, 30)) {
        const double v = green1d(p, 1.0, x, Which::G);
        ec = std::max(ec, std::abs(v - 0.5 * mellin_barnes_eval(BarnesKind::MGamma, beta / 2.0, x)));
        el = std::max(el, std::abs(green1d(q, 1.0, x, Which::G) - v));
      }
    }
    r.metrics.push_back({"G(1,x) vs M_{beta/2}(|x|)/2", ec, 1e-8});
    r.metrics.push_back({"alpha = 2 - 1e-6 Mellin vs closed form", el, 1e-3});
  });
}

/// 6. Scaling law G(t,x) = t^(-d gamma) G(1, x/t^gamma), H with t^(1 - d gamma); plus the FFT at time t.
inline CheckResult check_scaling(const SuiteOptions& = {}) {
  return detail::timed(6, "scaling law", [&](CheckResult& r) {
    double es = 0.0, ef = 0.0;
    const FieldGrid grid = FieldGrid::with_extent(1, 1 << 19, 200.0);
    IfftOptions io;
    io.multiplier = gaussian_mollifier(2e-3);
    for (const detail::Pair& pr : std::vector<detail::Pair>{{1.2, 1.6}, {1.3, 1.9}}) {
      FracParams p;
      p.beta = pr.beta;
      p.alpha = pr.alpha;
      const double g = p.gamma();
      for (double t : {0.5, 2.0, 5.0}) {
        const double len = std::pow(t, g);
        for (Which w : {Which::G, Which::H}) {
          const double lift = w == Which::H ? t : 1.0;
          for (double x : {0.15, 0.6, 1.3, 2.7}) {
            const double g1 = green1d(p, t, x, w), r1 = lift * green1d(p, 1.0, x / len, w) / len;
            const double g3 = green3d_isotropic(p, t, x, w), r3 = lift * green3d_isotropic(p, 1.0, x / len, w) / (len * len * len);
            es = std::max({es, std::abs(g1 - r1) / std::abs(r1), std::abs(g3 - r3) / std::abs(r3)});
          }
          // Independent of the scaling: invert the spectrum at time t directly.
          const FieldGrid f = ifft_green(isotropic_symbol(p), p.beta, t, grid, w, io);
          for (int j = grid.n / 2 + 250; j < grid.n; j += 500) {
            const double x = grid.coordinate(j);
            if (x > 4.0) break;
            ef = std::max(ef, std::abs(f.values[j] - green1d(p, t, x, w)));
          }
        }
      }
    }
    r.metrics.push_back({"max relative scaling defect (d=1,3; G,H)", es, 1e-8});
    r.metrics.push_back({"FFT at time t vs green1d", ef, 1e-4});
  });
}

/// 7. Uniform-measure collapse, rotational equivariance, reflection, and the alpha = 2 three-atom FFT check.
inline CheckResult check_anisotropy(const SuiteOptions& = {}) {
  return detail::timed(7, "anisotropy sanity", [&](CheckResult& r) {
    const std::vector<Vec3> pts{Vec3(0.3, -0.1, 0.2), Vec3(0.4, 0.7, -0.5), Vec3(-1.2, 0.9, 1.9)};
    double eu = 0.0;
    const SphericalMeasure uni = SphericalMeasure::uniform(1.0);
    for (const detail::Pair& pr : std::vector<detail::Pair>{{1.2, 1.6}, {1.3, 1.9}, {1.5, 1.5}}) {
      FracParams p;
      p.beta = pr.beta;
      p.alpha = pr.alpha;
      for (Which w : {Which::G, Which::H})
        for (const auto& x : pts)
          eu = std::max(eu, std::abs(green3d_aniso(uni, p, 1.0, x, w) - green3d_isotropic(p, 1.0, x.norm(), w)));
    }
    const Mat3 rot = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
    SphericalMeasure mu;
    mu.uniform_mass = 0.3;
    mu.atoms = {{Vec3(1, 0, 0), 1.0}, {Vec3(0, 1, 0), 1.5}, {Vec3(0, 0.6, 0.8), 0.6}};
    SphericalMeasure mr = mu;
    for (auto& a : mr.atoms) a.dir = rot * a.dir;
    double er = 0.0, ef = 0.0;
    for (const detail::Pair& pr : std::vector<detail::Pair>{{1.2, 1.6}, {1.5, 1.5}}) {
      FracParams p;
      p.beta = pr.beta;
      p.alpha = pr.alpha;
      for (Which w : {Which::G, Which::H})
        for (const auto& x : pts) {
          const double v = green3d_aniso(mu, p, 1.0, x, w);
          er = std::max(er, std::abs(green3d_aniso(mr, p, 1.0, rot * x, w) - v));
          ef = std::max(ef, std::abs(green3d_aniso(mu, p, 1.0, -x, w) - v));
        }
    }
    // Three weighted orthonormal atoms at alpha = beta = 2: the classical (ellipsoidal) wave propagator.
    SphericalMeasure tri;
    const double wts[3] = {1.0, 1.5, 0.6};
    for (int i = 0; i < 3; ++i) tri.atoms.push_back({rot.col(i), wts[i]});
    FracParams p2;
    p2.beta = 2.0;
    p2.alpha = 2.0;
    const double eps = 0.45;
    IfftOptions io;
    io.multiplier = gaussian_mollifier(eps, ellipsoidal_matrix(tri) / p2.rho);
    const FieldGrid grid = FieldGrid::with_extent(3, 128, 20.0);
    double e3 = 0.0;
    for (Which w : {Which::G, Which::H}) {
      const FieldGrid f = ifft_green(measure_symbol(tri, p2), 2.0, 1.0, grid, w, io);
      for (int i = 0; i < grid.n; i += 5)
        for (int j = 0; j < grid.n; j += 5)
          for (int k = 0; k < grid.n; k += 5) {
            const Vec3 x(grid.coordinate(i), grid.coordinate(j), grid.coordinate(k));
            if (x.norm() == 0.0 || x.norm() > 3.5) continue;
            e3 = std::max(e3, std::abs(green3d_mollified_alpha2(tri, p2, 1.0, x, w, eps) - f.at(i, j, k)));
          }
    }
    r.metrics.push_back({"uniform measure vs isotropic", eu, 1e-4});
    r.metrics.push_back({"rotational equivariance", er, 1e-10});
    r.metrics.push_back({"reflection symmetry", ef, 1e-10});
    r.metrics.push_back({"three-atom alpha=2 vs 3D FFT (mollified)", e3, 1e-3});
  });
}

/// 8. Symbol identities on random measures and wavevectors.
inline CheckResult check_constitutive(const SuiteOptions& = {}) {
  return detail::timed(8, "constitutive identities", [&](CheckResult& r) {
    std::mt19937_64 rng(20240517);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> n01;
    auto unit = [&] {
      Vec3 v(n01(rng), n01(rng), n01(rng));
      return Vec3(v.normalized());
    };
    double e_c = 0.0, e_q = 0.0, e_v = 0.0, e_sym = 0.0, e_nsd = 0.0;
    for (int draw = 0; draw < 100; ++draw) {
      SphericalMeasure mu;
      mu.uniform_mass = u01(rng) < 0.3 ? 0.0 : u01(rng);
      const int na = 1 + int(u01(rng) * 4.0);
      for (int i = 0; i < na; ++i) mu.atoms.push_back({unit(), 0.1 + 2.0 * u01(rng)});
      const double alpha = 1.05 + 0.95 * u01(rng);
      const Vec3 k = unit() * std::pow(10.0, -1.0 + 2.0 * u01(rng));
      const double q = q_hat(mu, alpha, k), v = generating_v(mu, alpha, k);
      e_c = std::max(e_c, std::abs(-k.dot(stiffness_symbol(mu, alpha, k) * k) - q) / std::abs(q));
      e_q = std::max(e_q, std::abs(k.dot(q_hat_gradient(mu, alpha, k)) - alpha * q) / std::abs(q));
      e_v = std::max(e_v, std::abs(k.dot(generating_v_gradient(mu, alpha, k)) - (alpha + 2.0) * v) / std::abs(v));
      const Mat3 h = generating_v_hessian(mu, alpha, k);
      const double hn = h.norm();
      e_sym = std::max(e_sym, (h - h.transpose()).norm() / hn);
      Eigen::SelfAdjointEigenSolver<Mat3> es(0.5 * (h + h.transpose()));
      e_nsd = std::max(e_nsd, std::max(0.0, es.eigenvalues().maxCoeff()) / hn);
    }
    r.metrics.push_back({"-k.C(k)k vs Qhat (relative)", e_c, 1e-9});
    r.metrics.push_back({"k.grad Qhat - alpha Qhat (relative)", e_q, 1e-9});
    r.metrics.push_back({"k.grad V - (alpha+2) V (relative)", e_v, 1e-9});
    r.metrics.push_back({"Hessian(V) asymmetry (relative)", e_sym, 1e-9});
    r.metrics.push_back({"Hessian(V) largest eigenvalue (relative)", e_nsd, 1e-9});
  });
}

/// 9. Energy conservation: exact for beta = 2, stored-energy construction for beta = 1.5.
inline CheckResult check_energy(const SuiteOptions& o = {}) {
  return detail::timed(9, "energy", [&](CheckResult& r) {
    const auto t0 = detail::Clock::now();
    const FieldGrid v0 = gaussian_bump(4096, 0.02, 1.0);
    double d2 = 0.0;
    for (double a : {2.0, 1.5}) {
      FracParams p;
      p.beta = 2.0;
      p.alpha = a;
      d2 = std::max(d2, energy_check(2.0, isotropic_symbol(p), v0, 2.0, 400).max_relative_drift);
    }
    FracParams p;
    p.beta = 1.5;
    p.alpha = 1.5;
    const EnergySeries es = energy_check(1.5, isotropic_symbol(p), v0, 2.0, 1000);
    if (!o.figure_dir.empty())
      detail::write_csv(o, "energy_beta1.5_alpha1.5.csv", {"t", "kinetic", "stored", "total"},
                        {es.t, es.kinetic, es.stored, es.total});
    r.metrics.push_back({"beta=2 drift", d2, 1e-10});
    r.metrics.push_back({"beta=1.5 min stored energy", es.min_stored, 0.0, false});
    r.metrics.push_back({"beta=1.5 drift", es.max_relative_drift, 1e-3});
    r.metrics.push_back({"seconds", std::chrono::duration<double>(detail::Clock::now() - t0).count(), 120.0});
  });
}

/// 10. Figure CSVs with shape assertions and two-path consistency.
inline CheckResult check_figures(const SuiteOptions& o = {}) {
  return detail::timed(10, "figure regeneration", [&](CheckResult& r) {
    const double pi = std::numbers::pi;
    // Z_alpha(y) = y^(3-a) X3_alpha(y), checked against a central difference of X_alpha.
    const auto ys = detail::linspace(0.01, 5.0, 500);
    double ez = 0.0;
    std::vector<std::vector<double>> zcols{ys};
    for (double a : {1.0, 1.5, 1.9}) {
      std::vector<double> z;
      for (double y : ys) {
        const double v = z_alpha(a, y);
        const double h = 1e-3 * y;
        const double d = (8.0 * (x_alpha(a, y + h) - x_alpha(a, y - h)) - (x_alpha(a, y + 2 * h) - x_alpha(a, y - 2 * h))) /
                         (12.0 * h);
        const double fd = -d / (2.0 * pi * y) * std::pow(y, 3.0 - a);
        ez = std::max(ez, std::abs(v - fd));
        z.push_back(v);
      }
      zcols.push_back(z);
    }
    detail::write_csv(o, "fig_z_alpha.csv", {"y", "Z_1", "Z_1.5", "Z_1.9"}, zcols);
    r.metrics.push_back(detail::flag("Z_1 nonnegative", *std::min_element(zcols[1].begin(), zcols[1].end()) >= 0.0));
    r.metrics.push_back(detail::flag("Z_1.9 changes sign", detail::sign_changes(zcols[3]) == 1));
    r.metrics.push_back({"Z two-path difference", ez, 1e-5});

    // M_gamma for gamma = 1/2, 1/3, 2/3 against the Mellin-Barnes oracle.
    const auto zs = detail::linspace(0.0, 4.0, 401);
    double em = 0.0;
    std::vector<std::vector<double>> mcols{zs};
    std::vector<std::size_t> peak;
    for (double g : {0.5, 1.0 / 3.0, 2.0 / 3.0}) {
      std::vector<double> m;
      for (double z : zs) {
        const double v = m_wright(GammaIndex(g), z);
        if (z > 0.0) em = std::max(em, std::abs(v - mellin_barnes_eval(BarnesKind::MGamma, g, z)));
        m.push_back(v);
      }
      peak.push_back(detail::argmax(m));
      mcols.push_back(m);
    }
    detail::write_csv(o, "fig_m_gamma.csv", {"z", "M_1/2", "M_1/3", "M_2/3"}, mcols);
    r.metrics.push_back(detail::flag("M_2/3 maximum at z > 0", peak[2] > 0));
    r.metrics.push_back(detail::flag("M_1/2, M_1/3 maximum at z = 0", peak[0] == 0 && peak[1] == 0));
    r.metrics.push_back({"M two-path difference", em, 1e-5});

    // M_{2/3} and N_{2/3}: Bessel forms against the general Wright evaluator.
    double emn = 0.0;
    std::vector<double> m23, n23;
    for (double z : zs) {
      m23.push_back(m_wright_23(z));
      n23.push_back(n_wright_23(z));
      emn = std::max({emn, std::abs(m23.back() - m_wright(GammaIndex(2.0 / 3.0), z)),
                      std::abs(n23.back() - n_wright(GammaIndex(2.0 / 3.0), z))});
    }
    detail::write_csv(o, "fig_mn_23.csv", {"z", "M_2/3", "N_2/3"}, {zs, m23, n23});
    r.metrics.push_back({"M_2/3, N_2/3 two-path difference", emn, 1e-5});

    // G^(1) and G^(3) at gamma = 2/3 for alpha = 1.5 (beta = 1) and alpha = 1.9 (beta = 1.2666...).
    const auto rs = detail::linspace(0.05, 4.0, 80);
    double eg1 = 0.0, eg3 = 0.0;
    std::vector<std::vector<double>> g1cols{rs}, g3cols{rs};
    for (double a : {1.9, 1.5}) {
      FracParams p;
      p.alpha = a;
      p.beta = 2.0 * a / 3.0;
      std::vector<double> g1, g3;
      for (double rr : rs) {
        const double v1 = green1d(p, 1.0, rr, Which::G), v3 = green3d_isotropic(p, 1.0, rr, Which::G);
        eg1 = std::max(eg1, std::abs(v1 - green_u23(a, rr)));
        const double h = 0.02 * rr;
        const double d = (8.0 * (green_u23(a, rr + h) - green_u23(a, rr - h)) -
                          (green_u23(a, rr + 2 * h) - green_u23(a, rr - 2 * h))) /
                         (12.0 * h);
        const double lift = -d / (2.0 * pi * rr);
        eg3 = std::max(eg3, std::abs(v3 - lift));
        g1.push_back(0.5 * v1);
        g3.push_back(0.5 * v3);
      }
      g1cols.push_back(g1);
      g3cols.push_back(g3);
    }
    detail::write_csv(o, "fig_g1_gamma2over3.csv", {"r", "G1/2 alpha=1.9", "G1/2 alpha=1.5"}, g1cols);
    detail::write_csv(o, "fig_g3_gamma2over3.csv", {"r", "G3/2 alpha=1.9", "G3/2 alpha=1.5"}, g3cols);
    const std::size_t p19 = detail::argmax(g1cols[1]), p15 = detail::argmax(g1cols[2]);
    r.metrics.push_back(detail::flag("G1 peak: alpha=1.5 at origin, alpha=1.9 interior", p15 == 0 && p19 > 0));
    r.metrics.push_back(detail::flag("G3 alpha=1.5 positive",
                                     *std::min_element(g3cols[2].begin(), g3cols[2].end()) > 0.0));
    r.metrics.push_back(detail::flag("G3 alpha=1.9 negative at origin, one sign change",
                                     g3cols[1].front() < 0.0 && detail::sign_changes(g3cols[1]) == 1));
    r.metrics.push_back(detail::flag("G3 alpha=1.9 peak beyond the G1 peak", detail::argmax(g3cols[1]) > p19));
    r.metrics.push_back({"G1 two-path difference", eg1, 1e-5});
    r.metrics.push_back({"G3 two-path difference", eg3, 1e-5});
  });
}

/// 11. High-frequency attenuation slope equals gamma.
inline CheckResult check_dispersion(const SuiteOptions& o = {}) {
  return detail::timed(11, "dispersion slope", [&](CheckResult& r) {
    double worst = 0.0;
    for (const detail::Pair& pr : std::vector<detail::Pair>{{1.2, 1.6}, {1.5, 2.0}, {1.3, 1.9}, {1.0, 1.5}}) {
      FracParams p;
      p.beta = pr.beta;
      p.alpha = pr.alpha;
      std::vector<double> lw, la;
      for (double e : detail::linspace(2.0, 6.0, 41)) {
        const double w = std::pow(10.0, e);
        lw.push_back(std::log(w));
        la.push_back(std::log(dispersion(p, w).attenuation));
      }
      const double n = double(lw.size());
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (std::size_t i = 0; i < lw.size(); ++i) {
        sx += lw[i];
        sy += la[i];
        sxx += lw[i] * lw[i];
        sxy += lw[i] * la[i];
      }
      const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
      worst = std::max(worst, std::abs(slope - p.gamma()) / p.gamma());
      if (!o.figure_dir.empty() && pr.beta == 1.2) {
        std::vector<double> w, att, vel;
        for (double x : lw) {
          const auto d = dispersion(p, std::exp(x));
          w.push_back(std::exp(x));
          att.push_back(d.attenuation);
          vel.push_back(d.phase_velocity);
        }
        detail::write_csv(o, "dispersion_beta1.2_alpha1.6.csv", {"omega", "attenuation", "phase_velocity"}, {w, att, vel});
      }
    }
    FracParams el;
    double flat = 0.0;
    for (double w : {1e2, 1e4, 1e6}) flat = std::max(flat, std::abs(dispersion(el, w).attenuation));
    r.metrics.push_back({"max relative slope error", worst, 0.01});
    r.metrics.push_back({"elastic attenuation", flat, 0.0});
  });
}

using CheckFn = CheckResult (*)(const SuiteOptions&);

inline const std::vector<CheckFn>& all_checks() {
  static const std::vector<CheckFn> c{check_normalization, check_identity,  check_fft_oracle, check_closed_forms,
                                      check_alpha2,        check_scaling,   check_anisotropy, check_constitutive,
                                      check_energy,        check_figures,   check_dispersion};
  return c;
}

/// Run the selected checks (all when `only` is empty), reporting each as it finishes.
inline std::vector<CheckResult> run_suite(const SuiteOptions& o, const std::vector<int>& only = {},
                                          const std::function<void(const CheckResult&)>& on_result = {}) {
  std::vector<CheckResult> out;
  const auto& checks = all_checks();
  for (std::size_t i = 0; i < checks.size(); ++i) {
    if (!only.empty() && std::find(only.begin(), only.end(), int(i + 1)) == only.end()) continue;
    out.push_back(checks[i](o));
    if (on_result) on_result(out.back());
  }
  return out;
}

inline nlohmann::json to_json(const std::vector<CheckResult>& results) {
  nlohmann::json j;
  j["schema"] = kReportSchema;
  bool all = true;
  j["checks"] = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json c;
    c["id"] = r.id;
    c["name"] = r.name;
    c["passed"] = r.passed();
    c["seconds"] = r.seconds;
    if (!r.error.empty()) c["error"] = r.error;
    c["metrics"] = nlohmann::json::array();
    for (const auto& m : r.metrics)
      c["metrics"].push_back({{"name", m.name},
                              {"value", m.value},
                              {"limit", m.limit},
                              {"bound", m.upper ? "upper" : "lower"},
                              {"passed", m.passed()}});
    j["checks"].push_back(c);
    all = all && r.passed();
  }
  j["passed"] = all;
  return j;
}

/// "PASS [ 3] oracle equivalence  worst: 1D max abs error (1.2,1.6) = 7.3e-07 (limit 1e-04)  0.9 s"
inline std::string summary_line(const CheckResult& r) {
  char buf[512];
  const Metric* w = r.worst();
  std::string what;
  if (!r.error.empty()) {
    what = "error: " + r.error;
  } else if (w) {
    char m[256];
    std::snprintf(m, sizeof m, "%s = %.3g (%s %.3g)", w->name.c_str(), w->value, w->upper ? "limit" : "at least",
                  w->limit);
    what = m;
  }
  std::snprintf(buf, sizeof buf, "%s [%2d] %-28s %s  %.1f s", r.passed() ? "PASS" : "FAIL", r.id, r.name.c_str(),
                what.c_str(), r.seconds);
  return buf;
}

}  // namespace fracwave::validation
