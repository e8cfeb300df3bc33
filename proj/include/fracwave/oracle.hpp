#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include <fftw3.h>

#include "fracwave/errors.hpp"
#include "fracwave/mellin.hpp"
#include "fracwave/quadrature.hpp"
#include "fracwave/specfun.hpp"
#include "fracwave/symbols.hpp"

namespace fracwave {

/// Periodic grid of n^d samples centred on the origin: x_j = (j - n/2) h.
/// Index order is row-major, (i n + j) n + k in 3D.
struct FieldGrid {
  int dimension = 1;
  int n = 0;
  double spacing = 0.0;
  std::vector<double> values;

  FieldGrid() = default;
  FieldGrid(int dim, int count, double h) : dimension(dim), n(count), spacing(h) {
    validate_shape();
    values.assign(size(), 0.0);
  }

  static FieldGrid with_extent(int dim, int count, double extent) { return FieldGrid(dim, count, extent / count); }

  void validate_shape() const {
    if (dimension != 1 && dimension != 3) throw DomainError("FieldGrid: dimension must be 1 or 3");
    if (n < 4 || (n & (n - 1)) != 0) throw DomainError("FieldGrid: sample count must be a power of two >= 4");
    if (!(spacing > 0.0)) throw DomainError("FieldGrid: spacing must be positive");
  }

  void validate() const {
    validate_shape();
    if (values.size() != size()) throw DomainError("FieldGrid: value array has the wrong size");
  }

  std::size_t size() const {
    std::size_t s = std::size_t(n);
    return dimension == 1 ? s : s * s * s;
  }
  double extent() const { return n * spacing; }
  double cell_volume() const { return dimension == 1 ? spacing : spacing * spacing * spacing; }
  double coordinate(int j) const { return (j - n / 2) * spacing; }
  /// Wavenumber of FFT bin m (0 <= m < n); bin n/2 is the Nyquist bin.
  double wavenumber(int m) const {
    const int mm = m <= n / 2 ? m : m - n;
    return 2.0 * std::numbers::pi * mm / extent();
  }
  double& at(int i, int j, int k) { return values[(std::size_t(i) * n + j) * n + k]; }
  double at(int i, int j, int k) const { return values[(std::size_t(i) * n + j) * n + k]; }

  /// Riemann sum of the field; equals the k = 0 spectral value for an inverse-FFT field.
  double integral() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * cell_volume();
  }
};

/// Rate symbol k -> Qhat(k)/rho. 1D grids pass k = (k, 0, 0).
using SymbolFn = std::function<double(const Vec3&)>;
/// Spectral multiplier applied before inversion (e.g. a mollifier).
using MultiplierFn = std::function<double(const Vec3&)>;

inline SymbolFn isotropic_symbol(const FracParams& p) {
  const double c = p.mass_m / p.rho, a = p.alpha;
  return [c, a](const Vec3& k) { return -c * std::pow(k.norm(), a); };
}

inline SymbolFn measure_symbol(const SphericalMeasure& mu, const FracParams& p) {
  const double a = p.alpha, r = p.rho;
  return [mu, a, r](const Vec3& k) { return q_hat(mu, a, k) / r; };
}

/// exp(-eps^2 k.A k / 2): a Gaussian of width eps in the variable A^(-1/2) x.
inline MultiplierFn gaussian_mollifier(double eps, const Mat3& A = Mat3::Identity()) {
  if (!(eps > 0.0)) throw DomainError("gaussian_mollifier: eps must be positive");
  return [eps, A](const Vec3& k) { return std::exp(-0.5 * eps * eps * k.dot(A * k)); };
}

struct IfftOptions {
  MultiplierFn multiplier;     // empty: none
  double nyquist_tol = 1e-10;  // bound on the spectrum on the Nyquist bins
  bool derivative = false;     // 1D only: return d/dx of the field
};

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

/// Spectral propagator of G (E_beta(q t^beta)) or H (t E_{beta,2}(q t^beta)).
inline double propagator(double beta, double t, double q, Which which) {
  const double z = q * std::pow(t, beta);
  if (which == Which::G) return mittag_leffler(beta, 1.0, z);
  return t * mittag_leffler(beta, 2.0, z);
}

using FftwBuffer = std::unique_ptr<fftw_complex, void (*)(void*)>;

// RAII holder for an FFTW plan; the planner itself is not thread-safe.
class C2RPlan {
 public:
  C2RPlan(int dim, int n, fftw_complex* in, double* out) {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan_ = dim == 1 ? fftw_plan_dft_c2r_1d(n, in, out, FFTW_ESTIMATE)
                     : fftw_plan_dft_c2r_3d(n, n, n, in, out, FFTW_ESTIMATE);
    if (!plan_) throw ResolutionError("ifft_green: FFTW could not create a plan");
  }
  ~C2RPlan() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }
  C2RPlan(const C2RPlan&) = delete;
  C2RPlan& operator=(const C2RPlan&) = delete;
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

}  // namespace detail

/// Inverse Fourier transform of the Mittag-Leffler propagator sampled on the dual grid.
/// The spectrum includes the (-1)^m phase that centres the field on the origin.
/// Throws ResolutionError when the spectrum exceeds nyquist_tol on a Nyquist bin.
inline FieldGrid ifft_green(const SymbolFn& q_hat_fn, double beta, double t, const FieldGrid& grid, Which which,
                            const IfftOptions& opt = {}) {
  grid.validate_shape();
  if (!(beta > 0.0 && beta <= 2.0)) throw DomainError("ifft_green: beta must lie in (0, 2]");
  if (!(t > 0.0)) throw DomainError("ifft_green: t must be positive");
  if (opt.derivative && grid.dimension != 1) throw DomainError("ifft_green: derivative option is 1D only");
  const int n = grid.n, nh = n / 2 + 1;
  const std::size_t nspec = grid.dimension == 1 ? std::size_t(nh) : std::size_t(n) * n * nh;
  FieldGrid out(grid.dimension, n, grid.spacing);
  detail::FftwBuffer buf(fftw_alloc_complex(nspec), fftw_free);
  fftw_complex* spec = buf.get();
  if (!spec) throw ResolutionError("ifft_green: allocation failed");
  double nyquist = 0.0;
  auto sample = [&](int m1, int m2, int m3) {
    const Vec3 k(grid.wavenumber(m1), grid.dimension == 3 ? grid.wavenumber(m2) : 0.0,
                 grid.dimension == 3 ? grid.wavenumber(m3) : 0.0);
    double v = detail::propagator(beta, t, q_hat_fn(k), which);
    if (opt.multiplier) v *= opt.multiplier(k);
    if (m1 == n / 2 || m2 == n / 2 || m3 == n / 2) nyquist = std::max(nyquist, std::abs(v));
    return ((m1 + m2 + m3) & 1) ? -v : v;
  };
  if (grid.dimension == 1) {
    for (int m = 0; m < nh; ++m) {
      const double v = sample(m, 0, 0);
      if (opt.derivative) {
        // ik S; the Nyquist bin of a real field must be real, and it is negligible by the check below.
        spec[m][0] = 0.0;
        spec[m][1] = m == n / 2 ? 0.0 : grid.wavenumber(m) * v;
      } else {
        spec[m][0] = v;
        spec[m][1] = 0.0;
      }
    }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < nh; ++k) {
          const std::size_t idx = (std::size_t(i) * n + j) * nh + k;
          spec[idx][0] = sample(i, j, k);
          spec[idx][1] = 0.0;
        }
  }
  if (nyquist > opt.nyquist_tol) {
    throw ResolutionError("ifft_green: spectrum " + std::to_string(nyquist) +
                          " on the Nyquist bins exceeds the tolerance; refine the grid or mollify");
  }
  {
    detail::C2RPlan plan(grid.dimension, n, spec, out.values.data());
    plan.execute();
  }
  const double scale = 1.0 / std::pow(grid.extent(), grid.dimension);
  for (double& v : out.values) v *= scale;
  return out;
}

/// Samples of the isotropic 3D solution at the positive nodes of a 1D grid through the
/// radial lift of the 1D derivative field: G3(r) = -G1'(r)/(2 pi r).
struct RadialSamples {
  std::vector<double> r, value;
};

inline RadialSamples ifft_green_radial3d(const FracParams& p, double t, const FieldGrid& grid1d, Which which,
                                         IfftOptions opt = {}) {
  if (grid1d.dimension != 1) throw DomainError("ifft_green_radial3d: needs a 1D grid");
  opt.derivative = true;
  const FieldGrid d = ifft_green(isotropic_symbol(p), p.beta, t, grid1d, which, opt);
  RadialSamples s;
  for (int j = grid1d.n / 2 + 1; j < grid1d.n; ++j) {
    const double r = grid1d.coordinate(j);
    s.r.push_back(r);
    s.value.push_back(-d.values[j] / (2.0 * std::numbers::pi * r));
  }
  return s;
}

/// Kinds of Mellin-Barnes vertical-line integrals.
enum class BarnesKind { EBeta, EBeta2, MGamma, NGamma };

inline std::string to_string(BarnesKind k) {
  switch (k) {
    case BarnesKind::EBeta: return "E_beta";
    case BarnesKind::EBeta2: return "E_beta2";
    case BarnesKind::MGamma: return "M_gamma";
    case BarnesKind::NGamma: return "N_gamma";
  }
  return "?";
}

struct BarnesOptions {
  double abscissa = 0.5;  // Re s on the contour
  double step = 0.05;
  double tail_tol = 1e-18;
  double max_height = 4000.0;
};

/// Inverse Mellin transform (1/2 pi i) int K(s) z^(-s) ds along Re s = c, trapezoid rule, with
///   E_beta:  K = Gamma(s) Gamma(1-s) / Gamma(1 - beta s)      -> E_beta(-z),        0 < c < 1
///   E_beta2: K = Gamma(s) Gamma(1-s) / Gamma(2 - beta s)      -> E_{beta,2}(-z),    0 < c < 1
///   M_gamma: K = Gamma(s) / Gamma(1 + gamma (s - 1))         -> M_gamma(z),        c > 0
///   N_gamma: K = Gamma(s) / Gamma(2 - gamma + gamma s)       -> N_gamma(z),        c > 0
/// `order` is beta for the E kinds and gamma for the Wright kinds.
inline double mellin_barnes_eval(BarnesKind kind, double order, double z, const BarnesOptions& o = {}) {
  if (!(z > 0.0)) throw DomainError("mellin_barnes_eval: z must be positive");
  const bool ekind = kind == BarnesKind::EBeta || kind == BarnesKind::EBeta2;
  const double c = o.abscissa;
  if (ekind) {
    if (!(order > 0.0 && order < 2.0)) throw DomainError("mellin_barnes_eval: beta must lie in (0, 2)");
    if (!(c > 0.0 && c < 1.0)) throw DomainError("mellin_barnes_eval: contour must pass between the poles 0 and 1");
  } else {
    if (!(order > 0.0 && order < 1.0)) throw DomainError("mellin_barnes_eval: gamma must lie in (0, 1)");
    if (!(c > 0.0)) throw DomainError("mellin_barnes_eval: contour must lie right of the pole at 0");
  }
  if (!(o.step > 0.0 && o.step < 0.5)) throw DomainError("mellin_barnes_eval: step must lie in (0, 0.5)");
  const double lz = std::log(z);
  auto log_kernel = [&](cplx s) -> cplx {
    switch (kind) {
      case BarnesKind::EBeta: return lgamma_complex(s) + lgamma_complex(1.0 - s) - lgamma_complex(1.0 - order * s);
      case BarnesKind::EBeta2: return lgamma_complex(s) + lgamma_complex(1.0 - s) - lgamma_complex(2.0 - order * s);
      case BarnesKind::MGamma: return lgamma_complex(s) - lgamma_complex(1.0 + order * (s - 1.0));
      case BarnesKind::NGamma: return lgamma_complex(s) - lgamma_complex(2.0 - order + order * s);
    }
    return {};
  };
  auto f = [&](double y) {
    const cplx s(c, y);
    return std::exp(log_kernel(s) - s * lz);
  };
  cplx sum = f(0.0);
  double scale = std::abs(sum);
  int quiet = 0;
  double y = 0.0;
  while (quiet < 50) {
    y += o.step;
    if (y > o.max_height) throw ConvergenceError("mellin_barnes_eval: integrand tail did not decay", std::abs(f(y)));
    const cplx up = f(y), down = f(-y);
    sum += up + down;
    const double mag = std::abs(up) + std::abs(down);
    scale = std::max(scale, mag);
    quiet = mag < o.tail_tol * scale ? quiet + 1 : 0;
  }
  const cplx v = sum * o.step / (2.0 * std::numbers::pi);
  if (std::abs(v.imag()) > 1e-9) throw ConvergenceError("mellin_barnes_eval: imaginary part too large", v.imag());
  return v.real();
}

/// Nodes and weights for m(ds) = (1/pi) sin(beta pi/2) |s|^(1-beta) ds on [-S, S].
/// Near 0 the weight is absorbed by s = s0 v^(1/(2-beta)); beyond s0 composite
/// Gauss-Legendre panels of fixed width resolve the oscillation of y(t; s).
class SpectralMeasure {
 public:
  SpectralMeasure(double beta, double s_max, double panel_width = 2.0, int order = 8) : beta_(beta), s_max_(s_max) {
    if (!(beta > 1.0 && beta < 2.0)) throw DomainError("SpectralMeasure: beta must lie in (1, 2)");
    if (!(s_max > 0.0) || !(panel_width > 0.0)) throw DomainError("SpectralMeasure: S and panel width must be positive");
    const double pi = std::numbers::pi;
    dens_ = std::sin(beta * pi / 2) / pi;
    const double s0 = std::min(panel_width, s_max);
    const double e = 2.0 - beta;
    const auto& head = quad::gauss_legendre(2 * order);
    std::vector<double> pos_n, pos_w;
    for (std::size_t i = 0; i < head.nodes.size(); ++i) {
      const double v = 0.5 * (head.nodes[i] + 1.0);
      pos_n.push_back(s0 * std::pow(v, 1.0 / e));
      pos_w.push_back(dens_ * std::pow(s0, e) / e * 0.5 * head.weights[i]);
    }
    const auto& g = quad::gauss_legendre(order);
    const int panels = int(std::ceil((s_max - s0) / panel_width));
    for (int p = 0; p < panels; ++p) {
      const double a = s0 + (s_max - s0) * p / panels, b = s0 + (s_max - s0) * (p + 1) / panels;
      for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const double s = 0.5 * (a + b) + 0.5 * (b - a) * g.nodes[i];
        pos_n.push_back(s);
        pos_w.push_back(dens_ * std::pow(s, 1.0 - beta) * 0.5 * (b - a) * g.weights[i]);
      }
    }
    for (std::size_t i = pos_n.size(); i-- > 0;) {
      nodes_.push_back(-pos_n[i]);
      weights_.push_back(pos_w[i]);
    }
    for (std::size_t i = 0; i < pos_n.size(); ++i) {
      nodes_.push_back(pos_n[i]);
      weights_.push_back(pos_w[i]);
    }
  }

  double beta() const { return beta_; }
  double s_max() const { return s_max_; }
  double density_constant() const { return dens_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  /// m([-S, S]^c) integral of c / s^2, both signs: 2 dens S^(-beta) / beta.
  double tail_inverse_square() const { return 2.0 * dens_ * std::pow(s_max_, -beta_) / beta_; }

 private:
  double beta_, s_max_, dens_ = 0.0;
  std::vector<double> nodes_, weights_;
};

struct EnergyOptions {
  double rho = 1.0;
  double s_max = 400.0;
  double panel_width = 2.0;
};

struct EnergySeries {
  std::vector<double> t, kinetic, stored, total;
  double max_relative_drift = 0.0;
  double min_stored = 0.0;
};

/// Energy balance of the scalar 1D periodic problem with u(0) = 0 and Du(0) = v0 (the grid values).
/// The stiffness multiplier is Hhat(k) = -rho q(k)/k^2 > 0; the zero mode carries no strain and is skipped.
/// beta = 2: kinetic (rho/2)|Du|^2 plus stored (1/2) k^2 Hhat |u|^2 under exact propagation.
/// 1 < beta < 2: stored U = (1/2) sum_k int |y(t,k;s)|^2 / Hhat(k) m(ds), where
/// y(t;s) = int_0^t e^(is(t-tau)) psi(tau) dtau and psi = i k Hhat Du; y is advanced by exact
/// exponential integration of the linearly interpolated psi.
inline EnergySeries energy_check(double beta, const SymbolFn& q_hat_fn, const FieldGrid& v0, double horizon, int steps,
                                 const EnergyOptions& eo = {}) {
  v0.validate();
  if (v0.dimension != 1) throw DomainError("energy_check: 1D grids only");
  if (!(beta > 1.0 && beta <= 2.0)) throw DomainError("energy_check: beta must lie in (1, 2]");
  if (!(horizon > 0.0) || steps < 1) throw DomainError("energy_check: need horizon > 0 and steps >= 1");
  const int n = v0.n, nh = n / 2 + 1;
  // Forward DFT of v0 (any consistent normalization: both energies use the same Parseval factor).
  std::vector<double> in(v0.values);
  detail::FftwBuffer buf(fftw_alloc_complex(nh), fftw_free);
  fftw_complex* out = buf.get();
  {
    fftw_plan plan;
    {
      std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
      plan = fftw_plan_dft_r2c_1d(n, in.data(), out, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  struct Mode {
    double k, q, stiff, mult;  // mult: 1 for self-conjugate bins, 2 for paired ones
    cplx v;
  };
  std::vector<Mode> modes;
  double vmax = 0.0;
  for (int m = 0; m < nh; ++m) vmax = std::max(vmax, std::hypot(out[m][0], out[m][1]));
  for (int m = 1; m < nh; ++m) {
    const cplx v(out[m][0], out[m][1]);
    if (std::abs(v) <= 1e-17 * vmax) continue;  // below roundoff: contributes nothing
    const double k = v0.wavenumber(m);
    const double q = q_hat_fn(Vec3(k, 0, 0));
    if (!(q < 0.0)) throw DomainError("energy_check: symbol must be negative away from k = 0");
    modes.push_back({k, q, -eo.rho * q / (k * k), m == n / 2 ? 1.0 : 2.0, v});
  }
  // The zero mode moves rigidly: its kinetic energy is constant and it is left out of both sums.
  const double parseval = v0.spacing / n;

  EnergySeries es;
  const double dt = horizon / steps;
  if (beta == 2.0) {
    for (int i = 0; i <= steps; ++i) {
      const double t = i * dt;
      double kin = 0.0, sto = 0.0;
      for (const auto& md : modes) {
        const double w = std::sqrt(-md.q);
        const double a = std::sin(w * t) / w, da = std::cos(w * t);
        kin += md.mult * 0.5 * eo.rho * std::norm(md.v * da);
        sto += md.mult * 0.5 * md.k * md.k * md.stiff * std::norm(md.v * a);
      }
      es.t.push_back(t);
      es.kinetic.push_back(kin * parseval);
      es.stored.push_back(sto * parseval);
    }
  } else {
    const SpectralMeasure sm(beta, eo.s_max, eo.panel_width);
    const auto& sn = sm.nodes();
    const auto& sw = sm.weights();
    const std::size_t ns = sn.size();
    // Per node: e^(i s dt) and the weights of psi_old (a) and psi_new (b) in
    // int_0^dt e^(is(dt-u)) [(1-u/dt) a + (u/dt) b] du = wa a + wb b.
    std::vector<cplx> rot(ns), wa(ns), wb(ns);
    for (std::size_t j = 0; j < ns; ++j) {
      const double s = sn[j];
      const cplx I(0.0, 1.0);
      const cplx e = std::exp(I * s * dt);
      rot[j] = e;
      const double x = s * dt;
      if (std::abs(x) < 1e-3) {
        wa[j] = dt * cplx(0.5 - x * x / 8.0, x / 3.0);
        wb[j] = dt * cplx(0.5 - x * x / 24.0, x / 6.0);
      } else {
        const cplx ix = I * x;
        wa[j] = dt * (e - 1.0 - ix * e) / (x * x);
        wb[j] = dt * (1.0 + ix - e) / (x * x);
      }
    }
    std::vector<std::vector<cplx>> y(modes.size(), std::vector<cplx>(ns, cplx(0.0)));
    std::vector<cplx> psi_old(modes.size());
    const cplx I(0.0, 1.0);
    auto du = [&](const Mode& md, double t) { return md.v * mittag_leffler(beta, 1.0, md.q * std::pow(t, beta)); };
    for (std::size_t m = 0; m < modes.size(); ++m) psi_old[m] = I * modes[m].k * modes[m].stiff * modes[m].v;
    const std::vector<cplx> psi0 = psi_old;
    for (int i = 0; i <= steps; ++i) {
      const double t = i * dt;
      double kin = 0.0, sto = 0.0;
      for (std::size_t m = 0; m < modes.size(); ++m) {
        const auto& md = modes[m];
        const cplx d = i == 0 ? md.v : du(md, t);
        const cplx psi = I * md.k * md.stiff * d;
        auto& ym = y[m];
        if (i > 0) {
          const cplx pa = psi_old[m];
          // Written out in real arithmetic: std::complex products take the slow Annex G path.
          const double ar = pa.real(), ai = pa.imag(), br = psi.real(), bi = psi.imag();
          for (std::size_t j = 0; j < ns; ++j) {
            const double yr = ym[j].real(), yi = ym[j].imag();
            const double er = rot[j].real(), ei = rot[j].imag();
            const double par = wa[j].real(), pai = wa[j].imag(), pbr = wb[j].real(), pbi = wb[j].imag();
            ym[j] = cplx(er * yr - ei * yi + par * ar - pai * ai + pbr * br - pbi * bi,
                         er * yi + ei * yr + par * ai + pai * ar + pbr * bi + pbi * br);
          }
          psi_old[m] = psi;
        }
        double acc = 0.0;
        for (std::size_t j = 0; j < ns; ++j) acc += sw[j] * (ym[j].real() * ym[j].real() + ym[j].imag() * ym[j].imag());
        // Beyond S: |y|^2 ~ (|psi(t)|^2 + |psi(0)|^2)/s^2 up to a term oscillating in s.
        if (i > 0) acc += (std::norm(psi) + std::norm(psi0[m])) * sm.tail_inverse_square();
        kin += md.mult * 0.5 * eo.rho * std::norm(d);
        sto += md.mult * 0.5 * acc / md.stiff;
      }
      es.t.push_back(t);
      es.kinetic.push_back(kin * parseval);
      es.stored.push_back(sto * parseval);
    }
  }
  es.min_stored = es.stored.front();
  for (std::size_t i = 0; i < es.t.size(); ++i) {
    es.total.push_back(es.kinetic[i] + es.stored[i]);
    es.min_stored = std::min(es.min_stored, es.stored[i]);
  }
  const double e0 = es.total.front();
  if (!(e0 > 0.0)) throw DomainError("energy_check: initial velocity carries no energy");
  for (double e : es.total) es.max_relative_drift = std::max(es.max_relative_drift, std::abs(e - e0) / e0);
  return es;
}

/// Gaussian bump exp(-x^2/(2 w^2)) on a 1D grid.
inline FieldGrid gaussian_bump(int n, double spacing, double width) {
  FieldGrid g(1, n, spacing);
  for (int j = 0; j < n; ++j) {
    const double x = g.coordinate(j) / width;
    g.values[j] = std::exp(-0.5 * x * x);
  }
  return g;
}

}  // namespace fracwave
