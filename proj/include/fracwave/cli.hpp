#pragma once

#include <algorithm>
#include <cmath>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracwave/csv.hpp"
#include "fracwave/errors.hpp"
#include "fracwave/green.hpp"
#include "fracwave/kernels.hpp"
#include "fracwave/oracle.hpp"
#include "fracwave/symbols.hpp"
#include "fracwave/validate.hpp"
#include "fracwave/wright.hpp"

namespace fracwave::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kNumerical = 2, kIo = 3 };

/// Raised for malformed flags that CLI11 cannot reject on its own.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// "a:b:n" with n >= 1 points, a <= b; log spacing needs a > 0.
struct GridSpec {
  double a = 0.0, b = 0.0;
  int n = 0;
  bool log = false;

  static GridSpec parse(const std::string& s) {
    GridSpec g;
    std::vector<std::string> parts;
    std::stringstream in(s);
    for (std::string p; std::getline(in, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw UsageError("--grid expects a:b:n, got '" + s + "'");
    try {
      std::size_t used = 0;
      g.a = std::stod(parts[0], &used);
      if (used != parts[0].size()) throw UsageError("");
      g.b = std::stod(parts[1], &used);
      if (used != parts[1].size()) throw UsageError("");
      const long n = std::stol(parts[2], &used);
      if (used != parts[2].size()) throw UsageError("");
      g.n = int(n);
    } catch (const std::exception&) {
      throw UsageError("--grid expects numbers a:b:n, got '" + s + "'");
    }
    if (g.n < 1) throw UsageError("--grid: empty grid '" + s + "'");
    if (!(g.a <= g.b) || !std::isfinite(g.a) || !std::isfinite(g.b)) throw UsageError("--grid: need finite a <= b");
    if (g.n == 1 && g.a != g.b) throw UsageError("--grid: a single point needs a == b");
    return g;
  }

  std::vector<double> points() const {
    if (log && !(a > 0.0)) throw UsageError("--grid: logarithmic spacing needs a > 0");
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) {
      const double f = n == 1 ? 0.0 : double(i) / (n - 1);
      v[i] = log ? std::exp(std::log(a) + f * (std::log(b) - std::log(a))) : a + f * (b - a);
    }
    return v;
  }
};

inline Vec3 parse_vec3(const std::string& s) {
  std::vector<double> c;
  std::stringstream in(s);
  for (std::string p; std::getline(in, p, ',');) {
    try {
      c.push_back(std::stod(p));
    } catch (const std::exception&) {
      throw UsageError("expected x,y,z, got '" + s + "'");
    }
  }
  if (c.size() != 3) throw UsageError("expected x,y,z, got '" + s + "'");
  const Vec3 v(c[0], c[1], c[2]);
  if (!(v.norm() > 0.0)) throw UsageError("direction must be nonzero");
  return v.normalized();
}

/// Everything a subcommand needs, filled by the parser.
struct RunConfig {
  std::string subcommand;
  FracParams params;
  double gamma = 0.5;
  std::string measure_path;  // empty: isotropic with params.mass_m
  int dim = 1;
  double t = 1.0;
  std::string grid;
  bool log_grid = false;
  std::string which = "G";
  std::string out;
  std::string fn = "x_alpha";
  std::string direction = "1,0,0";
  QuadratureSpec quad;
  // energy
  int steps = 1000;
  int points = 4096;
  double spacing = 0.02;
  double width = 1.0;
  EnergyOptions energy;
  // validate
  std::vector<int> only;
  std::string mutate = "none";
  std::string figures;
};

inline const char* kFigureRecipes = R"(Figure recipes (CSV, one curve per run):
  Z_alpha, scaled as 30 Z_1, 20 Z_1.5, Z_1.9:
    fracwave kernel --fn z_alpha --alpha 1   --grid 0.01:5:500
    fracwave kernel --fn z_alpha --alpha 1.5 --grid 0.01:5:500
    fracwave kernel --fn z_alpha --alpha 1.9 --grid 0.01:5:500
  M_gamma for gamma = 1/2, 1/3, 2/3:
    fracwave kernel --fn m_wright --gamma 0.5 --grid 0:4:401   (likewise --gamma 0.333333333333333 and 0.666666666666667)
  M_2/3 and N_2/3:
    fracwave kernel --fn m_wright_23 --grid 0:4:401
    fracwave kernel --fn n_wright_23 --grid 0:4:401
  G^(1)/2 and G^(3)/2 at gamma = 2/3 (halve the value column):
    fracwave green --dim 1 --alpha 1.9 --beta 1.2666666666666666 --t 1 --grid 0.05:4:80
    fracwave green --dim 1 --alpha 1.5 --beta 1 --t 1 --grid 0.05:4:80
    fracwave green --dim 3 --alpha 1.9 --beta 1.2666666666666666 --t 1 --grid 0.05:4:80
    fracwave green --dim 3 --alpha 1.5 --beta 1 --t 1 --grid 0.05:4:80
  All of the above at once, with shape checks:
    fracwave validate --only 10 --figures DIR
)";

namespace detail {

inline std::string params_tag(const RunConfig& c) {
  char buf[200];
  std::snprintf(buf, sizeof buf, "beta=%.17g;alpha=%.17g;rho=%.17g;M=%.17g", c.params.beta, c.params.alpha,
                c.params.rho, c.params.mass_m);
  return buf;
}

/// Writes to --out when given, else to the supplied stream. The file is opened before
/// any computation so that an unwritable path fails fast.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) file_ = std::make_unique<std::ofstream>(open_output(path));
    stream_ = file_ ? file_.get() : &fallback;
  }
  std::ostream& stream() { return *stream_; }
  void finish() {
    stream_->flush();
    if (!*stream_) throw IoError("write failed");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

inline std::vector<double> grid_points(const RunConfig& c, const std::string& fallback, bool log = false) {
  GridSpec g = GridSpec::parse(c.grid.empty() ? fallback : c.grid);
  g.log = log || c.log_grid;
  return g.points();
}

inline int cmd_kernel(const RunConfig& c, std::ostream& out) {
  const auto ys = grid_points(c, "0.01:5:500");
  const std::string& f = c.fn;
  std::function<double(double)> eval;
  if (f == "x_alpha") eval = [&](double y) { return x_alpha(c.params.alpha, y); };
  else if (f == "y_alpha") eval = [&](double y) { return y_alpha(c.params.alpha, y); };
  else if (f == "x3_alpha") eval = [&](double y) { return x3_alpha(c.params.alpha, y); };
  else if (f == "y3_alpha") eval = [&](double y) { return y3_alpha(c.params.alpha, y); };
  else if (f == "z_alpha") eval = [&](double y) { return z_alpha(c.params.alpha, y); };
  else if (f == "m_wright") eval = [&](double z) { return m_wright(GammaIndex(c.gamma), z); };
  else if (f == "n_wright") eval = [&](double z) { return n_wright(GammaIndex(c.gamma), z); };
  else if (f == "m_wright_23") eval = [](double z) { return m_wright_23(z); };
  else if (f == "n_wright_23") eval = [](double z) { return n_wright_23(z); };
  else throw UsageError("--fn: unknown kernel '" + f + "'");
  std::vector<double> values;
  values.reserve(ys.size());
  for (double y : ys) values.push_back(eval(y));
  Sink sink(c.out, out);
  CsvWriter w(sink.stream(), {"y", "value"});
  for (std::size_t i = 0; i < ys.size(); ++i) w.row({ys[i], values[i]});
  sink.finish();
  return kOk;
}

inline int cmd_green(const RunConfig& c, std::ostream& out) {
  SolutionRequest req;
  req.params = c.params;
  req.dimension = c.dim;
  req.t = c.t;
  req.which = parse_which(c.which);
  if (!c.measure_path.empty()) {
    if (c.dim != 3) throw UsageError("--measure needs --dim 3");
    req.measure = SphericalMeasure::load(c.measure_path);
  }
  c.quad.validate();
  const auto rs = grid_points(c, "0.05:4:80");
  const Vec3 dir = parse_vec3(c.direction);
  for (double r : rs) req.points.push_back(c.dim == 1 ? Vec3(r, 0.0, 0.0) : Vec3(r * dir));
  Sink sink(c.out, out);
  const auto values = evaluate(req, c.quad);
  const std::string tag = params_tag(c);
  CsvWriter w(sink.stream(), {"t", c.dim == 1 ? "x" : "r", "value", "which", "params"});
  for (std::size_t i = 0; i < rs.size(); ++i) w.row({c.t, rs[i], values[i], to_string(req.which), tag});
  sink.finish();
  return kOk;
}

/// Least-squares slope of log attenuation against log omega.
inline double log_slope(const std::vector<double>& w, const std::vector<double>& att) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double x = std::log(w[i]), y = std::log(att[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline int cmd_dispersion(const RunConfig& c, std::ostream& out) {
  c.params.validate();
  GridSpec g = GridSpec::parse(c.grid.empty() ? "1e2:1e6:41" : c.grid);
  if (!(g.a > 0.0)) throw UsageError("dispersion: omega must be positive");
  g.log = c.grid.empty() || c.log_grid;
  const auto ws = g.points();
  std::vector<double> att, vel;
  for (double w : ws) {
    const auto d = dispersion(c.params, w);
    att.push_back(d.attenuation);
    vel.push_back(d.phase_velocity);
  }
  // The fit needs two frequencies and positive attenuation; otherwise it is reported as nan.
  const bool fit = ws.size() >= 2 && std::all_of(att.begin(), att.end(), [](double a) { return a > 0.0; });
  const double slope = fit ? log_slope(ws, att) : std::nan("");
  Sink sink(c.out, out);
  CsvWriter w(sink.stream(), {"omega", "attenuation", "phase_velocity", "fitted_log_slope"});
  for (std::size_t i = 0; i < ws.size(); ++i) w.row({ws[i], att[i], vel[i], slope});
  sink.finish();
  return kOk;
}

inline int cmd_energy(const RunConfig& c, std::ostream& out) {
  c.params.validate();
  if (c.steps < 1) throw UsageError("--steps must be >= 1");
  if (c.points < 8 || (c.points & (c.points - 1)) != 0) throw UsageError("--points must be a power of two >= 8");
  const FieldGrid v0 = gaussian_bump(c.points, c.spacing, c.width);
  EnergyOptions eo = c.energy;
  eo.rho = c.params.rho;
  Sink sink(c.out, out);
  const EnergySeries es = energy_check(c.params.beta, isotropic_symbol(c.params), v0, c.t, c.steps, eo);
  CsvWriter w(sink.stream(), {"t", "kinetic", "stored", "total", "relative_drift"});
  for (std::size_t i = 0; i < es.t.size(); ++i)
    w.row({es.t[i], es.kinetic[i], es.stored[i], es.total[i], std::abs(es.total[i] - es.total[0]) / es.total[0]});
  sink.finish();
  return kOk;
}

inline int cmd_validate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  validation::SuiteOptions so;
  so.mutation = validation::parse_mutation(c.mutate);
  so.figure_dir = c.figures;
  for (int id : c.only)
    if (id < 1 || id > int(validation::all_checks().size())) throw UsageError("--only: no check " + std::to_string(id));
  Sink sink(c.out, out);
  const auto results =
      validation::run_suite(so, c.only, [&](const validation::CheckResult& r) { err << validation::summary_line(r) << '\n'; });
  const auto report = validation::to_json(results);
  sink.stream() << report.dump(2) << '\n';
  sink.finish();
  return report["passed"].get<bool>() ? kOk : kNumerical;
}

}  // namespace detail

/// Parse `args` (without the program name) and run one subcommand.
/// CSV and JSON go to `out` unless --out is given; progress and diagnostics go to `err`.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Fractional viscoelastic wave kernels, fundamental solutions and their oracles", "fracwave"};
  app.footer(kFigureRecipes);
  app.require_subcommand(1);

  auto add_params = [&](CLI::App* s) {
    s->add_option("--alpha", c.params.alpha, "space order, 0 < alpha <= 2")->capture_default_str();
    s->add_option("--beta", c.params.beta, "time order, 0 < beta <= alpha")->capture_default_str();
    s->add_option("--rho", c.params.rho, "density")->capture_default_str();
    s->add_option("--mass", c.params.mass_m, "isotropic stiffness M")->capture_default_str();
  };
  auto add_grid = [&](CLI::App* s, const std::string& dflt) {
    s->add_option("--grid", c.grid, "sample grid a:b:n (default " + dflt + ")");
    s->add_flag("--log", c.log_grid, "geometric spacing of the grid");
  };
  auto add_out = [&](CLI::App* s) { s->add_option("--out", c.out, "output file (default stdout)"); };

  auto* kernel = app.add_subcommand("kernel", "tabulate a kernel profile as CSV (y,value)");
  add_params(kernel);
  kernel->add_option("--gamma", c.gamma, "Wright index for m_wright, n_wright")->capture_default_str();
  kernel
      ->add_option("--fn", c.fn,
                   "x_alpha | y_alpha | x3_alpha | y3_alpha | z_alpha | m_wright | n_wright | m_wright_23 | n_wright_23")
      ->capture_default_str();
  add_grid(kernel, "0.01:5:500");
  add_out(kernel);

  auto* green = app.add_subcommand("green", "fundamental solution G or H along a ray as CSV");
  add_params(green);
  green->add_option("--dim", c.dim, "1 or 3")->check(CLI::IsMember({1, 3}))->capture_default_str();
  green->add_option("--t", c.t, "time")->capture_default_str();
  green->add_option("--which", c.which, "G (displacement source) or H (velocity source)")
      ->check(CLI::IsMember({"G", "H"}))
      ->capture_default_str();
  green->add_option("--measure", c.measure_path, "spherical measure JSON (3D anisotropic)");
  green->add_option("--direction", c.direction, "ray direction x,y,z in 3D")->capture_default_str();
  green->add_option("--quad-theta", c.quad.sphere_nodes_theta, "sphere nodes in the polar variable")
      ->capture_default_str();
  green->add_option("--quad-phi", c.quad.sphere_nodes_phi, "sphere nodes per ring")->capture_default_str();
  green->add_option("--quad-rel-tol", c.quad.rel_tol, "Mellin relative tolerance")->capture_default_str();
  green->add_option("--quad-panels", c.quad.mellin_nodes, "Mellin panel budget")->capture_default_str();
  green->add_option("--quad-xi-cutoff", c.quad.xi_cutoff, "weight threshold truncating xi")->capture_default_str();
  green->add_option("--quad-origin-radius", c.quad.origin_radius, "origin series radius in 3D")
      ->capture_default_str();
  green->add_flag("--quad-self-check", c.quad.self_check, "repeat sphere quadratures at doubled nodes");
  add_grid(green, "0.05:4:80");
  add_out(green);

  auto* disp = app.add_subcommand("dispersion", "attenuation and phase velocity against omega as CSV");
  add_params(disp);
  add_grid(disp, "1e2:1e6:41, geometric");
  add_out(disp);

  auto* energy = app.add_subcommand("energy", "kinetic, stored and total energy of a 1D Gaussian pulse as CSV");
  add_params(energy);
  energy->add_option("--t", c.t, "horizon")->capture_default_str();
  energy->add_option("--steps", c.steps, "time steps")->capture_default_str();
  energy->add_option("--points", c.points, "grid points (power of two)")->capture_default_str();
  energy->add_option("--spacing", c.spacing, "grid spacing")->capture_default_str();
  energy->add_option("--width", c.width, "initial velocity pulse width")->capture_default_str();
  energy->add_option("--quad-smax", c.energy.s_max, "spectral cutoff of the relaxation measure")
      ->capture_default_str();
  energy->add_option("--quad-panel", c.energy.panel_width, "spectral panel width")->capture_default_str();
  add_out(energy);

  auto* validate = app.add_subcommand("validate", "run the validation suite; JSON report, exit 0 iff all pass");
  validate->add_option("--only", c.only, "check ids to run (default all)")->delimiter(',');
  validate->add_option("--mutate", c.mutate, "inject a defect: none | flip-x-sign")->capture_default_str();
  validate->add_option("--figures", c.figures, "directory for figure CSVs");
  add_out(validate);

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "fracwave: " << e.what() << '\n';
    return kUsage;
  }
  if (c.dim == 1 && green->parsed() && !c.measure_path.empty()) {
    err << "fracwave: --measure needs --dim 3\n";
    return kUsage;
  }
  if (c.t <= 0.0 || !std::isfinite(c.t)) {
    err << "fracwave: --t must be positive\n";
    return kUsage;
  }

  try {
    if (kernel->parsed()) return detail::cmd_kernel(c, out);
    if (green->parsed()) return detail::cmd_green(c, out);
    if (disp->parsed()) return detail::cmd_dispersion(c, out);
    if (energy->parsed()) return detail::cmd_energy(c, out);
    return detail::cmd_validate(c, out, err);
  } catch (const IoError& e) {
    err << "fracwave: " << e.what() << '\n';
    return kIo;
  } catch (const UsageError& e) {
    err << "fracwave: " << e.what() << '\n';
    return kUsage;
  } catch (const DegeneracyError& e) {
    err << "fracwave: degenerate measure: " << e.what() << '\n';
    return kNumerical;
  } catch (const SingularityError& e) {
    err << "fracwave: " << e.what() << '\n';
    return kNumerical;
  } catch (const PoleError& e) {
    err << "fracwave: " << e.what() << '\n';
    return kNumerical;
  } catch (const DomainError& e) {
    // Parameter ranges: the caller asked for something outside the model.
    err << "fracwave: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "fracwave: numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
}

}  // namespace fracwave::cli
