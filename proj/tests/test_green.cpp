#include <cmath>
#include <numbers>

#include <Eigen/Geometry>
#include <gtest/gtest.h>

#include "fracwave/green.hpp"
#include "fracwave/oracle.hpp"

using namespace fracwave;

namespace {

FracParams params(double beta, double alpha, double rho = 1.0, double m = 1.0) {
  FracParams p;
  p.beta = beta;
  p.alpha = alpha;
  p.rho = rho;
  p.mass_m = m;
  return p;
}

// tests/oracles/freeze.py: subordination integrals int W_gamma(xi) K(x/xi) xi^-d dxi in 25-digit
// arithmetic, with the Wright weight summed as a 90-digit power series.
struct GreenRef {
  double beta, alpha, x;
  int dim;
  double g, h;
};
const GreenRef kRefs[] = {
    {1.2, 1.6, 0.5, 1, 0.2596299862114888, 0.35295292317974519},
    {1.2, 1.6, 1.5, 1, 0.16689418742796818, 0.079672060123974213},
    {1.3, 1.9, 0.8, 1, 0.26250897580024005, 0.26862527577362323},
    {1.2, 1.6, 0.7, 3, 0.0046640764837720706, 0.084157956088853671},
};

}  // namespace

TEST(Green, MatchesIndependentReference) {
  for (const auto& r : kRefs) {
    const auto p = params(r.beta, r.alpha);
    for (Which w : {Which::G, Which::H}) {
      const double ref = w == Which::G ? r.g : r.h;
      const double v = r.dim == 1 ? green1d(p, 1.0, r.x, w) : green3d_isotropic(p, 1.0, r.x, w);
      EXPECT_NEAR(v, ref, 1e-12 * std::abs(ref)) << r.beta << "," << r.alpha << " x=" << r.x << " " << to_string(w);
    }
  }
}

TEST(Green, ScalingInTimeAndCoefficient) {
  const auto p = params(1.3, 1.9, 2.0, 0.5);
  const double c = std::pow(p.mass_m / p.rho, 1.0 / p.alpha);
  for (double t : {0.5, 3.0}) {
    const double len = std::pow(t, p.gamma()) * c;
    const auto unit = params(1.3, 1.9);
    for (double x : {0.2, 1.1}) {
      EXPECT_NEAR(green1d(p, t, x, Which::G), green1d(unit, 1.0, x / len, Which::G) / len, 1e-13);
      EXPECT_NEAR(green1d(p, t, x, Which::H), t * green1d(unit, 1.0, x / len, Which::H) / len, 1e-13);
      EXPECT_NEAR(green3d_isotropic(p, t, x, Which::G), green3d_isotropic(unit, 1.0, x / len, Which::G) / std::pow(len, 3),
                  1e-12);
    }
  }
}

TEST(Green, EvenInSpace) {
  const auto p = params(1.2, 1.6);
  for (double x : {0.3, 2.0}) EXPECT_EQ(green1d(p, 1.0, x, Which::G), green1d(p, 1.0, -x, Which::G));
}

TEST(Green, NeutralCaseIsTheSpatialKernel) {
  // beta = alpha: G^(1)(1, x) = X_alpha(x); H^(1)(1, x) = Y_alpha(x).
  for (double a : {1.4, 1.8}) {
    const auto p = params(a, a);
    for (double x : {0.3, 1.7}) {
      EXPECT_NEAR(green1d(p, 1.0, x, Which::G), x_alpha(a, x), 1e-14);
      EXPECT_NEAR(green1d(p, 1.0, x, Which::H), y_alpha(a, x), 1e-13);
      EXPECT_NEAR(green3d_isotropic(p, 1.0, x, Which::G), x3_alpha(a, x), 1e-13);
    }
  }
}

TEST(Green, OrderTwoIsHalfTheMainardiFunction) {
  for (double beta : {1.2, 1.5, 1.8}) {
    const auto p = params(beta, 2.0);
    for (double x : {0.1, 0.9, 2.4}) {
      EXPECT_NEAR(green1d(p, 1.0, x, Which::G), 0.5 * m_wright(GammaIndex(beta / 2), x), 1e-13);
      EXPECT_NEAR(green1d(p, 1.0, x, Which::H), 0.5 * n_wright(GammaIndex(beta / 2), x), 1e-13);
    }
  }
}

TEST(Green, UnitMassIn1D) {
  const auto p = params(1.3, 1.9);
  quad::Options o;
  o.abs_tol = 1e-12;
  o.rel_tol = 1e-10;
  auto g = [&](double x) { return green1d(p, 1.0, x, Which::G); };
  const double m = 2.0 * (quad::integrate(g, 0.0, 4.0, o).value + quad::integrate_to_infinity(g, 4.0, o).value);
  EXPECT_NEAR(m, 1.0, 1e-9);
}

TEST(Green, SubordinationIdentityResiduals) {
  std::vector<double> kappa;
  for (int i = 0; i <= 50; ++i) kappa.push_back(0.1 * i);
  const auto r = identity_check(1.2, 1.6, kappa);
  EXPECT_LT(r.first, 1e-6);
  EXPECT_LT(r.second, 1e-5);
}

TEST(Green, TwoThirdsRepresentationAgrees) {
  for (double a : {1.5, 1.9}) {
    const auto p = params(2.0 * a / 3.0, a);
    for (double r : {0.05, 0.8, 2.5}) EXPECT_NEAR(green1d(p, 1.0, r, Which::G), green_u23(a, r), 1e-10);
  }
}

TEST(Green, OriginFactoredFormIsContinuous) {
  const auto p = params(1.2, 1.6);
  const double r0 = 1e-3;
  const double below = green3d_isotropic(p, 1.0, r0 * (1 - 1e-9), Which::G);
  const double above = green3d_isotropic(p, 1.0, r0 * (1 + 1e-9), Which::G);
  EXPECT_NEAR(below, above, 1e-6 * std::abs(above));
  const auto f = green3d_isotropic_factored(p, 1.0, 0.0, Which::G);
  EXPECT_EQ(f.exponent, p.alpha - 3.0);
  EXPECT_TRUE(std::isfinite(f.coefficient));
  EXPECT_THROW(green3d_isotropic(p, 1.0, 0.0, Which::G), SingularityError);
}

TEST(GreenAniso, UniformMeasureReducesToIsotropic) {
  const auto mu = SphericalMeasure::uniform(1.0);
  const auto p = params(1.2, 1.6);
  const Vec3 x(0.4, 0.7, -0.5);
  for (Which w : {Which::G, Which::H})
    EXPECT_NEAR(green3d_aniso(mu, p, 1.0, x, w), green3d_isotropic(p, 1.0, x.norm(), w), 1e-6);
}

TEST(GreenAniso, RotationAndReflection) {
  SphericalMeasure mu;
  mu.uniform_mass = 0.3;
  mu.atoms = {{Vec3(1, 0, 0), 1.0}, {Vec3(0, 0.6, 0.8), 0.6}};
  const Mat3 R = Eigen::AngleAxisd(0.9, Vec3(1, -1, 2).normalized()).toRotationMatrix();
  SphericalMeasure mr = mu;
  for (auto& a : mr.atoms) a.dir = R * a.dir;
  const auto p = params(1.5, 1.5);
  const Vec3 x(0.3, -0.2, 0.6);
  const double v = green3d_aniso(mu, p, 1.0, x, Which::G);
  EXPECT_NEAR(green3d_aniso(mr, p, 1.0, R * x, Which::G), v, 1e-10);
  EXPECT_NEAR(green3d_aniso(mu, p, 1.0, -x, Which::G), v, 1e-10);
}

TEST(GreenAniso, OrderTwoIsEllipsoidal) {
  SphericalMeasure mu;
  mu.atoms = {{Vec3(1, 0, 0), 2.0}, {Vec3(0, 1, 0), 1.0}, {Vec3(0, 0, 1), 0.5}};
  const auto p = params(1.5, 2.0);
  // diag(2, 1, 0.5): stretch to the unit-coefficient isotropic solution
  const Vec3 x(0.4, 0.3, 0.2);
  const double r = std::sqrt(x[0] * x[0] / 2.0 + x[1] * x[1] + x[2] * x[2] / 0.5);
  EXPECT_NEAR(green3d_aniso(mu, p, 1.0, x, Which::G), green3d_isotropic(p, 1.0, r, Which::G) / std::sqrt(1.0), 1e-12);
}

TEST(GreenAniso, MollifiedElasticWaveAgainstFft) {
  SphericalMeasure mu;
  mu.atoms = {{Vec3(1, 0, 0), 1.0}, {Vec3(0, 1, 0), 1.5}, {Vec3(0, 0, 1), 0.6}};
  const auto p = params(2.0, 2.0);
  const double eps = 0.45;
  IfftOptions io;
  io.multiplier = gaussian_mollifier(eps, ellipsoidal_matrix(mu));
  const FieldGrid grid = FieldGrid::with_extent(3, 128, 20.0);
  const FieldGrid f = ifft_green(measure_symbol(mu, p), 2.0, 1.0, grid, Which::H, io);
  for (int i : {68, 74, 80})
    for (int j : {60, 66}) {
      const Vec3 x(grid.coordinate(i), grid.coordinate(j), grid.coordinate(70));
      EXPECT_NEAR(green3d_mollified_alpha2(mu, p, 1.0, x, Which::H, eps), f.at(i, j, 70), 1e-10);
    }
  EXPECT_THROW(green3d_mollified_alpha2(mu, p, 1.0, Vec3::Zero(), Which::H, eps), DomainError);
}

TEST(GreenAniso, DegenerateMeasureSurfaces) {
  SphericalMeasure mu;
  mu.atoms = {{Vec3(1, 0, 0), 1.0}};
  EXPECT_THROW(green3d_aniso(mu, params(1.2, 1.6), 1.0, Vec3(0.2, 0.1, 0.3), Which::G), DegeneracyError);
}

TEST(Green, RequestValidationAndBatchEvaluation) {
  SolutionRequest req;
  req.params = params(1.2, 1.6);
  req.points = {Vec3(0.5, 0, 0), Vec3(1.5, 0, 0)};
  const auto v = evaluate(req);
  EXPECT_NEAR(v[0], kRefs[0].g, 1e-12);
  req.dimension = 2;
  EXPECT_THROW(evaluate(req), DomainError);
  req.dimension = 1;
  req.t = 0.0;
  EXPECT_THROW(evaluate(req), DomainError);
  req.t = 1.0;
  req.measure = SphericalMeasure::uniform(1.0);
  EXPECT_THROW(evaluate(req), DomainError);
  EXPECT_THROW(green1d(params(1.8, 1.6), 1.0, 0.5, Which::G), DomainError);
}
