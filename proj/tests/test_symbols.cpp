#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "fracwave/symbols.hpp"

using namespace fracwave;

namespace {

SphericalMeasure three_atoms() {
  SphericalMeasure mu;
  mu.uniform_mass = 0.4;
  mu.atoms = {{Vec3(1, 0, 0), 1.0}, {Vec3(0, 0.6, 0.8), 2.0}, {Vec3(0, 1, 0), 0.5}};
  return mu;
}

Vec3 fd_gradient(const std::function<double(const Vec3&)>& f, const Vec3& k, double h) {
  Vec3 g;
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e[i] = h;
    g[i] = (f(k + e) - f(k - e)) / (2 * h);
  }
  return g;
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST(Symbols, UniformPartGivesIsotropicSymbol) {
  const auto mu = SphericalMeasure::uniform(2.5);
  for (double a : {1.2, 1.7, 2.0}) {
    const Vec3 k(0.3, -1.1, 0.4);
    EXPECT_NEAR(q_hat(mu, a, k), -2.5 * std::pow(k.norm(), a), 1e-14);
  }
}

TEST(Symbols, HomogeneityAndEvenness) {
  const auto mu = three_atoms();
  const Vec3 k(0.3, -0.8, 1.2);
  for (double a : {1.3, 1.9}) {
    EXPECT_NEAR(q_hat(mu, a, 2.7 * k), std::pow(2.7, a) * q_hat(mu, a, k), 1e-12);
    EXPECT_EQ(q_hat(mu, a, -k), q_hat(mu, a, k));
    EXPECT_LT(q_hat(mu, a, k), 0.0);
  }
}

TEST(Symbols, GradientsMatchFiniteDifferences) {
  const auto mu = three_atoms();
  const Vec3 k(0.5, -0.7, 0.9);
  for (double a : {1.3, 1.8}) {
    const Vec3 gq = fd_gradient([&](const Vec3& x) { return q_hat(mu, a, x); }, k, 1e-6);
    EXPECT_LT((q_hat_gradient(mu, a, k) - gq).norm(), 1e-8);
    const Vec3 gv = fd_gradient([&](const Vec3& x) { return generating_v(mu, a, x); }, k, 1e-6);
    EXPECT_LT((generating_v_gradient(mu, a, k) - gv).norm(), 1e-8);
    EXPECT_NEAR(-k.dot(flux_symbol(mu, a, k)), q_hat(mu, a, k), 1e-13);
  }
}

TEST(Symbols, StiffnessIsScaledHessianOfSymbol) {
  const auto mu = three_atoms();
  const Vec3 k(0.5, -0.7, 0.9);
  const double a = 1.6, h = 1e-5;
  Mat3 hess;
  for (int j = 0; j < 3; ++j) {
    Vec3 e = Vec3::Zero();
    e[j] = h;
    hess.col(j) = (q_hat_gradient(mu, a, k + e) - q_hat_gradient(mu, a, k - e)) / (2 * h);
  }
  const Mat3 c = stiffness_symbol(mu, a, k);
  EXPECT_LT((c + hess / (a * (a - 1.0))).norm(), 1e-7);
  EXPECT_EQ(classify(c), Definiteness::PositiveDefinite);
}

TEST(Symbols, GeneratingHessianMatchesFiniteDifference) {
  const auto mu = three_atoms();
  const Vec3 k(-0.2, 0.4, 1.1);
  const double a = 1.45, h = 1e-5;
  Mat3 hess;
  for (int j = 0; j < 3; ++j) {
    Vec3 e = Vec3::Zero();
    e[j] = h;
    hess.col(j) = (generating_v_gradient(mu, a, k + e) - generating_v_gradient(mu, a, k - e)) / (2 * h);
  }
  EXPECT_LT((generating_v_hessian(mu, a, k) - hess).norm(), 1e-8);
  EXPECT_EQ(classify(generating_v_hessian(mu, a, k)), Definiteness::NegativeDefinite);
}

TEST(Symbols, ConstitutiveIdentitiesOnRandomMeasures) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    SphericalMeasure mu;
    mu.uniform_mass = u01(rng);
    for (int j = 0; j < 3; ++j) mu.atoms.push_back({Vec3(n01(rng), n01(rng), n01(rng)).normalized(), 0.1 + u01(rng)});
    const double a = 1.01 + 0.99 * u01(rng);
    const Vec3 k(n01(rng), n01(rng), n01(rng));
    const double q = q_hat(mu, a, k), v = generating_v(mu, a, k);
    EXPECT_NEAR(-k.dot(stiffness_symbol(mu, a, k) * k), q, 1e-9 * std::abs(q));
    EXPECT_NEAR(k.dot(q_hat_gradient(mu, a, k)), a * q, 1e-9 * std::abs(q));
    EXPECT_NEAR(k.dot(generating_v_gradient(mu, a, k)), (a + 2.0) * v, 1e-9 * std::abs(v));
    const Mat3 hv = generating_v_hessian(mu, a, k);
    EXPECT_LT((hv - hv.transpose()).norm(), 1e-12 * hv.norm());
    const auto d = classify(hv, 1e-9);
    EXPECT_TRUE(d == Definiteness::NegativeDefinite || d == Definiteness::NegativeSemidefinite);
  }
}

TEST(Symbols, EllipsoidalMatrixAtOrderTwo) {
  const auto mu = three_atoms();
  const Vec3 k(0.3, 0.2, -0.5);
  EXPECT_NEAR(q_hat(mu, 2.0, k), -k.dot(ellipsoidal_matrix(mu) * k), 1e-15);
}

TEST(Symbols, DegenerateDirectionIsReported) {
  SphericalMeasure mu;
  mu.atoms = {{Vec3(1, 0, 0), 1.0}};
  EXPECT_THROW(f_direction(mu, 1.5, Vec3(0, 1, 0)), DegeneracyError);
  EXPECT_NEAR(f_direction(mu, 1.5, Vec3(1, 0, 0)), 1.0, 1e-15);
  int skipped = -1;
  stiffness_symbol(mu, 1.5, Vec3(0, 0, 1), &skipped);
  EXPECT_EQ(skipped, 1);
}

TEST(Symbols, IsotropicStiffnessDefiniteness) {
  for (double a : {1.2, 1.8, 2.0}) {
    const auto h = h_hat_isotropic(a, 1.0, Vec3(0.1, 0.7, -0.2));
    EXPECT_EQ(h.definiteness, Definiteness::NegativeDefinite) << a;
  }
}

TEST(Dispersion, AttenuationSlopeAndElasticLimit) {
  FracParams p;
  p.beta = 1.2;
  p.alpha = 1.6;
  const double w1 = 1e2, w2 = 1e6;
  const double slope = std::log(dispersion(p, w2).attenuation / dispersion(p, w1).attenuation) / std::log(w2 / w1);
  EXPECT_NEAR(slope, p.gamma(), 1e-12);
  FracParams el;
  EXPECT_EQ(dispersion(el, 10.0).attenuation, 0.0);
  EXPECT_NEAR(dispersion(el, 10.0).phase_velocity, 1.0, 1e-15);
  EXPECT_THROW(dispersion(p, 0.0), DomainError);
  EXPECT_THROW(dispersion(p, -1.0), DomainError);
}

TEST(Dispersion, RootSolvesTheCharacteristicEquation) {
  FracParams p;
  p.beta = 1.3;
  p.alpha = 1.9;
  p.rho = 2.0;
  p.mass_m = 0.7;
  const double w = 3.0;
  const auto k = dispersion(p, w).k;
  const std::complex<double> lhs =
      p.rho * std::pow(std::complex<double>(0.0, -w), p.beta) + p.mass_m * std::pow(k, p.alpha);
  EXPECT_LT(std::abs(lhs), 1e-12);
  EXPECT_GT(k.imag(), 0.0);
  EXPECT_GT(k.real(), 0.0);
}

TEST(FractionalCalculus, PowerFunctions) {
  const double dt = 1e-3;
  std::vector<double> one(1001, 1.0), lin(1001), quadratic(1001);
  for (int i = 0; i <= 1000; ++i) {
    lin[i] = i * dt;
    quadratic[i] = lin[i] * lin[i];
  }
  const double g = 0.4;
  const auto i1 = fractional_integral(g, one, dt);
  const auto il = fractional_integral(g, lin, dt);
  // exact for piecewise-linear data up to rounding accumulated over the weights
  EXPECT_NEAR(i1.back(), 1.0 / std::tgamma(g + 1.0), 1e-11);
  EXPECT_NEAR(il.back(), 1.0 / std::tgamma(g + 2.0), 1e-11);
  // D^beta t^2 = 2 t^(2-beta)/Gamma(3-beta)
  for (double beta : {0.6, 1.5}) {
    const auto d = caputo_derivative(beta, quadratic, dt);
    EXPECT_NEAR(d.back(), 2.0 / std::tgamma(3.0 - beta), 1e-5) << beta;
  }
  EXPECT_THROW(caputo_derivative(2.5, quadratic, dt), DomainError);
}

TEST(MeasureJson, RoundTripAndErrors) {
  const auto mu = three_atoms();
  const auto back = SphericalMeasure::from_json(mu.to_json());
  ASSERT_EQ(back.atoms.size(), 3u);
  EXPECT_EQ(back.uniform_mass, mu.uniform_mass);
  EXPECT_LT((back.atoms[1].dir - mu.atoms[1].dir).norm(), 1e-15);

  const auto good = temp_file("fracwave_measure_ok.json", mu.to_json().dump());
  EXPECT_EQ(SphericalMeasure::load(good.string()).atoms.size(), 3u);
  EXPECT_THROW(SphericalMeasure::load("/nonexistent/measure.json"), IoError);
  const auto bad = temp_file("fracwave_measure_bad.json", "{\"atoms\": [{\"dir\": [1, 0], \"weight\": 1}]}");
  EXPECT_THROW(SphericalMeasure::load(bad.string()), IoError);
  const auto empty = temp_file("fracwave_measure_empty.json", "{}");
  EXPECT_THROW(SphericalMeasure::load(empty.string()), IoError);
  const auto junk = temp_file("fracwave_measure_junk.json", "not json");
  EXPECT_THROW(SphericalMeasure::load(junk.string()), IoError);
}

TEST(Params, RangeChecks) {
  FracParams p;
  p.beta = 1.5;
  p.alpha = 1.2;
  EXPECT_THROW(p.validate(), DomainError);
  p.alpha = 2.1;
  EXPECT_THROW(p.validate(), DomainError);
  EXPECT_THROW(q_hat(SphericalMeasure::uniform(1.0), 0.9, Vec3(1, 0, 0)), DomainError);
}
