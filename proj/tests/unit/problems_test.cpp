#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cylfde/problems.hpp"
#include "cylfde/sampling.hpp"

namespace {

using std::numbers::pi;

// RK4 integration of da/ds = A^T a over [0, tau]: the characteristic flow of
// the approximated Burgers-Hopf equation. w(a, tau) = w0(a(tau)).
std::vector<double> flow(const Eigen::MatrixXd& a_mat, std::vector<double> a, double tau,
                         int steps = 2000) {
  const Eigen::Index n = a_mat.rows();
  Eigen::Map<Eigen::VectorXd> v(a.data(), n);
  const double h = tau / steps;
  const Eigen::MatrixXd at = a_mat.transpose();
  for (int s = 0; s < steps; ++s) {
    const Eigen::VectorXd k1 = at * v;
    const Eigen::VectorXd k2 = at * (v + 0.5 * h * k1);
    const Eigen::VectorXd k3 = at * (v + 0.5 * h * k2);
    const Eigen::VectorXd k4 = at * (v + h * k3);
    v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return a;
}

TEST(Transport, LinearVariantValues) {
  const auto p = cylfde::fte_problem(cylfde::FteConfig::make(4, cylfde::FteVariant::LinearIC));
  const std::vector<double> a = {0.0, 0.5, 0.0, 0.0};
  EXPECT_DOUBLE_EQ(p.analytic(a, 1.0), -0.5);
  const std::vector<double> b = {0.3, -0.2, 0.9, 0.1};
  EXPECT_DOUBLE_EQ(p.analytic(b, 0.0), p.initial(b));
}

TEST(Transport, NonlinearVariantAlongCharacteristics) {
  const auto cfg = cylfde::FteConfig::make(4, cylfde::FteVariant::NonlinearIC);
  const auto p = cylfde::fte_problem(cfg);
  const std::vector<double> zero(4, 0.0);
  EXPECT_DOUBLE_EQ(p.analytic(zero, 1.0), -4.0);
  // a_k(t) = a_k - u_k t carries the initial value.
  std::vector<double> shifted(4);
  for (std::size_t k = 0; k < 4; ++k) shifted[k] = zero[k] - cfg.u_coeffs[k] * 1.0;
  EXPECT_DOUBLE_EQ(p.initial(shifted), -4.0);
}

TEST(Transport, VariantCoefficients) {
  const auto lin = cylfde::FteConfig::make(20, cylfde::FteVariant::LinearIC, 1.0, 2.0);
  for (std::size_t k = 0; k < 20; ++k) EXPECT_EQ(lin.u_coeffs[k], k == 1 ? 2.0 : 0.0);
  const auto nl = cylfde::FteConfig::make(20, cylfde::FteVariant::NonlinearIC);
  for (std::size_t k = 0; k < 20; ++k) EXPECT_EQ(nl.u_coeffs[k], k <= 14 ? 1.0 : 0.0);
}

TEST(Transport, PartialsLinear) {
  const auto p = cylfde::fte_problem(cylfde::FteConfig::make(5, cylfde::FteVariant::LinearIC, 2.0, 3.0));
  const std::vector<double> a(5, 0.1);
  const auto d = cylfde::analytic_partials(p, a, 0.5);
  EXPECT_DOUBLE_EQ(d.df_dt, -2.0 * 9.0);
  EXPECT_EQ(d.df_da, (std::vector<double>{0.0, 6.0, 0.0, 0.0, 0.0}));
  EXPECT_THROW(cylfde::analytic_partials(p, std::vector<double>(3), 0.0), cylfde::ShapeError);
}

TEST(Transport, TranslationProperty) {
  const auto cfg = cylfde::FteConfig::make(30, cylfde::FteVariant::NonlinearIC, 1.5, 0.7);
  const auto p = cylfde::fte_problem(cfg);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(30), shifted(30);
    const double t = 0.5 * (u(rng) + 1.0);
    for (std::size_t k = 0; k < 30; ++k) {
      a[k] = u(rng);
      shifted[k] = a[k] - cfg.u_coeffs[k] * t;
    }
    EXPECT_NEAR(p.analytic(a, t), p.initial(shifted), 1e-13);
  }
}

TEST(OperatorMatrix, DiagonalEigenvalues) {
  const auto a = cylfde::bhe_operator_matrix(cylfde::BasisSpec::fourier(40));
  EXPECT_NEAR(a(0, 0), 0.0, 1e-10);
  EXPECT_NEAR(a(1, 1), -4.0 * pi * pi, 1e-8);
  EXPECT_NEAR(a(2, 2), -4.0 * pi * pi, 1e-8);
  EXPECT_NEAR(a(2, 1), 0.0, 1e-8);
  EXPECT_NEAR(a(1, 1), -39.4784176, 1e-6);
  for (Eigen::Index k = 0; k < 40; ++k) {
    for (Eigen::Index l = 0; l < 40; ++l) {
      const double expected = k == l ? cylfde::fourier_second_derivative_eigenvalue(std::size_t(k)) : 0.0;
      EXPECT_NEAR(a(k, l), expected, 1e-8) << k << "," << l;
      EXPECT_NEAR(a(k, l), a(l, k), 1e-8);
    }
  }
  EXPECT_THROW(cylfde::bhe_operator_matrix(cylfde::BasisSpec::legendre(4)), cylfde::ConfigError);
}

TEST(BurgersHopf, ConfigValidation) {
  EXPECT_THROW(cylfde::BheConfig::make(5, cylfde::CovarianceKind::Delta), cylfde::ConfigError);
  auto cfg = cylfde::BheConfig::make(4, cylfde::CovarianceKind::Delta);
  cfg.cov(0, 1) = 1.0;
  EXPECT_THROW(cylfde::bhe_problem(cfg), cylfde::ConfigError);
}

TEST(BurgersHopf, CovarianceKinds) {
  const auto moderate = cylfde::BheConfig::make(120, cylfde::CovarianceKind::Moderate);
  EXPECT_DOUBLE_EQ(moderate.cov(3, 3), 10.0 * std::exp(-0.3) * std::exp(-0.3));
  EXPECT_EQ(moderate.cov(100, 100), 0.0);
  EXPECT_EQ(moderate.cov(3, 4), 0.0);
  const auto constant = cylfde::BheConfig::make(4, cylfde::CovarianceKind::Constant);
  EXPECT_EQ(constant.nonzeros().size(), 1u);
  EXPECT_EQ(constant.cov(0, 0), 10.0);
}

TEST(BurgersHopf, SolutionValues) {
  const auto cfg = cylfde::BheConfig::make(4, cylfde::CovarianceKind::Delta);
  const auto p = cylfde::bhe_problem(cfg);
  const std::vector<double> zero(4, 0.0);
  EXPECT_EQ(p.analytic(zero, 0.37), 0.0);
  EXPECT_NEAR(p.analytic(std::vector<double>{0.1, 0.0, 0.0, 0.0}, 0.123), -0.75, 1e-15);

  const std::vector<double> e2 = {0.0, 0.0, 0.1, 0.0};
  const double expected = 0.5 * 10.0 * 0.01 * std::exp(-8.0 * pi * pi * 0.001);
  EXPECT_NEAR(p.analytic(e2, 0.001), expected, 1e-15);
  EXPECT_NEAR(expected, 0.0462, 5e-5);
  // Independent route: integrate the characteristics with the quadrature A.
  const auto moved = flow(cylfde::bhe_operator_matrix(cfg.spec), e2, 0.001);
  EXPECT_NEAR(p.initial(moved), expected, 1e-12);
}

TEST(BurgersHopf, SolutionMatchesCharacteristicFlow) {
  for (auto kind : {cylfde::CovarianceKind::Delta, cylfde::CovarianceKind::Moderate,
                    cylfde::CovarianceKind::Constant}) {
    const auto cfg = cylfde::BheConfig::make(8, kind);
    const auto p = cylfde::bhe_problem(cfg);
    const auto a_mat = cylfde::bhe_operator_matrix(cfg.spec);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> a(8);
      for (auto& v : a) v = u(rng);
      const double tau = 0.002 * (trial + 1);
      EXPECT_NEAR(p.analytic(a, tau), p.initial(flow(a_mat, a, tau)), 1e-11);
    }
  }
}

TEST(BurgersHopf, PartialsAtOrigin) {
  const auto p = cylfde::bhe_problem(cylfde::BheConfig::make(6, cylfde::CovarianceKind::Delta));
  const auto d = cylfde::analytic_partials(p, std::vector<double>(6, 0.0), 0.01);
  EXPECT_EQ(d.df_dt, 0.0);
  EXPECT_EQ(d.df_da, (std::vector<double>{-8.0, 0.0, 0.0, 0.0, 0.0, 0.0}));
}

TEST(BurgersHopf, DecayInTime) {
  const auto p = cylfde::bhe_problem(cylfde::BheConfig::make(10, cylfde::CovarianceKind::Delta));
  std::vector<double> a = {0.0, 0.05, -0.02, 0.01, 0.0, 0.03, 0.0, 0.0, 0.01, -0.01};
  double prev = std::abs(p.analytic(a, 0.0));
  for (int i = 1; i <= 20; ++i) {
    const double cur = std::abs(p.analytic(a, 0.01 * i));
    EXPECT_LT(cur, prev);
    prev = cur;
  }
}

// Residual of the closed-form partials must vanish for every variant.
void expect_zero_residual(const cylfde::PdeProblem& p, std::size_t n, std::uint64_t seed) {
  const auto ranges = cylfde::collocation_ranges(p.sampler_ranges, p.quadratic_decay_default);
  const auto pts = cylfde::latin_hypercube(n, ranges, seed);
  double worst = 0.0;
  for (Eigen::Index j = 0; j < pts.cols(); ++j) {
    const double t = pts(0, j);
    std::vector<double> a(p.dim);
    for (std::size_t k = 0; k < p.dim; ++k) a[k] = pts(Eigen::Index(k) + 1, j);
    const auto d = cylfde::analytic_partials(p, a, t);
    worst = std::max(worst, std::abs(p.residual(t, a, d.df_dt, d.df_da)));
    // Directional form agrees with the residual.
    std::vector<double> v(p.dim + 1);
    p.direction(t, a, v);
    double dir = v[0] * d.df_dt;
    for (std::size_t k = 0; k < p.dim; ++k) dir += v[k + 1] * d.df_da[k];
    EXPECT_NEAR(dir, p.residual(t, a, d.df_dt, d.df_da), 1e-12);
  }
  EXPECT_LT(worst, 1e-9) << p.kind << "/" << p.variant << " m=" << p.dim;
}

TEST(Residual, AnalyticSolutionsSatisfyPde) {
  for (std::size_t m : {4u, 20u}) {
    for (auto v : {cylfde::FteVariant::LinearIC, cylfde::FteVariant::NonlinearIC}) {
      expect_zero_residual(cylfde::fte_problem(cylfde::FteConfig::make(m, v)), 500, m);
    }
    for (auto k : {cylfde::CovarianceKind::Delta, cylfde::CovarianceKind::Constant,
                   cylfde::CovarianceKind::Moderate}) {
      expect_zero_residual(cylfde::bhe_problem(cylfde::BheConfig::make(m, k)), 500, m + 1);
    }
  }
}

TEST(Residual, InitialMatchesAnalyticAtTimeZero) {
  for (auto k : {cylfde::CovarianceKind::Delta, cylfde::CovarianceKind::Moderate}) {
    const auto p = cylfde::bhe_problem(cylfde::BheConfig::make(12, k));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 20; ++i) {
      std::vector<double> a(12);
      for (auto& x : a) x = u(rng);
      EXPECT_NEAR(p.analytic(a, 0.0), p.initial(a), 1e-10);
    }
  }
}

}  // namespace
