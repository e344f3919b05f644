#pragma once

// The two functional differential equations in their cylindrically
// approximated form, i.e. as first-order linear PDEs over (t, a_0..a_{m-1}):
//
//   transport (FTE):  df/dt + sum_k u_k df/da_k = 0,
//                     f(a, 0) = rho0 sum_k u_k a_k
//   Burgers-Hopf (BHE, no advection): dw/dtau - sum_{k,l} A_kl a_k dw/da_l = 0,
//                     w(a, 0) = -mu a_0 + 1/2 sum_{k,l} C_kl a_k a_l
//
// Both residuals are a directional derivative v(t, a) . grad f with
// v = (1, u) and v = (1, -A^T a) respectively, which is what the network
// trainer consumes.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "cylfde/basis.hpp"
#include "cylfde/cylindrical.hpp"
#include "cylfde/errors.hpp"

namespace cylfde {

enum class FteVariant { LinearIC, NonlinearIC };
enum class CovarianceKind { Delta, Constant, Moderate };

inline std::string to_string(FteVariant v) {
  return v == FteVariant::LinearIC ? "linear" : "nonlinear";
}

inline std::string to_string(CovarianceKind k) {
  switch (k) {
    case CovarianceKind::Delta: return "delta";
    case CovarianceKind::Constant: return "constant";
    case CovarianceKind::Moderate: return "moderate";
  }
  return "?";
}

/// Highest index carrying u_k = upsilon0 for the nonlinear transport variant.
inline constexpr std::size_t kNonlinearIcLastIndex = 14;
/// Highest index of the moderate covariance spectrum.
inline constexpr std::size_t kModerateCovLastIndex = 99;

struct FteConfig {
  BasisSpec spec = BasisSpec::legendre(4);
  std::vector<double> u_coeffs;
  double rho0 = 1.0;
  FteVariant variant = FteVariant::LinearIC;

  static FteConfig make(std::size_t degree, FteVariant variant, double rho0 = 1.0,
                        double upsilon0 = 1.0) {
    FteConfig cfg;
    cfg.spec = BasisSpec::legendre(degree);
    cfg.rho0 = rho0;
    cfg.variant = variant;
    cfg.u_coeffs.assign(degree, 0.0);
    if (variant == FteVariant::LinearIC) {
      if (degree > 1) cfg.u_coeffs[1] = upsilon0;
    } else {
      for (std::size_t k = 0; k < degree && k <= kNonlinearIcLastIndex; ++k) {
        cfg.u_coeffs[k] = upsilon0;
      }
    }
    return cfg;
  }

  void validate() const {
    if (spec.family() != BasisFamily::LegendreOrthonormal) {
      throw ConfigError("transport problem requires the Legendre basis");
    }
    if (u_coeffs.size() != spec.degree()) {
      throw ConfigError("u coefficient count does not match the degree");
    }
    if (!std::isfinite(rho0)) throw ConfigError("rho0 must be finite");
  }
};

/// One stored entry of the (sparse) covariance spectrum C~.
struct CovEntry {
  std::size_t i;
  std::size_t j;
  double value;
};

struct BheConfig {
  BasisSpec spec = BasisSpec::fourier(4);
  Eigen::MatrixXd cov;
  double mu_bar = 8.0;
  double sigma2 = 10.0;
  CovarianceKind covariance_kind = CovarianceKind::Delta;

  static BheConfig make(std::size_t degree, CovarianceKind kind, double mu_bar = 8.0,
                        double sigma2 = 10.0) {
    if (degree % 2 != 0) {
      throw ConfigError("Burgers-Hopf degree must be even, got " + std::to_string(degree));
    }
    BheConfig cfg;
    cfg.spec = BasisSpec::fourier(degree);
    cfg.mu_bar = mu_bar;
    cfg.sigma2 = sigma2;
    cfg.covariance_kind = kind;
    const auto m = static_cast<Eigen::Index>(degree);
    cfg.cov = Eigen::MatrixXd::Zero(m, m);
    switch (kind) {
      case CovarianceKind::Delta:
        cfg.cov.diagonal().setConstant(sigma2);
        break;
      case CovarianceKind::Constant:
        cfg.cov(0, 0) = sigma2;
        break;
      case CovarianceKind::Moderate:
        for (Eigen::Index k = 0; k < m && k <= Eigen::Index(kModerateCovLastIndex); ++k) {
          cfg.cov(k, k) = sigma2 * std::exp(-2.0 * static_cast<double>(k) / 10.0);
        }
        break;
    }
    return cfg;
  }

  void validate() const {
    if (spec.family() != BasisFamily::FourierPeriodic) {
      throw ConfigError("Burgers-Hopf problem requires the Fourier basis");
    }
    if (spec.degree() % 2 != 0) {
      throw ConfigError("Burgers-Hopf degree must be even, got " +
                        std::to_string(spec.degree()));
    }
    const auto m = static_cast<Eigen::Index>(spec.degree());
    if (cov.rows() != m || cov.cols() != m) throw ConfigError("covariance must be m x m");
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 0.0) {
      throw ConfigError("covariance must be symmetric");
    }
  }

  std::vector<CovEntry> nonzeros() const {
    std::vector<CovEntry> out;
    for (Eigen::Index j = 0; j < cov.cols(); ++j) {
      for (Eigen::Index i = 0; i < cov.rows(); ++i) {
        if (cov(i, j) != 0.0) out.push_back({std::size_t(i), std::size_t(j), cov(i, j)});
      }
    }
    return out;
  }
};

struct AnalyticPartials {
  double df_dt = 0.0;
  std::vector<double> df_da;
};

/// An approximated PDE together with its closed-form solution.
struct PdeProblem {
  std::string kind;     // "fte" or "bhe"
  std::string variant;  // initial-condition variant name
  BasisSpec spec = BasisSpec::legendre(1);
  std::size_t dim = 0;  // m; network input is m + 1

  std::function<double(double t, std::span<const double> a, double df_dt,
                       std::span<const double> df_da)>
      residual;
  std::function<double(std::span<const double> a)> initial;
  std::function<double(std::span<const double> a, double t)> analytic;
  std::function<AnalyticPartials(std::span<const double> a, double t)> partials;
  /// Writes v(t, a) (length m + 1) such that residual = v . (df_dt, df_da).
  std::function<void(double t, std::span<const double> a, std::span<double> v)> direction;

  /// Collocation box: entry 0 is t, entries 1..m are a_0..a_{m-1}.
  std::vector<Interval> sampler_ranges;
  /// Whether the standard recipe shrinks the a_k ranges as 1/(k+1)^2.
  bool quadratic_decay_default = false;
};

inline AnalyticPartials analytic_partials(const PdeProblem& problem, std::span<const double> a,
                                          double t) {
  if (a.size() != problem.dim) {
    throw ShapeError("expected " + std::to_string(problem.dim) + " coefficients, got " +
                     std::to_string(a.size()));
  }
  return problem.partials(a, t);
}

inline PdeProblem fte_problem(const FteConfig& cfg) {
  cfg.validate();
  const std::size_t m = cfg.spec.degree();
  auto u = std::make_shared<const std::vector<double>>(cfg.u_coeffs);
  const double rho0 = cfg.rho0;
  double u_sq = 0.0;
  for (double v : *u) u_sq += v * v;

  PdeProblem p;
  p.kind = "fte";
  p.variant = to_string(cfg.variant);
  p.spec = cfg.spec;
  p.dim = m;
  p.residual = [u](double, std::span<const double>, double df_dt, std::span<const double> df_da) {
    double r = df_dt;
    for (std::size_t k = 0; k < u->size(); ++k) r += (*u)[k] * df_da[k];
    return r;
  };
  p.initial = [u, rho0](std::span<const double> a) {
    double s = 0.0;
    for (std::size_t k = 0; k < u->size(); ++k) s += (*u)[k] * a[k];
    return rho0 * s;
  };
  p.analytic = [u, rho0](std::span<const double> a, double t) {
    double s = 0.0;
    for (std::size_t k = 0; k < u->size(); ++k) s += (*u)[k] * (a[k] - (*u)[k] * t);
    return rho0 * s;
  };
  p.partials = [u, rho0, u_sq](std::span<const double>, double) {
    AnalyticPartials out;
    out.df_dt = -rho0 * u_sq;
    out.df_da.resize(u->size());
    for (std::size_t k = 0; k < u->size(); ++k) out.df_da[k] = rho0 * (*u)[k];
    return out;
  };
  p.direction = [u](double, std::span<const double>, std::span<double> v) {
    v[0] = 1.0;
    for (std::size_t k = 0; k < u->size(); ++k) v[k + 1] = (*u)[k];
  };
  p.sampler_ranges.assign(m + 1, Interval{-1.0, 1.0});
  p.sampler_ranges[0] = Interval{0.0, 1.0};
  return p;
}

/// A_kl = (phi_k, phi_l'') by Gauss-Legendre quadrature over the basis domain.
inline Eigen::MatrixXd bhe_operator_matrix(const BasisSpec& spec) {
  if (spec.family() != BasisFamily::FourierPeriodic) {
    throw ConfigError("operator matrix is defined for the Fourier basis");
  }
  const Quadrature q = default_quadrature(spec);
  const Eigen::MatrixXd phi = basis_matrix(spec, q.nodes);
  const Eigen::MatrixXd phi_dd = basis_second_derivative_matrix(spec, q.nodes);
  const Eigen::Map<const Eigen::VectorXd> w(q.weights.data(),
                                            static_cast<Eigen::Index>(q.weights.size()));
  return phi * w.asDiagonal() * phi_dd.transpose();
}

/// Decay rate of the (i, j) term of the Burgers-Hopf solution: the solution
/// carries exp(bhe_decay_exponent(i, j) * tau). Index 2k has wave number k,
/// index 2k+1 has wave number k+1.
inline double bhe_decay_exponent(std::size_t i, std::size_t j) {
  const auto wave = [](std::size_t k) { return static_cast<double>(k % 2 == 0 ? k / 2 : (k + 1) / 2); };
  const double ki = wave(i), kj = wave(j);
  return -4.0 * std::numbers::pi * std::numbers::pi * (ki * ki + kj * kj);
}

inline PdeProblem bhe_problem(const BheConfig& cfg) {
  cfg.validate();
  const std::size_t m = cfg.spec.degree();
  auto a_mat = std::make_shared<const Eigen::MatrixXd>(bhe_operator_matrix(cfg.spec));
  auto entries = std::make_shared<const std::vector<CovEntry>>(cfg.nonzeros());
  std::vector<double> rates;
  rates.reserve(entries->size());
  for (const auto& e : *entries) rates.push_back(bhe_decay_exponent(e.i, e.j));
  auto decay = std::make_shared<const std::vector<double>>(std::move(rates));
  const double mu = cfg.mu_bar;

  PdeProblem p;
  p.kind = "bhe";
  p.variant = to_string(cfg.covariance_kind);
  p.spec = cfg.spec;
  p.dim = m;
  p.residual = [a_mat](double, std::span<const double> a, double df_dt,
                       std::span<const double> df_da) {
    const auto n = a_mat->rows();
    double drift = 0.0;
    for (Eigen::Index l = 0; l < n; ++l) {
      double col = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) col += (*a_mat)(k, l) * a[std::size_t(k)];
      drift += col * df_da[std::size_t(l)];
    }
    return df_dt - drift;
  };
  p.initial = [entries, mu](std::span<const double> a) {
    double q = 0.0;
    for (const auto& e : *entries) q += e.value * a[e.i] * a[e.j];
    return -mu * a[0] + 0.5 * q;
  };
  p.analytic = [entries, decay, mu](std::span<const double> a, double tau) {
    double q = 0.0;
    for (std::size_t n = 0; n < entries->size(); ++n) {
      const auto& e = (*entries)[n];
      q += std::exp((*decay)[n] * tau) * e.value * a[e.i] * a[e.j];
    }
    return -mu * a[0] + 0.5 * q;
  };
  p.partials = [entries, decay, mu, m](std::span<const double> a, double tau) {
    AnalyticPartials out;
    out.df_da.assign(m, 0.0);
    out.df_da[0] = -mu;
    for (std::size_t n = 0; n < entries->size(); ++n) {
      const auto& e = (*entries)[n];
      const double c = 0.5 * e.value * std::exp((*decay)[n] * tau);
      out.df_da[e.i] += c * a[e.j];
      out.df_da[e.j] += c * a[e.i];
      out.df_dt += c * (*decay)[n] * a[e.i] * a[e.j];
    }
    return out;
  };
  p.direction = [a_mat](double, std::span<const double> a, std::span<double> v) {
    const auto n = a_mat->rows();
    v[0] = 1.0;
    for (Eigen::Index l = 0; l < n; ++l) {
      double col = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) col += (*a_mat)(k, l) * a[std::size_t(k)];
      v[std::size_t(l) + 1] = -col;
    }
  };
  p.sampler_ranges.assign(m + 1, Interval{-0.1, 0.1});
  p.sampler_ranges[0] = Interval{0.0, 0.001};
  p.quadratic_decay_default = true;
  return p;
}

/// The analytic solution at a fixed time seen as a functional of the
/// coefficients; feeds the convergence study.
inline FunctionalOracle solution_functional(const PdeProblem& problem, double t) {
  FunctionalOracle f;
  f.degree = problem.dim;
  auto analytic = problem.analytic;
  auto partials = problem.partials;
  f.evaluate = [analytic, t](std::span<const double> a) { return analytic(a, t); };
  f.gradient = [partials, t](std::span<const double> a) { return partials(a, t).df_da; };
  return f;
}

}  // namespace cylfde
