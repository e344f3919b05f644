#pragma once

// Error metrics and post-training analyses of a trained approximator.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "cylfde/basis.hpp"
#include "cylfde/cylindrical.hpp"
#include "cylfde/errors.hpp"
#include "cylfde/nn.hpp"
#include "cylfde/problems.hpp"
#include "cylfde/training.hpp"

namespace cylfde {

struct ErrorReport {
  double mean_rel = 0.0;
  double mean_abs = 0.0;
  std::size_t n_points = 0;
  std::size_t n_excluded = 0;
};

/// L1 errors. Points with |truth| < guard are excluded from the relative
/// mean (and counted) but kept in the absolute mean.
inline ErrorReport l1_errors(std::span<const double> pred, std::span<const double> truth,
                             double guard = kRelativeErrorGuard) {
  if (pred.size() != truth.size()) throw ShapeError("prediction/truth length mismatch");
  if (pred.empty()) throw std::invalid_argument("l1_errors needs at least one point");
  ErrorReport r;
  r.n_points = pred.size();
  double rel = 0.0, abs_sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double e = std::abs(truth[i] - pred[i]);
    abs_sum += e;
    if (std::abs(truth[i]) < guard) {
      ++r.n_excluded;
    } else {
      rel += e / std::abs(truth[i]);
    }
  }
  r.mean_abs = abs_sum / static_cast<double>(r.n_points);
  const std::size_t used = r.n_points - r.n_excluded;
  r.mean_rel = used == 0 ? 0.0 : rel / static_cast<double>(used);
  return r;
}

/// Anything that maps (t, a) to the full input gradient (df/dt, df/da_0, ...).
using GradientProvider =
    std::function<std::vector<double>(double t, std::span<const double> a)>;
using ValueProvider = std::function<double(double t, std::span<const double> a)>;

template <class S>
GradientProvider network_gradient(const Mlp<S>& net) {
  return [&net](double t, std::span<const double> a) {
    std::vector<S> x(a.size() + 1);
    x[0] = S(t);
    for (std::size_t k = 0; k < a.size(); ++k) x[k + 1] = S(a[k]);
    const auto g = input_gradient(net, std::span<const S>(x));
    return std::vector<double>(g.begin(), g.end());
  };
}

inline GradientProvider analytic_gradient(const PdeProblem& problem) {
  return [&problem](double t, std::span<const double> a) {
    const auto p = analytic_partials(problem, a, t);
    std::vector<double> g(a.size() + 1);
    g[0] = p.df_dt;
    std::copy(p.df_da.begin(), p.df_da.end(), g.begin() + 1);
    return g;
  };
}

template <class S>
ValueProvider network_value(const Mlp<S>& net) {
  return [&net](double t, std::span<const double> a) {
    std::vector<S> x(a.size() + 1);
    x[0] = S(t);
    for (std::size_t k = 0; k < a.size(); ++k) x[k + 1] = S(a[k]);
    return static_cast<double>(forward(net, std::span<const S>(x)));
  };
}

struct DerivativeProfile {
  std::vector<double> x;
  std::vector<double> pred;
  std::vector<double> truth;
  ErrorReport errors;
};

/// First-order functional derivative at theta = 0 reconstructed on `x_grid`
/// from the provider's a-gradient, against the analytic one.
inline DerivativeProfile derivative_error_at_zero(const GradientProvider& model,
                                                  const PdeProblem& problem, double t,
                                                  std::span<const double> x_grid) {
  const std::vector<double> zero(problem.dim, 0.0);
  const auto g = model(t, zero);
  if (g.size() != problem.dim + 1) {
    throw ShapeError("gradient provider returned " + std::to_string(g.size()) + " entries, expected " +
                     std::to_string(problem.dim + 1));
  }
  const std::span<const double> model_da(g.data() + 1, problem.dim);
  const auto truth_da = analytic_partials(problem, zero, t).df_da;
  DerivativeProfile out;
  out.x.assign(x_grid.begin(), x_grid.end());
  for (double x : x_grid) {
    out.pred.push_back(reconstruct_functional_derivative(model_da, problem.spec, x));
    out.truth.push_back(reconstruct_functional_derivative(truth_da, problem.spec, x));
  }
  out.errors = l1_errors(out.pred, out.truth);
  return out;
}

/// Evenly spaced grid of n points over the closed interval.
inline std::vector<double> uniform_grid(const Interval& d, std::size_t n) {
  if (n < 2) throw std::invalid_argument("grid needs at least two points");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = d.lo + d.length() * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return g;
}

inline constexpr double kSecondDerivativeStep = 1e-3;

/// Hessian in a by central differences of the gradient, symmetrized.
inline Eigen::MatrixXd second_derivative_fd(const GradientProvider& model,
                                            std::span<const double> a, double t,
                                            double h = kSecondDerivativeStep) {
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  const auto m = static_cast<Eigen::Index>(a.size());
  Eigen::MatrixXd H(m, m);
  std::vector<double> ap(a.begin(), a.end()), am(a.begin(), a.end());
  for (Eigen::Index k = 0; k < m; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    ap[ku] = a[ku] + h;
    am[ku] = a[ku] - h;
    const auto gp = model(t, ap), gm = model(t, am);
    ap[ku] = am[ku] = a[ku];
    for (Eigen::Index l = 0; l < m; ++l) {
      const auto lu = static_cast<std::size_t>(l) + 1;
      H(k, l) = (gp[lu] - gm[lu]) / (2.0 * h);
    }
  }
  const Eigen::MatrixXd sym = 0.5 * (H + H.transpose());
  if (!sym.allFinite()) throw NumericError("non-finite entry in the finite-difference Hessian");
  return sym;
}

/// Analytic Hessian in a of the Burgers-Hopf solution at time tau:
/// H_kl = C_kl exp(decay(k, l) tau). The transport solution is linear in a.
inline Eigen::MatrixXd bhe_analytic_hessian(const BheConfig& cfg, double tau) {
  const Eigen::Index m = cfg.cov.rows();
  Eigen::MatrixXd H(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      H(i, j) = cfg.cov(i, j) * std::exp(bhe_decay_exponent(static_cast<std::size_t>(i),
                                                            static_cast<std::size_t>(j)) * tau);
    }
  }
  return H;
}

/// Kernel sum_{k,l} H_kl phi_k(x) phi_l(y) on a grid (rows x, columns y).
inline Eigen::MatrixXd second_derivative_kernel(const Eigen::MatrixXd& H, const BasisSpec& spec,
                                                std::span<const double> xs) {
  if (H.rows() != static_cast<Eigen::Index>(spec.degree()) || H.cols() != H.rows()) {
    throw ShapeError("Hessian size does not match the basis degree");
  }
  const Eigen::MatrixXd Phi = basis_matrix(spec, xs);  // m x n
  return Phi.transpose() * H * Phi;
}

enum class EmbedMode { Auto, ZeroPad, Truncate };

inline std::string to_string(EmbedMode m) {
  switch (m) {
    case EmbedMode::Auto: return "auto";
    case EmbedMode::ZeroPad: return "zero_pad";
    case EmbedMode::Truncate: return "truncate";
  }
  return "?";
}

/// Maps degree-m' coefficient points (rows t, a_0..a_{m'-1}) into the input
/// space of a degree-m model: zero-pads when m' <= m, keeps the first m
/// coefficients when m' > m (only in Truncate/Auto mode).
inline Eigen::MatrixXd embed_points(const Eigen::MatrixXd& pts, std::size_t model_degree,
                                    EmbedMode mode) {
  const auto eval_degree = static_cast<std::size_t>(pts.rows() - 1);
  if (eval_degree > model_degree && mode == EmbedMode::ZeroPad) {
    throw ConfigError("evaluation degree " + std::to_string(eval_degree) +
                      " exceeds model degree " + std::to_string(model_degree) +
                      "; zero-padding needs m' <= m");
  }
  if (eval_degree < model_degree && mode == EmbedMode::Truncate) {
    throw ConfigError("truncation needs evaluation degree >= model degree");
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(model_degree) + 1, pts.cols());
  const Eigen::Index rows = std::min(pts.rows(), out.rows());
  out.topRows(rows) = pts.topRows(rows);
  return out;
}

/// Errors of a degree-m model on `n_points` test points drawn at degree m'
/// (the degree of `eval_problem`), against the degree-m' analytic solution.
template <class S>
ErrorReport cross_degree_eval(const Mlp<S>& net, const PdeProblem& eval_problem,
                              const SamplerConfig& sampler, std::size_t n_points,
                              std::uint64_t seed, EmbedMode mode = EmbedMode::Auto) {
  const std::size_t model_degree = net.arch().input_dim - 1;
  const auto set = labelled_set(eval_problem, sampler.ranges(eval_problem.dim), n_points, seed);
  const Eigen::MatrixXd x = embed_points(set.points, model_degree, mode);
  const auto pred = forward_batch(net, typename Mlp<S>::Matrix(x.template cast<S>()));
  std::vector<double> p(static_cast<std::size_t>(pred.size()));
  for (Eigen::Index j = 0; j < pred.size(); ++j) p[static_cast<std::size_t>(j)] = static_cast<double>(pred(j));
  return l1_errors(p, std::span<const double>(set.truth.data(), static_cast<std::size_t>(set.truth.size())));
}

/// Standard test-set evaluation: 10^4 LHS points at the model's own degree.
template <class S>
ErrorReport test_errors(const Mlp<S>& net, const PdeProblem& problem, const SamplerConfig& sampler,
                        std::uint64_t seed) {
  return cross_degree_eval(net, problem, sampler, sampler.test_points, seed + kTestSeedOffset,
                           EmbedMode::ZeroPad);
}

// ---------------------------------------------------------------------------
// CSV emitters

namespace detail {
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace detail

struct ErrorRow {
  std::string problem;
  std::string variant;
  std::size_t m_train = 0;
  std::size_t m_eval = 0;
  std::uint64_t seed = 0;
  ErrorReport report;
};

inline void write_error_csv(std::ostream& os, const std::vector<ErrorRow>& rows) {
  os << "problem,variant,m_train,m_eval,seed,mean_rel,mean_abs,n_points,n_excluded\n";
  for (const auto& r : rows) {
    os << r.problem << ',' << r.variant << ',' << r.m_train << ',' << r.m_eval << ',' << r.seed << ','
       << detail::fmt17(r.report.mean_rel) << ',' << detail::fmt17(r.report.mean_abs) << ','
       << r.report.n_points << ',' << r.report.n_excluded << '\n';
  }
}

inline void write_derivative_csv(std::ostream& os, const DerivativeProfile& d, double t,
                                 bool header = true) {
  if (header) os << "t,x,pred,truth,abs_error,rel_error\n";
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    const double e = std::abs(d.pred[i] - d.truth[i]);
    const double rel = std::abs(d.truth[i]) < kRelativeErrorGuard ? 0.0 : e / std::abs(d.truth[i]);
    os << detail::fmt17(t) << ',' << detail::fmt17(d.x[i]) << ',' << detail::fmt17(d.pred[i]) << ','
       << detail::fmt17(d.truth[i]) << ',' << detail::fmt17(e) << ',' << detail::fmt17(rel) << '\n';
  }
}

/// Long-format kernel grid: x, y, predicted, analytic, absolute error.
inline void write_kernel_csv(std::ostream& os, std::span<const double> xs, const Eigen::MatrixXd& pred,
                             const Eigen::MatrixXd& truth) {
  os << "x,y,pred,truth,abs_error\n";
  for (Eigen::Index i = 0; i < pred.rows(); ++i) {
    for (Eigen::Index j = 0; j < pred.cols(); ++j) {
      os << detail::fmt17(xs[static_cast<std::size_t>(i)]) << ',' << detail::fmt17(xs[static_cast<std::size_t>(j)])
         << ',' << detail::fmt17(pred(i, j)) << ',' << detail::fmt17(truth(i, j)) << ','
         << detail::fmt17(std::abs(pred(i, j) - truth(i, j))) << '\n';
    }
  }
}

}  // namespace cylfde
