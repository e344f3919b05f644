#pragma once

// Cylindrical approximation of functionals: a functional F([theta]) is
// replaced by the m-variable function f(a) = F([P_m theta]) of the basis
// coefficients, and its functional derivative by sum_k (df/da_k) phi_k(x).

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "cylfde/basis.hpp"
#include "cylfde/errors.hpp"

namespace cylfde {

/// Multivariable surrogate of a functional at a fixed degree.
struct FunctionalOracle {
  std::size_t degree = 0;
  std::function<double(std::span<const double>)> evaluate;
  /// Optional analytic gradient (df/da_0, ..., df/da_{m-1}).
  std::function<std::vector<double>(std::span<const double>)> gradient;

  bool has_gradient() const { return static_cast<bool>(gradient); }
};

inline double approx_functional(const FunctionalOracle& oracle, const CoefficientVector& a) {
  if (a.size() != oracle.degree) {
    throw ShapeError("functional expects degree " + std::to_string(oracle.degree) + ", got " +
                     std::to_string(a.size()));
  }
  return oracle.evaluate(a.values);
}

/// P_m dF/dtheta(x) = sum_k (df/da_k) phi_k(x).
inline double reconstruct_functional_derivative(std::span<const double> grad_f,
                                                const BasisSpec& spec, double x) {
  if (grad_f.size() != spec.degree()) {
    throw ShapeError("gradient length " + std::to_string(grad_f.size()) +
                     " != basis degree " + std::to_string(spec.degree()));
  }
  detail::check_domain(spec, x);
  std::vector<double> phi(spec.degree());
  eval_basis_all(spec.family(), x, phi);
  double s = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) s += grad_f[k] * phi[k];
  return s;
}

/// Central-difference gradient of the oracle; used to audit analytic gradients.
inline std::vector<double> finite_difference_gradient(const FunctionalOracle& oracle,
                                                      std::span<const double> a, double h = 1e-5) {
  std::vector<double> probe(a.begin(), a.end());
  std::vector<double> g(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double orig = probe[k];
    probe[k] = orig + h;
    const double fp = oracle.evaluate(probe);
    probe[k] = orig - h;
    const double fm = oracle.evaluate(probe);
    probe[k] = orig;
    g[k] = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// True when the analytic gradient agrees with central differences within
/// `rel_tol` (relative to the larger of the two gradient norms).
inline bool gradient_matches_finite_differences(const FunctionalOracle& oracle,
                                                std::span<const double> a,
                                                double rel_tol = 1e-6, double h = 1e-5) {
  if (!oracle.has_gradient()) return false;
  const auto g = oracle.gradient(a);
  const auto fd = finite_difference_gradient(oracle, a, h);
  double diff = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    diff = std::max(diff, std::abs(g[k] - fd[k]));
    scale = std::max({scale, std::abs(g[k]), std::abs(fd[k])});
  }
  return diff <= rel_tol * std::max(scale, 1e-300) || diff == 0.0;
}

struct ConvergenceRow {
  std::size_t degree = 0;
  std::size_t n_samples = 0;
  std::size_t n_excluded = 0;
  double mean_rel_error = 0.0;
};

/// Samples whose reference value is smaller than this are left out of the
/// relative error and counted in n_excluded.
inline constexpr double kRelativeErrorGuard = 1e-12;

/// Mean L1 relative error between F([theta_i]) (the oracle at the reference
/// degree) and F([P_m theta_i]) for each requested m < reference degree.
/// P_m theta is the coefficient prefix of length m padded back with zeros.
inline std::vector<ConvergenceRow> convergence_study(
    const FunctionalOracle& reference, std::span<const std::size_t> degrees,
    std::span<const std::vector<double>> thetas) {
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    if (degrees[i] == 0 || degrees[i] > reference.degree) {
      throw ConfigError("convergence degree " + std::to_string(degrees[i]) +
                        " outside (0, reference degree]");
    }
    if (i > 0 && degrees[i] <= degrees[i - 1]) {
      throw ConfigError("convergence degrees must be strictly increasing");
    }
  }
  for (const auto& th : thetas) {
    if (th.size() != reference.degree) {
      throw ShapeError("theta sample has degree " + std::to_string(th.size()) +
                       ", reference degree is " + std::to_string(reference.degree));
    }
  }

  std::vector<double> full_values(thetas.size());
  for (std::size_t i = 0; i < thetas.size(); ++i) full_values[i] = reference.evaluate(thetas[i]);

  std::vector<ConvergenceRow> rows;
  rows.reserve(degrees.size());
  std::vector<double> truncated(reference.degree);
  for (std::size_t m : degrees) {
    ConvergenceRow row;
    row.degree = m;
    row.n_samples = thetas.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      if (std::abs(full_values[i]) < kRelativeErrorGuard) {
        ++row.n_excluded;
        continue;
      }
      std::fill(truncated.begin(), truncated.end(), 0.0);
      std::copy_n(thetas[i].begin(), m, truncated.begin());
      sum += std::abs(full_values[i] - reference.evaluate(truncated)) / std::abs(full_values[i]);
    }
    const std::size_t used = row.n_samples - row.n_excluded;
    row.mean_rel_error = used > 0 ? sum / static_cast<double>(used) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

inline void write_convergence_csv(std::ostream& os, std::span<const ConvergenceRow> rows) {
  os << "degree,n_samples,n_excluded,mean_rel_error\n";
  char buf[64];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g", r.mean_rel_error);
    os << r.degree << ',' << r.n_samples << ',' << r.n_excluded << ',' << buf << '\n';
  }
}

}  // namespace cylfde
