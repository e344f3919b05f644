#pragma once

// Orthonormal bases on a bounded interval, Gauss-Legendre quadrature,
// projection of functions onto a truncated basis and reconstruction.
//
// Two families are provided:
//   LegendreOrthonormal  phi_k(x) = sqrt((2k+1)/2) P_k(x)        on [-1, 1]
//   FourierPeriodic      phi_0 = 1, phi_k = sqrt(2) sin(pi (k+1) x) (k odd),
//                        phi_k = sqrt(2) cos(pi k x) (k even)      on [-1/2, 1/2]
// Both are orthonormal under the unweighted L2 inner product, and both are
// nested in the degree, so truncating a coefficient vector is the projection
// onto the smaller span.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cylfde/errors.hpp"

namespace cylfde {

enum class BasisFamily { LegendreOrthonormal, FourierPeriodic };

inline std::string to_string(BasisFamily f) {
  return f == BasisFamily::LegendreOrthonormal ? "legendre" : "fourier";
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool operator==(const Interval&) const = default;
};

/// Slack for domain membership checks; absorbs rounding from affine rescaling.
inline constexpr double kDomainSlack = 1e-12;

inline Interval natural_domain(BasisFamily family) {
  return family == BasisFamily::LegendreOrthonormal ? Interval{-1.0, 1.0}
                                                    : Interval{-0.5, 0.5};
}

class BasisSpec {
 public:
  BasisSpec(BasisFamily family, std::size_t degree)
      : family_(family), degree_(degree), domain_(natural_domain(family)) {
    if (degree == 0) throw ConfigError("basis degree must be >= 1");
  }

  static BasisSpec legendre(std::size_t degree) {
    return {BasisFamily::LegendreOrthonormal, degree};
  }
  static BasisSpec fourier(std::size_t degree) {
    return {BasisFamily::FourierPeriodic, degree};
  }

  BasisFamily family() const { return family_; }
  std::size_t degree() const { return degree_; }
  const Interval& domain() const { return domain_; }

  /// Same family, different number of retained functions.
  BasisSpec with_degree(std::size_t degree) const { return {family_, degree}; }

  bool contains(double x) const {
    return x >= domain_.lo - kDomainSlack && x <= domain_.hi + kDomainSlack;
  }

  bool operator==(const BasisSpec&) const = default;

 private:
  BasisFamily family_;
  std::size_t degree_;
  Interval domain_;
};

namespace detail {

inline void check_index(const BasisSpec& spec, std::size_t k) {
  if (k >= spec.degree()) {
    throw std::out_of_range("basis index " + std::to_string(k) +
                            " out of range for degree " +
                            std::to_string(spec.degree()));
  }
}

inline void check_domain(const BasisSpec& spec, double x) {
  if (!spec.contains(x)) {
    std::ostringstream os;
    os << "point " << x << " outside basis domain [" << spec.domain().lo << ", "
       << spec.domain().hi << "]";
    throw std::domain_error(os.str());
  }
}

inline double legendre_norm(std::size_t k) {
  return std::sqrt((2.0 * static_cast<double>(k) + 1.0) / 2.0);
}

// Fourier angular frequency pi*(k+1) for odd k, pi*k for even k.
inline double fourier_omega(std::size_t k) {
  const double kk = static_cast<double>(k % 2 == 1 ? k + 1 : k);
  return std::numbers::pi * kk;
}

}  // namespace detail

/// Eigenvalue of d^2/dx^2 for the Fourier family: phi_k'' = lambda_k phi_k.
inline double fourier_second_derivative_eigenvalue(std::size_t k) {
  const double w = detail::fourier_omega(k);
  return -w * w;
}

/// Values phi_0(x) .. phi_{n-1}(x) written into `out` (n = out.size()).
/// The Legendre branch runs the upward three-term recurrence.
inline void eval_basis_all(BasisFamily family, double x, std::span<double> out) {
  const std::size_t n = out.size();
  if (n == 0) return;
  if (family == BasisFamily::LegendreOrthonormal) {
    double p_prev = 1.0;  // P_0
    out[0] = detail::legendre_norm(0);
    if (n == 1) return;
    double p = x;  // P_1
    out[1] = detail::legendre_norm(1) * p;
    for (std::size_t k = 1; k + 1 < n; ++k) {
      const double kd = static_cast<double>(k);
      const double p_next = ((2.0 * kd + 1.0) * x * p - kd * p_prev) / (kd + 1.0);
      p_prev = p;
      p = p_next;
      out[k + 1] = detail::legendre_norm(k + 1) * p;
    }
    return;
  }
  out[0] = 1.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double arg = detail::fourier_omega(k) * x;
    out[k] = std::numbers::sqrt2 * (k % 2 == 1 ? std::sin(arg) : std::cos(arg));
  }
}

/// Second derivatives phi_0''(x) .. phi_{n-1}''(x). Legendre uses the twice
/// differentiated recurrence
///   (k+1) P''_{k+1} = (2k+1)(2 P'_k + x P''_k) - k P''_{k-1}.
inline void eval_basis_second_derivative_all(BasisFamily family, double x,
                                             std::span<double> out) {
  const std::size_t n = out.size();
  if (n == 0) return;
  if (family == BasisFamily::FourierPeriodic) {
    eval_basis_all(family, x, out);
    for (std::size_t k = 0; k < n; ++k) out[k] *= fourier_second_derivative_eigenvalue(k);
    return;
  }
  // P, P', P'' for indices k-1 and k.
  double p0 = 1.0, d0 = 0.0, s0 = 0.0;
  double p1 = x, d1 = 1.0, s1 = 0.0;
  out[0] = 0.0;
  if (n == 1) return;
  out[1] = 0.0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double kd = static_cast<double>(k);
    const double a = 2.0 * kd + 1.0;
    const double p2 = (a * x * p1 - kd * p0) / (kd + 1.0);
    const double d2 = (a * (p1 + x * d1) - kd * d0) / (kd + 1.0);
    const double s2 = (a * (2.0 * d1 + x * s1) - kd * s0) / (kd + 1.0);
    p0 = p1; d0 = d1; s0 = s1;
    p1 = p2; d1 = d2; s1 = s2;
    out[k + 1] = detail::legendre_norm(k + 1) * s2;
  }
}

inline double eval_basis(const BasisSpec& spec, std::size_t k, double x) {
  detail::check_index(spec, k);
  detail::check_domain(spec, x);
  if (spec.family() == BasisFamily::FourierPeriodic) {
    if (k == 0) return 1.0;
    const double arg = detail::fourier_omega(k) * x;
    return std::numbers::sqrt2 * (k % 2 == 1 ? std::sin(arg) : std::cos(arg));
  }
  std::vector<double> values(k + 1);
  eval_basis_all(spec.family(), x, values);
  return values[k];
}

inline double eval_basis_second_derivative(const BasisSpec& spec, std::size_t k, double x) {
  detail::check_index(spec, k);
  detail::check_domain(spec, x);
  if (spec.family() == BasisFamily::FourierPeriodic) {
    return fourier_second_derivative_eigenvalue(k) * eval_basis(spec, k, x);
  }
  std::vector<double> values(k + 1);
  eval_basis_second_derivative_all(spec.family(), x, values);
  return values[k];
}

// ---------------------------------------------------------------------------
// Quadrature

struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
  Interval domain{-1.0, 1.0};

  std::size_t order() const { return nodes.size(); }

  /// Affine map of the rule onto another interval.
  Quadrature rescaled(const Interval& target) const {
    Quadrature q;
    q.domain = target;
    const double scale = target.length() / domain.length();
    q.nodes.reserve(nodes.size());
    q.weights.reserve(weights.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      q.nodes.push_back(target.lo + (nodes[i] - domain.lo) * scale);
      q.weights.push_back(weights[i] * scale);
    }
    return q;
  }
};

/// n-point Gauss-Legendre rule on [-1, 1] (Newton iteration on P_n).
inline Quadrature gauss_legendre(std::size_t n) {
  if (n == 0) throw std::invalid_argument("quadrature order must be >= 1");
  Quadrature q;
  q.nodes.assign(n, 0.0);
  q.weights.assign(n, 0.0);
  const double nd = static_cast<double>(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 1; k < n; ++k) {
        const double kd = static_cast<double>(k);
        const double p2 = ((2.0 * kd + 1.0) * x * p1 - kd * p0) / (kd + 1.0);
        p0 = p1;
        p1 = p2;
      }
      // P_n'(x) = n (x P_n - P_{n-1}) / (x^2 - 1)
      dp = nd * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    q.nodes[i] = -x;
    q.nodes[n - 1 - i] = x;
    q.weights[i] = w;
    q.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) q.nodes[n / 2] = 0.0;
  return q;
}

/// Quadrature order used when the caller does not choose one.
inline std::size_t default_quadrature_order(std::size_t degree) {
  return std::max<std::size_t>(256, 2 * degree);
}

inline Quadrature default_quadrature(const BasisSpec& spec) {
  return gauss_legendre(default_quadrature_order(spec.degree())).rescaled(spec.domain());
}

// ---------------------------------------------------------------------------
// Coefficients

struct CoefficientVector {
  BasisSpec spec;
  std::vector<double> values;

  CoefficientVector(BasisSpec s, std::vector<double> v) : spec(s), values(std::move(v)) {
    if (values.size() != spec.degree()) {
      throw ShapeError("coefficient vector length " + std::to_string(values.size()) +
                       " != basis degree " + std::to_string(spec.degree()));
    }
  }
  explicit CoefficientVector(BasisSpec s) : spec(s), values(s.degree(), 0.0) {}

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t k) const { return values[k]; }
  double& operator[](std::size_t k) { return values[k]; }

  /// Prefix truncation; valid because both families are nested in the degree.
  CoefficientVector truncated(std::size_t m) const {
    if (m > values.size()) throw ShapeError("cannot truncate to a larger degree");
    return {spec.with_degree(m), {values.begin(), values.begin() + static_cast<long>(m)}};
  }
};

/// Values of every basis function at every node: row k, column i = phi_k(x_i).
inline Eigen::MatrixXd basis_matrix(const BasisSpec& spec, std::span<const double> xs) {
  Eigen::MatrixXd phi(spec.degree(), xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    eval_basis_all(spec.family(), xs[i],
                   std::span<double>(phi.col(static_cast<Eigen::Index>(i)).data(), spec.degree()));
  }
  return phi;
}

inline Eigen::MatrixXd basis_second_derivative_matrix(const BasisSpec& spec,
                                                      std::span<const double> xs) {
  Eigen::MatrixXd out(spec.degree(), xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    eval_basis_second_derivative_all(
        spec.family(), xs[i],
        std::span<double>(out.col(static_cast<Eigen::Index>(i)).data(), spec.degree()));
  }
  return out;
}

/// a_k = sum_i w_i theta(x_i) phi_k(x_i). A rule on a different interval is
/// rescaled onto the basis domain first.
inline CoefficientVector project(const BasisSpec& spec,
                                 const std::function<double(double)>& theta,
                                 const Quadrature& quad) {
  const Quadrature q = quad.domain == spec.domain() ? quad : quad.rescaled(spec.domain());
  CoefficientVector a(spec);
  std::vector<double> phi(spec.degree());
  for (std::size_t i = 0; i < q.order(); ++i) {
    const double x = q.nodes[i];
    const double fx = theta(x);
    if (!std::isfinite(fx)) {
      std::ostringstream os;
      os << "non-finite function value at quadrature node x = " << x;
      throw NumericError(os.str());
    }
    eval_basis_all(spec.family(), x, phi);
    const double wf = q.weights[i] * fx;
    for (std::size_t k = 0; k < spec.degree(); ++k) a.values[k] += wf * phi[k];
  }
  return a;
}

inline CoefficientVector project(const BasisSpec& spec,
                                 const std::function<double(double)>& theta) {
  return project(spec, theta, default_quadrature(spec));
}

/// P_m theta(x) = sum_k a_k phi_k(x).
inline double reconstruct(const CoefficientVector& a, double x) {
  detail::check_domain(a.spec, x);
  std::vector<double> phi(a.size());
  eval_basis_all(a.spec.family(), x, phi);
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a.values[k] * phi[k];
  return s;
}

}  // namespace cylfde
