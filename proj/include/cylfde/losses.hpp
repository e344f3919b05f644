#pragma once

// Point-wise training losses and the softmax loss-balancing weights.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "cylfde/errors.hpp"

namespace cylfde {

enum class LossKind { SmoothL1, L1PlusLinf };

inline std::string to_string(LossKind k) {
  return k == LossKind::SmoothL1 ? "smooth_l1" : "l1_linf";
}

inline LossKind parse_loss_kind(const std::string& s) {
  if (s == "smooth_l1") return LossKind::SmoothL1;
  if (s == "l1_linf") return LossKind::L1PlusLinf;
  throw ConfigError("unknown loss kind '" + s + "' (expected smooth_l1 or l1_linf)");
}

/// Threshold of the smooth L1 (Huber-like) loss.
inline constexpr double kSmoothL1Beta = 1.0;

/// Loss of the differences d = prediction - target.
///   SmoothL1:   mean(0.5 d^2 if |d| < 1 else |d| - 0.5)
///   L1PlusLinf: mean|d| + max|d|
template <class Derived>
typename Derived::Scalar loss_value(LossKind kind, const Eigen::DenseBase<Derived>& diff) {
  using S = typename Derived::Scalar;
  const auto n = diff.size();
  if (n == 0) return S(0);
  const auto ad = diff.derived().array().abs();
  if (kind == LossKind::SmoothL1) {
    const S beta = S(kSmoothL1Beta);
    return (ad < beta).select(S(0.5) * ad.square() / beta, ad - S(0.5) * beta).sum() / S(n);
  }
  return ad.sum() / S(n) + ad.maxCoeff();
}

/// d loss / d diff, same shape as diff. For L1PlusLinf the max term routes
/// its (sub)gradient to the first arg-max entry.
template <class Derived>
Eigen::Array<typename Derived::Scalar, Eigen::Dynamic, 1> loss_gradient(
    LossKind kind, const Eigen::DenseBase<Derived>& diff) {
  using S = typename Derived::Scalar;
  const auto n = diff.size();
  Eigen::Array<S, Eigen::Dynamic, 1> g(n);
  if (n == 0) return g;
  const auto d = diff.derived().reshaped().array();
  const auto sign = [](S v) { return v > S(0) ? S(1) : (v < S(0) ? S(-1) : S(0)); };
  if (kind == LossKind::SmoothL1) {
    const S beta = S(kSmoothL1Beta);
    for (Eigen::Index i = 0; i < n; ++i) {
      g(i) = (std::abs(d(i)) < beta ? d(i) / beta : sign(d(i))) / S(n);
    }
    return g;
  }
  Eigen::Index arg = 0;
  S best = S(-1);
  for (Eigen::Index i = 0; i < n; ++i) {
    g(i) = sign(d(i)) / S(n);
    if (std::abs(d(i)) > best) {
      best = std::abs(d(i));
      arg = i;
    }
  }
  g(arg) += sign(d(arg));
  return g;
}

/// Convenience overload on prediction/target pairs.
template <class A, class B>
typename A::Scalar loss_terms(LossKind kind, const Eigen::DenseBase<A>& pred,
                              const Eigen::DenseBase<B>& target) {
  if (pred.size() != target.size()) throw ShapeError("prediction/target length mismatch");
  return loss_value(kind, (pred.derived() - target.derived()).eval());
}

struct LossWeights {
  double residual = 0.5;
  double boundary = 0.5;
};

inline constexpr double kDefaultReweightTemperature = 0.25;

/// Scale-invariant softmax weights for the (residual, boundary) losses:
/// ts = losses / (max(losses) + eps), weights = softmax(ts / temperature).
inline LossWeights softmax_reweight(double residual_loss, double boundary_loss,
                                    double temperature = kDefaultReweightTemperature) {
  if (residual_loss < 0.0 || boundary_loss < 0.0) {
    throw std::invalid_argument("losses must be non-negative");
  }
  const double scale = std::max(residual_loss, boundary_loss) + std::numeric_limits<double>::epsilon();
  const double r = residual_loss / scale / temperature;
  const double b = boundary_loss / scale / temperature;
  const double top = std::max(r, b);
  const double er = std::exp(r - top), eb = std::exp(b - top);
  return {er / (er + eb), eb / (er + eb)};
}

}  // namespace cylfde
