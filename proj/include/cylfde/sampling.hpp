#pragma once

// Latin hypercube sampling of collocation points and the random helpers the
// trainer relies on. Draws are produced by std::mt19937_64 and converted to
// doubles/indices by hand so that a seed gives the same points with any
// standard library.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "cylfde/basis.hpp"
#include "cylfde/errors.hpp"

namespace cylfde {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n) by rejection (no modulo bias).
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do { x = engine_(); } while (x >= limit);
    return x % n;
  }

  template <class T>
  void shuffle(std::span<T> v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Column-per-point sample matrix: rows are coordinates, columns are points.
using PointSet = Eigen::MatrixXd;

/// n points in the box `ranges`. In every coordinate the n points fall one per
/// equal-width stratum; stratum order is shuffled independently per coordinate.
inline PointSet latin_hypercube(std::size_t n, std::span<const Interval> ranges, Rng& rng) {
  if (n == 0) throw std::invalid_argument("latin_hypercube needs n >= 1");
  const auto dims = static_cast<Eigen::Index>(ranges.size());
  PointSet pts(dims, static_cast<Eigen::Index>(n));
  std::vector<std::size_t> strata(n);
  const double nd = static_cast<double>(n);
  for (Eigen::Index d = 0; d < dims; ++d) {
    for (std::size_t i = 0; i < n; ++i) strata[i] = i;
    rng.shuffle(std::span<std::size_t>(strata));
    const Interval& r = ranges[static_cast<std::size_t>(d)];
    for (std::size_t i = 0; i < n; ++i) {
      const double u = (static_cast<double>(strata[i]) + rng.uniform()) / nd;
      double x = r.lo + u * r.length();
      if (x >= r.hi && r.hi > r.lo) x = std::nextafter(r.hi, r.lo);
      pts(d, static_cast<Eigen::Index>(i)) = x;
    }
  }
  return pts;
}

inline PointSet latin_hypercube(std::size_t n, std::span<const Interval> ranges,
                                std::uint64_t seed) {
  Rng rng(seed);
  return latin_hypercube(n, ranges, rng);
}

/// Quadratically shrinking coefficient ranges: [-c/(k+1)^2, c/(k+1)^2].
inline std::vector<Interval> decayed_ranges(double half_width, std::size_t degree) {
  if (!(half_width > 0.0)) throw ConfigError("decayed range half-width must be positive");
  std::vector<Interval> out(degree);
  for (std::size_t k = 0; k < degree; ++k) {
    const double s = static_cast<double>(k + 1);
    const double c = half_width / (s * s);
    out[k] = {-c, c};
  }
  return out;
}

/// Sampling box for a problem: t range followed by the a_k ranges, with the
/// a_k ranges decayed when requested.
inline std::vector<Interval> collocation_ranges(std::span<const Interval> base,
                                                bool quadratic_decay) {
  std::vector<Interval> out(base.begin(), base.end());
  if (!quadratic_decay) return out;
  for (std::size_t k = 1; k < out.size(); ++k) {
    const Interval& b = base[k];
    const double s = static_cast<double>(k * k);  // (index + 1)^2 with index = k - 1
    out[k] = {b.mid() + (b.lo - b.mid()) / s, b.mid() + (b.hi - b.mid()) / s};
  }
  return out;
}

}  // namespace cylfde
