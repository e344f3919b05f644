#pragma once

// Training recipe: collocation sampling, AdamW, the warmup + cosine-restart
// learning-rate schedule and the train loop with validation-based selection.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "cylfde/cylindrical.hpp"
#include "cylfde/errors.hpp"
#include "cylfde/losses.hpp"
#include "cylfde/nn.hpp"
#include "cylfde/problems.hpp"
#include "cylfde/sampling.hpp"

namespace cylfde {

struct SamplerConfig {
  Interval t_range{0.0, 1.0};
  Interval a_range{-1.0, 1.0};
  bool quadratic_decay = false;
  std::size_t validation_points = 4096;
  std::size_t test_points = 10000;

  bool operator==(const SamplerConfig&) const = default;

  /// Ranges of the standard recipe for `problem`.
  static SamplerConfig for_problem(const PdeProblem& problem) {
    SamplerConfig s;
    s.t_range = problem.sampler_ranges.at(0);
    s.a_range = problem.sampler_ranges.at(1);
    s.quadratic_decay = problem.quadratic_decay_default;
    return s;
  }

  void validate(const PdeProblem& problem) const {
    if (!(t_range.hi > t_range.lo) || !(a_range.hi > a_range.lo)) {
      throw ConfigError("sampler ranges must be non-empty");
    }
    if (quadratic_decay && problem.spec.family() != BasisFamily::FourierPeriodic) {
      throw ConfigError("quadratic range decay applies to the Burgers-Hopf (Fourier) problem only");
    }
    if (validation_points == 0 || test_points == 0) {
      throw ConfigError("validation and test set sizes must be positive");
    }
  }

  /// Box for (t, a_0, ..., a_{m-1}).
  std::vector<Interval> ranges(std::size_t degree) const {
    std::vector<Interval> base(degree + 1, a_range);
    base[0] = t_range;
    return collocation_ranges(base, quadratic_decay);
  }
};

struct ScheduleConfig {
  double start_factor = 1e-10;
  std::size_t milestone = 0;  // warmup length; 0 disables warmup
  std::size_t t0 = 10000;
  std::size_t t_mult = 1;
  double eta_min = 0.0;

  bool operator==(const ScheduleConfig&) const = default;
};

struct TrainConfig {
  std::size_t iterations = 50000;
  std::size_t batch_size = 1024;
  double learning_rate = 1e-3;
  double weight_decay = 1e-4;
  ScheduleConfig schedule;
  LossKind loss_kind = LossKind::SmoothL1;
  double reweight_temperature = kDefaultReweightTemperature;
  bool regularize_zero_input = false;
  std::uint64_t seed = 0;
  std::size_t validation_interval = 1000;
  std::size_t log_interval = 100;

  bool operator==(const TrainConfig&) const = default;

  void validate() const {
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
    if (!(learning_rate >= 0.0) || !(weight_decay >= 0.0)) {
      throw ConfigError("learning_rate and weight_decay must be non-negative");
    }
    if (!(reweight_temperature > 0.0)) throw ConfigError("reweight temperature must be positive");
    if (iterations > 0 && schedule.milestone >= iterations) {
      throw ConfigError("schedule milestone must be below the iteration count");
    }
    if (schedule.t0 == 0 || schedule.t_mult == 0) throw ConfigError("T_0 and T_mult must be positive");
    if (!(schedule.start_factor > 0.0 && schedule.start_factor <= 1.0)) {
      throw ConfigError("start_factor must lie in (0, 1]");
    }
    if (validation_interval == 0 || log_interval == 0) {
      throw ConfigError("validation and log intervals must be positive");
    }
  }

  LossConfig loss_config() const {
    LossConfig c;
    c.kind = loss_kind;
    c.temperature = reweight_temperature;
    c.regularize_zero_input = regularize_zero_input;
    return c;
  }
};

/// Learning rate at iteration `iter`: linear warmup from base*start_factor over
/// `milestone` iterations, then cosine annealing with warm restarts.
inline double lr_at(std::size_t iter, const ScheduleConfig& s, double base_lr) {
  if (iter < s.milestone) {
    const double frac = static_cast<double>(iter) / static_cast<double>(s.milestone);
    return base_lr * (s.start_factor + (1.0 - s.start_factor) * frac);
  }
  std::size_t pos = iter - s.milestone;
  std::size_t period = s.t0;
  while (pos >= period) {
    pos -= period;
    period *= s.t_mult;
  }
  const double phase = std::numbers::pi * static_cast<double>(pos) / static_cast<double>(period);
  return s.eta_min + (base_lr - s.eta_min) * 0.5 * (1.0 + std::cos(phase));
}

template <class S>
struct AdamState {
  typename Mlp<S>::Vector m, v;
  std::uint64_t step = 0;
};

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// AdamW with decoupled weight decay: p <- p (1 - lr wd), then the
/// bias-corrected Adam step.
template <class S>
void adamw_step(Eigen::Ref<Eigen::Matrix<S, Eigen::Dynamic, 1>> params,
                const Eigen::Matrix<S, Eigen::Dynamic, 1>& grads, AdamState<S>& state, double lr,
                double weight_decay, const AdamHyper& h = {}) {
  if (grads.size() != params.size()) throw ShapeError("gradient/parameter size mismatch");
  if (state.m.size() != params.size()) {
    state.m.setZero(params.size());
    state.v.setZero(params.size());
    state.step = 0;
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const S b1 = S(h.beta1), b2 = S(h.beta2);
  params *= S(1.0 - lr * weight_decay);
  state.m = b1 * state.m + (S(1) - b1) * grads;
  state.v = b2 * state.v + (S(1) - b2) * grads.cwiseProduct(grads);
  const double bc1 = 1.0 - std::pow(h.beta1, t);
  const double bc2 = 1.0 - std::pow(h.beta2, t);
  const S step_size = S(lr / bc1);
  const S root_bc2 = S(std::sqrt(bc2));
  params.array() -= step_size * state.m.array() / (state.v.array().sqrt() / root_bc2 + S(h.eps));
}

struct HistoryRow {
  std::size_t iteration = 0;
  double total_loss = 0.0;
  double residual_loss = 0.0;
  double boundary_loss = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lr = 0.0;
  std::optional<double> val_rel_error;
};

inline void write_history_csv(std::ostream& os, const std::vector<HistoryRow>& rows) {
  os << "iteration,total_loss,residual_loss,boundary_loss,lambda1,lambda2,lr,val_rel_error\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,", r.iteration,
                  r.total_loss, r.residual_loss, r.boundary_loss, r.lambda1, r.lambda2, r.lr);
    os << buf;
    if (r.val_rel_error) {
      std::snprintf(buf, sizeof buf, "%.17g", *r.val_rel_error);
      os << buf;
    }
    os << '\n';
  }
}

/// Held-out points with analytic values.
struct LabelledSet {
  Eigen::MatrixXd points;
  Eigen::RowVectorXd truth;
};

inline LabelledSet labelled_set(const PdeProblem& problem, const std::vector<Interval>& ranges,
                                std::size_t n, std::uint64_t seed) {
  LabelledSet s;
  s.points = latin_hypercube(n, ranges, seed);
  s.truth.resize(s.points.cols());
  for (Eigen::Index j = 0; j < s.points.cols(); ++j) {
    const std::span<const double> a(s.points.col(j).data() + 1, problem.dim);
    s.truth(j) = problem.analytic(a, s.points(0, j));
  }
  return s;
}

/// Mean of |f - f_hat| / |f| over points with |f| >= guard.
template <class S>
double mean_relative_error(const Mlp<S>& net, const LabelledSet& set,
                           double guard = kRelativeErrorGuard) {
  const auto pred = forward_batch(net, typename Mlp<S>::Matrix(set.points.template cast<S>()));
  double sum = 0.0;
  std::size_t n = 0;
  for (Eigen::Index j = 0; j < set.truth.size(); ++j) {
    const double f = set.truth(j);
    if (std::abs(f) < guard) continue;
    sum += std::abs(f - static_cast<double>(pred(j))) / std::abs(f);
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

// Seed offsets of the independent random streams of one run.
inline constexpr std::uint64_t kValidationSeedOffset = 1;
inline constexpr std::uint64_t kBatchSeedOffset = 2;
inline constexpr std::uint64_t kTestSeedOffset = 3;

template <class S>
struct TrainResult {
  Mlp<S> best;
  Mlp<S> last;
  std::vector<HistoryRow> history;
  double best_val_rel_error = std::numeric_limits<double>::infinity();
  std::size_t best_iteration = 0;
  std::size_t completed_iterations = 0;
  bool diverged = false;
  std::string diagnostic;
};

template <class S>
TrainResult<S> train(const PdeProblem& problem, const Mlp<S>& init, const TrainConfig& tcfg,
                     const SamplerConfig& scfg,
                     const std::function<void(const HistoryRow&)>& on_log = {}) {
  tcfg.validate();
  scfg.validate(problem);
  if (init.arch().input_dim != problem.dim + 1) {
    throw ConfigError("network input dimension " + std::to_string(init.arch().input_dim) +
                      " does not match problem degree " + std::to_string(problem.dim) + " + 1");
  }
  const auto ranges = scfg.ranges(problem.dim);
  const LabelledSet val =
      labelled_set(problem, ranges, scfg.validation_points, tcfg.seed + kValidationSeedOffset);
  Rng batch_rng(tcfg.seed + kBatchSeedOffset);
  const LossConfig loss_cfg = tcfg.loss_config();

  TrainResult<S> res{init, init, {}, mean_relative_error(init, val), 0, 0, false, {}};
  Mlp<S>& net = res.last;
  AdamState<S> adam;
  DualBatch<S> workspace;

  for (std::size_t it = 0; it < tcfg.iterations; ++it) {
    const double lr = lr_at(it, tcfg.schedule, tcfg.learning_rate);
    const CollocationBatch batch{latin_hypercube(tcfg.batch_size, ranges, batch_rng)};
    LossResult<S> loss;
    try {
      loss = loss_and_weight_gradient(
          net, assemble_pinn_inputs<S>(batch, problem, loss_cfg.regularize_zero_input), loss_cfg,
          &workspace);
    } catch (const NumericError& e) {
      res.diverged = true;
      res.diagnostic = "iteration " + std::to_string(it) + ": " + e.what();
      break;
    }
    adamw_step<S>(net.params(), loss.grad, adam, lr, tcfg.weight_decay);
    if (!net.all_finite()) {
      res.diverged = true;
      res.diagnostic = "iteration " + std::to_string(it) + ": non-finite parameters after update";
      break;
    }
    res.completed_iterations = it + 1;

    const std::size_t done = it + 1;
    const bool validate = done % tcfg.validation_interval == 0 || done == tcfg.iterations;
    if (validate || done % tcfg.log_interval == 0) {
      HistoryRow row{done, loss.total, loss.residual, loss.boundary, loss.weights.residual,
                     loss.weights.boundary, lr, std::nullopt};
      if (validate) {
        const double err = mean_relative_error(net, val);
        row.val_rel_error = err;
        if (err < res.best_val_rel_error) {
          res.best_val_rel_error = err;
          res.best_iteration = done;
          res.best = net;
        }
      }
      res.history.push_back(row);
      if (on_log) on_log(row);
    }
  }
  return res;
}

}  // namespace cylfde
