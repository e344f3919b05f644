#pragma once

// The three CLI commands as library calls. Each writes its CSV/checkpoint
// artifacts under config.output.directory and returns what it wrote.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cylfde/checkpoint.hpp"
#include "cylfde/config.hpp"
#include "cylfde/cylindrical.hpp"
#include "cylfde/eval.hpp"
#include "cylfde/training.hpp"

namespace cylfde {

#ifdef CYLFDE_VERSION
inline constexpr const char* kVersion = CYLFDE_VERSION;
#else
inline constexpr const char* kVersion = "0.1.0";
#endif

namespace command_detail {

inline std::filesystem::path prepare_dir(const RunConfig& cfg) {
  const std::filesystem::path dir(cfg.output.directory);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path.string());
  os << text;
  if (!os) throw IoError("failed writing " + path.string());
}

inline std::string problem_tag(const RunConfig& cfg) {
  return cfg.problem.kind + "/" + cfg.problem.variant;
}

inline ProblemSection with_degree(ProblemSection p, std::size_t degree) {
  p.degree = degree;
  return p;
}

/// Evaluation times: time_points evenly spaced in (t_lo, t_hi].
inline std::vector<double> eval_times(const RunConfig& cfg) {
  const auto& r = cfg.sampler.t_range;
  const std::size_t n = std::max<std::size_t>(cfg.eval.time_points, 1);
  std::vector<double> ts(n);
  for (std::size_t i = 0; i < n; ++i) {
    ts[i] = r.lo + r.length() * static_cast<double>(i + 1) / static_cast<double>(n);
  }
  return ts;
}

}  // namespace command_detail

struct ConvergeOutput {
  std::vector<ConvergenceRow> rows;
  std::filesystem::path csv;
};

/// Smooth random coefficient vectors: a_k uniform in [-s, s] / (k+1)^2.
inline std::vector<std::vector<double>> smooth_random_thetas(std::size_t n, std::size_t degree,
                                                             double scale, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> out(n, std::vector<double>(degree));
  for (auto& th : out) {
    for (std::size_t k = 0; k < degree; ++k) {
      const double d = static_cast<double>(k + 1);
      th[k] = rng.uniform(-scale, scale) / (d * d);
    }
  }
  return out;
}

inline ConvergeOutput cmd_converge(const RunConfig& cfg) {
  const auto& c = cfg.converge;
  for (std::size_t m : c.degrees) {
    if (m >= c.reference_degree) {
      throw ConfigError("convergence degree " + std::to_string(m) + " must be below the reference degree " +
                        std::to_string(c.reference_degree));
    }
  }
  const PdeProblem ref = make_problem(command_detail::with_degree(cfg.problem, c.reference_degree));
  const auto oracle = solution_functional(ref, c.t);
  const auto thetas = smooth_random_thetas(c.samples, c.reference_degree, c.coefficient_scale,
                                           cfg.training.seed);
  ConvergeOutput out;
  out.rows = convergence_study(oracle, c.degrees, thetas);
  const auto dir = command_detail::prepare_dir(cfg);
  std::ostringstream os;
  write_convergence_csv(os, out.rows);
  out.csv = dir / "convergence.csv";
  command_detail::write_file(out.csv, os.str());
  return out;
}

/// Config echo with the version, command and seed as leading comments.
inline std::string run_manifest(const RunConfig& cfg, const std::string& command) {
  return serialize_config(cfg, {std::string("cylin-fde ") + kVersion, "command: " + command,
                                "seed: " + std::to_string(cfg.training.seed)});
}

struct TrainOutput {
  TrainResult<float> result;
  ErrorReport test;
  std::filesystem::path best_checkpoint;
  std::filesystem::path final_checkpoint;
};

inline TrainOutput cmd_train(const RunConfig& cfg, std::ostream* log = nullptr) {
  const PdeProblem problem = make_problem(cfg.problem);
  const auto arch = MlpArch::standard(cfg.problem.degree, cfg.network.width);
  const auto init = Mlp<float>::initialized(arch, cfg.training.seed);
  const auto dir = command_detail::prepare_dir(cfg);
  command_detail::write_file(dir / "manifest.ini", run_manifest(cfg, "train"));

  std::function<void(const HistoryRow&)> on_log;
  if (log) {
    on_log = [log](const HistoryRow& r) {
      *log << "iter " << r.iteration << " loss " << r.total_loss << " lr " << r.lr;
      if (r.val_rel_error) *log << " val_rel " << *r.val_rel_error;
      *log << '\n';
    };
  }
  TrainOutput out{train(problem, init, cfg.training, cfg.sampler, on_log), {}, {}, {}};
  const auto& res = out.result;

  CheckpointMeta meta;
  meta.problem = command_detail::problem_tag(cfg);
  meta.loss = to_string(cfg.training.loss_kind);
  meta.seed = cfg.training.seed;
  meta.iteration = res.best_iteration;
  meta.extra["degree"] = std::to_string(cfg.problem.degree);
  out.best_checkpoint = dir / "checkpoint_best.ckpt";
  save_checkpoint(out.best_checkpoint, res.best, meta);
  meta.iteration = res.completed_iterations;
  out.final_checkpoint = dir / "checkpoint_final.ckpt";
  save_checkpoint(out.final_checkpoint, res.last, meta);

  if (cfg.output.history_csv) {
    std::ostringstream hs;
    write_history_csv(hs, res.history);
    command_detail::write_file(dir / "history.csv", hs.str());
  }
  out.test = test_errors(res.best, problem, cfg.sampler, cfg.training.seed);
  std::ostringstream es;
  write_error_csv(es, {{cfg.problem.kind, cfg.problem.variant, cfg.problem.degree, cfg.problem.degree,
                        cfg.training.seed, out.test}});
  command_detail::write_file(dir / "test_errors.csv", es.str());
  if (res.diverged && log) *log << "diverged at " << res.diagnostic << '\n';
  return out;
}

/// Loads a checkpoint and checks it against the configured problem and width.
inline Mlp<float> load_model_for(const RunConfig& cfg, const std::filesystem::path& checkpoint) {
  auto ck = load_checkpoint<float>(checkpoint);
  const auto& a = ck.net.arch();
  if (a.input_dim != cfg.problem.degree + 1) {
    throw ConfigError("checkpoint input dimension " + std::to_string(a.input_dim) +
                      " does not match config degree " + std::to_string(cfg.problem.degree) + " + 1");
  }
  if (a.width != cfg.network.width) {
    throw ConfigError("checkpoint width " + std::to_string(a.width) + " does not match config width " +
                      std::to_string(cfg.network.width));
  }
  return std::move(ck.net);
}

struct EvalOutput {
  std::vector<ErrorRow> errors;            // errors / cross_degree
  std::vector<DerivativeProfile> profiles;  // derivative, one per time
  std::vector<double> times;
  std::vector<std::filesystem::path> files;
};

inline EvalOutput cmd_eval(const RunConfig& cfg, const std::filesystem::path& checkpoint) {
  using command_detail::write_file;
  const PdeProblem problem = make_problem(cfg.problem);
  const auto net = load_model_for(cfg, checkpoint);
  const auto dir = command_detail::prepare_dir(cfg);
  const auto seed = cfg.training.seed;
  EvalOutput out;
  const auto& what = cfg.eval.what;

  if (what == "errors") {
    out.errors.push_back({cfg.problem.kind, cfg.problem.variant, cfg.problem.degree, cfg.problem.degree,
                          seed, test_errors(net, problem, cfg.sampler, seed)});
    std::ostringstream os;
    write_error_csv(os, out.errors);
    out.files.push_back(dir / "errors.csv");
    write_file(out.files.back(), os.str());
  } else if (what == "derivative") {
    const auto grid = uniform_grid(problem.spec.domain(), cfg.eval.grid_points);
    out.times = command_detail::eval_times(cfg);
    std::ostringstream os;
    for (std::size_t i = 0; i < out.times.size(); ++i) {
      out.profiles.push_back(derivative_error_at_zero(network_gradient(net), problem, out.times[i], grid));
      write_derivative_csv(os, out.profiles.back(), out.times[i], i == 0);
    }
    out.files.push_back(dir / "derivative.csv");
    write_file(out.files.back(), os.str());
  } else if (what == "second_order") {
    const auto grid = uniform_grid(problem.spec.domain(), cfg.eval.grid_points);
    out.times = command_detail::eval_times(cfg);
    const std::vector<double> zero(problem.dim, 0.0);
    for (std::size_t i = 0; i < out.times.size(); ++i) {
      const double t = out.times[i];
      const auto H = second_derivative_fd(network_gradient(net), zero, t, cfg.eval.fd_step);
      const Eigen::MatrixXd H_true =
          cfg.problem.kind == "bhe"
              ? bhe_analytic_hessian(make_bhe_config(cfg.problem), t)
              : second_derivative_fd(analytic_gradient(problem), zero, t, cfg.eval.fd_step);
      std::ostringstream os;
      write_kernel_csv(os, grid, second_derivative_kernel(H, problem.spec, grid),
                       second_derivative_kernel(H_true, problem.spec, grid));
      out.files.push_back(dir / ("second_order_t" + std::to_string(i) + ".csv"));
      write_file(out.files.back(), os.str());
    }
  } else if (what == "cross_degree") {
    for (std::size_t m : cfg.eval.degrees) {
      const PdeProblem p = make_problem(command_detail::with_degree(cfg.problem, m));
      out.errors.push_back({cfg.problem.kind, cfg.problem.variant, cfg.problem.degree, m, seed,
                            cross_degree_eval(net, p, cfg.sampler, cfg.sampler.test_points,
                                              seed + kTestSeedOffset, cfg.eval.embed)});
    }
    std::ostringstream os;
    write_error_csv(os, out.errors);
    out.files.push_back(dir / "cross_degree.csv");
    write_file(out.files.back(), os.str());
  } else {
    throw ConfigError("unknown evaluation '" + what + "'");
  }
  return out;
}

}  // namespace cylfde
