#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "cylfde/commands.hpp"

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("cylfde_cli_test_" + name);
  fs::remove_all(dir);
  return dir;
}

cylfde::RunConfig tiny_fte(const fs::path& out) {
  auto cfg = cylfde::parse_config(
      "[problem]\nkind = fte\nvariant = linear\ndegree = 3\n"
      "[network]\nwidth = 8\n"
      "[training]\niterations = 20\nbatch_size = 16\nlearning_rate = 1e-3\n"
      "validation_interval = 10\nlog_interval = 5\nt0 = 20\nseed = 4\n"
      "[sampler]\nvalidation_points = 64\ntest_points = 128\n");
  cfg.output.directory = out.string();
  return cfg;
}

TEST(Config, DefaultsAndRoundTrip) {
  const cylfde::RunConfig def = cylfde::parse_config("");
  EXPECT_EQ(def.problem.kind, "fte");
  EXPECT_EQ(def.problem.rho0, 1.0);
  EXPECT_EQ(def.problem.upsilon0, 1.0);
  EXPECT_EQ(def.problem.mu_bar, 8.0);
  EXPECT_EQ(def.problem.sigma2, 10.0);
  EXPECT_EQ(def.converge.reference_degree, 1000u);
  EXPECT_EQ(cylfde::parse_config(cylfde::serialize_config(def)), def);

  auto c = def;
  c.training.learning_rate = 0.1 + 0.2;  // not exactly representable in short form
  c.training.seed = 18446744073709551615ull;
  c.eval.degrees = {4, 20, 100};
  c.eval.embed = cylfde::EmbedMode::Truncate;
  EXPECT_EQ(cylfde::parse_config(cylfde::serialize_config(c, {"note"})), c);
}

TEST(Config, EveryPresetRoundTrips) {
  for (const auto& name : cylfde::preset_names()) {
    const auto cfg = cylfde::from_document(cylfde::preset_document(name));
    EXPECT_EQ(cylfde::parse_config(cylfde::run_manifest(cfg, "train")), cfg) << name;
  }
}

TEST(Config, PaperPresetValues) {
  const auto f = cylfde::from_document(cylfde::preset_document("fte-deg4-linear"));
  EXPECT_EQ(f.network.width, 1024u);
  EXPECT_EQ(f.training.batch_size, 1024u);
  EXPECT_EQ(f.training.iterations, 500000u);
  EXPECT_EQ(f.training.learning_rate, 8.675e-6);
  EXPECT_EQ(f.training.weight_decay, 4.534e-6);
  EXPECT_EQ(f.training.schedule.t0, 250000u);
  EXPECT_EQ(f.training.schedule.t_mult, 2u);
  EXPECT_EQ(f.training.loss_kind, cylfde::LossKind::SmoothL1);

  const auto b = cylfde::from_document(cylfde::preset_document("bhe-deg20-delta"));
  EXPECT_EQ(b.training.iterations, 300000u);
  EXPECT_EQ(b.training.learning_rate, 1.372e-4);
  EXPECT_EQ(b.training.weight_decay, 6.644e-7);
  EXPECT_TRUE(b.sampler.quadratic_decay);

  const auto n = cylfde::from_document(cylfde::preset_document("fte-deg1000-nonlinear"));
  EXPECT_EQ(n.training.loss_kind, cylfde::LossKind::L1PlusLinf);
  EXPECT_EQ(n.training.schedule.milestone, 5000u);
  EXPECT_EQ(n.training.weight_decay, 0.0);

  EXPECT_THROW(cylfde::preset_document("fte-deg5-linear"), cylfde::ConfigError);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(cylfde::parse_config("[training]\nlearnig_rate = 1\n"), cylfde::ConfigError);
  EXPECT_THROW(cylfde::parse_config("[optimizer]\nlr = 1\n"), cylfde::ConfigError);
  EXPECT_THROW(cylfde::parse_config("[training]\niterations = -3\n"), cylfde::ConfigError);
  EXPECT_THROW(cylfde::parse_config("[training]\nlearning_rate = fast\n"), cylfde::ConfigError);
  EXPECT_THROW(cylfde::parse_config("[problem]\nkind = heat\n"), cylfde::ConfigError);
  EXPECT_THROW(cylfde::parse_config("[problem]\nkind = bhe\ndegree = 5\n"), cylfde::ConfigError);
  EXPECT_THROW(cylfde::parse_config("[eval]\nwhat = plots\n"), cylfde::ConfigError);
  EXPECT_THROW(cylfde::parse_config("[sampler]\nquadratic_decay = true\n"), cylfde::ConfigError);
  EXPECT_THROW(cylfde::parse_config("[training]\nloss = l2\n"), cylfde::ConfigError);
  EXPECT_THROW(cylfde::parse_config("[training\n"), cylfde::ConfigError);
}

TEST(Config, SamplerDefaultsFollowProblem) {
  const auto b = cylfde::parse_config("[problem]\nkind = bhe\nvariant = constant\n");
  const auto p = cylfde::make_problem(b.problem);
  EXPECT_EQ(b.sampler, cylfde::SamplerConfig::for_problem(p));
  const auto o = cylfde::parse_config("[problem]\nkind = bhe\n[sampler]\nt_hi = 0.5\n");
  EXPECT_EQ(o.sampler.t_range.hi, 0.5);
  EXPECT_TRUE(o.sampler.quadratic_decay);
}

TEST(Config, FileOverlaysPreset) {
  const auto dir = scratch("overlay");
  fs::create_directories(dir);
  std::ofstream(dir / "c.ini") << "# comment\n[training]\niterations = 7\n; other comment\n";
  const auto cfg = cylfde::load_run_config("bhe-deg4-delta", dir / "c.ini");
  EXPECT_EQ(cfg.training.iterations, 7u);
  EXPECT_EQ(cfg.training.learning_rate, 6.680e-5);
  EXPECT_THROW(cylfde::load_run_config("", dir / "missing.ini"), cylfde::IoError);
}

TEST(Converge, BurgersHopfErrorsDecreaseAndRerunIsIdentical) {
  const auto dir = scratch("converge");
  auto cfg = cylfde::parse_config("[problem]\nkind = bhe\n[converge]\ndegrees = 4,20,100\nsamples = 20\n");
  cfg.output.directory = dir.string();
  const auto r = cylfde::cmd_converge(cfg);
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_GT(r.rows[0].mean_rel_error, 0.0);
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    EXPECT_LE(r.rows[i].mean_rel_error, r.rows[i - 1].mean_rel_error);
  }
  const auto first = slurp(r.csv);
  cylfde::cmd_converge(cfg);
  EXPECT_EQ(slurp(r.csv), first);

  cfg.converge.degrees = {1000};
  EXPECT_THROW(cylfde::cmd_converge(cfg), cylfde::ConfigError);
}

TEST(Converge, TransportSolutionIgnoringTruncatedModes) {
  // The linear transport IC depends on a_0 and a_1 only, so any m >= 2 is exact.
  const auto dir = scratch("converge_fte");
  auto cfg = cylfde::parse_config("[converge]\nreference_degree = 50\ndegrees = 4,8\nsamples = 10\n");
  cfg.output.directory = dir.string();
  for (const auto& row : cylfde::cmd_converge(cfg).rows) EXPECT_EQ(row.mean_rel_error, 0.0);
}

TEST(Train, ZeroIterationsWritesInitialization) {
  const auto dir = scratch("train0");
  auto cfg = tiny_fte(dir);
  cfg.training.iterations = 0;
  const auto r = cylfde::cmd_train(cfg);
  const auto best = cylfde::load_checkpoint<float>(r.best_checkpoint);
  const auto init = cylfde::Mlp<float>::initialized(cylfde::MlpArch::standard(3, 8), 4);
  EXPECT_EQ(best.net.params(), init.params());
  EXPECT_EQ(best.meta.iteration, 0u);
  EXPECT_EQ(slurp(dir / "history.csv"),
            "iteration,total_loss,residual_loss,boundary_loss,lambda1,lambda2,lr,val_rel_error\n");
  EXPECT_EQ(cylfde::parse_config(slurp(dir / "manifest.ini")), cfg);
}

TEST(Train, RerunIsByteIdentical) {
  const auto a = scratch("train_a");
  const auto b = scratch("train_b");
  const auto ra = cylfde::cmd_train(tiny_fte(a));
  cylfde::cmd_train(tiny_fte(b));
  EXPECT_EQ(ra.result.completed_iterations, 20u);
  for (const char* f : {"checkpoint_best.ckpt", "checkpoint_final.ckpt", "history.csv", "test_errors.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  // Manifests differ only in the output directory.
  auto ma = cylfde::parse_config(slurp(a / "manifest.ini"));
  ma.output.directory = b.string();
  EXPECT_EQ(ma, cylfde::parse_config(slurp(b / "manifest.ini")));
}

TEST(Eval, ZeroNetworkOnTransport) {
  const auto dir = scratch("eval_zero");
  auto cfg = tiny_fte(dir);
  fs::create_directories(dir);
  const cylfde::Mlp<float> zero(cylfde::MlpArch::standard(3, 8));
  cylfde::save_checkpoint(dir / "zero.ckpt", zero, {});
  const auto r = cylfde::cmd_eval(cfg, dir / "zero.ckpt");
  ASSERT_EQ(r.errors.size(), 1u);
  const auto p = cylfde::make_problem(cfg.problem);
  const auto set = cylfde::labelled_set(p, cfg.sampler.ranges(3), cfg.sampler.test_points,
                                        cfg.training.seed + cylfde::kTestSeedOffset);
  EXPECT_NEAR(r.errors[0].report.mean_rel, 1.0, 1e-12);
  EXPECT_NEAR(r.errors[0].report.mean_abs, set.truth.cwiseAbs().mean(), 1e-12);
  EXPECT_TRUE(fs::exists(dir / "errors.csv"));
}

TEST(Eval, DimensionMismatchNamesBoth) {
  const auto dir = scratch("eval_mismatch");
  auto cfg = tiny_fte(dir);
  fs::create_directories(dir);
  cylfde::save_checkpoint(dir / "m5.ckpt", cylfde::Mlp<float>(cylfde::MlpArch::standard(5, 8)), {});
  try {
    cylfde::cmd_eval(cfg, dir / "m5.ckpt");
    FAIL() << "expected a config error";
  } catch (const cylfde::ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("6"), std::string::npos) << msg;
    EXPECT_NE(msg.find("3"), std::string::npos) << msg;
  }
  EXPECT_THROW(cylfde::cmd_eval(cfg, dir / "absent.ckpt"), cylfde::IoError);
}

TEST(Eval, DerivativeAndCrossDegreeLayouts) {
  const auto dir = scratch("eval_layouts");
  auto cfg = cylfde::parse_config("[problem]\nkind = bhe\ndegree = 4\n[network]\nwidth = 8\n"
                                  "[eval]\ngrid_points = 5\ntime_points = 3\n");
  cfg.output.directory = dir.string();
  fs::create_directories(dir);
  cylfde::save_checkpoint(dir / "n.ckpt",
                          cylfde::Mlp<float>::initialized(cylfde::MlpArch::standard(4, 8), 1), {});
  cfg.eval.what = "derivative";
  const auto d = cylfde::cmd_eval(cfg, dir / "n.ckpt");
  ASSERT_EQ(d.times.size(), 3u);
  EXPECT_EQ(d.times.back(), cfg.sampler.t_range.hi);
  std::istringstream lines(slurp(dir / "derivative.csv"));
  std::string line;
  int n = 0, headers = 0;
  while (std::getline(lines, line)) {
    ++n;
    headers += line.rfind("t,x", 0) == 0;
  }
  EXPECT_EQ(headers, 1);
  EXPECT_EQ(n, 1 + 3 * 5);

  cfg.eval.what = "second_order";
  EXPECT_EQ(cylfde::cmd_eval(cfg, dir / "n.ckpt").files.size(), 3u);

  cfg.eval.what = "cross_degree";
  cfg.eval.degrees = {2};
  cfg.sampler.test_points = 50;
  const auto c = cylfde::cmd_eval(cfg, dir / "n.ckpt");
  ASSERT_EQ(c.errors.size(), 1u);
  EXPECT_EQ(c.errors[0].m_train, 4u);
  EXPECT_EQ(c.errors[0].m_eval, 2u);
}

#ifdef CYLFDE_CONFIG_DIR
TEST(Config, ShippedConfigsParse) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(CYLFDE_CONFIG_DIR)) {
    if (e.path().extension() != ".ini") continue;
    ++n;
    EXPECT_NO_THROW(cylfde::load_run_config("", e.path())) << e.path();
  }
  EXPECT_GT(n, 0u);
  const auto over = cylfde::load_run_config(
      "bhe-deg20-delta-desk", fs::path(CYLFDE_CONFIG_DIR) / "bhe-deg20-delta-derivative.ini");
  EXPECT_TRUE(over.training.regularize_zero_input);
  EXPECT_EQ(over.problem.degree, 20u);
}
#endif

#ifdef CYLFDE_CLI_PATH
int run_cli(const std::string& args) {
  const int status = std::system((std::string(CYLFDE_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("cli");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.ini") << "[training]\nnope = 1\n";
  std::ofstream(dir / "ok.ini") << "[problem]\nkind = bhe\n[converge]\ndegrees = 4,8\nsamples = 5\n";
  EXPECT_EQ(run_cli("converge --config " + (dir / "ok.ini").string() + " --out " + (dir / "o").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "o" / "convergence.csv"));
  EXPECT_EQ(run_cli("converge --config " + (dir / "bad.ini").string()), 2);
  EXPECT_EQ(run_cli("train --preset no-such-preset"), 2);
  EXPECT_EQ(run_cli("eval --config " + (dir / "ok.ini").string() + " --checkpoint " +
                    (dir / "none.ckpt").string() + " --out " + (dir / "o").string()),
            4);
  std::ofstream(dir / "blocker") << "x";
  EXPECT_EQ(run_cli("converge --config " + (dir / "ok.ini").string() + " --out " +
                    (dir / "blocker" / "sub").string()),
            4);
}
#endif

}  // namespace
