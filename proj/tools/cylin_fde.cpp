#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "cylfde/commands.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kNumeric = 3, kIo = 4 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cylindrical approximation and PINN solver for functional differential equations"};
  app.require_subcommand(1);

  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string checkpoint;
  std::string what;
  bool list_presets = false;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "INI config file")->check(CLI::ExistingFile);
    sub->add_option("--preset", preset, "named preset the config file is laid over");
    sub->add_option("--seed", seed, "overrides training.seed");
    sub->add_option("--out", out_dir, "overrides output.directory");
  };
  auto* converge = app.add_subcommand("converge", "convergence study in the degree m");
  auto* train = app.add_subcommand("train", "train a PINN");
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  auto* presets = app.add_subcommand("presets", "list preset names");
  common(converge);
  common(train);
  common(eval);
  eval->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  eval->add_option("--what", what, "errors | derivative | second_order | cross_degree");
  presets->callback([&] { list_presets = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  if (list_presets) {
    for (const auto& n : cylfde::preset_names()) std::cout << n << '\n';
    return kOk;
  }

  try {
    if (config_path.empty() && preset.empty()) {
      throw cylfde::ConfigError("either --config or --preset is required");
    }
    cylfde::ConfigDocument doc = preset.empty() ? cylfde::ConfigDocument{} : cylfde::preset_document(preset);
    if (!config_path.empty()) {
      for (auto& [k, v] : cylfde::read_config_document(config_path)) doc[k] = v;
    }
    if (seed) doc["training.seed"] = std::to_string(*seed);
    if (!out_dir.empty()) doc["output.directory"] = out_dir;
    if (!what.empty()) doc["eval.what"] = what;
    const cylfde::RunConfig cfg = cylfde::from_document(doc);

    if (*converge) {
      const auto r = cylfde::cmd_converge(cfg);
      std::cout << "wrote " << r.csv.string() << '\n';
    } else if (*train) {
      const auto r = cylfde::cmd_train(cfg, &std::cerr);
      std::cout << "best validation error " << r.result.best_val_rel_error << " at iteration "
                << r.result.best_iteration << "; test mean relative error " << r.test.mean_rel << '\n';
      if (r.result.diverged) {
        std::cerr << "training diverged: " << r.result.diagnostic << '\n';
        return kNumeric;
      }
    } else if (*eval) {
      const auto r = cylfde::cmd_eval(cfg, checkpoint);
      for (const auto& row : r.errors) {
        std::cout << "m_eval " << row.m_eval << " mean_rel " << row.report.mean_rel << " mean_abs "
                  << row.report.mean_abs << '\n';
      }
      for (std::size_t i = 0; i < r.profiles.size(); ++i) {
        std::cout << "t " << r.times[i] << " derivative mean_rel " << r.profiles[i].errors.mean_rel << '\n';
      }
      for (const auto& f : r.files) std::cout << "wrote " << f.string() << '\n';
    }
  } catch (const cylfde::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const cylfde::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
