#pragma once

// Run configuration: an INI document with sections [problem] [network]
// [training] [sampler] [converge] [eval] [output]. Presets are documents too;
// a config file is laid over its preset key by key. Unknown sections and keys
// are rejected.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cylfde/errors.hpp"
#include "cylfde/eval.hpp"
#include "cylfde/problems.hpp"
#include "cylfde/training.hpp"

namespace cylfde {

struct ProblemSection {
  std::string kind = "fte";        // fte | bhe
  std::string variant = "linear";  // linear | nonlinear; delta | constant | moderate (bhe default delta)
  std::size_t degree = 4;
  double rho0 = 1.0;
  double upsilon0 = 1.0;
  double mu_bar = 8.0;
  double sigma2 = 10.0;

  bool operator==(const ProblemSection&) const = default;
};

struct NetworkSection {
  std::size_t width = 256;
  bool operator==(const NetworkSection&) const = default;
};

struct ConvergeSection {
  std::size_t reference_degree = 1000;
  std::vector<std::size_t> degrees = {4, 8, 16, 32, 64, 128, 256, 512};
  std::size_t samples = 100;
  double t = 1e-3;
  /// theta coefficients are uniform in [-scale, scale] / (k+1)^2.
  double coefficient_scale = 1.0;

  bool operator==(const ConvergeSection&) const = default;
};

struct EvalSection {
  std::string what = "errors";  // errors | derivative | second_order | cross_degree
  std::size_t grid_points = 101;
  std::size_t time_points = 5;
  double fd_step = kSecondDerivativeStep;
  std::vector<std::size_t> degrees = {4, 20, 100};
  EmbedMode embed = EmbedMode::Auto;

  bool operator==(const EvalSection&) const = default;
};

struct OutputSection {
  std::string directory = "out";
  bool history_csv = true;
  bool per_point_csv = false;

  bool operator==(const OutputSection&) const = default;
};

struct RunConfig {
  ProblemSection problem;
  NetworkSection network;
  TrainConfig training;
  SamplerConfig sampler;
  ConvergeSection converge;
  EvalSection eval;
  OutputSection output;

  bool operator==(const RunConfig&) const = default;
};

/// Flat "section.key" -> value document.
using ConfigDocument = std::map<std::string, std::string>;

namespace config_detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
inline std::string fmt(std::size_t v) { return std::to_string(v); }
inline std::string fmt(std::uint64_t v, int) { return std::to_string(v); }
inline std::string fmt(bool v) { return v ? "true" : "false"; }
inline std::string fmt(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (trim(v.substr(pos)).empty()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
}

inline std::uint64_t to_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    if (!v.empty() && v[0] != '-') {
      const auto n = std::stoull(v, &pos);
      if (trim(v.substr(pos)).empty()) return n;
    }
  } catch (const std::exception&) {
  }
  throw ConfigError("'" + key + "' expects a non-negative integer, got '" + v + "'");
}

inline std::size_t to_size(const std::string& key, const std::string& v) {
  return static_cast<std::size_t>(to_u64(key, v));
}

inline bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + v + "'");
}

inline std::vector<std::size_t> to_sizes(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_size(key, trim(item)));
  if (out.empty()) throw ConfigError("'" + key + "' expects a comma-separated list");
  return out;
}

inline EmbedMode to_embed(const std::string& key, const std::string& v) {
  if (v == "auto") return EmbedMode::Auto;
  if (v == "zero_pad") return EmbedMode::ZeroPad;
  if (v == "truncate") return EmbedMode::Truncate;
  throw ConfigError("'" + key + "' expects auto, zero_pad or truncate, got '" + v + "'");
}

}  // namespace config_detail

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "problem.kind", "problem.variant", "problem.degree", "problem.rho0", "problem.upsilon0",
      "problem.mu_bar", "problem.sigma2",
      "network.width",
      "training.iterations", "training.batch_size", "training.learning_rate",
      "training.weight_decay", "training.start_factor", "training.milestone", "training.t0",
      "training.t_mult", "training.eta_min", "training.loss", "training.reweight_temperature",
      "training.regularize_zero_input", "training.seed", "training.validation_interval",
      "training.log_interval",
      "sampler.t_lo", "sampler.t_hi", "sampler.a_lo", "sampler.a_hi", "sampler.quadratic_decay",
      "sampler.validation_points", "sampler.test_points",
      "converge.reference_degree", "converge.degrees", "converge.samples", "converge.t",
      "converge.coefficient_scale",
      "eval.what", "eval.grid_points", "eval.time_points", "eval.fd_step", "eval.degrees",
      "eval.embed",
      "output.directory", "output.history_csv", "output.per_point_csv"};
  return keys;
}

/// Builds the problem described by a [problem] section.
inline PdeProblem make_problem(const ProblemSection& p) {
  if (p.kind == "fte") {
    FteVariant v;
    if (p.variant == "linear") v = FteVariant::LinearIC;
    else if (p.variant == "nonlinear") v = FteVariant::NonlinearIC;
    else throw ConfigError("transport variant must be linear or nonlinear, got '" + p.variant + "'");
    return fte_problem(FteConfig::make(p.degree, v, p.rho0, p.upsilon0));
  }
  if (p.kind == "bhe") {
    CovarianceKind c;
    if (p.variant == "delta") c = CovarianceKind::Delta;
    else if (p.variant == "constant") c = CovarianceKind::Constant;
    else if (p.variant == "moderate") c = CovarianceKind::Moderate;
    else throw ConfigError("Burgers-Hopf variant must be delta, constant or moderate, got '" + p.variant + "'");
    return bhe_problem(BheConfig::make(p.degree, c, p.mu_bar, p.sigma2));
  }
  throw ConfigError("problem kind must be fte or bhe, got '" + p.kind + "'");
}

inline BheConfig make_bhe_config(const ProblemSection& p) {
  if (p.kind != "bhe") throw ConfigError("not a Burgers-Hopf problem");
  const CovarianceKind c = p.variant == "delta" ? CovarianceKind::Delta
                           : p.variant == "constant" ? CovarianceKind::Constant
                                                     : CovarianceKind::Moderate;
  return BheConfig::make(p.degree, c, p.mu_bar, p.sigma2);
}

/// Resolves a document into a typed config. Sampler keys that are absent take
/// the standard ranges of the configured problem.
inline RunConfig from_document(const ConfigDocument& doc) {
  using namespace config_detail;
  const auto& known = config_keys();
  for (const auto& [k, v] : doc) {
    if (std::find(known.begin(), known.end(), k) == known.end()) {
      throw ConfigError("unknown config key '" + k + "'");
    }
  }
  const auto get = [&](const std::string& k) -> const std::string* {
    const auto it = doc.find(k);
    return it == doc.end() ? nullptr : &it->second;
  };

  RunConfig c;
  auto& p = c.problem;
  if (auto v = get("problem.kind")) p.kind = *v;
  if (auto v = get("problem.variant")) p.variant = *v;
  else if (p.kind == "bhe") p.variant = "delta";
  if (auto v = get("problem.degree")) p.degree = to_size("problem.degree", *v);
  if (auto v = get("problem.rho0")) p.rho0 = to_double("problem.rho0", *v);
  if (auto v = get("problem.upsilon0")) p.upsilon0 = to_double("problem.upsilon0", *v);
  if (auto v = get("problem.mu_bar")) p.mu_bar = to_double("problem.mu_bar", *v);
  if (auto v = get("problem.sigma2")) p.sigma2 = to_double("problem.sigma2", *v);
  const PdeProblem problem = make_problem(p);

  if (auto v = get("network.width")) c.network.width = to_size("network.width", *v);
  if (c.network.width == 0) throw ConfigError("network.width must be positive");

  auto& t = c.training;
  if (auto v = get("training.iterations")) t.iterations = to_size("training.iterations", *v);
  if (auto v = get("training.batch_size")) t.batch_size = to_size("training.batch_size", *v);
  if (auto v = get("training.learning_rate")) t.learning_rate = to_double("training.learning_rate", *v);
  if (auto v = get("training.weight_decay")) t.weight_decay = to_double("training.weight_decay", *v);
  if (auto v = get("training.start_factor")) t.schedule.start_factor = to_double("training.start_factor", *v);
  if (auto v = get("training.milestone")) t.schedule.milestone = to_size("training.milestone", *v);
  if (auto v = get("training.t0")) t.schedule.t0 = to_size("training.t0", *v);
  if (auto v = get("training.t_mult")) t.schedule.t_mult = to_size("training.t_mult", *v);
  if (auto v = get("training.eta_min")) t.schedule.eta_min = to_double("training.eta_min", *v);
  if (auto v = get("training.loss")) t.loss_kind = parse_loss_kind(*v);
  if (auto v = get("training.reweight_temperature")) {
    t.reweight_temperature = to_double("training.reweight_temperature", *v);
  }
  if (auto v = get("training.regularize_zero_input")) {
    t.regularize_zero_input = to_bool("training.regularize_zero_input", *v);
  }
  if (auto v = get("training.seed")) t.seed = to_u64("training.seed", *v);
  if (auto v = get("training.validation_interval")) {
    t.validation_interval = to_size("training.validation_interval", *v);
  }
  if (auto v = get("training.log_interval")) t.log_interval = to_size("training.log_interval", *v);
  t.validate();

  auto& s = c.sampler;
  s = SamplerConfig::for_problem(problem);
  if (auto v = get("sampler.t_lo")) s.t_range.lo = to_double("sampler.t_lo", *v);
  if (auto v = get("sampler.t_hi")) s.t_range.hi = to_double("sampler.t_hi", *v);
  if (auto v = get("sampler.a_lo")) s.a_range.lo = to_double("sampler.a_lo", *v);
  if (auto v = get("sampler.a_hi")) s.a_range.hi = to_double("sampler.a_hi", *v);
  if (auto v = get("sampler.quadratic_decay")) s.quadratic_decay = to_bool("sampler.quadratic_decay", *v);
  if (auto v = get("sampler.validation_points")) {
    s.validation_points = to_size("sampler.validation_points", *v);
  }
  if (auto v = get("sampler.test_points")) s.test_points = to_size("sampler.test_points", *v);
  s.validate(problem);

  auto& cv = c.converge;
  if (auto v = get("converge.reference_degree")) cv.reference_degree = to_size("converge.reference_degree", *v);
  if (auto v = get("converge.degrees")) cv.degrees = to_sizes("converge.degrees", *v);
  if (auto v = get("converge.samples")) cv.samples = to_size("converge.samples", *v);
  if (auto v = get("converge.t")) cv.t = to_double("converge.t", *v);
  if (auto v = get("converge.coefficient_scale")) {
    cv.coefficient_scale = to_double("converge.coefficient_scale", *v);
  }

  auto& e = c.eval;
  if (auto v = get("eval.what")) e.what = *v;
  if (e.what != "errors" && e.what != "derivative" && e.what != "second_order" &&
      e.what != "cross_degree") {
    throw ConfigError("eval.what must be errors, derivative, second_order or cross_degree, got '" +
                      e.what + "'");
  }
  if (auto v = get("eval.grid_points")) e.grid_points = to_size("eval.grid_points", *v);
  if (auto v = get("eval.time_points")) e.time_points = to_size("eval.time_points", *v);
  if (auto v = get("eval.fd_step")) e.fd_step = to_double("eval.fd_step", *v);
  if (auto v = get("eval.degrees")) e.degrees = to_sizes("eval.degrees", *v);
  if (auto v = get("eval.embed")) e.embed = to_embed("eval.embed", *v);

  auto& o = c.output;
  if (auto v = get("output.directory")) o.directory = *v;
  if (auto v = get("output.history_csv")) o.history_csv = to_bool("output.history_csv", *v);
  if (auto v = get("output.per_point_csv")) o.per_point_csv = to_bool("output.per_point_csv", *v);
  return c;
}

/// Every key of the config with its resolved value.
inline ConfigDocument to_document(const RunConfig& c) {
  using config_detail::fmt;
  ConfigDocument d;
  d["problem.kind"] = c.problem.kind;
  d["problem.variant"] = c.problem.variant;
  d["problem.degree"] = fmt(c.problem.degree);
  d["problem.rho0"] = fmt(c.problem.rho0);
  d["problem.upsilon0"] = fmt(c.problem.upsilon0);
  d["problem.mu_bar"] = fmt(c.problem.mu_bar);
  d["problem.sigma2"] = fmt(c.problem.sigma2);
  d["network.width"] = fmt(c.network.width);
  const auto& t = c.training;
  d["training.iterations"] = fmt(t.iterations);
  d["training.batch_size"] = fmt(t.batch_size);
  d["training.learning_rate"] = fmt(t.learning_rate);
  d["training.weight_decay"] = fmt(t.weight_decay);
  d["training.start_factor"] = fmt(t.schedule.start_factor);
  d["training.milestone"] = fmt(t.schedule.milestone);
  d["training.t0"] = fmt(t.schedule.t0);
  d["training.t_mult"] = fmt(t.schedule.t_mult);
  d["training.eta_min"] = fmt(t.schedule.eta_min);
  d["training.loss"] = to_string(t.loss_kind);
  d["training.reweight_temperature"] = fmt(t.reweight_temperature);
  d["training.regularize_zero_input"] = fmt(t.regularize_zero_input);
  d["training.seed"] = config_detail::fmt(t.seed, 0);
  d["training.validation_interval"] = fmt(t.validation_interval);
  d["training.log_interval"] = fmt(t.log_interval);
  const auto& s = c.sampler;
  d["sampler.t_lo"] = fmt(s.t_range.lo);
  d["sampler.t_hi"] = fmt(s.t_range.hi);
  d["sampler.a_lo"] = fmt(s.a_range.lo);
  d["sampler.a_hi"] = fmt(s.a_range.hi);
  d["sampler.quadratic_decay"] = fmt(s.quadratic_decay);
  d["sampler.validation_points"] = fmt(s.validation_points);
  d["sampler.test_points"] = fmt(s.test_points);
  d["converge.reference_degree"] = fmt(c.converge.reference_degree);
  d["converge.degrees"] = fmt(c.converge.degrees);
  d["converge.samples"] = fmt(c.converge.samples);
  d["converge.t"] = fmt(c.converge.t);
  d["converge.coefficient_scale"] = fmt(c.converge.coefficient_scale);
  d["eval.what"] = c.eval.what;
  d["eval.grid_points"] = fmt(c.eval.grid_points);
  d["eval.time_points"] = fmt(c.eval.time_points);
  d["eval.fd_step"] = fmt(c.eval.fd_step);
  d["eval.degrees"] = fmt(c.eval.degrees);
  d["eval.embed"] = to_string(c.eval.embed);
  d["output.directory"] = c.output.directory;
  d["output.history_csv"] = fmt(c.output.history_csv);
  d["output.per_point_csv"] = fmt(c.output.per_point_csv);
  return d;
}

/// INI text in section order, with optional leading comment lines.
inline std::string serialize_config(const RunConfig& c, const std::vector<std::string>& comments = {}) {
  const auto d = to_document(c);
  std::ostringstream os;
  for (const auto& line : comments) os << "# " << line << '\n';
  for (const char* section : {"problem", "network", "training", "sampler", "converge", "eval", "output"}) {
    os << '[' << section << "]\n";
    const std::string prefix = std::string(section) + ".";
    for (const auto& key : config_keys()) {
      if (key.rfind(prefix, 0) == 0) os << key.substr(prefix.size()) << " = " << d.at(key) << '\n';
    }
    os << '\n';
  }
  return os.str();
}

inline ConfigDocument parse_ini(std::istream& is, const std::string& origin) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  ConfigDocument doc;
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError(origin + ": key '" + section + "' outside of a section");
    }
    for (const auto& [key, value] : body) {
      doc[section + "." + key] = config_detail::trim(value.data());
    }
  }
  return doc;
}

inline ConfigDocument read_config_document(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read config file: " + path.string());
  return parse_ini(is, path.string());
}

inline RunConfig parse_config(const std::string& text) {
  std::istringstream is(text);
  return from_document(parse_ini(is, "<string>"));
}

// ---------------------------------------------------------------------------
// Presets

namespace config_detail {

struct PaperRow {
  const char* name;
  const char* kind;
  const char* variant;
  std::size_t degree;
  const char* loss;
  double lr;
  double wd;
  std::size_t t0;
  std::size_t t_mult;
  std::size_t milestone;
};

// Hyperparameters of the published runs (width 1024, batch 1024).
inline const std::vector<PaperRow>& paper_rows() {
  static const std::vector<PaperRow> rows = {
      {"fte-deg4-linear", "fte", "linear", 4, "smooth_l1", 8.675e-6, 4.534e-6, 250000, 2, 0},
      {"fte-deg20-linear", "fte", "linear", 20, "smooth_l1", 1.878e-5, 6.184e-7, 500000, 1, 5000},
      {"fte-deg100-linear", "fte", "linear", 100, "smooth_l1", 2.839e-5, 2.008e-5, 500000, 1, 0},
      {"fte-deg4-nonlinear", "fte", "nonlinear", 4, "l1_linf", 8.456e-6, 0.0, 500000, 1, 5000},
      {"fte-deg100-nonlinear", "fte", "nonlinear", 100, "l1_linf", 1.042e-5, 0.0, 500000, 1, 0},
      {"fte-deg1000-nonlinear", "fte", "nonlinear", 1000, "l1_linf", 1.130e-5, 0.0, 250000, 1, 5000},
      {"fte-deg4-nonlinear-app", "fte", "nonlinear", 4, "smooth_l1", 4.837e-6, 8.637e-5, 250000, 2, 0},
      {"fte-deg10-nonlinear-app", "fte", "nonlinear", 10, "smooth_l1", 5.810e-5, 2.877e-5, 500000, 2, 50000},
      {"fte-deg20-nonlinear-app", "fte", "nonlinear", 20, "smooth_l1", 6.076e-6, 2.068e-7, 500000, 2, 50000},
      {"bhe-deg4-delta", "bhe", "delta", 4, "smooth_l1", 6.680e-5, 4.429e-6, 300000, 2, 0},
      {"bhe-deg20-delta", "bhe", "delta", 20, "smooth_l1", 1.372e-4, 6.644e-7, 300000, 1, 0},
      {"bhe-deg100-delta", "bhe", "delta", 100, "smooth_l1", 1.204e-4, 4.893e-7, 150000, 1, 3000},
      {"bhe-deg4-constant", "bhe", "constant", 4, "smooth_l1", 5.131e-5, 1.083e-5, 300000, 2, 3000},
      {"bhe-deg20-constant", "bhe", "constant", 20, "smooth_l1", 9.989e-5, 9.353e-7, 150000, 1, 3000},
      {"bhe-deg100-constant", "bhe", "constant", 100, "smooth_l1", 8.637e-5, 8.378e-5, 300000, 1, 30000},
      {"bhe-deg4-moderate", "bhe", "moderate", 4, "smooth_l1", 2.248e-5, 3.669e-5, 300000, 1, 3000},
      {"bhe-deg20-moderate", "bhe", "moderate", 20, "smooth_l1", 3.254e-5, 1.771e-6, 300000, 2, 0},
      {"bhe-deg100-moderate", "bhe", "moderate", 100, "smooth_l1", 1.209e-5, 1.423e-6, 300000, 1, 0},
  };
  return rows;
}

inline ConfigDocument paper_document(const PaperRow& r) {
  const bool fte = std::string(r.kind) == "fte";
  return {{"problem.kind", r.kind},
          {"problem.variant", r.variant},
          {"problem.degree", std::to_string(r.degree)},
          {"network.width", "1024"},
          {"training.iterations", fte ? "500000" : "300000"},
          {"training.batch_size", "1024"},
          {"training.loss", r.loss},
          {"training.learning_rate", fmt(r.lr)},
          {"training.weight_decay", fmt(r.wd)},
          {"training.t0", std::to_string(r.t0)},
          {"training.t_mult", std::to_string(r.t_mult)},
          {"training.milestone", std::to_string(r.milestone)}};
}

// Reduced-budget recipes for a single CPU core.
inline const std::map<std::string, ConfigDocument>& desk_presets() {
  static const std::map<std::string, ConfigDocument> presets = {
      {"fte-deg4-linear-desk",
       {{"problem.kind", "fte"}, {"problem.variant", "linear"}, {"problem.degree", "4"},
        {"network.width", "256"}, {"training.iterations", "50000"}, {"training.batch_size", "1024"},
        {"training.learning_rate", "3e-4"}, {"training.weight_decay", "1e-6"},
        {"training.t0", "10000"}, {"training.t_mult", "1"}, {"training.milestone", "0"}}},
      {"bhe-deg4-delta-desk",
       {{"problem.kind", "bhe"}, {"problem.variant", "delta"}, {"problem.degree", "4"},
        {"network.width", "512"}, {"training.iterations", "50000"}, {"training.batch_size", "256"},
        {"training.learning_rate", "1e-4"}, {"training.weight_decay", "1e-6"},
        {"training.t0", "50000"}, {"training.t_mult", "1"}, {"training.milestone", "0"}}},
      {"bhe-deg20-delta-desk",
       {{"problem.kind", "bhe"}, {"problem.variant", "delta"}, {"problem.degree", "20"},
        {"network.width", "256"}, {"training.iterations", "10000"}, {"training.batch_size", "256"},
        {"training.learning_rate", "3e-4"}, {"training.weight_decay", "1e-6"},
        {"training.t0", "10000"}, {"training.t_mult", "1"}, {"training.milestone", "0"}}},
      {"fte-deg20-linear-desk",
       {{"problem.kind", "fte"}, {"problem.variant", "linear"}, {"problem.degree", "20"},
        {"network.width", "256"}, {"training.iterations", "50000"}, {"training.batch_size", "1024"},
        {"training.learning_rate", "3e-4"}, {"training.weight_decay", "1e-6"},
        {"training.t0", "10000"}, {"training.t_mult", "1"}, {"training.milestone", "0"}}},
      {"fte-deg100-linear-desk",
       {{"problem.kind", "fte"}, {"problem.variant", "linear"}, {"problem.degree", "100"},
        {"network.width", "256"}, {"training.iterations", "50000"}, {"training.batch_size", "1024"},
        {"training.learning_rate", "3e-4"}, {"training.weight_decay", "1e-6"},
        {"training.t0", "10000"}, {"training.t_mult", "1"}, {"training.milestone", "0"}}},
  };
  return presets;
}

}  // namespace config_detail

inline std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& r : config_detail::paper_rows()) out.emplace_back(r.name);
  for (const auto& [name, doc] : config_detail::desk_presets()) out.push_back(name);
  return out;
}

inline ConfigDocument preset_document(const std::string& name) {
  for (const auto& r : config_detail::paper_rows()) {
    if (name == r.name) return config_detail::paper_document(r);
  }
  const auto& desk = config_detail::desk_presets();
  if (const auto it = desk.find(name); it != desk.end()) return it->second;
  throw ConfigError("unknown preset '" + name + "'");
}

/// Preset (if any) overlaid by the file's keys (if any).
inline RunConfig load_run_config(const std::string& preset, const std::filesystem::path& file) {
  ConfigDocument doc = preset.empty() ? ConfigDocument{} : preset_document(preset);
  if (!file.empty()) {
    for (auto& [k, v] : read_config_document(file)) doc[k] = v;
  }
  return from_document(doc);
}

}  // namespace cylfde
