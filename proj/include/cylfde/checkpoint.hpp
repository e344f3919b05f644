#pragma once

// Checkpoint container: a magic line, one JSON line of metadata (architecture,
// tensor table, run identifiers), then the raw little-endian parameters.

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <type_traits>

#include <json.hpp>

#include "cylfde/errors.hpp"
#include "cylfde/nn.hpp"

namespace cylfde {

inline constexpr const char* kCheckpointMagic = "CYLFDE-CKPT 1";

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

struct CheckpointMeta {
  std::string problem;  // e.g. "fte/linear"
  std::string loss;
  std::uint64_t seed = 0;
  std::uint64_t iteration = 0;
  std::map<std::string, std::string> extra;

  bool operator==(const CheckpointMeta&) const = default;
};

template <class S>
struct Checkpoint {
  Mlp<S> net;
  CheckpointMeta meta;
};

template <class S>
constexpr const char* dtype_name() {
  if constexpr (std::is_same_v<S, float>) return "float32";
  else return "float64";
}

inline nlohmann::json arch_to_json(const MlpArch& a) {
  return {{"input_dim", a.input_dim}, {"width", a.width},         {"blocks", a.blocks},
          {"activation", to_string(a.activation)}, {"layer_norm", a.layer_norm},
          {"norm_eps", a.norm_eps}};
}

inline MlpArch arch_from_json(const nlohmann::json& j) {
  MlpArch a;
  a.input_dim = j.at("input_dim").get<std::size_t>();
  a.width = j.at("width").get<std::size_t>();
  a.blocks = j.at("blocks").get<std::size_t>();
  a.activation = parse_activation(j.at("activation").get<std::string>());
  a.layer_norm = j.at("layer_norm").get<bool>();
  a.norm_eps = j.at("norm_eps").get<double>();
  return a;
}

template <class S>
void save_checkpoint(const std::filesystem::path& path, const Mlp<S>& net,
                     const CheckpointMeta& meta) {
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& s : net.layout()) {
    tensors.push_back({{"name", s.name}, {"offset", s.offset}, {"rows", s.rows}, {"cols", s.cols}});
  }
  const nlohmann::json header = {
      {"dtype", dtype_name<S>()},
      {"arch", arch_to_json(net.arch())},
      {"num_params", net.num_params()},
      {"tensors", tensors},
      {"meta",
       {{"problem", meta.problem},
        {"loss", meta.loss},
        {"seed", meta.seed},
        {"iteration", meta.iteration},
        {"extra", meta.extra}}}};
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open checkpoint for writing: " + path.string());
  os << kCheckpointMagic << '\n' << header.dump() << '\n';
  os.write(reinterpret_cast<const char*>(net.params().data()),
           static_cast<std::streamsize>(sizeof(S) * static_cast<std::size_t>(net.num_params())));
  if (!os) throw IoError("failed writing checkpoint: " + path.string());
}

template <class S>
Checkpoint<S> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint: " + path.string());
  std::string magic, line;
  std::getline(is, magic);
  if (magic != kCheckpointMagic) throw IoError("not a checkpoint file: " + path.string());
  std::getline(is, line);
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("corrupt checkpoint header in " + path.string() + ": " + e.what());
  }
  if (header.at("dtype").get<std::string>() != dtype_name<S>()) {
    throw IoError("checkpoint " + path.string() + " stores " + header.at("dtype").get<std::string>() +
                  ", expected " + dtype_name<S>());
  }
  Checkpoint<S> ck{Mlp<S>(arch_from_json(header.at("arch"))), {}};
  if (header.at("num_params").get<Eigen::Index>() != ck.net.num_params()) {
    throw IoError("checkpoint parameter count does not match its architecture");
  }
  const auto& m = header.at("meta");
  ck.meta.problem = m.at("problem").get<std::string>();
  ck.meta.loss = m.at("loss").get<std::string>();
  ck.meta.seed = m.at("seed").get<std::uint64_t>();
  ck.meta.iteration = m.at("iteration").get<std::uint64_t>();
  ck.meta.extra = m.at("extra").get<std::map<std::string, std::string>>();
  is.read(reinterpret_cast<char*>(ck.net.params().data()),
          static_cast<std::streamsize>(sizeof(S) * static_cast<std::size_t>(ck.net.num_params())));
  if (!is) throw IoError("truncated checkpoint: " + path.string());
  return ck;
}

}  // namespace cylfde
