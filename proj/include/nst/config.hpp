#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"
#include "nst/embeddings.hpp"
#include "nst/textcnn.hpp"
#include "nst/trainer.hpp"

namespace nst {

struct Config {
  // Desk-scale defaults. preset("full") switches to 300-dim vectors,
  // preset("toy") holds the training schedule used for the synthetic grammar.
  int hidden_dim = 32;
  bool semi_supervised = true;
  int min_freq = 1;
  std::optional<std::size_t> max_vocab;
  double eps = 1e-5;
  double drop_rate = 0.0;
  int max_len = 30;
  std::uint64_t seed = 1;
  CbowConfig cbow;
  TrainConfig train;
  TextCnnConfig textcnn;

  static Config preset(std::string_view name);
  static Config from_json(const nlohmann::json& j);
  static Config load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  // Propagates one seed to every seeded component.
  void set_seed(std::uint64_t seed);
  // "section.key=value" (or "key=value" for top-level fields).
  void apply_override(std::string_view assignment);
  void validate() const;
};

}  // namespace nst
