#include "nst/config.hpp"

#include <fstream>

#include "nst/errors.hpp"

namespace nst {

using nlohmann::json;

Config Config::preset(std::string_view name) {
  Config c;
  if (name == "desk") return c;
  if (name == "full") {
    c.hidden_dim = 300;
    c.cbow.dim = 300;
    return c;
  }
  if (name == "toy") {
    // Synthetic-grammar runs. CBOW on a ~50-token grammar collapses words of
    // the same role onto one direction, so the frozen table stays at its
    // seeded initialization.
    c.cbow.epochs = 0;
    c.train.epochs = 20;
    c.train.batch_size = 1;
    c.train.adam.lr = 5e-3;
    c.train.lr_final_fraction = 0.1;
    return c;
  }
  throw UsageError("unknown preset: " + std::string(name));
}

json Config::to_json() const {
  json j;
  j["hidden_dim"] = hidden_dim;
  j["semi_supervised"] = semi_supervised;
  j["min_freq"] = min_freq;
  j["max_vocab"] = max_vocab ? json(*max_vocab) : json(nullptr);
  j["eps"] = eps;
  j["drop_rate"] = drop_rate;
  j["max_len"] = max_len;
  j["seed"] = seed;
  j["cbow"] = {{"dim", cbow.dim},          {"window", cbow.window}, {"negatives", cbow.negatives},
               {"epochs", cbow.epochs},    {"lr", cbow.lr},         {"seed", cbow.seed}};
  j["train"] = {{"lr", train.adam.lr},
                {"beta1", train.adam.beta1},
                {"beta2", train.adam.beta2},
                {"adam_eps", train.adam.epsilon},
                {"epochs", train.epochs},
                {"batch_size", train.batch_size},
                {"seed", train.seed},
                {"cls_weight", train.cls_weight},
                {"teacher_forcing_start", train.teacher_forcing_start},
                {"teacher_forcing_end", train.teacher_forcing_end},
                {"max_decode_len", train.max_decode_len},
                {"lr_final_fraction", train.lr_final_fraction},
                {"grad_clip", train.grad_clip}};
  j["textcnn"] = {{"embed_dim", textcnn.embed_dim}, {"feature_maps", textcnn.feature_maps},
                  {"widths", textcnn.widths},       {"epochs", textcnn.epochs},
                  {"batch_size", textcnn.batch_size}, {"lr", textcnn.lr},
                  {"seed", textcnn.seed}};
  return j;
}

namespace {

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j[key].is_null()) out = j[key].get<T>();
}

}  // namespace

Config Config::from_json(const json& j) {
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  Config c = preset(j.value("preset", std::string("desk")));
  try {
    read(j, "hidden_dim", c.hidden_dim);
    read(j, "semi_supervised", c.semi_supervised);
    read(j, "min_freq", c.min_freq);
    if (j.contains("max_vocab")) {
      if (j["max_vocab"].is_null()) c.max_vocab.reset();
      else c.max_vocab = j["max_vocab"].get<std::size_t>();
    }
    read(j, "eps", c.eps);
    read(j, "drop_rate", c.drop_rate);
    read(j, "max_len", c.max_len);
    if (j.contains("seed")) c.set_seed(j["seed"].get<std::uint64_t>());
    if (j.contains("cbow")) {
      const json& s = j["cbow"];
      read(s, "dim", c.cbow.dim);
      read(s, "window", c.cbow.window);
      read(s, "negatives", c.cbow.negatives);
      read(s, "epochs", c.cbow.epochs);
      read(s, "lr", c.cbow.lr);
      read(s, "seed", c.cbow.seed);
    }
    if (j.contains("train")) {
      const json& s = j["train"];
      read(s, "lr", c.train.adam.lr);
      read(s, "beta1", c.train.adam.beta1);
      read(s, "beta2", c.train.adam.beta2);
      read(s, "adam_eps", c.train.adam.epsilon);
      read(s, "epochs", c.train.epochs);
      read(s, "batch_size", c.train.batch_size);
      read(s, "seed", c.train.seed);
      read(s, "cls_weight", c.train.cls_weight);
      read(s, "teacher_forcing_start", c.train.teacher_forcing_start);
      read(s, "teacher_forcing_end", c.train.teacher_forcing_end);
      read(s, "max_decode_len", c.train.max_decode_len);
      read(s, "grad_clip", c.train.grad_clip);
      read(s, "lr_final_fraction", c.train.lr_final_fraction);
    }
    if (j.contains("textcnn")) {
      const json& s = j["textcnn"];
      read(s, "embed_dim", c.textcnn.embed_dim);
      read(s, "feature_maps", c.textcnn.feature_maps);
      read(s, "widths", c.textcnn.widths);
      read(s, "epochs", c.textcnn.epochs);
      read(s, "batch_size", c.textcnn.batch_size);
      read(s, "lr", c.textcnn.lr);
      read(s, "seed", c.textcnn.seed);
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("invalid config value: ") + e.what());
  }
  c.validate();
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw UsageError("config " + path.string() + " is not valid JSON");
  return from_json(j);
}

void Config::set_seed(std::uint64_t s) {
  seed = s;
  cbow.seed = s;
  train.seed = s + 1;
  textcnn.seed = s + 2;
}

void Config::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) throw UsageError("override must be key=value");
  const std::string key(assignment.substr(0, eq));
  const std::string value(assignment.substr(eq + 1));
  json patch_value = json::parse(value, nullptr, false);
  if (patch_value.is_discarded()) patch_value = value;

  json j = to_json();
  const auto dot = key.find('.');
  if (dot == std::string::npos) {
    if (!j.contains(key)) throw UsageError("unknown config key: " + key);
    j[key] = patch_value;
  } else {
    const std::string section = key.substr(0, dot);
    const std::string field = key.substr(dot + 1);
    if (!j.contains(section) || !j[section].contains(field)) {
      throw UsageError("unknown config key: " + key);
    }
    j[section][field] = patch_value;
  }
  if (key == "seed") {
    *this = from_json(j);
  } else {
    // Keep already-derived per-section seeds unless one is overridden directly.
    json without_seed = j;
    without_seed.erase("seed");
    Config next = from_json(without_seed);
    next.seed = seed;
    *this = next;
  }
}

void Config::validate() const {
  if (hidden_dim < 1) throw UsageError("hidden_dim must be >= 1");
  if (min_freq < 1) throw UsageError("min_freq must be >= 1");
  if (!(eps > 0.0)) throw UsageError("eps must be positive");
  if (!(drop_rate >= 0.0 && drop_rate < 1.0)) throw UsageError("drop_rate must lie in [0, 1)");
  if (max_len < 1) throw UsageError("max_len must be >= 1");
  if (cbow.dim < 2 || cbow.window < 1 || cbow.epochs < 0 || cbow.negatives < 0) {
    throw UsageError("invalid cbow settings");
  }
  train.validate();
  textcnn.validate();
}

}  // namespace nst
