#include "nst/checkpoint.hpp"

#include <bit>
#include <fstream>
#include <iterator>
#include <sstream>

#include "json.hpp"
#include "nst/errors.hpp"

namespace nst {

namespace {

constexpr char kMagic[4] = {'S', 'T', 'Y', 'M'};

class Writer {
 public:
  void bytes(std::string_view b) { out_.append(b.data(), b.size()); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void f64(double v) { le(std::bit_cast<std::uint64_t>(v), 8); }
  void str32(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s);
  }
  std::string take() { return std::move(out_); }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}
  std::string_view bytes(std::size_t n) {
    if (n > data_.size() - pos_) throw DataError("truncated checkpoint");
    auto out = data_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  double f64() { return std::bit_cast<double>(le(8)); }
  std::string str32() { return std::string(bytes(u32())); }
  bool done() const { return pos_ == data_.size(); }

 private:
  std::uint64_t le(int n) {
    auto b = bytes(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

}  // namespace

void Checkpoint::put(std::string name, Tensor tensor) {
  std::uint64_t count = 1;
  for (auto d : tensor.dims) count *= d;
  if (count != tensor.values.size()) throw UsageError("tensor " + name + " has inconsistent dims");
  for (auto& [existing, t] : tensors_) {
    if (existing == name) {
      t = std::move(tensor);
      return;
    }
  }
  tensors_.emplace_back(std::move(name), std::move(tensor));
}

void Checkpoint::put_matrix(std::string name, const Eigen::MatrixXd& m) {
  Tensor t;
  t.dims = {static_cast<std::uint64_t>(m.rows()), static_cast<std::uint64_t>(m.cols())};
  t.values.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) t.values.push_back(m(r, c));
  }
  put(std::move(name), std::move(t));
}

void Checkpoint::put_vector(std::string name, const Eigen::VectorXd& v) {
  Tensor t;
  t.dims = {static_cast<std::uint64_t>(v.size())};
  t.values.assign(v.data(), v.data() + v.size());
  put(std::move(name), std::move(t));
}

bool Checkpoint::has(std::string_view name) const {
  for (const auto& [n, t] : tensors_) {
    if (n == name) return true;
  }
  return false;
}

const Tensor& Checkpoint::tensor(std::string_view name) const {
  for (const auto& [n, t] : tensors_) {
    if (n == name) return t;
  }
  throw DataError("checkpoint has no tensor '" + std::string(name) + "'");
}

Eigen::MatrixXd Checkpoint::matrix(std::string_view name) const {
  const Tensor& t = tensor(name);
  if (t.dims.size() != 2) throw DataError("tensor '" + std::string(name) + "' is not a matrix");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(t.dims[0]), static_cast<Eigen::Index>(t.dims[1]));
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = t.values[k++];
  }
  return m;
}

Eigen::VectorXd Checkpoint::vector(std::string_view name) const {
  const Tensor& t = tensor(name);
  if (t.dims.size() != 1) throw DataError("tensor '" + std::string(name) + "' is not a vector");
  return Eigen::Map<const Eigen::VectorXd>(t.values.data(), static_cast<Eigen::Index>(t.values.size()));
}

std::string Checkpoint::serialize() const {
  Writer w;
  w.bytes(std::string_view(kMagic, 4));
  w.u32(kCheckpointVersion);
  w.u64(config_json.size());
  w.bytes(config_json);
  w.u32(static_cast<std::uint32_t>(vocab.size()));
  for (const auto& token : vocab) w.str32(token);
  w.u32(static_cast<std::uint32_t>(tensors_.size()));
  for (const auto& [name, t] : tensors_) {
    w.str32(name);
    w.u32(static_cast<std::uint32_t>(t.dims.size()));
    for (auto d : t.dims) w.u64(d);
    for (double v : t.values) w.f64(v);
  }
  return w.take();
}

Checkpoint Checkpoint::deserialize(std::string_view bytes) {
  Reader r(bytes);
  if (bytes.size() < 4 || r.bytes(4) != std::string_view(kMagic, 4)) {
    throw DataError("not a checkpoint file (bad magic)");
  }
  const std::uint32_t version = r.u32();
  if (version == 0 || version > kCheckpointVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ckpt;
  ckpt.config_json = std::string(r.bytes(static_cast<std::size_t>(r.u64())));
  const std::uint32_t n_vocab = r.u32();
  for (std::uint32_t i = 0; i < n_vocab; ++i) ckpt.vocab.push_back(r.str32());
  const std::uint32_t n_tensors = r.u32();
  for (std::uint32_t i = 0; i < n_tensors; ++i) {
    std::string name = r.str32();
    Tensor t;
    const std::uint32_t rank = r.u32();
    std::uint64_t count = 1;
    for (std::uint32_t k = 0; k < rank; ++k) {
      t.dims.push_back(r.u64());
      count *= t.dims.back();
    }
    if (count > bytes.size() / 8) throw DataError("truncated checkpoint");
    t.values.resize(static_cast<std::size_t>(count));
    for (auto& v : t.values) v = r.f64();
    ckpt.tensors_.emplace_back(std::move(name), std::move(t));
  }
  if (!r.done()) throw DataError("trailing bytes after checkpoint");
  return ckpt;
}

void Checkpoint::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  const std::string data = serialize();
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw DataError("failed writing " + path.string());
}

Checkpoint Checkpoint::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return deserialize(data);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

namespace {

void put_gru(Checkpoint& ckpt, const std::string& prefix, const GruParams& p) {
  p.for_each([&](const char* name, const auto& t) {
    ckpt.put_matrix(prefix + "." + name, Eigen::MatrixXd(t));
  });
}

GruParams get_gru(const Checkpoint& ckpt, const std::string& prefix) {
  GruParams p;
  p.for_each([&](const char* name, auto& t) {
    using T = std::decay_t<decltype(t)>;
    const Eigen::MatrixXd m = ckpt.matrix(prefix + "." + name);
    if constexpr (T::ColsAtCompileTime == 1) {
      t = m.col(0);
    } else {
      t = m;
    }
  });
  p.check_shapes();
  return p;
}

}  // namespace

Checkpoint model_checkpoint(const Seq2SeqModel& model, const Vocab& vocab,
                            std::string config_json) {
  if (vocab.size() != model.vocab_size()) throw UsageError("vocab does not match the model");
  Checkpoint ckpt;
  ckpt.config_json = std::move(config_json);
  ckpt.vocab = vocab.tokens();
  ckpt.put_matrix("embeddings", model.embeddings.vectors);
  put_gru(ckpt, "encoder", model.encoder);
  put_gru(ckpt, "decoder", model.decoder);
  ckpt.put_matrix("out_proj", model.out_proj);
  if (model.classifier) ckpt.put_vector("classifier", *model.classifier);
  return ckpt;
}

Seq2SeqModel model_from_checkpoint(const Checkpoint& ckpt) {
  Seq2SeqModel model;
  model.embeddings.vectors = ckpt.matrix("embeddings");
  model.encoder = get_gru(ckpt, "encoder");
  model.decoder = get_gru(ckpt, "decoder");
  model.out_proj = ckpt.matrix("out_proj");
  if (ckpt.has("classifier")) model.classifier = ckpt.vector("classifier");
  model.check_shapes();
  if (!ckpt.vocab.empty() && ckpt.vocab.size() != model.vocab_size()) {
    throw DataError("checkpoint vocabulary does not match the model");
  }
  return model;
}

Checkpoint style_checkpoint(const StyleMatrix& sm, const std::string& name) {
  Checkpoint ckpt;
  ckpt.config_json = nlohmann::json{{"kind", "style"}, {"name", name}}.dump();
  ckpt.put_matrix("style.cov", sm.cov);
  ckpt.put_vector("style.mean", sm.mean);
  ckpt.put_vector("style.n", Eigen::VectorXd::Constant(1, static_cast<double>(sm.n)));
  return ckpt;
}

StyleMatrix style_from_checkpoint(const Checkpoint& ckpt) {
  StyleMatrix sm;
  sm.cov = ckpt.matrix("style.cov");
  sm.mean = ckpt.vector("style.mean");
  sm.n = static_cast<std::size_t>(ckpt.vector("style.n")[0]);
  if (sm.cov.rows() != sm.mean.size() || sm.cov.cols() != sm.mean.size()) {
    throw DataError("style matrix and mean dimensions differ");
  }
  return sm;
}

std::string style_name(const Checkpoint& ckpt) {
  auto j = nlohmann::json::parse(ckpt.config_json, nullptr, false);
  if (j.is_object() && j.contains("name")) return j["name"].get<std::string>();
  return "style";
}

Checkpoint classifier_checkpoint(const TextCnn& clf, const Vocab& vocab) {
  Checkpoint ckpt;
  ckpt.config_json = nlohmann::json{{"kind", "textcnn"}, {"widths", clf.widths}}.dump();
  ckpt.vocab = vocab.tokens();
  ckpt.put_matrix("textcnn.embeddings", clf.embeddings);
  for (std::size_t w = 0; w < clf.widths.size(); ++w) {
    const std::string suffix = std::to_string(clf.widths[w]);
    ckpt.put_matrix("textcnn.filter." + suffix, clf.filters[w]);
    ckpt.put_vector("textcnn.bias." + suffix, clf.biases[w]);
  }
  ckpt.put_matrix("textcnn.fc", clf.fc);
  ckpt.put_vector("textcnn.fc_bias", clf.fc_bias);
  return ckpt;
}

TextCnn classifier_from_checkpoint(const Checkpoint& ckpt) {
  const auto j = nlohmann::json::parse(ckpt.config_json, nullptr, false);
  if (!j.is_object() || j.value("kind", "") != "textcnn") {
    throw DataError("checkpoint does not hold a text classifier");
  }
  TextCnn clf;
  clf.widths = j["widths"].get<std::vector<int>>();
  clf.embeddings = ckpt.matrix("textcnn.embeddings");
  for (int width : clf.widths) {
    clf.filters.push_back(ckpt.matrix("textcnn.filter." + std::to_string(width)));
    clf.biases.push_back(ckpt.vector("textcnn.bias." + std::to_string(width)));
  }
  clf.fc = ckpt.matrix("textcnn.fc");
  clf.fc_bias = ckpt.vector("textcnn.fc_bias");
  return clf;
}

}  // namespace nst
