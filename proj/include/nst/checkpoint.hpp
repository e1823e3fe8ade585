#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nst/corpus.hpp"
#include "nst/seq2seq.hpp"
#include "nst/style_matrix.hpp"
#include "nst/textcnn.hpp"

namespace nst {

// Binary container shared by model, style-matrix and classifier files.
//
// Layout, all integers and doubles little-endian:
//   "STYM"                 4 bytes magic
//   u32 version            currently 1
//   u64 n, n bytes         config snapshot (JSON text)
//   u32 count              vocabulary tokens in id order
//     u32 n, n bytes       each token
//   u32 count              named tensors
//     u32 n, n bytes       name
//     u32 rank
//     u64 x rank           dims
//     f64 x prod(dims)     values, row-major
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Tensor {
  std::vector<std::uint64_t> dims;
  std::vector<double> values;

  friend bool operator==(const Tensor&, const Tensor&) = default;
};

class Checkpoint {
 public:
  std::string config_json;
  std::vector<std::string> vocab;

  void put(std::string name, Tensor tensor);
  void put_matrix(std::string name, const Eigen::MatrixXd& m);
  void put_vector(std::string name, const Eigen::VectorXd& v);

  bool has(std::string_view name) const;
  const Tensor& tensor(std::string_view name) const;
  Eigen::MatrixXd matrix(std::string_view name) const;
  Eigen::VectorXd vector(std::string_view name) const;
  const std::vector<std::pair<std::string, Tensor>>& tensors() const { return tensors_; }

  std::string serialize() const;
  static Checkpoint deserialize(std::string_view bytes);
  void save(const std::filesystem::path& path) const;
  static Checkpoint load(const std::filesystem::path& path);

 private:
  std::vector<std::pair<std::string, Tensor>> tensors_;
};

Checkpoint model_checkpoint(const Seq2SeqModel& model, const Vocab& vocab,
                            std::string config_json);
Seq2SeqModel model_from_checkpoint(const Checkpoint& ckpt);

Checkpoint style_checkpoint(const StyleMatrix& sm, const std::string& name);
StyleMatrix style_from_checkpoint(const Checkpoint& ckpt);
std::string style_name(const Checkpoint& ckpt);

Checkpoint classifier_checkpoint(const TextCnn& clf, const Vocab& vocab);
TextCnn classifier_from_checkpoint(const Checkpoint& ckpt);

}  // namespace nst
