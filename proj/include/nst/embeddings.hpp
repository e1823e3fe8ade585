#pragma once

#include <cstdint>
#include <filesystem>
#include <span>

#include <Eigen/Dense>

#include "nst/corpus.hpp"

namespace nst {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// |V| x d_w word vectors. Row kPad is always zero.
struct EmbeddingTable {
  RowMatrix vectors;

  std::size_t vocab_size() const { return static_cast<std::size_t>(vectors.rows()); }
  int dim() const { return static_cast<int>(vectors.cols()); }

  auto row(TokenId id) const { return vectors.row(id); }

  // T x d_w matrix whose row t is the vector of ids[t].
  Eigen::MatrixXd lookup(std::span<const TokenId> ids) const;

  // FNV-1a over the raw value bytes.
  std::uint64_t checksum() const;

  void export_text(const Vocab& vocab, const std::filesystem::path& path) const;
};

struct CbowConfig {
  int dim = 32;
  int window = 5;
  int negatives = 5;
  int epochs = 5;
  double lr = 0.025;
  std::uint64_t seed = 1;
};

// Uniform in [-0.5/d_w, 0.5/d_w] with the PAD row zeroed.
EmbeddingTable init_embeddings(std::size_t vocab_size, int dim, std::uint64_t seed);

// CBOW with negative sampling from the unigram^0.75 distribution. The context
// of position i is the average of the vectors within +-window; the learning
// rate decays linearly over all training positions.
EmbeddingTable train_cbow(const LabeledCorpus& corpus, const Vocab& vocab,
                          const CbowConfig& config);

}  // namespace nst
