#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nst/adam.hpp"
#include "nst/corpus.hpp"
#include "nst/embeddings.hpp"

namespace nst {

struct TextCnnConfig {
  int embed_dim = 16;
  int feature_maps = 16;
  std::vector<int> widths = {3, 4, 5};
  int epochs = 5;
  int batch_size = 32;
  double lr = 2e-3;
  std::uint64_t seed = 7;

  void validate() const;
};

// Binary convolutional sentence classifier with its own trainable word
// embeddings: per-width convolutions, max-pool over time, ReLU, linear layer
// to two logits. Inputs shorter than the widest filter are right-padded with
// PAD.
struct TextCnn {
  RowMatrix embeddings;                  // |V| x d_e
  std::vector<int> widths;
  std::vector<Eigen::MatrixXd> filters;  // per width: f x (width * d_e)
  std::vector<Eigen::VectorXd> biases;   // per width: f
  Eigen::MatrixXd fc;                    // 2 x (f * #widths)
  Eigen::VectorXd fc_bias;               // 2

  static TextCnn create(std::size_t vocab_size, const TextCnnConfig& config);

  int feature_maps() const { return static_cast<int>(filters.front().rows()); }
  Eigen::Vector2d logits(std::span<const TokenId> ids) const;
  // Argmax label, lowest label on ties.
  int predict(std::span<const TokenId> ids) const;
};

// Trains on a corpus with labels in {0, 1}; both labels must be present.
TextCnn train_eval_classifier(const LabeledCorpus& corpus, std::size_t vocab_size,
                              const TextCnnConfig& config);

// Percentage of sentences predicted as target_label.
double accuracy(const TextCnn& clf, std::span<const std::vector<TokenId>> sentences,
                int target_label);

}  // namespace nst
