#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nst/corpus.hpp"
#include "nst/embeddings.hpp"
#include "nst/gru.hpp"
#include "nst/rng.hpp"

namespace nst {

// GRU encoder/decoder autoencoder without attention: the decoder sees the
// encoder only through its initial state z. The embedding table is frozen.
struct Seq2SeqModel {
  EmbeddingTable embeddings;
  GruParams encoder;
  GruParams decoder;
  Eigen::MatrixXd out_proj;                    // |V| x d
  std::optional<Eigen::VectorXd> classifier;   // d*d, row-major vec(z z^T)

  static Seq2SeqModel create(EmbeddingTable embeddings, int hidden_dim,
                             bool semi_supervised, std::uint64_t seed);

  int hidden_dim() const { return encoder.hidden_dim(); }
  std::size_t vocab_size() const { return static_cast<std::size_t>(out_proj.rows()); }
  bool semi_supervised() const { return classifier.has_value(); }
  void check_shapes() const;
};

// Gradients for every trainable group; embeddings are never included.
struct ModelGrads {
  GruParams encoder;
  GruParams decoder;
  Eigen::MatrixXd out_proj;
  std::optional<Eigen::VectorXd> classifier;

  static ModelGrads zeros_like(const Seq2SeqModel& model);
  ModelGrads& operator+=(const ModelGrads& other);
  ModelGrads& operator*=(double scale);
  double squared_norm() const;
};

// Visits matching (parameter, gradient) tensors in a fixed order.
template <typename F>
void for_each_param(Seq2SeqModel& model, ModelGrads& grads, F&& f) {
  struct Pair {
    GruParams* p;
    GruParams* g;
  };
  for (Pair pair : {Pair{&model.encoder, &grads.encoder}, Pair{&model.decoder, &grads.decoder}}) {
    std::vector<Eigen::Map<Eigen::VectorXd>> gs;
    pair.g->for_each([&](const char*, auto& t) { gs.emplace_back(t.data(), t.size()); });
    std::size_t k = 0;
    pair.p->for_each([&](const char*, auto& t) {
      Eigen::Map<Eigen::VectorXd> pm(t.data(), t.size());
      f(pm, gs[k++]);
    });
  }
  {
    Eigen::Map<Eigen::VectorXd> pm(model.out_proj.data(), model.out_proj.size());
    Eigen::Map<Eigen::VectorXd> gm(grads.out_proj.data(), grads.out_proj.size());
    f(pm, gm);
  }
  if (model.classifier && grads.classifier) {
    Eigen::Map<Eigen::VectorXd> pm(model.classifier->data(), model.classifier->size());
    Eigen::Map<Eigen::VectorXd> gm(grads.classifier->data(), grads.classifier->size());
    f(pm, gm);
  }
}

// Semantic vector z = h_T of the encoder run from h_0 = 0.
Eigen::VectorXd encode(const Seq2SeqModel& model, std::span<const TokenId> sentence);

// d x N matrix of semantic vectors, one column per sentence.
Eigen::MatrixXd encode_all(const Seq2SeqModel& model, std::span<const Sentence> sentences);

// Greedy decoding from s_0 = z with SOS as the first input. Emits the argmax
// token (lowest id on ties) until EOS or max_len tokens; EOS is included.
std::vector<TokenId> decode_greedy(const Seq2SeqModel& model, const Eigen::VectorXd& z,
                                   int max_len);

// Decoded ids with a trailing EOS removed.
std::vector<TokenId> strip_eos(std::vector<TokenId> ids);

struct LossGrad {
  double loss = 0.0;
  ModelGrads grads;
};

// Mean per-step cross-entropy of reconstructing `sentence` followed by EOS.
// Each decoder input after SOS is the gold previous token with probability
// teacher_forcing, else the model's own previous argmax.
LossGrad reconstruction_loss(const Seq2SeqModel& model, std::span<const TokenId> sentence,
                             double teacher_forcing, Rng& rng);

// sigmoid(w . vec(z z^T)); throws if the model has no classifier.
double classify(const Seq2SeqModel& model, const Eigen::VectorXd& z);

struct ClassifierLossGrad {
  double loss = 0.0;
  Eigen::VectorXd dw;
  Eigen::VectorXd dz;
};

// Binary cross-entropy of classify(z) against label (0 or 1).
ClassifierLossGrad classifier_loss(const Seq2SeqModel& model, const Eigen::VectorXd& z,
                                   int label);

// Combined per-sentence objective L_rec + cls_weight * L_cls. A negative label
// (or cls_weight == 0) drops the classifier term.
struct SampleLoss {
  double reconstruction = 0.0;
  double classification = 0.0;
  double total = 0.0;
};
SampleLoss accumulate_sample(const Seq2SeqModel& model, std::span<const TokenId> sentence,
                             int label, double cls_weight, double teacher_forcing,
                             Rng& rng, ModelGrads& grads);

}  // namespace nst
