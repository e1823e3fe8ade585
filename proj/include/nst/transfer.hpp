#pragma once

#include <span>
#include <string>
#include <vector>

#include "nst/corpus.hpp"
#include "nst/seq2seq.hpp"
#include "nst/style_matrix.hpp"

namespace nst {

struct TransferOperatorPair {
  Neutralizer neutralizer;  // built from the source corpus X
  Stylizer stylizer;        // built from the target corpus Y
  std::string source_name;
  std::string target_name;
};

struct PrepareOptions {
  double eps = kDefaultClampEps;
  double drop_rate = 0.0;
};

// Keeps the ceil((1 - drop_rate) * N) sentences whose classifier confidence
// in their own label is highest (ties by original index), in original order.
LabeledCorpus filter_by_confidence(const Seq2SeqModel& model, const LabeledCorpus& corpus,
                                   double drop_rate);

// Style matrix of a corpus, optionally after confidence filtering.
StyleMatrix corpus_style(const Seq2SeqModel& model, const LabeledCorpus& corpus,
                         double drop_rate = 0.0);

TransferOperatorPair prepare_operators(const Seq2SeqModel& model,
                                       const LabeledCorpus& corpus_x,
                                       const LabeledCorpus& corpus_y,
                                       const PrepareOptions& options = {});

TransferOperatorPair make_operator_pair(const StyleMatrix& source, const StyleMatrix& target,
                                        double eps, std::string source_name,
                                        std::string target_name);

// z' = stylize(neutralize(z)) for one semantic vector.
Eigen::VectorXd transfer_vector(const TransferOperatorPair& pair, const Eigen::VectorXd& z);

// y = decode(stylize(neutralize(encode(x)))) for each sentence, in order.
// Outputs are decoder ids with any trailing EOS removed.
std::vector<std::vector<TokenId>> transfer_sentences(const Seq2SeqModel& model,
                                                     const TransferOperatorPair& pair,
                                                     std::span<const Sentence> sentences,
                                                     int max_len);

// Plain autoencoder output, decode(encode(x)), in the same form.
std::vector<std::vector<TokenId>> reconstruct_sentences(const Seq2SeqModel& model,
                                                        std::span<const Sentence> sentences,
                                                        int max_len);

}  // namespace nst
