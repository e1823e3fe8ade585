#include "nst/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nst/errors.hpp"

namespace nst {

LabeledCorpus filter_by_confidence(const Seq2SeqModel& model, const LabeledCorpus& corpus,
                                   double drop_rate) {
  if (!(drop_rate >= 0.0 && drop_rate < 1.0)) {
    throw UsageError("drop rate must lie in [0, 1)");
  }
  if (!model.semi_supervised()) throw UsageError("model is unsupervised");
  if (!corpus.labels) throw DataError("confidence filtering needs labels on " + corpus.name);
  const std::size_t n = corpus.size();
  if (drop_rate == 0.0) return corpus;

  std::vector<double> confidence(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = classify(model, encode(model, corpus.sentences[i]));
    confidence[i] = (*corpus.labels)[i] == 1 ? p : 1.0 - p;
  }
  const auto keep = static_cast<std::size_t>(
      std::ceil((1.0 - drop_rate) * static_cast<double>(n) - 1e-9));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return confidence[a] > confidence[b];
  });
  order.resize(std::min(keep, n));
  std::sort(order.begin(), order.end());

  LabeledCorpus out;
  out.name = corpus.name;
  out.labels.emplace();
  for (std::size_t i : order) {
    out.sentences.push_back(corpus.sentences[i]);
    out.labels->push_back((*corpus.labels)[i]);
  }
  return out;
}

StyleMatrix corpus_style(const Seq2SeqModel& model, const LabeledCorpus& corpus,
                         double drop_rate) {
  if (corpus.size() == 0) throw DataError("corpus " + corpus.name + " is empty");
  const LabeledCorpus kept =
      drop_rate > 0.0 ? filter_by_confidence(model, corpus, drop_rate) : corpus;
  if (kept.size() < 2) {
    throw DataError("corpus " + corpus.name + " has fewer than 2 sentences after filtering");
  }
  return compute_style_matrix(encode_all(model, kept.sentences));
}

TransferOperatorPair make_operator_pair(const StyleMatrix& source, const StyleMatrix& target,
                                        double eps, std::string source_name,
                                        std::string target_name) {
  if (source.dim() != target.dim()) {
    throw UsageError("source and target style matrices differ in dimension");
  }
  return TransferOperatorPair{make_neutralizer(source, eps), make_stylizer(target, eps),
                              std::move(source_name), std::move(target_name)};
}

TransferOperatorPair prepare_operators(const Seq2SeqModel& model,
                                       const LabeledCorpus& corpus_x,
                                       const LabeledCorpus& corpus_y,
                                       const PrepareOptions& options) {
  if (!(options.drop_rate >= 0.0 && options.drop_rate < 1.0)) {
    throw UsageError("drop rate must lie in [0, 1)");
  }
  if (options.drop_rate > 0.0 && !model.semi_supervised()) {
    throw UsageError("drop rate requires a semi-supervised model");
  }
  return make_operator_pair(corpus_style(model, corpus_x, options.drop_rate),
                            corpus_style(model, corpus_y, options.drop_rate), options.eps,
                            corpus_x.name, corpus_y.name);
}

Eigen::VectorXd transfer_vector(const TransferOperatorPair& pair, const Eigen::VectorXd& z) {
  return stylize(pair.stylizer, neutralize(pair.neutralizer, z));
}

std::vector<std::vector<TokenId>> transfer_sentences(const Seq2SeqModel& model,
                                                     const TransferOperatorPair& pair,
                                                     std::span<const Sentence> sentences,
                                                     int max_len) {
  if (sentences.empty()) throw DataError("no sentences to transfer");
  std::vector<std::vector<TokenId>> out;
  out.reserve(sentences.size());
  for (const auto& sentence : sentences) {
    const Eigen::VectorXd z = transfer_vector(pair, encode(model, sentence));
    out.push_back(strip_eos(decode_greedy(model, z, max_len)));
  }
  return out;
}

std::vector<std::vector<TokenId>> reconstruct_sentences(const Seq2SeqModel& model,
                                                        std::span<const Sentence> sentences,
                                                        int max_len) {
  if (sentences.empty()) throw DataError("no sentences to reconstruct");
  std::vector<std::vector<TokenId>> out;
  out.reserve(sentences.size());
  for (const auto& sentence : sentences) {
    out.push_back(strip_eos(decode_greedy(model, encode(model, sentence), max_len)));
  }
  return out;
}

}  // namespace nst
