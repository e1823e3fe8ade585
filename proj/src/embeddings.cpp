#include "nst/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>

#include "nst/errors.hpp"
#include "nst/rng.hpp"

namespace nst {

Eigen::MatrixXd EmbeddingTable::lookup(std::span<const TokenId> ids) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(ids.size()), vectors.cols());
  for (std::size_t t = 0; t < ids.size(); ++t) {
    if (ids[t] < 0 || ids[t] >= vectors.rows()) {
      throw DataError("id out of range: " + std::to_string(ids[t]));
    }
    out.row(static_cast<Eigen::Index>(t)) = vectors.row(ids[t]);
  }
  return out;
}

std::uint64_t EmbeddingTable::checksum() const {
  std::uint64_t hash = 1469598103934665603ULL;
  const auto* bytes = reinterpret_cast<const unsigned char*>(vectors.data());
  const std::size_t n = static_cast<std::size_t>(vectors.size()) * sizeof(double);
  for (std::size_t i = 0; i < n; ++i) {
    hash ^= bytes[i];
    hash *= 1099511628211ULL;
  }
  return hash;
}

void EmbeddingTable::export_text(const Vocab& vocab,
                                 const std::filesystem::path& path) const {
  if (vocab.size() != vocab_size()) throw UsageError("vocab/table size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << std::setprecision(17);
  for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
    out << vocab.token(static_cast<TokenId>(r));
    for (Eigen::Index c = 0; c < vectors.cols(); ++c) out << ' ' << vectors(r, c);
    out << '\n';
  }
}

EmbeddingTable init_embeddings(std::size_t vocab_size, int dim, std::uint64_t seed) {
  if (dim < 2) throw UsageError("embedding dimension must be >= 2");
  EmbeddingTable table;
  table.vectors.resize(static_cast<Eigen::Index>(vocab_size), dim);
  Rng rng(seed);
  const double half = 0.5 / dim;
  for (Eigen::Index r = 0; r < table.vectors.rows(); ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) table.vectors(r, c) = rng.uniform(-half, half);
  }
  if (vocab_size > 0) table.vectors.row(kPad).setZero();
  return table;
}

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Cumulative unigram^0.75 distribution over the vocabulary.
std::vector<double> negative_table(const LabeledCorpus& corpus, std::size_t vocab_size) {
  std::vector<double> counts(vocab_size, 0.0);
  for (const auto& s : corpus.sentences) {
    for (TokenId id : s) counts[static_cast<std::size_t>(id)] += 1.0;
  }
  std::vector<double> cdf(vocab_size, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < vocab_size; ++i) {
    total += std::pow(counts[i], 0.75);
    cdf[i] = total;
  }
  for (double& c : cdf) c /= total;
  return cdf;
}

}  // namespace

EmbeddingTable train_cbow(const LabeledCorpus& corpus, const Vocab& vocab,
                          const CbowConfig& config) {
  if (config.window < 1) throw UsageError("cbow window must be >= 1");
  if (config.epochs < 0) throw UsageError("cbow epochs must be >= 0");
  if (config.negatives < 0) throw UsageError("cbow negatives must be >= 0");

  std::size_t total_tokens = 0;
  for (const auto& s : corpus.sentences) {
    for (TokenId id : s) {
      if (id < 0 || static_cast<std::size_t>(id) >= vocab.size()) {
        throw DataError("id out of range: " + std::to_string(id));
      }
    }
    total_tokens += s.size();
  }
  if (total_tokens < static_cast<std::size_t>(config.window) + 1) {
    throw DataError("corpus has fewer than window+1 tokens");
  }

  EmbeddingTable table = init_embeddings(vocab.size(), config.dim, config.seed);
  if (config.epochs == 0) return table;

  const Eigen::Index dim = config.dim;
  RowMatrix output = RowMatrix::Zero(table.vectors.rows(), dim);
  const std::vector<double> cdf = negative_table(corpus, vocab.size());
  Rng rng(config.seed ^ 0x9e3779b97f4a7c15ULL);

  auto draw_negative = [&]() {
    const double u = rng.uniform();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return static_cast<TokenId>(std::min<std::size_t>(
        static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1));
  };

  const double total_steps =
      static_cast<double>(total_tokens) * static_cast<double>(config.epochs);
  double step = 0.0;
  Eigen::VectorXd context(dim);
  Eigen::VectorXd context_grad(dim);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& sentence : corpus.sentences) {
      const auto len = static_cast<std::ptrdiff_t>(sentence.size());
      for (std::ptrdiff_t i = 0; i < len; ++i, step += 1.0) {
        const double lr = config.lr * std::max(1e-4, 1.0 - step / total_steps);
        context.setZero();
        int n_context = 0;
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - config.window);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len - 1, i + config.window);
        for (std::ptrdiff_t j = lo; j <= hi; ++j) {
          if (j == i) continue;
          context += table.vectors.row(sentence[static_cast<std::size_t>(j)]).transpose();
          ++n_context;
        }
        if (n_context == 0) continue;
        context /= n_context;
        context_grad.setZero();

        const TokenId center = sentence[static_cast<std::size_t>(i)];
        for (int k = 0; k <= config.negatives; ++k) {
          TokenId target = center;
          double label = 1.0;
          if (k > 0) {
            target = draw_negative();
            if (target == center) continue;
            label = 0.0;
          }
          auto out_row = output.row(target);
          const double score = sigmoid(out_row.dot(context.transpose()));
          const double g = (label - score) * lr;
          context_grad += g * out_row.transpose();
          out_row += g * context.transpose();
        }
        for (std::ptrdiff_t j = lo; j <= hi; ++j) {
          if (j == i) continue;
          table.vectors.row(sentence[static_cast<std::size_t>(j)]) +=
              context_grad.transpose();
        }
      }
    }
  }
  table.vectors.row(kPad).setZero();
  if (!table.vectors.allFinite()) throw NumericError("cbow produced non-finite vectors");
  return table;
}

}  // namespace nst
