#include "nst/textcnn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nst/errors.hpp"
#include "nst/rng.hpp"

namespace nst {

void TextCnnConfig::validate() const {
  if (embed_dim < 1 || feature_maps < 1) throw UsageError("textcnn dimensions must be >= 1");
  if (widths.empty()) throw UsageError("textcnn needs at least one filter width");
  std::vector<int> sorted = widths;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() || sorted.front() < 1) {
    throw UsageError("textcnn filter widths must be distinct and positive");
  }
  if (epochs < 0 || batch_size < 1 || lr <= 0.0) throw UsageError("invalid textcnn training setup");
}

namespace {

struct Forward {
  std::vector<TokenId> ids;  // padded
  Eigen::VectorXd features;
  std::vector<std::vector<int>> argpos;  // per width, per feature map
  std::vector<Eigen::VectorXd> pooled;   // pre-activation maxima
  Eigen::Vector2d logits;
};

Eigen::VectorXd window(const TextCnn& m, const std::vector<TokenId>& ids, int pos, int width) {
  const int de = static_cast<int>(m.embeddings.cols());
  Eigen::VectorXd x(width * de);
  for (int k = 0; k < width; ++k) {
    x.segment(k * de, de) = m.embeddings.row(ids[static_cast<std::size_t>(pos + k)]).transpose();
  }
  return x;
}

Forward forward(const TextCnn& m, std::span<const TokenId> input) {
  Forward f;
  const int max_width = *std::max_element(m.widths.begin(), m.widths.end());
  f.ids.assign(input.begin(), input.end());
  if (static_cast<int>(f.ids.size()) < max_width) f.ids.resize(static_cast<std::size_t>(max_width), kPad);
  for (TokenId id : f.ids) {
    if (id < 0 || id >= m.embeddings.rows()) throw DataError("id out of range: " + std::to_string(id));
  }
  const int fm = m.feature_maps();
  const int len = static_cast<int>(f.ids.size());
  f.features.resize(fm * static_cast<int>(m.widths.size()));
  for (std::size_t w = 0; w < m.widths.size(); ++w) {
    const int width = m.widths[w];
    Eigen::VectorXd best = Eigen::VectorXd::Constant(fm, -std::numeric_limits<double>::infinity());
    std::vector<int> pos(static_cast<std::size_t>(fm), 0);
    for (int p = 0; p + width <= len; ++p) {
      const Eigen::VectorXd a = m.filters[w] * window(m, f.ids, p, width) + m.biases[w];
      for (int j = 0; j < fm; ++j) {
        if (a[j] > best[j]) {
          best[j] = a[j];
          pos[static_cast<std::size_t>(j)] = p;
        }
      }
    }
    f.features.segment(static_cast<Eigen::Index>(w) * fm, fm) = best.cwiseMax(0.0);
    f.pooled.push_back(best);
    f.argpos.push_back(std::move(pos));
  }
  f.logits = m.fc * f.features + m.fc_bias;
  return f;
}

struct CnnGrads {
  RowMatrix embeddings;
  std::vector<Eigen::MatrixXd> filters;
  std::vector<Eigen::VectorXd> biases;
  Eigen::MatrixXd fc;
  Eigen::VectorXd fc_bias;

  explicit CnnGrads(const TextCnn& m)
      : embeddings(RowMatrix::Zero(m.embeddings.rows(), m.embeddings.cols())),
        fc(Eigen::MatrixXd::Zero(m.fc.rows(), m.fc.cols())),
        fc_bias(Eigen::VectorXd::Zero(2)) {
    for (std::size_t w = 0; w < m.widths.size(); ++w) {
      filters.push_back(Eigen::MatrixXd::Zero(m.filters[w].rows(), m.filters[w].cols()));
      biases.push_back(Eigen::VectorXd::Zero(m.biases[w].size()));
    }
  }
};

double backward(const TextCnn& m, std::span<const TokenId> ids, int label, CnnGrads& g) {
  const Forward f = forward(m, ids);
  const double mx = f.logits.maxCoeff();
  Eigen::Vector2d prob = (f.logits.array() - mx).exp().matrix();
  const double norm = prob.sum();
  prob /= norm;
  const double loss = -(f.logits[label] - mx - std::log(norm));
  prob[label] -= 1.0;

  g.fc.noalias() += prob * f.features.transpose();
  g.fc_bias += prob;
  const Eigen::VectorXd dfeat = m.fc.transpose() * prob;
  const int fm = m.feature_maps();
  const int de = static_cast<int>(m.embeddings.cols());
  for (std::size_t w = 0; w < m.widths.size(); ++w) {
    const int width = m.widths[w];
    for (int j = 0; j < fm; ++j) {
      if (f.pooled[w][j] <= 0.0) continue;
      const double da = dfeat[static_cast<Eigen::Index>(w) * fm + j];
      const int p = f.argpos[w][static_cast<std::size_t>(j)];
      g.filters[w].row(j) += da * window(m, f.ids, p, width).transpose();
      g.biases[w][j] += da;
      const Eigen::RowVectorXd dx = da * m.filters[w].row(j);
      for (int k = 0; k < width; ++k) {
        g.embeddings.row(f.ids[static_cast<std::size_t>(p + k)]) += dx.segment(k * de, de);
      }
    }
  }
  return loss;
}

}  // namespace

TextCnn TextCnn::create(std::size_t vocab_size, const TextCnnConfig& config) {
  config.validate();
  Rng rng(config.seed);
  TextCnn m;
  m.widths = config.widths;
  m.embeddings.resize(static_cast<Eigen::Index>(vocab_size), config.embed_dim);
  for (Eigen::Index i = 0; i < m.embeddings.size(); ++i) m.embeddings.data()[i] = rng.uniform(-0.1, 0.1);
  for (int width : m.widths) {
    const int fan_in = width * config.embed_dim;
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Eigen::MatrixXd filt(config.feature_maps, fan_in);
    for (Eigen::Index i = 0; i < filt.size(); ++i) filt.data()[i] = rng.uniform(-bound, bound);
    m.filters.push_back(std::move(filt));
    m.biases.push_back(Eigen::VectorXd::Zero(config.feature_maps));
  }
  const int n_features = config.feature_maps * static_cast<int>(m.widths.size());
  const double bound = 1.0 / std::sqrt(static_cast<double>(n_features));
  m.fc.resize(2, n_features);
  for (Eigen::Index i = 0; i < m.fc.size(); ++i) m.fc.data()[i] = rng.uniform(-bound, bound);
  m.fc_bias = Eigen::VectorXd::Zero(2);
  return m;
}

Eigen::Vector2d TextCnn::logits(std::span<const TokenId> ids) const {
  return forward(*this, ids).logits;
}

int TextCnn::predict(std::span<const TokenId> ids) const {
  const Eigen::Vector2d l = logits(ids);
  return l[1] > l[0] ? 1 : 0;
}

TextCnn train_eval_classifier(const LabeledCorpus& corpus, std::size_t vocab_size,
                              const TextCnnConfig& config) {
  config.validate();
  if (!corpus.labels) throw DataError("classifier training needs labels");
  bool seen[2] = {false, false};
  for (int label : *corpus.labels) {
    if (label != 0 && label != 1) throw DataError("classifier labels must be 0 or 1");
    seen[label] = true;
  }
  if (!seen[0] || !seen[1]) throw DataError("classifier training needs both labels present");

  TextCnn model = TextCnn::create(vocab_size, config);
  Adam adam(AdamConfig{config.lr, 0.9, 0.999, 1e-8});
  Rng rng(config.seed ^ 0x5bd1e995ULL);
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      CnnGrads g(model);
      for (std::size_t k = begin; k < end; ++k) {
        backward(model, corpus.sentences[order[k]], (*corpus.labels)[order[k]], g);
      }
      const double scale = 1.0 / static_cast<double>(end - begin);
      adam.begin_step();
      g.embeddings *= scale;
      adam.update(model.embeddings, g.embeddings);
      for (std::size_t w = 0; w < model.widths.size(); ++w) {
        g.filters[w] *= scale;
        g.biases[w] *= scale;
        adam.update(model.filters[w], g.filters[w]);
        adam.update(model.biases[w], g.biases[w]);
      }
      g.fc *= scale;
      g.fc_bias *= scale;
      adam.update(model.fc, g.fc);
      adam.update(model.fc_bias, g.fc_bias);
    }
  }
  return model;
}

double accuracy(const TextCnn& clf, std::span<const std::vector<TokenId>> sentences,
                int target_label) {
  if (sentences.empty()) throw DataError("accuracy: no sentences");
  std::size_t hits = 0;
  for (const auto& s : sentences) {
    if (clf.predict(s) == target_label) ++hits;
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(sentences.size());
}

}  // namespace nst
