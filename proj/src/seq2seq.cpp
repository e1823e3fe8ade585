#include "nst/seq2seq.hpp"

#include <cmath>

#include "nst/errors.hpp"

namespace nst {

namespace {

Eigen::VectorXd embed(const Seq2SeqModel& model, TokenId id) {
  if (id < 0 || static_cast<std::size_t>(id) >= model.embeddings.vocab_size()) {
    throw DataError("id out of range: " + std::to_string(id));
  }
  return model.embeddings.vectors.row(id).transpose();
}

TokenId argmax_lowest(const Eigen::VectorXd& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return static_cast<TokenId>(best);
}

std::vector<GruCache> encoder_trace(const Seq2SeqModel& model,
                                    std::span<const TokenId> sentence) {
  if (sentence.empty()) throw DataError("cannot encode an empty sentence");
  std::vector<GruCache> trace;
  trace.reserve(sentence.size());
  Eigen::VectorXd h = Eigen::VectorXd::Zero(model.hidden_dim());
  for (TokenId id : sentence) {
    trace.push_back(gru_forward(model.encoder, embed(model, id), h));
    h = trace.back().h;
  }
  return trace;
}

void encoder_backward(const Seq2SeqModel& model, const std::vector<GruCache>& trace,
                      Eigen::VectorXd dh, GruParams& grads) {
  for (auto it = trace.rbegin(); it != trace.rend(); ++it) {
    dh = gru_backward(model.encoder, *it, dh, grads);
  }
}

// Decoder pass: accumulates decoder/out_proj gradients and returns the loss;
// dz receives dL/dz.
double decoder_loss(const Seq2SeqModel& model, const Eigen::VectorXd& z,
                    std::span<const TokenId> sentence, double teacher_forcing, Rng& rng,
                    ModelGrads& grads, Eigen::VectorXd& dz) {
  const std::size_t steps = sentence.size() + 1;
  const double inv_steps = 1.0 / static_cast<double>(steps);
  std::vector<GruCache> trace;
  std::vector<Eigen::VectorXd> dlogits;
  trace.reserve(steps);
  dlogits.reserve(steps);

  double loss = 0.0;
  Eigen::VectorXd s = z;
  TokenId input = kSos;
  for (std::size_t t = 0; t < steps; ++t) {
    trace.push_back(gru_forward(model.decoder, embed(model, input), s));
    s = trace.back().h;
    const Eigen::VectorXd logits = model.out_proj * s;
    const double max_logit = logits.maxCoeff();
    Eigen::VectorXd prob = (logits.array() - max_logit).exp().matrix();
    const double norm = prob.sum();
    prob /= norm;
    const TokenId target = t < sentence.size() ? sentence[t] : kEos;
    loss -= (logits[target] - max_logit - std::log(norm)) * inv_steps;
    const TokenId predicted = argmax_lowest(logits);
    prob[target] -= 1.0;
    dlogits.push_back(prob * inv_steps);

    if (t + 1 < steps) {
      bool gold = true;
      if (teacher_forcing < 1.0) gold = teacher_forcing > 0.0 && rng.uniform() < teacher_forcing;
      input = gold ? sentence[t] : predicted;
    }
  }

  Eigen::VectorXd ds = Eigen::VectorXd::Zero(model.hidden_dim());
  for (std::size_t k = steps; k-- > 0;) {
    grads.out_proj.noalias() += dlogits[k] * trace[k].h.transpose();
    ds.noalias() += model.out_proj.transpose() * dlogits[k];
    ds = gru_backward(model.decoder, trace[k], ds, grads.decoder);
  }
  dz = ds;
  return loss;
}

}  // namespace

Seq2SeqModel Seq2SeqModel::create(EmbeddingTable embeddings, int hidden_dim,
                                  bool semi_supervised, std::uint64_t seed) {
  if (hidden_dim < 1) throw UsageError("hidden dimension must be >= 1");
  Rng rng(seed);
  Seq2SeqModel model;
  const int input_dim = embeddings.dim();
  const auto vocab = static_cast<Eigen::Index>(embeddings.vocab_size());
  model.embeddings = std::move(embeddings);
  model.encoder = GruParams::random(input_dim, hidden_dim, rng);
  model.decoder = GruParams::random(input_dim, hidden_dim, rng);
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  model.out_proj.resize(vocab, hidden_dim);
  for (Eigen::Index i = 0; i < model.out_proj.size(); ++i) {
    model.out_proj.data()[i] = rng.uniform(-bound, bound);
  }
  if (semi_supervised) {
    model.classifier = Eigen::VectorXd::Zero(hidden_dim * hidden_dim);
  }
  return model;
}

void Seq2SeqModel::check_shapes() const {
  encoder.check_shapes();
  decoder.check_shapes();
  const int d = hidden_dim();
  if (encoder.input_dim() != embeddings.dim() || decoder.input_dim() != embeddings.dim() ||
      decoder.hidden_dim() != d) {
    throw UsageError("encoder/decoder shapes do not match the embeddings");
  }
  if (out_proj.cols() != d ||
      static_cast<std::size_t>(out_proj.rows()) != embeddings.vocab_size()) {
    throw UsageError("output projection must be |V| x d");
  }
  if (classifier && classifier->size() != static_cast<Eigen::Index>(d) * d) {
    throw UsageError("classifier weight must have d*d entries");
  }
}

ModelGrads ModelGrads::zeros_like(const Seq2SeqModel& model) {
  ModelGrads g;
  g.encoder = GruParams::zeros(model.encoder.input_dim(), model.encoder.hidden_dim());
  g.decoder = GruParams::zeros(model.decoder.input_dim(), model.decoder.hidden_dim());
  g.out_proj = Eigen::MatrixXd::Zero(model.out_proj.rows(), model.out_proj.cols());
  if (model.classifier) g.classifier = Eigen::VectorXd::Zero(model.classifier->size());
  return g;
}

ModelGrads& ModelGrads::operator+=(const ModelGrads& other) {
  encoder += other.encoder;
  decoder += other.decoder;
  out_proj += other.out_proj;
  if (classifier && other.classifier) *classifier += *other.classifier;
  return *this;
}

ModelGrads& ModelGrads::operator*=(double scale) {
  encoder *= scale;
  decoder *= scale;
  out_proj *= scale;
  if (classifier) *classifier *= scale;
  return *this;
}

double ModelGrads::squared_norm() const {
  double total = 0.0;
  encoder.for_each([&](const char*, const auto& t) { total += t.squaredNorm(); });
  decoder.for_each([&](const char*, const auto& t) { total += t.squaredNorm(); });
  total += out_proj.squaredNorm();
  if (classifier) total += classifier->squaredNorm();
  return total;
}

Eigen::VectorXd encode(const Seq2SeqModel& model, std::span<const TokenId> sentence) {
  if (sentence.empty()) throw DataError("cannot encode an empty sentence");
  Eigen::VectorXd h = Eigen::VectorXd::Zero(model.hidden_dim());
  for (TokenId id : sentence) h = gru_step(model.encoder, embed(model, id), h);
  return h;
}

Eigen::MatrixXd encode_all(const Seq2SeqModel& model, std::span<const Sentence> sentences) {
  Eigen::MatrixXd z(model.hidden_dim(), static_cast<Eigen::Index>(sentences.size()));
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    z.col(static_cast<Eigen::Index>(i)) = encode(model, sentences[i]);
  }
  return z;
}

std::vector<TokenId> decode_greedy(const Seq2SeqModel& model, const Eigen::VectorXd& z,
                                   int max_len) {
  if (max_len < 1) throw UsageError("max_len must be >= 1");
  if (z.size() != model.hidden_dim()) throw UsageError("semantic vector has wrong dimension");
  std::vector<TokenId> out;
  Eigen::VectorXd s = z;
  TokenId input = kSos;
  for (int t = 0; t < max_len; ++t) {
    s = gru_step(model.decoder, embed(model, input), s);
    const TokenId next = argmax_lowest(model.out_proj * s);
    out.push_back(next);
    if (next == kEos) break;
    input = next;
  }
  return out;
}

std::vector<TokenId> strip_eos(std::vector<TokenId> ids) {
  if (!ids.empty() && ids.back() == kEos) ids.pop_back();
  return ids;
}

LossGrad reconstruction_loss(const Seq2SeqModel& model, std::span<const TokenId> sentence,
                             double teacher_forcing, Rng& rng) {
  if (!(teacher_forcing >= 0.0 && teacher_forcing <= 1.0)) {
    throw UsageError("teacher forcing probability must lie in [0, 1]");
  }
  LossGrad out{0.0, ModelGrads::zeros_like(model)};
  const auto trace = encoder_trace(model, sentence);
  Eigen::VectorXd dz;
  out.loss = decoder_loss(model, trace.back().h, sentence, teacher_forcing, rng, out.grads, dz);
  encoder_backward(model, trace, dz, out.grads.encoder);
  return out;
}

double classify(const Seq2SeqModel& model, const Eigen::VectorXd& z) {
  if (!model.classifier) throw UsageError("model is unsupervised");
  const Eigen::Index d = z.size();
  if (model.classifier->size() != d * d) throw UsageError("semantic vector has wrong dimension");
  // Row-major view of w as a d x d matrix: w[i*d + j] multiplies z_i z_j.
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      w(model.classifier->data(), d, d);
  const double a = z.dot(w * z);
  return 1.0 / (1.0 + std::exp(-a));
}

ClassifierLossGrad classifier_loss(const Seq2SeqModel& model, const Eigen::VectorXd& z,
                                   int label) {
  if (!model.classifier) throw UsageError("model is unsupervised");
  if (label != 0 && label != 1) throw DataError("classifier labels must be 0 or 1");
  const Eigen::Index d = z.size();
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
      w(model.classifier->data(), d, d);
  const Eigen::VectorXd wz = w * z;
  const double a = z.dot(wz);
  // log(sigmoid(a)) and log(1 - sigmoid(a)) in overflow-safe form.
  const double log_p = -std::log1p(std::exp(-std::abs(a))) + std::min(a, 0.0);
  const double log_q = -std::log1p(std::exp(-std::abs(a))) + std::min(-a, 0.0);
  const double p = 1.0 / (1.0 + std::exp(-a));

  ClassifierLossGrad out;
  out.loss = label == 1 ? -log_p : -log_q;
  const double da = p - static_cast<double>(label);
  out.dw.resize(d * d);
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> dw(
      out.dw.data(), d, d);
  dw.noalias() = da * z * z.transpose();
  out.dz = da * (wz + w.transpose() * z);
  return out;
}

SampleLoss accumulate_sample(const Seq2SeqModel& model, std::span<const TokenId> sentence,
                             int label, double cls_weight, double teacher_forcing,
                             Rng& rng, ModelGrads& grads) {
  SampleLoss out;
  const auto trace = encoder_trace(model, sentence);
  const Eigen::VectorXd& z = trace.back().h;
  Eigen::VectorXd dz;
  out.reconstruction = decoder_loss(model, z, sentence, teacher_forcing, rng, grads, dz);
  out.total = out.reconstruction;
  if (label >= 0 && cls_weight > 0.0 && model.classifier) {
    const auto cls = classifier_loss(model, z, label);
    out.classification = cls.loss;
    out.total += cls_weight * cls.loss;
    *grads.classifier += cls_weight * cls.dw;
    dz += cls_weight * cls.dz;
  }
  encoder_backward(model, trace, dz, grads.encoder);
  return out;
}

}  // namespace nst
