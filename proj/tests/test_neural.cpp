#include <cmath>
#include <functional>

#include "doctest.h"
#include "nst/adam.hpp"
#include "nst/errors.hpp"
#include "nst/gru.hpp"
#include "nst/seq2seq.hpp"
#include "nst/trainer.hpp"

using namespace nst;

namespace {

// Central difference over every coordinate of `param`, compared against the
// analytic gradient by max relative error.
double max_rel_error(Eigen::Ref<Eigen::VectorXd> param, const Eigen::VectorXd& analytic,
                     const std::function<double()>& loss, double h = 1e-5) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < param.size(); ++i) {
    const double saved = param[i];
    param[i] = saved + h;
    const double up = loss();
    param[i] = saved - h;
    const double down = loss();
    param[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-6});
    worst = std::max(worst, std::abs(numeric - analytic[i]) / denom);
  }
  return worst;
}

Eigen::VectorXd flat(const Eigen::MatrixXd& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

Seq2SeqModel small_model(bool semi, std::uint64_t seed) {
  EmbeddingTable emb = init_embeddings(12, 5, seed);
  Rng rng(seed + 1);
  for (Eigen::Index i = 1; i < emb.vectors.rows(); ++i) {
    for (Eigen::Index j = 0; j < emb.vectors.cols(); ++j) emb.vectors(i, j) = rng.normal() * 0.5;
  }
  Seq2SeqModel m = Seq2SeqModel::create(std::move(emb), 6, semi, seed + 2);
  if (m.classifier) {
    for (Eigen::Index i = 0; i < m.classifier->size(); ++i) (*m.classifier)[i] = rng.normal();
  }
  return m;
}

}  // namespace

TEST_CASE("gru cell gradients match central differences") {
  Rng rng(3);
  GruParams p = GruParams::random(4, 7, rng);
  Eigen::VectorXd x(4), h0(7), weight(7);
  for (auto* v : {&x, &h0, &weight}) {
    for (Eigen::Index i = 0; i < v->size(); ++i) (*v)[i] = rng.normal();
  }
  // Scalar objective L = weight . h'
  auto loss = [&] { return weight.dot(gru_step(p, x, h0)); };
  GruParams grads = GruParams::zeros(4, 7);
  Eigen::VectorXd dx;
  const GruCache cache = gru_forward(p, x, h0);
  const Eigen::VectorXd dh0 = gru_backward(p, cache, weight, grads, &dx);

  std::vector<Eigen::VectorXd> analytic;
  grads.for_each([&](const char*, const auto& t) { analytic.push_back(flat(t)); });
  std::size_t k = 0;
  p.for_each([&](const char* name, auto& t) {
    Eigen::Map<Eigen::VectorXd> view(t.data(), t.size());
    INFO(name);
    CHECK(max_rel_error(view, analytic[k++], loss) < 1e-4);
  });
  CHECK(max_rel_error(x, dx, loss) < 1e-4);
  CHECK(max_rel_error(h0, dh0, loss) < 1e-4);
}

TEST_CASE("gru update convention keeps the previous state when the gate saturates") {
  Rng rng(5);
  GruParams p = GruParams::random(3, 4, rng);
  p.b_update.setConstant(60.0);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(3), h(4);
  h << 0.1, -0.2, 0.3, -0.4;
  CHECK((gru_step(p, x, h) - h).norm() < 1e-12);
  p.b_update.setConstant(-60.0);
  const GruCache c = gru_forward(p, x, h);
  CHECK((c.h - c.cand).norm() < 1e-12);
}

TEST_CASE("reconstruction loss gradients match central differences") {
  for (bool semi : {false, true}) {
    Seq2SeqModel model = small_model(semi, 11);
    const std::vector<TokenId> sentence{5, 9, 4, 11, 7};
    Rng unused(0);
    const LossGrad lg = reconstruction_loss(model, sentence, 1.0, unused);
    auto loss = [&] {
      Rng r(0);
      return reconstruction_loss(model, sentence, 1.0, r).loss;
    };
    CHECK(lg.loss == doctest::Approx(loss()).epsilon(1e-15));
    ModelGrads grads = lg.grads;
    for_each_param(model, grads, [&](auto& param, const auto& grad) {
      const Eigen::VectorXd g = grad;
      CHECK(max_rel_error(param, g, loss) < 1e-4);
    });
  }
}

TEST_CASE("classifier head gradients match central differences") {
  Seq2SeqModel model = small_model(true, 21);
  Rng rng(4);
  Eigen::VectorXd z(6);
  for (Eigen::Index i = 0; i < 6; ++i) z[i] = rng.normal();
  for (int label : {0, 1}) {
    const ClassifierLossGrad g = classifier_loss(model, z, label);
    auto loss = [&] { return classifier_loss(model, z, label).loss; };
    CHECK(max_rel_error(z, g.dz, loss) < 1e-4);
    CHECK(max_rel_error(*model.classifier, g.dw, loss) < 1e-4);
  }
}

TEST_CASE("combined sample objective gradients include the weighted classifier term") {
  Seq2SeqModel model = small_model(true, 31);
  const std::vector<TokenId> sentence{4, 6, 8};
  const double weight = 0.1;
  auto run = [&](ModelGrads& g) {
    Rng r(0);
    return accumulate_sample(model, sentence, 1, weight, 1.0, r, g).total;
  };
  ModelGrads grads = ModelGrads::zeros_like(model);
  const double total = run(grads);
  auto loss = [&] {
    ModelGrads scratch = ModelGrads::zeros_like(model);
    return run(scratch);
  };
  CHECK(total == doctest::Approx(loss()));
  for_each_param(model, grads, [&](auto& param, const auto& grad) {
    const Eigen::VectorXd g = grad;
    CHECK(max_rel_error(param, g, loss) < 1e-4);
  });
}

TEST_CASE("classifier output is even in z") {
  Seq2SeqModel model = small_model(true, 41);
  Rng rng(9);
  for (int trial = 0; trial < 1000; ++trial) {
    Eigen::VectorXd z(6);
    for (Eigen::Index i = 0; i < 6; ++i) z[i] = rng.normal() * 3.0;
    const Eigen::VectorXd neg = -z;
    REQUIRE(classify(model, z) == classify(model, neg));
  }
}

TEST_CASE("classifier errors") {
  Seq2SeqModel plain = small_model(false, 1);
  CHECK_THROWS_AS(classify(plain, Eigen::VectorXd::Zero(6)), UsageError);
  Seq2SeqModel semi = small_model(true, 1);
  CHECK_THROWS_AS(classifier_loss(semi, Eigen::VectorXd::Zero(6), 2), DataError);
}

TEST_CASE("greedy decoding stops at EOS or max_len and picks the lowest id on ties") {
  Seq2SeqModel model = small_model(false, 51);
  model.out_proj.setZero();
  // All logits tie at zero, so PAD (id 0) is chosen every step.
  const auto out = decode_greedy(model, Eigen::VectorXd::Zero(6), 4);
  CHECK(out == std::vector<TokenId>(4, kPad));
  model.out_proj.row(kEos).setConstant(1.0);
  model.decoder.set_zero();
  model.decoder.b_cand.setConstant(1.0);
  const auto stop = decode_greedy(model, Eigen::VectorXd::Zero(6), 10);
  CHECK(stop == std::vector<TokenId>{kEos});
  CHECK(strip_eos(stop).empty());
  CHECK_THROWS_AS(decode_greedy(model, Eigen::VectorXd::Zero(6), 0), UsageError);
}

TEST_CASE("encoding an empty sentence is a data error") {
  Seq2SeqModel model = small_model(false, 1);
  CHECK_THROWS_AS(encode(model, std::vector<TokenId>{}), DataError);
}

TEST_CASE("teacher forcing decays linearly") {
  TrainConfig c;
  c.epochs = 11;
  CHECK(teacher_forcing_at(c, 0) == 1.0);
  CHECK(teacher_forcing_at(c, 5) == doctest::Approx(0.75));
  CHECK(teacher_forcing_at(c, 10) == doctest::Approx(0.5));
}

TEST_CASE("adam first step moves each parameter by lr against the gradient sign") {
  Adam adam;
  Eigen::VectorXd p(3), g(3);
  p << 1.0, 2.0, 3.0;
  g << 0.5, -2.0, 1e-3;
  adam.begin_step();
  adam.update(p, g);
  CHECK(p[0] == doctest::Approx(1.0 - 1e-3).epsilon(1e-6));
  CHECK(p[1] == doctest::Approx(2.0 + 1e-3).epsilon(1e-6));
  CHECK(p[2] == doctest::Approx(3.0 - 1e-3).epsilon(1e-4));
}

TEST_CASE("training lowers the loss and is deterministic") {
  auto fit = [] {
    Seq2SeqModel model = small_model(true, 61);
    std::vector<Sentence> data{{4, 5, 6}, {7, 8}, {9, 10, 11, 4}, {5, 7}};
    std::vector<int> labels{0, 1, -1, 1};
    TrainConfig c;
    c.epochs = 60;
    c.teacher_forcing_end = 1.0;
    c.batch_size = 2;
    c.adam.lr = 1e-2;
    auto log = train(model, data, labels, c);
    return std::make_pair(log, model.out_proj);
  };
  const auto [log, w] = fit();
  CHECK(log.back().reconstruction < 0.5 * log.front().reconstruction);
  const auto [log2, w2] = fit();
  CHECK(w == w2);
}

TEST_CASE("zero-parameter gru cell") {
  const GruParams p = GruParams::zeros(3, 4);
  const GruCache c = gru_forward(p, Eigen::VectorXd::Ones(3), Eigen::VectorXd::Zero(4));
  CHECK(c.update.isApproxToConstant(0.5));
  CHECK(c.reset.isApproxToConstant(0.5));
  CHECK(c.cand.isZero(0.0));
  CHECK(c.h.isZero(0.0));
  Eigen::VectorXd v(4);
  v << 1.0, -2.0, 0.5, 3.0;
  CHECK(gru_step(p, Eigen::VectorXd::Ones(3), v) == 0.5 * v);
  CHECK_THROWS_AS(gru_step(p, Eigen::VectorXd::Ones(2), v), UsageError);
  CHECK_THROWS_AS(gru_step(p, Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(5)), UsageError);
}

TEST_CASE("encoder definition and the open unit-cube bound") {
  Seq2SeqModel model = small_model(false, 71);
  const std::vector<TokenId> one{7};
  CHECK(encode(model, one) ==
        gru_step(model.encoder, model.embeddings.vectors.row(7).transpose(),
                 Eigen::VectorXd::Zero(6)));
  Seq2SeqModel zero = model;
  zero.encoder.set_zero();
  CHECK(encode(zero, std::vector<TokenId>{4, 5, 6}).isZero(0.0));

  Rng rng(72);
  for (int trial = 0; trial < 100; ++trial) {
    Seq2SeqModel m = small_model(false, 100 + trial);
    m.encoder.for_each([&](const char*, auto& t) { t *= 4.0; });
    std::vector<TokenId> s;
    const auto len = 1 + rng.below(12);
    for (std::size_t k = 0; k < len; ++k) s.push_back(static_cast<TokenId>(4 + rng.below(8)));
    const Eigen::VectorXd z = encode(m, s);
    REQUIRE(z.cwiseAbs().maxCoeff() < 1.0);
  }
}

TEST_CASE("uniform logits give ln V per step") {
  Seq2SeqModel model = small_model(false, 81);
  model.out_proj.setZero();
  Rng rng(1);
  const double loss = reconstruction_loss(model, std::vector<TokenId>{4, 5, 6}, 1.0, rng).loss;
  CHECK(loss == doctest::Approx(std::log(12.0)).epsilon(1e-14));
}

TEST_CASE("full teacher forcing ignores the random stream") {
  Seq2SeqModel model = small_model(true, 91);
  const std::vector<TokenId> s{4, 9, 10, 5};
  Rng a(1), b(999);
  b.next();
  CHECK(reconstruction_loss(model, s, 1.0, a).loss == reconstruction_loss(model, s, 1.0, b).loss);
  CHECK_THROWS_AS(reconstruction_loss(model, s, 1.5, a), UsageError);
}

TEST_CASE("zero epochs leave the model untouched and training never moves embeddings") {
  Seq2SeqModel model = small_model(true, 93);
  const Seq2SeqModel before = model;
  std::vector<Sentence> data{{4, 5}, {6, 7, 8}};
  std::vector<int> labels{0, 1};
  TrainConfig c;
  c.epochs = 0;
  CHECK(train(model, data, labels, c).empty());
  CHECK(model.out_proj == before.out_proj);
  CHECK(model.encoder.u_cand == before.encoder.u_cand);
  CHECK(*model.classifier == *before.classifier);
  c.epochs = 3;
  train(model, data, labels, c);
  CHECK(model.embeddings.checksum() == before.embeddings.checksum());
  CHECK(model.out_proj != before.out_proj);
}

TEST_CASE("semi-supervised training requires labels") {
  Seq2SeqModel model = small_model(true, 94);
  std::vector<Sentence> data{{4, 5}};
  TrainConfig c;
  CHECK_THROWS_AS(train(model, data, {}, c), DataError);
  c.cls_weight = 0.0;
  CHECK_NOTHROW(train(model, data, {}, c));
  Seq2SeqModel plain = small_model(false, 94);
  CHECK_NOTHROW(train(plain, data, {}, TrainConfig{}));
}
