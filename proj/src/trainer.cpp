#include "nst/trainer.hpp"

#include <cmath>
#include <numeric>

#include "nst/errors.hpp"
#include "nst/rng.hpp"

namespace nst {

void TrainConfig::validate() const {
  if (epochs < 0) throw UsageError("epochs must be >= 0");
  if (batch_size < 1) throw UsageError("batch_size must be >= 1");
  if (cls_weight < 0.0) throw UsageError("cls_weight must be >= 0");
  if (adam.lr <= 0.0) throw UsageError("learning rate must be positive");
  for (double tf : {teacher_forcing_start, teacher_forcing_end}) {
    if (!(tf >= 0.0 && tf <= 1.0)) throw UsageError("teacher forcing must lie in [0, 1]");
  }
  if (!(lr_final_fraction > 0.0 && lr_final_fraction <= 1.0)) {
    throw UsageError("lr_final_fraction must lie in (0, 1]");
  }
  if (max_decode_len < 1) throw UsageError("max_decode_len must be >= 1");
}

double teacher_forcing_at(const TrainConfig& config, int epoch) {
  if (config.epochs <= 1) return config.teacher_forcing_start;
  const double frac = static_cast<double>(epoch) / static_cast<double>(config.epochs - 1);
  return config.teacher_forcing_start +
         frac * (config.teacher_forcing_end - config.teacher_forcing_start);
}

double learning_rate_at(const TrainConfig& config, int epoch) {
  if (config.epochs <= 1) return config.adam.lr;
  const double frac = static_cast<double>(epoch) / static_cast<double>(config.epochs - 1);
  return config.adam.lr * (1.0 - frac * (1.0 - config.lr_final_fraction));
}

std::vector<EpochLog> train(Seq2SeqModel& model, std::span<const Sentence> sentences,
                            std::span<const int> labels, const TrainConfig& config) {
  config.validate();
  model.check_shapes();
  if (sentences.empty()) throw DataError("empty training corpus");
  const bool supervised = model.classifier.has_value() && config.cls_weight > 0.0;
  if (supervised && labels.empty()) {
    throw DataError("labels are required to train a semi-supervised model");
  }
  if (!labels.empty() && labels.size() != sentences.size()) {
    throw DataError("label count does not match sentence count");
  }

  Adam adam(config.adam);
  Rng rng(config.seed);
  std::vector<std::size_t> order(sentences.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<EpochLog> log;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    EpochLog entry;
    entry.epoch = epoch;
    entry.teacher_forcing = teacher_forcing_at(config, epoch);
    adam.set_lr(learning_rate_at(config, epoch));
    rng.shuffle(order);

    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      ModelGrads grads = ModelGrads::zeros_like(model);
      for (std::size_t k = begin; k < end; ++k) {
        const std::size_t i = order[k];
        const int label = supervised ? labels[i] : -1;
        const SampleLoss sample = accumulate_sample(model, sentences[i], label,
                                                    config.cls_weight,
                                                    entry.teacher_forcing, rng, grads);
        entry.reconstruction += sample.reconstruction;
        entry.classification += sample.classification;
        entry.total += sample.total;
      }
      grads *= 1.0 / static_cast<double>(end - begin);
      if (config.grad_clip > 0.0) {
        const double norm = std::sqrt(grads.squared_norm());
        if (!std::isfinite(norm)) throw NumericError("non-finite gradient during training");
        if (norm > config.grad_clip) grads *= config.grad_clip / norm;
      }
      adam.begin_step();
      for_each_param(model, grads, [&](auto& param, const auto& grad) {
        adam.update(param, grad);
      });
    }
    const double n = static_cast<double>(sentences.size());
    entry.reconstruction /= n;
    entry.classification /= n;
    entry.total /= n;
    log.push_back(entry);
  }
  return log;
}

}  // namespace nst
