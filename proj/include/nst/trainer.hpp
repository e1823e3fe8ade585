#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nst/adam.hpp"
#include "nst/corpus.hpp"
#include "nst/seq2seq.hpp"

namespace nst {

struct TrainConfig {
  AdamConfig adam;
  int epochs = 10;
  int batch_size = 16;
  std::uint64_t seed = 1;
  // Total loss is L_rec + cls_weight * L_cls (the 10:1 weighting).
  double cls_weight = 0.1;
  // Teacher forcing decays linearly from start to end across epochs.
  double teacher_forcing_start = 1.0;
  double teacher_forcing_end = 0.5;
  int max_decode_len = 30;
  // The Adam step size decays linearly from adam.lr to lr_final_fraction *
  // adam.lr across epochs; 1 keeps it constant.
  double lr_final_fraction = 1.0;
  // Global gradient-norm clip per minibatch; <= 0 disables.
  double grad_clip = 5.0;

  void validate() const;
};

struct EpochLog {
  int epoch = 0;
  double teacher_forcing = 1.0;
  double reconstruction = 0.0;
  double classification = 0.0;
  double total = 0.0;
};

double teacher_forcing_at(const TrainConfig& config, int epoch);
double learning_rate_at(const TrainConfig& config, int epoch);

// Minibatch Adam on the combined objective. `labels` is either empty or has
// one entry per sentence; negative entries mark unlabeled sentences. Labels
// are required when the model carries a classifier and cls_weight > 0.
std::vector<EpochLog> train(Seq2SeqModel& model, std::span<const Sentence> sentences,
                            std::span<const int> labels, const TrainConfig& config);

}  // namespace nst
