#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "nst/config.hpp"
#include "nst/metrics.hpp"
#include "nst/seq2seq.hpp"
#include "nst/textcnn.hpp"
#include "nst/toygen.hpp"
#include "nst/trainer.hpp"

namespace nst {

// End-to-end experiments on the synthetic review grammar. Domain A is the
// restaurant grammar (attitude-labeled training data); domain B is the product
// grammar, added to training without labels when `with_domain_b` is set.
struct ToyTaskOptions {
  Config config = Config::preset("toy");
  int per_style = 2000;            // domain A training sentences per attitude
  int domain_b_per_style = 1000;   // domain B training sentences per attitude
  int held_out_per_cell = 25;      // unseen test sentences per generation cell
  int classifier_per_cell = 250;   // fresh sentences per cell for evaluation classifiers
  bool with_domain_b = false;
  std::uint64_t data_seed = 1;
};

struct ToyTask {
  ToyTaskOptions options;
  Vocab vocab;
  Seq2SeqModel model;
  ToyCorpus train_a;
  ToyCorpus train_b;
  ToyCorpus held_a;  // never seen in training
  ToyCorpus held_b;
  std::vector<EpochLog> log;
};

ToyTask build_toy_task(const ToyTaskOptions& options);

using CellFilter = std::function<bool(const ToyCell&)>;

// Sentences of `toy` whose cell passes `keep`, labeled with their attitude.
LabeledCorpus select_cells(const ToyTask& task, const ToyCorpus& toy, const CellFilter& keep,
                           const std::string& name);

// Binary TextCNN on fresh sentences of the given domains. Intensity labels are
// shifted to 0/1.
TextCnn train_attribute_classifier(const ToyTask& task, ToyAttribute attribute,
                                   bool domain_a, bool domain_b);

// Share of sentences decoded exactly, in percent.
double exact_reconstruction(const Seq2SeqModel& model, const Vocab& vocab,
                            const std::vector<Tokens>& sentences, int max_len);

struct TransferDirection {
  LabeledCorpus x;             // source-style corpus
  LabeledCorpus y;             // target-style corpus
  std::vector<Tokens> source;  // sentences to transfer
  int target_label = 1;
};

struct TransferOutcome {
  EvalReport report;
  std::vector<Tokens> outputs;
};

// Transfers every direction with its own operators, then scores all outputs
// together: Acc against each direction's target label, BLEU against the
// sources.
TransferOutcome run_transfer(const ToyTask& task, const std::vector<TransferDirection>& dirs,
                             const TextCnn& classifier, double drop_rate);

// Attitude flip in both directions on domain A held-out data.
std::vector<TransferDirection> attitude_directions(const ToyTask& task);
// Operators from domain A applied to domain B held-out data.
std::vector<TransferDirection> out_of_domain_directions(const ToyTask& task);

}  // namespace nst
