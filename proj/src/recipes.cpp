#include "nst/recipes.hpp"

#include "nst/bleu.hpp"
#include "nst/errors.hpp"
#include "nst/transfer.hpp"

namespace nst {

namespace {

int label_of(const ToyCell& cell, ToyAttribute attribute) {
  switch (attribute) {
    case ToyAttribute::kAttitude: return cell.attitude;
    case ToyAttribute::kTense: return cell.tense;
    case ToyAttribute::kIntensity: return cell.intensity - 1;
  }
  return 0;
}

std::vector<Sentence> encode_lines(const Vocab& vocab, const std::vector<Tokens>& lines) {
  std::vector<Sentence> out;
  out.reserve(lines.size());
  for (const auto& line : lines) out.push_back(encode_text(vocab, line));
  return out;
}

std::vector<Tokens> lines_where(const ToyCorpus& toy, const CellFilter& keep) {
  std::vector<Tokens> out;
  for (std::size_t i = 0; i < toy.size(); ++i) {
    if (keep(toy.cells[i])) out.push_back(toy.lines[i]);
  }
  return out;
}

}  // namespace

ToyTask build_toy_task(const ToyTaskOptions& options) {
  options.config.validate();
  if (options.per_style < 4 || options.per_style % 4 != 0 ||
      (options.with_domain_b && options.domain_b_per_style % 4 != 0)) {
    throw UsageError("sentences per style must be a positive multiple of 4");
  }
  const auto cells = all_cells();  // four cells per attitude
  ToyTask task;
  task.options = options;
  task.train_a = generate(ToyGrammar::restaurant(options.data_seed), options.per_style / 4, cells);
  task.held_a = generate_unseen(ToyGrammar::restaurant(options.data_seed + 100),
                                options.held_out_per_cell, cells, task.train_a.lines);
  if (options.with_domain_b) {
    task.train_b = generate(ToyGrammar::product(options.data_seed + 1),
                            options.domain_b_per_style / 4, cells);
  }
  task.held_b = generate_unseen(ToyGrammar::product(options.data_seed + 101),
                                options.held_out_per_cell, cells, task.train_b.lines);

  std::vector<Tokens> all = task.train_a.lines;
  all.insert(all.end(), task.train_b.lines.begin(), task.train_b.lines.end());
  const Config& config = options.config;
  task.vocab = Vocab::build(all, config.min_freq, config.max_vocab);

  LabeledCorpus corpus{"toy", encode_lines(task.vocab, all), std::nullopt};
  std::vector<int> labels = task.train_a.labels(ToyAttribute::kAttitude);
  labels.resize(all.size(), -1);  // domain B is unlabeled

  EmbeddingTable table = train_cbow(corpus, task.vocab, config.cbow);
  task.model = Seq2SeqModel::create(std::move(table), config.hidden_dim, config.semi_supervised,
                                    config.train.seed);
  const std::span<const int> used =
      config.semi_supervised ? std::span<const int>(labels) : std::span<const int>();
  task.log = train(task.model, corpus.sentences, used, config.train);
  return task;
}

LabeledCorpus select_cells(const ToyTask& task, const ToyCorpus& toy, const CellFilter& keep,
                           const std::string& name) {
  LabeledCorpus out{name, {}, std::vector<int>{}};
  for (std::size_t i = 0; i < toy.size(); ++i) {
    if (!keep(toy.cells[i])) continue;
    out.sentences.push_back(encode_text(task.vocab, toy.lines[i]));
    out.labels->push_back(toy.cells[i].attitude);
  }
  if (out.sentences.empty()) throw DataError("no sentences selected for " + name);
  return out;
}

TextCnn train_attribute_classifier(const ToyTask& task, ToyAttribute attribute, bool domain_a,
                                   bool domain_b) {
  const auto cells = all_cells();
  const int n = task.options.classifier_per_cell;
  const std::uint64_t seed = task.options.data_seed + 1000;
  ToyCorpus fresh;
  if (domain_a) fresh.append(generate(ToyGrammar::restaurant(seed), n, cells));
  if (domain_b) fresh.append(generate(ToyGrammar::product(seed + 1), n, cells));
  if (fresh.size() == 0) throw UsageError("no domain selected for the classifier");
  std::vector<int> labels;
  for (const auto& cell : fresh.cells) labels.push_back(label_of(cell, attribute));
  LabeledCorpus corpus{"classifier", encode_lines(task.vocab, fresh.lines), labels};
  return train_eval_classifier(corpus, task.vocab.size(), task.options.config.textcnn);
}

double exact_reconstruction(const Seq2SeqModel& model, const Vocab& vocab,
                            const std::vector<Tokens>& sentences, int max_len) {
  if (sentences.empty()) throw DataError("no sentences to reconstruct");
  const auto encoded = encode_lines(vocab, sentences);
  const auto decoded = reconstruct_sentences(model, encoded, max_len);
  std::size_t exact = 0;
  for (std::size_t i = 0; i < decoded.size(); ++i) exact += decoded[i] == encoded[i];
  return 100.0 * static_cast<double>(exact) / static_cast<double>(decoded.size());
}

TransferOutcome run_transfer(const ToyTask& task, const std::vector<TransferDirection>& dirs,
                             const TextCnn& classifier, double drop_rate) {
  const Config& config = task.options.config;
  std::vector<Tokens> references;
  TransferOutcome out;
  double hits = 0.0;
  for (const auto& dir : dirs) {
    PrepareOptions options;
    options.eps = config.eps;
    options.drop_rate = drop_rate;
    const TransferOperatorPair pair = prepare_operators(task.model, dir.x, dir.y, options);
    const auto decoded = transfer_sentences(task.model, pair, encode_lines(task.vocab, dir.source),
                                            config.max_len);
    hits += accuracy(classifier, decoded, dir.target_label) * static_cast<double>(decoded.size());
    for (const auto& ids : decoded) out.outputs.push_back(decode_ids(task.vocab, ids));
    references.insert(references.end(), dir.source.begin(), dir.source.end());
  }
  if (references.empty()) throw DataError("nothing to transfer");
  out.report = aggregate(hits / static_cast<double>(references.size()),
                         bleu(out.outputs, references));
  return out;
}

std::vector<TransferDirection> attitude_directions(const ToyTask& task) {
  auto neg = [](const ToyCell& c) { return c.attitude == 0; };
  auto pos = [](const ToyCell& c) { return c.attitude == 1; };
  const LabeledCorpus x0 = select_cells(task, task.train_a, neg, "negative");
  const LabeledCorpus x1 = select_cells(task, task.train_a, pos, "positive");
  return {{x0, x1, lines_where(task.held_a, neg), 1}, {x1, x0, lines_where(task.held_a, pos), 0}};
}

std::vector<TransferDirection> out_of_domain_directions(const ToyTask& task) {
  auto neg = [](const ToyCell& c) { return c.attitude == 0; };
  auto pos = [](const ToyCell& c) { return c.attitude == 1; };
  const LabeledCorpus x0 = select_cells(task, task.train_a, neg, "negative");
  const LabeledCorpus x1 = select_cells(task, task.train_a, pos, "positive");
  return {{x0, x1, lines_where(task.held_b, neg), 1}, {x1, x0, lines_where(task.held_b, pos), 0}};
}

}  // namespace nst
