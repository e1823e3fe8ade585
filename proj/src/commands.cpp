#include "nst/commands.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "nst/bleu.hpp"
#include "nst/checkpoint.hpp"
#include "nst/errors.hpp"
#include "nst/textcnn.hpp"
#include "nst/toygen.hpp"
#include "nst/transfer.hpp"
#include "nst/viz.hpp"

namespace nst {

CorpusFormat format_for(const fs::path& path) {
  return path.extension() == ".tsv" ? CorpusFormat::kLabeledTsv : CorpusFormat::kPlain;
}

namespace {

struct LoadedModel {
  Vocab vocab;
  Seq2SeqModel model;
  Config config;
};

LoadedModel load_model(const fs::path& path) {
  const Checkpoint ckpt = Checkpoint::load(path);
  LoadedModel out;
  out.vocab = Vocab::from_tokens(ckpt.vocab);
  out.model = model_from_checkpoint(ckpt);
  auto j = nlohmann::json::parse(ckpt.config_json, nullptr, false);
  if (j.is_object()) out.config = Config::from_json(j);
  return out;
}

// Lines of a plain or labeled file; empty lines yield empty token lists.
std::vector<Tokens> read_token_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  const bool labeled = format_for(path) == CorpusFormat::kLabeledTsv;
  std::vector<Tokens> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view text = line;
    if (labeled) {
      auto tab = text.find('\t');
      if (tab != std::string_view::npos) text = text.substr(tab + 1);
    }
    lines.push_back(tokenize(text));
  }
  return lines;
}

void write_outputs(const fs::path& out, const Vocab& vocab,
                   const std::vector<std::vector<TokenId>>& decoded) {
  std::ofstream file(out, std::ios::binary);
  if (!file) throw DataError("cannot write " + out.string());
  for (const auto& ids : decoded) file << join_tokens(decode_ids(vocab, ids)) << '\n';
}

}  // namespace

void cmd_build_vocab(const std::vector<fs::path>& inputs, int min_freq,
                     std::optional<std::size_t> max_size, const fs::path& out) {
  std::vector<Tokens> lines;
  for (const auto& path : inputs) {
    auto raw = read_corpus(path, format_for(path));
    lines.insert(lines.end(), raw.lines.begin(), raw.lines.end());
  }
  Vocab::build(lines, min_freq, max_size).save(out);
}

namespace {

struct TrainingData {
  Vocab vocab;
  LabeledCorpus corpus;
  std::vector<int> labels;
  bool any_label = false;
};

TrainingData gather(const Config& config, const std::vector<fs::path>& inputs) {
  if (inputs.empty()) throw UsageError("no training files given");
  std::vector<RawCorpus> raws;
  std::vector<Tokens> lines;
  for (const auto& path : inputs) {
    raws.push_back(read_corpus(path, format_for(path)));
    lines.insert(lines.end(), raws.back().lines.begin(), raws.back().lines.end());
  }
  TrainingData data;
  data.vocab = Vocab::build(lines, config.min_freq, config.max_vocab);
  data.corpus.name = "train";
  for (const auto& raw : raws) {
    for (std::size_t i = 0; i < raw.lines.size(); ++i) {
      data.corpus.sentences.push_back(encode_text(data.vocab, raw.lines[i]));
      data.labels.push_back(raw.labels ? (*raw.labels)[i] : -1);
      data.any_label = data.any_label || raw.labels.has_value();
    }
  }
  return data;
}

}  // namespace

void cmd_train_embeddings(const Config& config, const std::vector<fs::path>& inputs,
                          const fs::path& out) {
  config.validate();
  const TrainingData data = gather(config, inputs);
  train_cbow(data.corpus, data.vocab, config.cbow).export_text(data.vocab, out);
}

std::vector<EpochLog> cmd_train(const Config& config, const std::vector<fs::path>& inputs,
                                const fs::path& out) {
  config.validate();
  const TrainingData data = gather(config, inputs);
  if (config.semi_supervised && !data.any_label) {
    throw DataError("semi-supervised training needs at least one labeled (.tsv) corpus");
  }
  EmbeddingTable table = train_cbow(data.corpus, data.vocab, config.cbow);
  Seq2SeqModel model = Seq2SeqModel::create(std::move(table), config.hidden_dim,
                                            config.semi_supervised, config.train.seed);
  const std::span<const int> labels =
      config.semi_supervised ? std::span<const int>(data.labels) : std::span<const int>();
  auto log = train(model, data.corpus.sentences, labels, config.train);
  model_checkpoint(model, data.vocab, config.to_json().dump()).save(out);
  return log;
}

void cmd_extract(const fs::path& checkpoint, const fs::path& corpus_path,
                 std::optional<int> label, double drop_rate, const fs::path& out) {
  const LoadedModel lm = load_model(checkpoint);
  LabeledCorpus corpus = load_corpus(corpus_path, format_for(corpus_path), lm.vocab);
  if (label) corpus = corpus.with_label(*label);
  const StyleMatrix sm = corpus_style(lm.model, corpus, drop_rate);
  style_checkpoint(sm, corpus.name).save(out);
}

void cmd_transfer(const fs::path& checkpoint, const fs::path& source, const fs::path& corpus_x,
                  const fs::path& corpus_y, double drop_rate, const fs::path& out,
                  std::optional<double> eps) {
  const LoadedModel lm = load_model(checkpoint);
  const LabeledCorpus x = load_corpus(corpus_x, format_for(corpus_x), lm.vocab);
  const LabeledCorpus y = load_corpus(corpus_y, format_for(corpus_y), lm.vocab);
  const LabeledCorpus src = load_corpus(source, format_for(source), lm.vocab);
  PrepareOptions options;
  options.eps = eps.value_or(lm.config.eps);
  options.drop_rate = drop_rate;
  const TransferOperatorPair pair = prepare_operators(lm.model, x, y, options);
  write_outputs(out, lm.vocab, transfer_sentences(lm.model, pair, src.sentences, lm.config.max_len));
}

void cmd_reconstruct(const fs::path& checkpoint, const fs::path& source, const fs::path& out) {
  const LoadedModel lm = load_model(checkpoint);
  const LabeledCorpus src = load_corpus(source, format_for(source), lm.vocab);
  write_outputs(out, lm.vocab, reconstruct_sentences(lm.model, src.sentences, lm.config.max_len));
}

void cmd_train_classifier(const Config& config, const fs::path& checkpoint,
                          const fs::path& corpus_path, const fs::path& out) {
  config.validate();
  const Checkpoint ckpt = Checkpoint::load(checkpoint);
  const Vocab vocab = Vocab::from_tokens(ckpt.vocab);
  const LabeledCorpus corpus = load_corpus(corpus_path, CorpusFormat::kLabeledTsv, vocab);
  const TextCnn clf = train_eval_classifier(corpus, vocab.size(), config.textcnn);
  classifier_checkpoint(clf, vocab).save(out);
}

namespace {

EvalReport evaluate_outputs(const TextCnn& clf, const Vocab& vocab,
                            const std::vector<Tokens>& transferred,
                            const std::vector<Tokens>& source, int target_label) {
  if (transferred.size() != source.size()) {
    throw DataError("transferred and source files have different line counts");
  }
  std::vector<std::vector<TokenId>> ids;
  ids.reserve(transferred.size());
  for (const auto& line : transferred) {
    std::vector<TokenId> s;
    for (const auto& tok : line) s.push_back(vocab.id(tok));
    ids.push_back(std::move(s));
  }
  return aggregate(accuracy(clf, ids, target_label), bleu(transferred, source));
}

}  // namespace

EvalReport cmd_evaluate(const fs::path& classifier, const fs::path& transferred,
                        const fs::path& source, int target_label) {
  const Checkpoint ckpt = Checkpoint::load(classifier);
  const Vocab vocab = Vocab::from_tokens(ckpt.vocab);
  const TextCnn clf = classifier_from_checkpoint(ckpt);
  return evaluate_outputs(clf, vocab, read_token_lines(transferred), read_token_lines(source),
                          target_label);
}

std::vector<SweepRow> cmd_sweep(const fs::path& checkpoint, const fs::path& classifier,
                                const fs::path& source, const fs::path& corpus_x,
                                const fs::path& corpus_y, int target_label,
                                const std::vector<double>& rates) {
  if (rates.empty()) throw UsageError("no drop rates given");
  const LoadedModel lm = load_model(checkpoint);
  const Checkpoint clf_ckpt = Checkpoint::load(classifier);
  const TextCnn clf = classifier_from_checkpoint(clf_ckpt);
  const Vocab clf_vocab = Vocab::from_tokens(clf_ckpt.vocab);
  const LabeledCorpus x = load_corpus(corpus_x, format_for(corpus_x), lm.vocab);
  const LabeledCorpus y = load_corpus(corpus_y, format_for(corpus_y), lm.vocab);
  const LabeledCorpus src = load_corpus(source, format_for(source), lm.vocab);
  std::vector<Tokens> references;
  for (const auto& s : src.sentences) references.push_back(decode_ids(lm.vocab, s));

  std::vector<SweepRow> rows;
  for (double rate : rates) {
    PrepareOptions options;
    options.eps = lm.config.eps;
    options.drop_rate = rate;
    const TransferOperatorPair pair = prepare_operators(lm.model, x, y, options);
    std::vector<Tokens> outputs;
    for (const auto& ids : transfer_sentences(lm.model, pair, src.sentences, lm.config.max_len)) {
      outputs.push_back(decode_ids(lm.vocab, ids));
    }
    rows.push_back({rate, evaluate_outputs(clf, clf_vocab, outputs, references, target_label)});
  }
  return rows;
}

std::string format_sweep(const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%9s %8s %8s %8s %8s\n", "drop_rate", "Acc", "BLEU", "G-Score",
                "Mean");
  out << buf;
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "%9.2f %8.2f %8.2f %8.2f %8.2f\n", row.drop_rate,
                  row.report.acc, row.report.bleu, row.report.g_score, row.report.mean);
    out << buf;
  }
  return out.str();
}

std::vector<fs::path> cmd_visualize(const std::vector<fs::path>& style_files, int k,
                                    VizMode mode, const fs::path& out_prefix, bool svg) {
  if (style_files.empty()) throw UsageError("no style files given");
  std::vector<fs::path> written;
  std::vector<Eigen::MatrixXd> tops;
  std::vector<std::string> names;
  for (const auto& path : style_files) {
    const Checkpoint ckpt = Checkpoint::load(path);
    const EigenFactorization ef = symmetric_eigen(style_from_checkpoint(ckpt).cov);
    tops.push_back(top_eigenvectors(ef, k));
    names.push_back(path.stem().string());
  }
  auto with_suffix = [&](const std::string& suffix) {
    return fs::path(out_prefix.string() + suffix);
  };
  if (mode == VizMode::kHeatmap) {
    for (std::size_t i = 0; i < tops.size(); ++i) {
      const fs::path csv = with_suffix("_" + names[i] + ".csv");
      export_heatmap(tops[i], csv);
      written.push_back(csv);
      if (svg) {
        const fs::path image = with_suffix("_" + names[i] + ".svg");
        export_heatmap_svg(tops[i], image);
        written.push_back(image);
      }
    }
    return written;
  }
  const Eigen::Index d = tops.front().rows();
  Eigen::MatrixXd points(static_cast<Eigen::Index>(tops.size()) * k, d);
  std::vector<std::string> labels;
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < tops.size(); ++i) {
    if (tops[i].rows() != d) throw DataError("style files differ in dimension");
    for (int e = 0; e < k; ++e) {
      points.row(row++) = tops[i].col(e).transpose();
      labels.push_back(names[i] + ":e" + std::to_string(e + 1));
    }
  }
  const Projection2D proj = classical_mds(points, labels, 2);
  const fs::path csv = with_suffix("_mds.csv");
  export_scatter(proj, csv);
  written.push_back(csv);
  if (svg) {
    const fs::path image = with_suffix("_mds.svg");
    export_scatter_svg(proj, image);
    written.push_back(image);
  }
  return written;
}

void cmd_toygen(const std::string& domain, int n_per_cell, std::uint64_t seed,
                const std::string& attribute, const std::vector<std::string>& cells,
                const fs::path& out) {
  ToyGrammar grammar;
  if (domain == "restaurant") grammar = ToyGrammar::restaurant(seed);
  else if (domain == "product") grammar = ToyGrammar::product(seed);
  else throw UsageError("unknown toy domain: " + domain);

  ToyAttribute attr = ToyAttribute::kAttitude;
  if (attribute == "tense") attr = ToyAttribute::kTense;
  else if (attribute == "intensity") attr = ToyAttribute::kIntensity;
  else if (attribute != "attitude") throw UsageError("unknown attribute: " + attribute);

  std::vector<ToyCell> parsed;
  for (const auto& text : cells) {
    ToyCell cell;
    if (std::sscanf(text.c_str(), "%d,%d,%d", &cell.attitude, &cell.tense, &cell.intensity) != 3) {
      throw UsageError("cell must be attitude,tense,intensity: " + text);
    }
    parsed.push_back(cell);
  }
  if (parsed.empty()) parsed = all_cells();
  const ToyCorpus toy = generate(grammar, n_per_cell, parsed);
  write_labeled_tsv(out, toy.lines, toy.labels(attr));
}

}  // namespace nst
