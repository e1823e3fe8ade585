#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nst/config.hpp"
#include "nst/metrics.hpp"
#include "nst/trainer.hpp"

namespace nst {

namespace fs = std::filesystem;

// Corpus files ending in .tsv are labeled-tsv, anything else is plain.
CorpusFormat format_for(const fs::path& path);

void cmd_build_vocab(const std::vector<fs::path>& inputs, int min_freq,
                     std::optional<std::size_t> max_size, const fs::path& out);

// Trains CBOW vectors and writes the text export "token v1 ... v_dw".
void cmd_train_embeddings(const Config& config, const std::vector<fs::path>& inputs,
                          const fs::path& out);

// Builds the vocabulary, trains CBOW embeddings and the seq2seq model, and
// writes a model checkpoint. Sentences from plain files are unlabeled.
std::vector<EpochLog> cmd_train(const Config& config, const std::vector<fs::path>& inputs,
                                const fs::path& out);

// Style matrix of a corpus file under a trained model. `label` restricts a
// labeled corpus to one label first.
void cmd_extract(const fs::path& checkpoint, const fs::path& corpus, std::optional<int> label,
                 double drop_rate, const fs::path& out);

// Transfers every sentence of `source` with operators built from corpus_x
// (source style) and corpus_y (target style). One output line per input line.
void cmd_transfer(const fs::path& checkpoint, const fs::path& source, const fs::path& corpus_x,
                  const fs::path& corpus_y, double drop_rate, const fs::path& out,
                  std::optional<double> eps = std::nullopt);

// Plain autoencoder output for every sentence of `source`.
void cmd_reconstruct(const fs::path& checkpoint, const fs::path& source, const fs::path& out);

// Trains the evaluation TextCNN on a labeled corpus over the model's vocabulary.
void cmd_train_classifier(const Config& config, const fs::path& checkpoint,
                          const fs::path& corpus, const fs::path& out);

EvalReport cmd_evaluate(const fs::path& classifier, const fs::path& transferred,
                        const fs::path& source, int target_label);

struct SweepRow {
  double drop_rate = 0.0;
  EvalReport report;
};

std::vector<SweepRow> cmd_sweep(const fs::path& checkpoint, const fs::path& classifier,
                                const fs::path& source, const fs::path& corpus_x,
                                const fs::path& corpus_y, int target_label,
                                const std::vector<double>& rates);

std::string format_sweep(const std::vector<SweepRow>& rows);

enum class VizMode { kHeatmap, kMds };

// Heatmap: one CSV per style file holding its top-k eigenvectors as columns.
// MDS: the top-k eigenvectors of every file projected jointly to 2-D.
// Returns the written paths.
std::vector<fs::path> cmd_visualize(const std::vector<fs::path>& style_files, int k,
                                    VizMode mode, const fs::path& out_prefix, bool svg);

// Writes a labeled-tsv toy corpus; the label column carries `attribute`.
void cmd_toygen(const std::string& domain, int n_per_cell, std::uint64_t seed,
                const std::string& attribute, const std::vector<std::string>& cells,
                const fs::path& out);

}  // namespace nst
