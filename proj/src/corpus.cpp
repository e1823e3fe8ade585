#include "nst/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>

#include "nst/errors.hpp"
#include "nst/rng.hpp"

namespace nst {

Vocab::Vocab() {
  for (auto special : kSpecialTokens) {
    token_to_id_.emplace(std::string(special),
                         static_cast<TokenId>(id_to_token_.size()));
    id_to_token_.emplace_back(special);
  }
}

Vocab Vocab::build(std::span<const Tokens> lines, int min_freq,
                   std::optional<std::size_t> max_size) {
  if (lines.empty()) throw DataError("empty corpus");
  if (min_freq < 1) throw UsageError("min_freq must be >= 1");

  std::map<std::string, std::size_t> counts;
  for (const auto& line : lines) {
    for (const auto& token : line) ++counts[token];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (auto& [token, count] : counts) {
    if (count < static_cast<std::size_t>(min_freq)) continue;
    bool special = std::find(kSpecialTokens.begin(), kSpecialTokens.end(),
                             token) != kSpecialTokens.end();
    if (!special) ranked.emplace_back(token, count);
  }
  // counts is a std::map, so a stable sort keeps lexicographic order on ties.
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second > b.second;
  });
  if (max_size && ranked.size() > *max_size) ranked.resize(*max_size);

  Vocab vocab;
  for (auto& [token, count] : ranked) {
    vocab.token_to_id_.emplace(token, static_cast<TokenId>(vocab.id_to_token_.size()));
    vocab.id_to_token_.push_back(token);
  }
  return vocab;
}

Vocab Vocab::from_tokens(std::vector<std::string> id_to_token) {
  if (id_to_token.size() < kSpecialTokens.size()) {
    throw DataError("vocabulary is missing the special tokens");
  }
  for (std::size_t i = 0; i < kSpecialTokens.size(); ++i) {
    if (id_to_token[i] != kSpecialTokens[i]) {
      throw DataError("vocabulary special token " + std::to_string(i) +
                      " must be " + std::string(kSpecialTokens[i]));
    }
  }
  Vocab vocab;
  for (std::size_t i = kSpecialTokens.size(); i < id_to_token.size(); ++i) {
    auto [it, inserted] = vocab.token_to_id_.emplace(
        id_to_token[i], static_cast<TokenId>(i));
    if (!inserted) throw DataError("duplicate vocabulary token: " + id_to_token[i]);
    vocab.id_to_token_.push_back(std::move(id_to_token[i]));
  }
  return vocab;
}

Vocab Vocab::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vocabulary file " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  return from_tokens(std::move(tokens));
}

void Vocab::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write vocabulary file " + path.string());
  for (const auto& token : id_to_token_) out << token << '\n';
}

bool Vocab::contains(std::string_view token) const {
  return token_to_id_.find(std::string(token)) != token_to_id_.end();
}

TokenId Vocab::id(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  return it == token_to_id_.end() ? kUnk : it->second;
}

const std::string& Vocab::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= id_to_token_.size()) {
    throw DataError("id out of range: " + std::to_string(id));
  }
  return id_to_token_[static_cast<std::size_t>(id)];
}

LabeledCorpus LabeledCorpus::with_label(int label) const {
  if (!labels) throw DataError("corpus " + name + " has no labels");
  LabeledCorpus out;
  out.name = name + "[" + std::to_string(label) + "]";
  out.labels.emplace();
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if ((*labels)[i] != label) continue;
    out.sentences.push_back(sentences[i]);
    out.labels->push_back(label);
  }
  return out;
}

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "plain") return CorpusFormat::kPlain;
  if (name == "labeled-tsv" || name == "tsv") return CorpusFormat::kLabeledTsv;
  throw UsageError("unknown corpus format: " + std::string(name));
}

Tokens tokenize(std::string_view text) {
  Tokens tokens;
  std::string current;
  for (char ch : text) {
    auto uch = static_cast<unsigned char>(ch);
    if (std::isspace(uch)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(static_cast<char>(std::tolower(uch)));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

Sentence encode_text(const Vocab& vocab, std::span<const std::string> tokens) {
  if (tokens.empty()) throw DataError("cannot encode an empty token sequence");
  Sentence ids;
  ids.reserve(tokens.size());
  for (const auto& token : tokens) ids.push_back(vocab.id(token));
  return ids;
}

Tokens decode_ids(const Vocab& vocab, std::span<const TokenId> ids) {
  Tokens tokens;
  for (TokenId id : ids) {
    const auto& token = vocab.token(id);
    if (id == kPad || id == kSos || id == kEos) continue;
    tokens.push_back(token);
  }
  return tokens;
}

std::string join_tokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

namespace {

std::string at_line(const std::filesystem::path& path, std::size_t line_no) {
  return path.string() + ":" + std::to_string(line_no) + ": ";
}

}  // namespace

RawCorpus read_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file " + path.string());

  RawCorpus raw;
  if (format == CorpusFormat::kLabeledTsv) raw.labels.emplace();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view text = line;
    if (format == CorpusFormat::kLabeledTsv) {
      auto tab = text.find('\t');
      if (tab == std::string_view::npos) {
        throw DataError(at_line(path, line_no) + "missing TAB separator");
      }
      std::string_view label_text = text.substr(0, tab);
      int label = 0;
      auto [ptr, ec] = std::from_chars(label_text.data(),
                                       label_text.data() + label_text.size(), label);
      if (ec != std::errc() || ptr != label_text.data() + label_text.size() ||
          label_text.empty()) {
        throw DataError(at_line(path, line_no) + "non-integer label '" +
                        std::string(label_text) + "'");
      }
      raw.labels->push_back(label);
      text = text.substr(tab + 1);
    }
    Tokens tokens = tokenize(text);
    if (tokens.empty()) throw DataError(at_line(path, line_no) + "empty sentence");
    raw.lines.push_back(std::move(tokens));
  }
  return raw;
}

LabeledCorpus encode_corpus_lines(const RawCorpus& raw, const Vocab& vocab,
                                  std::string name) {
  LabeledCorpus corpus;
  corpus.name = std::move(name);
  corpus.labels = raw.labels;
  corpus.sentences.reserve(raw.lines.size());
  for (const auto& line : raw.lines) corpus.sentences.push_back(encode_text(vocab, line));
  return corpus;
}

LabeledCorpus load_corpus(const std::filesystem::path& path,
                          CorpusFormat format, const Vocab& vocab) {
  return encode_corpus_lines(read_corpus(path, format), vocab,
                             path.stem().string());
}

void validate_labels(const LabeledCorpus& corpus, std::span<const int> schema) {
  if (!corpus.labels) return;
  if (corpus.labels->size() != corpus.sentences.size()) {
    throw DataError("label count does not match sentence count in " + corpus.name);
  }
  for (std::size_t i = 0; i < corpus.labels->size(); ++i) {
    int label = (*corpus.labels)[i];
    if (std::find(schema.begin(), schema.end(), label) == schema.end()) {
      throw DataError("label " + std::to_string(label) + " of sentence " +
                      std::to_string(i) + " is outside the label schema");
    }
  }
}

void write_labeled_tsv(const std::filesystem::path& path,
                       std::span<const Tokens> lines, std::span<const int> labels) {
  if (lines.size() != labels.size()) throw UsageError("labels/lines size mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out << labels[i] << '\t' << join_tokens(lines[i]) << '\n';
  }
}

void write_plain(const std::filesystem::path& path, std::span<const Tokens> lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& line : lines) out << join_tokens(line) << '\n';
}

CorpusSplit split_corpus(const LabeledCorpus& corpus,
                         const std::array<double, 3>& ratios, std::uint64_t seed) {
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r > 0.0)) throw UsageError("split ratios must be positive");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw UsageError("split ratios must sum to 1");

  const std::size_t n = corpus.size();
  auto portion = [n](double r) {
    return static_cast<std::size_t>(std::floor(r * static_cast<double>(n) + 1e-9));
  };
  const std::size_t n_dev = portion(ratios[1]);
  const std::size_t n_test = portion(ratios[2]);
  const std::size_t n_train = n - n_dev - n_test;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);

  CorpusSplit split;
  LabeledCorpus* parts[3] = {&split.train, &split.dev, &split.test};
  const char* suffix[3] = {".train", ".dev", ".test"};
  for (int p = 0; p < 3; ++p) {
    parts[p]->name = corpus.name + suffix[p];
    if (corpus.labels) parts[p]->labels.emplace();
  }
  for (std::size_t k = 0; k < n; ++k) {
    LabeledCorpus& part = k < n_train ? split.train
                          : k < n_train + n_dev ? split.dev
                                                : split.test;
    part.sentences.push_back(corpus.sentences[order[k]]);
    if (corpus.labels) part.labels->push_back((*corpus.labels)[order[k]]);
  }
  return split;
}

}  // namespace nst
