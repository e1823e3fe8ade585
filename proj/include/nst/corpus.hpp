#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace nst {

using TokenId = std::int32_t;

inline constexpr TokenId kPad = 0;
inline constexpr TokenId kUnk = 1;
inline constexpr TokenId kSos = 2;
inline constexpr TokenId kEos = 3;
inline constexpr TokenId kNumSpecials = 4;

inline constexpr std::array<std::string_view, 4> kSpecialTokens = {
    "<pad>", "<unk>", "<sos>", "<eos>"};

using Tokens = std::vector<std::string>;

// Token ids of one sentence, without SOS/EOS.
using Sentence = std::vector<TokenId>;

class Vocab {
 public:
  Vocab();

  // Specials plus every token with frequency >= min_freq, ordered by
  // descending frequency then lexicographically, optionally truncated to the
  // max_size most frequent corpus tokens.
  static Vocab build(std::span<const Tokens> lines, int min_freq,
                     std::optional<std::size_t> max_size = std::nullopt);

  // Rebuilds from a full id-ordered token list (specials first).
  static Vocab from_tokens(std::vector<std::string> id_to_token);

  static Vocab load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::size_t size() const { return id_to_token_.size(); }
  bool contains(std::string_view token) const;
  // UNK for unknown tokens.
  TokenId id(std::string_view token) const;
  const std::string& token(TokenId id) const;
  const std::vector<std::string>& tokens() const { return id_to_token_; }

  friend bool operator==(const Vocab& a, const Vocab& b) {
    return a.id_to_token_ == b.id_to_token_;
  }

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, TokenId> token_to_id_;
};

struct LabeledCorpus {
  std::string name;
  std::vector<Sentence> sentences;
  std::optional<std::vector<int>> labels;

  std::size_t size() const { return sentences.size(); }
  bool has_labels() const { return labels.has_value(); }
  // Sub-corpus of the sentences whose label equals `label`.
  LabeledCorpus with_label(int label) const;
};

// Untokenized-to-vocabulary form of a corpus file.
struct RawCorpus {
  std::vector<Tokens> lines;
  std::optional<std::vector<int>> labels;
};

enum class CorpusFormat { kPlain, kLabeledTsv };

CorpusFormat parse_corpus_format(std::string_view name);

// Lowercase (ASCII) and split on whitespace.
Tokens tokenize(std::string_view text);

Sentence encode_text(const Vocab& vocab, std::span<const std::string> tokens);

// PAD/SOS/EOS are dropped, UNK renders as "<unk>".
Tokens decode_ids(const Vocab& vocab, std::span<const TokenId> ids);

std::string join_tokens(std::span<const std::string> tokens);

RawCorpus read_corpus(const std::filesystem::path& path, CorpusFormat format);
LabeledCorpus load_corpus(const std::filesystem::path& path,
                          CorpusFormat format, const Vocab& vocab);
LabeledCorpus encode_corpus_lines(const RawCorpus& raw, const Vocab& vocab,
                                  std::string name);

// Throws DataError if any label lies outside `schema`.
void validate_labels(const LabeledCorpus& corpus, std::span<const int> schema);

void write_labeled_tsv(const std::filesystem::path& path,
                       std::span<const Tokens> lines, std::span<const int> labels);
void write_plain(const std::filesystem::path& path,
                 std::span<const Tokens> lines);

struct CorpusSplit {
  LabeledCorpus train;
  LabeledCorpus dev;
  LabeledCorpus test;
};

// Seeded permutation; dev/test sizes are floor(ratio * N) and train takes the
// remainder.
CorpusSplit split_corpus(const LabeledCorpus& corpus,
                         const std::array<double, 3>& ratios,
                         std::uint64_t seed);

}  // namespace nst
