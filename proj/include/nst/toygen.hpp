#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "nst/corpus.hpp"

namespace nst {

// One generation cell. attitude: 0 negative / 1 positive; tense: 0 past /
// 1 present; intensity: 1 plain / 2 intensified.
struct ToyCell {
  int attitude = 1;
  int tense = 1;
  int intensity = 1;

  friend bool operator==(const ToyCell&, const ToyCell&) = default;
};

enum class ToyAttribute { kAttitude, kTense, kIntensity };

// Template grammar for a synthetic two-attribute review corpus. Templates are
// space-separated tokens where {slot} draws from a lexicon:
//   {noun}   "noun"
//   {be}     "be/<tense>"
//   {adj}    "adj/<attitude>"
//   {verb}   "verb/<attitude>/<tense>"
//   {very}   "very/<intensity>"    (empty lexicon => slot omitted)
//   {really} "really/<intensity>"
// Nouns are drawn first. A lexicon named "<key>@<noun>" (a subset of <key>)
// replaces <key> in sentences whose first noun is <noun>.
struct ToyGrammar {
  std::string domain;
  std::vector<std::string> templates;
  std::map<std::string, std::vector<std::string>> lexicon;
  std::uint64_t seed = 1;
  int max_len = 8;

  // Restaurant-review templates.
  static ToyGrammar restaurant(std::uint64_t seed);
  // Product-review templates; shares attitude/tense lexicons with restaurant().
  static ToyGrammar product(std::uint64_t seed);

  // Throws if opposing lexicons overlap or a template can exceed max_len.
  void validate() const;
};

struct ToyCorpus {
  std::vector<Tokens> lines;
  std::vector<ToyCell> cells;

  std::size_t size() const { return lines.size(); }
  std::vector<int> labels(ToyAttribute attribute) const;
  void append(const ToyCorpus& other);
};

// n_per_cell sentences for each cell, in cell order.
ToyCorpus generate(const ToyGrammar& grammar, int n_per_cell, std::span<const ToyCell> cells);

// Like generate(), but every sentence is distinct and absent from `exclude`.
// Throws DataError when the grammar runs out of fresh sentences.
ToyCorpus generate_unseen(const ToyGrammar& grammar, int n_per_cell,
                          std::span<const ToyCell> cells, std::span<const Tokens> exclude);

// Every (attitude, tense, intensity) combination.
std::vector<ToyCell> all_cells();

LabeledCorpus to_labeled(const ToyCorpus& toy, const Vocab& vocab, ToyAttribute attribute,
                         std::string name);

}  // namespace nst
