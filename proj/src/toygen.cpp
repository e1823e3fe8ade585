#include "nst/toygen.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "nst/errors.hpp"
#include "nst/rng.hpp"

namespace nst {

namespace {

void add_shared_lexicons(ToyGrammar& g) {
  g.lexicon["be/1"] = {"is"};
  g.lexicon["be/0"] = {"was"};
  g.lexicon["adj/1"] = {"good", "great", "tasty", "friendly", "fresh", "nice"};
  g.lexicon["adj/0"] = {"bad", "awful", "bland", "rude", "stale", "poor"};
  g.lexicon["verb/1/1"] = {"love", "like", "enjoy"};
  g.lexicon["verb/1/0"] = {"loved", "liked", "enjoyed"};
  g.lexicon["verb/0/1"] = {"hate", "dislike", "avoid"};
  g.lexicon["verb/0/0"] = {"hated", "disliked", "avoided"};
  g.lexicon["very/1"] = {};
  g.lexicon["very/2"] = {"very"};
  g.lexicon["really/1"] = {};
  g.lexicon["really/2"] = {"really"};
}

// Gives noun i its own subset of the adjectives (three of six) and verbs (two
// of three) for every attitude and tense.
void add_noun_affinities(ToyGrammar& g) {
  static constexpr int kAdjSubsets[8][3] = {{0, 1, 2}, {3, 4, 5}, {0, 3, 4}, {1, 2, 5},
                                            {0, 2, 4}, {1, 3, 5}, {0, 1, 5}, {2, 3, 4}};
  static constexpr int kVerbSubsets[8][2] = {{0, 1}, {1, 2}, {0, 2}, {0, 1},
                                             {1, 2}, {0, 2}, {1, 2}, {0, 1}};
  const auto nouns = g.lexicon.at("noun");
  for (std::size_t i = 0; i < nouns.size(); ++i) {
    const auto& noun = nouns[i];
    for (int att : {0, 1}) {
      const std::string adj = "adj/" + std::to_string(att);
      for (int k : kAdjSubsets[i % 8]) g.lexicon[adj + "@" + noun].push_back(g.lexicon.at(adj)[k]);
      for (int tense : {0, 1}) {
        const std::string verb = "verb/" + std::to_string(att) + "/" + std::to_string(tense);
        for (int k : kVerbSubsets[i % 8]) {
          g.lexicon[verb + "@" + noun].push_back(g.lexicon.at(verb)[k]);
        }
      }
    }
  }
}

std::vector<std::string> split_template(const std::string& text) {
  std::vector<std::string> parts;
  std::istringstream in(text);
  for (std::string part; in >> part;) parts.push_back(part);
  return parts;
}

std::string slot_key(const std::string& slot, const ToyCell& cell) {
  if (slot == "noun") return "noun";
  if (slot == "be") return "be/" + std::to_string(cell.tense);
  if (slot == "adj") return "adj/" + std::to_string(cell.attitude);
  if (slot == "verb") {
    return "verb/" + std::to_string(cell.attitude) + "/" + std::to_string(cell.tense);
  }
  if (slot == "very" || slot == "really") return slot + "/" + std::to_string(cell.intensity);
  throw UsageError("unknown template slot {" + slot + "}");
}

void check_cell(const ToyCell& cell) {
  if ((cell.attitude != 0 && cell.attitude != 1) || (cell.tense != 0 && cell.tense != 1) ||
      (cell.intensity != 1 && cell.intensity != 2)) {
    throw UsageError("unknown cell (" + std::to_string(cell.attitude) + "," +
                     std::to_string(cell.tense) + "," + std::to_string(cell.intensity) + ")");
  }
}

}  // namespace

ToyGrammar ToyGrammar::restaurant(std::uint64_t seed) {
  ToyGrammar g;
  g.domain = "restaurant";
  g.seed = seed;
  add_shared_lexicons(g);
  g.lexicon["noun"] = {"food", "staff", "service", "pizza", "coffee", "menu", "waiter", "salad"};
  add_noun_affinities(g);
  g.templates = {
      "the {noun} {be} {very} {adj}",
      "i think the {noun} {be} {very} {adj}",
      "the {noun} {be} {very} {adj} and {adj}",
      "our {noun} {be} {very} {adj} here",
      "we {really} {verb} the {noun} here",
      "we {really} {verb} the {noun} and the {noun}",
  };
  g.validate();
  return g;
}

ToyGrammar ToyGrammar::product(std::uint64_t seed) {
  ToyGrammar g;
  g.domain = "product";
  g.seed = seed;
  add_shared_lexicons(g);
  g.lexicon["noun"] = {"phone", "battery", "case", "cable", "charger", "screen", "lamp", "speaker"};
  add_noun_affinities(g);
  g.templates = {
      "this {noun} {be} {very} {adj}",
      "my {noun} {be} {very} {adj} overall",
      "i {really} {verb} this {noun}",
      "this {noun} {be} {very} {adj} and {adj}",
      "the {noun} {be} {very} {adj} for the price",
      "i {really} {verb} this {noun} and this {noun}",
  };
  g.validate();
  return g;
}

void ToyGrammar::validate() const {
  auto disjoint = [this](const std::string& a, const std::string& b) {
    auto ia = lexicon.find(a);
    auto ib = lexicon.find(b);
    if (ia == lexicon.end() || ib == lexicon.end()) return;
    std::set<std::string> left(ia->second.begin(), ia->second.end());
    for (const auto& w : ib->second) {
      if (left.count(w)) throw UsageError("lexicons " + a + " and " + b + " share '" + w + "'");
    }
  };
  disjoint("adj/0", "adj/1");
  for (int tense : {0, 1}) {
    disjoint("verb/0/" + std::to_string(tense), "verb/1/" + std::to_string(tense));
  }
  disjoint("be/0", "be/1");
  for (const auto& [key, words] : lexicon) {
    const auto at = key.find('@');
    if (at == std::string::npos) continue;
    auto base = lexicon.find(key.substr(0, at));
    if (base == lexicon.end()) throw UsageError("no base lexicon for " + key);
    for (const auto& w : words) {
      if (std::find(base->second.begin(), base->second.end(), w) == base->second.end()) {
        throw UsageError("'" + w + "' in " + key + " is not in " + base->first);
      }
    }
  }
  for (const auto& tmpl : templates) {
    if (static_cast<int>(split_template(tmpl).size()) > max_len) {
      throw UsageError("template exceeds max_len: " + tmpl);
    }
  }
}

std::vector<int> ToyCorpus::labels(ToyAttribute attribute) const {
  std::vector<int> out;
  out.reserve(cells.size());
  for (const auto& c : cells) {
    switch (attribute) {
      case ToyAttribute::kAttitude: out.push_back(c.attitude); break;
      case ToyAttribute::kTense: out.push_back(c.tense); break;
      case ToyAttribute::kIntensity: out.push_back(c.intensity); break;
    }
  }
  return out;
}

void ToyCorpus::append(const ToyCorpus& other) {
  lines.insert(lines.end(), other.lines.begin(), other.lines.end());
  cells.insert(cells.end(), other.cells.begin(), other.cells.end());
}

namespace {

class Sampler {
 public:
  Sampler(const ToyGrammar& grammar, int n_per_cell, std::span<const ToyCell> cells)
      : grammar_(grammar), rng_(grammar.seed) {
    if (n_per_cell < 1) throw UsageError("n_per_cell must be >= 1");
    for (const auto& cell : cells) check_cell(cell);
    for (const auto& tmpl : grammar.templates) parsed_.push_back(split_template(tmpl));
    if (parsed_.empty()) throw UsageError("grammar has no templates");
  }

  // Nouns are drawn first; later slots prefer the "<key>@<first noun>" lexicon.
  Tokens draw(const ToyCell& cell) {
    const auto& parts = parsed_[rng_.below(parsed_.size())];
    std::vector<std::string> words(parts.size());
    std::string head;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      if (parts[i] != "{noun}") continue;
      words[i] = pick(lexicon("noun"));
      if (head.empty()) head = words[i];
    }
    Tokens line;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const auto& part = parts[i];
      if (part == "{noun}") {
        line.push_back(words[i]);
      } else if (part.size() > 2 && part.front() == '{' && part.back() == '}') {
        const std::string key = slot_key(part.substr(1, part.size() - 2), cell);
        auto special = grammar_.lexicon.find(key + "@" + head);
        const auto& options =
            special != grammar_.lexicon.end() ? special->second : lexicon(key);
        if (!options.empty()) line.push_back(pick(options));
      } else {
        line.push_back(part);
      }
    }
    return line;
  }

 private:
  const std::vector<std::string>& lexicon(const std::string& key) const {
    auto it = grammar_.lexicon.find(key);
    if (it == grammar_.lexicon.end()) throw UsageError("missing lexicon " + key);
    return it->second;
  }
  const std::string& pick(const std::vector<std::string>& options) {
    return options[rng_.below(options.size())];
  }

  const ToyGrammar& grammar_;
  Rng rng_;
  std::vector<std::vector<std::string>> parsed_;
};

}  // namespace

ToyCorpus generate(const ToyGrammar& grammar, int n_per_cell, std::span<const ToyCell> cells) {
  Sampler sampler(grammar, n_per_cell, cells);
  ToyCorpus out;
  for (const auto& cell : cells) {
    for (int i = 0; i < n_per_cell; ++i) {
      out.lines.push_back(sampler.draw(cell));
      out.cells.push_back(cell);
    }
  }
  return out;
}

ToyCorpus generate_unseen(const ToyGrammar& grammar, int n_per_cell,
                          std::span<const ToyCell> cells, std::span<const Tokens> exclude) {
  Sampler sampler(grammar, n_per_cell, cells);
  std::set<Tokens> seen(exclude.begin(), exclude.end());
  ToyCorpus out;
  const long max_draws = 1000L * n_per_cell;
  for (const auto& cell : cells) {
    int kept = 0;
    for (long draws = 0; kept < n_per_cell; ++draws) {
      if (draws == max_draws) throw DataError("grammar cannot supply enough unseen sentences");
      Tokens line = sampler.draw(cell);
      if (!seen.insert(line).second) continue;
      out.lines.push_back(std::move(line));
      out.cells.push_back(cell);
      ++kept;
    }
  }
  return out;
}

std::vector<ToyCell> all_cells() {
  std::vector<ToyCell> cells;
  for (int attitude : {0, 1}) {
    for (int tense : {0, 1}) {
      for (int intensity : {1, 2}) cells.push_back({attitude, tense, intensity});
    }
  }
  return cells;
}

LabeledCorpus to_labeled(const ToyCorpus& toy, const Vocab& vocab, ToyAttribute attribute,
                         std::string name) {
  RawCorpus raw{toy.lines, toy.labels(attribute)};
  return encode_corpus_lines(raw, vocab, std::move(name));
}

}  // namespace nst
