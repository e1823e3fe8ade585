#include "nst/bleu.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "nst/errors.hpp"

namespace nst {

namespace {

struct NgramHash {
  std::size_t operator()(const std::vector<std::string>& gram) const {
    std::size_t h = 0;
    for (const auto& tok : gram) {
      h ^= std::hash<std::string>{}(tok) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

using NgramCounts = std::unordered_map<std::vector<std::string>, int, NgramHash>;

NgramCounts count_ngrams(const std::vector<std::string>& tokens, std::size_t n) {
  NgramCounts counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                      tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

}  // namespace

BleuStats bleu_stats(std::span<const std::vector<std::string>> candidates,
                     std::span<const std::vector<std::string>> references, int max_order) {
  if (candidates.size() != references.size()) {
    throw UsageError("bleu: candidate and reference counts differ");
  }
  if (candidates.empty()) throw UsageError("bleu: no sentences");
  BleuStats stats;
  stats.matches.assign(static_cast<std::size_t>(max_order), 0.0);
  stats.totals.assign(static_cast<std::size_t>(max_order), 0.0);
  for (std::size_t s = 0; s < candidates.size(); ++s) {
    const auto& cand = candidates[s];
    const auto& ref = references[s];
    stats.candidate_length += static_cast<double>(cand.size());
    stats.reference_length += static_cast<double>(ref.size());
    for (int n = 1; n <= max_order; ++n) {
      const auto un = static_cast<std::size_t>(n);
      const NgramCounts cand_counts = count_ngrams(cand, un);
      const NgramCounts ref_counts = count_ngrams(ref, un);
      for (const auto& [gram, count] : cand_counts) {
        auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) stats.matches[un - 1] += std::min(count, it->second);
      }
      if (cand.size() >= un) stats.totals[un - 1] += static_cast<double>(cand.size() - un + 1);
    }
  }
  return stats;
}

double bleu_from_stats(const BleuStats& stats) {
  if (stats.candidate_length == 0.0 || stats.matches.empty() || stats.matches[0] == 0.0) {
    return 0.0;
  }
  double log_sum = 0.0;
  const std::size_t orders = stats.matches.size();
  for (std::size_t k = 0; k < orders; ++k) {
    const double p = (k > 0 && stats.matches[k] == 0.0)
                         ? 1.0 / (stats.totals[k] + 1.0)
                         : stats.matches[k] / stats.totals[k];
    log_sum += std::log(p);
  }
  double bp = 1.0;
  if (stats.candidate_length < stats.reference_length) {
    bp = std::exp(1.0 - stats.reference_length / stats.candidate_length);
  }
  return std::clamp(100.0 * bp * std::exp(log_sum / static_cast<double>(orders)), 0.0, 100.0);
}

double bleu(std::span<const std::vector<std::string>> candidates,
            std::span<const std::vector<std::string>> references) {
  return bleu_from_stats(bleu_stats(candidates, references));
}

}  // namespace nst
