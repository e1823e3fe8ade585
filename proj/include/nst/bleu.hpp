#pragma once

#include <span>
#include <string>
#include <vector>

namespace nst {

// Corpus-level BLEU in [0, 100] with one reference per candidate.
//
// Clipped n-gram matches and candidate n-gram totals are summed over the
// corpus for n = 1..4. p_1 = m_1 / t_1; for n >= 2 a zero match count is
// smoothed to p_n = 1 / (t_n + 1). The brevity penalty exp(1 - r/c) applies
// when the total candidate length c is below the total reference length r.
double bleu(std::span<const std::vector<std::string>> candidates,
            std::span<const std::vector<std::string>> references);

struct BleuStats {
  std::vector<double> matches;  // index n-1
  std::vector<double> totals;
  double candidate_length = 0.0;
  double reference_length = 0.0;
};

BleuStats bleu_stats(std::span<const std::vector<std::string>> candidates,
                     std::span<const std::vector<std::string>> references, int max_order = 4);

double bleu_from_stats(const BleuStats& stats);

}  // namespace nst
