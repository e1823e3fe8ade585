#pragma once

#include <string>

namespace nst {

// Transfer accuracy (percent) and BLEU (0-100) with their geometric
// (G-Score) and arithmetic (Mean) aggregates.
struct EvalReport {
  double acc = 0.0;
  double bleu = 0.0;
  double g_score = 0.0;
  double mean = 0.0;

  // Single-line JSON object with keys acc, bleu, g_score, mean.
  std::string to_json() const;
  // Aligned two-line text table.
  std::string to_table() const;
};

EvalReport aggregate(double acc, double bleu);

}  // namespace nst
