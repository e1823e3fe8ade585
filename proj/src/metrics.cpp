#include "nst/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "json.hpp"

#include "nst/errors.hpp"

namespace nst {

EvalReport aggregate(double acc, double bleu) {
  if (!(acc >= 0.0) || !(bleu >= 0.0)) throw UsageError("acc and bleu must be non-negative");
  return EvalReport{acc, bleu, std::sqrt(acc * bleu), 0.5 * (acc + bleu)};
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["acc"] = acc;
  j["bleu"] = bleu;
  j["g_score"] = g_score;
  j["mean"] = mean;
  return j.dump();
}

std::string EvalReport::to_table() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%8s %8s %8s %8s\n%8.2f %8.2f %8.2f %8.2f\n", "Acc", "BLEU",
                "G-Score", "Mean", acc, bleu, g_score, mean);
  return buf;
}

}  // namespace nst
