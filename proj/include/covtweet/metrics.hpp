#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "covtweet/corpus.hpp"

namespace covtweet::metrics {

// Confusion counts and derived scores with INFORMATIVE as the positive
// class. Precision/recall/F1 are 0 when their denominator is 0.
struct EvalReport {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
};

EvalReport evaluate(const std::vector<corpus::Label>& preds,
                    const std::vector<corpus::Label>& golds);

nlohmann::json to_json(const EvalReport& report);

// Aligned plain-text table.
std::string format_table(const EvalReport& report);

}  // namespace covtweet::metrics
