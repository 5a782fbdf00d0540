#include "covtweet/metrics.hpp"

#include <cstdio>

#include "covtweet/errors.hpp"

namespace covtweet::metrics {

using corpus::Label;

EvalReport evaluate(const std::vector<Label>& preds,
                    const std::vector<Label>& golds) {
  if (preds.empty() || preds.size() != golds.size()) {
    throw DataError("evaluate: got " + std::to_string(preds.size()) +
                    " predictions for " + std::to_string(golds.size()) +
                    " gold labels");
  }
  EvalReport r;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const bool pred_pos = preds[i] == Label::Informative;
    const bool gold_pos = golds[i] == Label::Informative;
    if (pred_pos && gold_pos) {
      ++r.tp;
    } else if (pred_pos) {
      ++r.fp;
    } else if (gold_pos) {
      ++r.fn;
    } else {
      ++r.tn;
    }
  }
  const auto ratio = [](std::int64_t num, std::int64_t den) {
    return den == 0 ? 0.0
                    : static_cast<double>(num) / static_cast<double>(den);
  };
  r.precision = ratio(r.tp, r.tp + r.fp);
  r.recall = ratio(r.tp, r.tp + r.fn);
  r.f1 = (r.precision + r.recall) > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  r.accuracy = ratio(r.tp + r.tn, r.tp + r.fp + r.fn + r.tn);
  return r;
}

nlohmann::json to_json(const EvalReport& r) {
  return nlohmann::json{{"tp", r.tp},
                        {"fp", r.fp},
                        {"fn", r.fn},
                        {"tn", r.tn},
                        {"precision", r.precision},
                        {"recall", r.recall},
                        {"f1", r.f1},
                        {"accuracy", r.accuracy}};
}

std::string format_table(const EvalReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "                 pred INF   pred UNINF\n"
                "gold INF       %9lld    %9lld\n"
                "gold UNINF     %9lld    %9lld\n"
                "precision %.5f  recall %.5f  f1 %.5f  accuracy %.5f\n",
                static_cast<long long>(r.tp), static_cast<long long>(r.fn),
                static_cast<long long>(r.fp), static_cast<long long>(r.tn),
                r.precision, r.recall, r.f1, r.accuracy);
  return buf;
}

}  // namespace covtweet::metrics
