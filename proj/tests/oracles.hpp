#pragma once

// Independent brute-force oracles for the equivalence suites. These
// deliberately re-derive everything with plain loops and must stay
// decoupled from the library implementations they check.

#include <array>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "covtweet/corpus.hpp"
#include "covtweet/features.hpp"
#include "covtweet/rng.hpp"

namespace covtweet::oracles {

// ------------------------------------------------------------------ tfidf --

struct TfidfOracleCorpus {
  std::vector<std::string> docs;                        // space-joined terms
  std::vector<std::vector<std::string>> doc_terms;      // per doc
};

inline TfidfOracleCorpus random_micro_corpus(rng::Engine& eng) {
  static const std::array<const char*, 8> kTerms = {
      "aa", "bb", "cc", "dd", "ee", "ff", "gg", "hh"};
  TfidfOracleCorpus corpus;
  const auto n_docs = 1 + rng::below(eng, 10);
  const auto alphabet = 1 + rng::below(eng, 8);
  for (std::uint64_t d = 0; d < n_docs; ++d) {
    const auto n_tokens = rng::below(eng, 12);
    std::vector<std::string> terms;
    std::string text;
    for (std::uint64_t t = 0; t < n_tokens; ++t) {
      const std::string term = kTerms[rng::below(eng, alphabet)];
      terms.push_back(term);
      if (!text.empty()) text += ' ';
      text += term;
    }
    corpus.doc_terms.push_back(std::move(terms));
    corpus.docs.push_back(std::move(text));
  }
  return corpus;
}

// Term -> tf-idf weight for one document, straight from the formula:
// count * (ln((1+N)/(1+df)) + 1), then L2 normalization.
inline std::map<std::string, double> tfidf_oracle_weights(
    const TfidfOracleCorpus& corpus, std::size_t doc) {
  const auto n = static_cast<double>(corpus.docs.size());
  std::map<std::string, double> weights;
  for (const std::string& term : corpus.doc_terms[doc]) {
    weights[term] += 1.0;
  }
  double norm_sq = 0.0;
  for (auto& [term, count] : weights) {
    double df = 0.0;
    for (const auto& other : corpus.doc_terms) {
      for (const auto& t : other) {
        if (t == term) {
          df += 1.0;
          break;
        }
      }
    }
    count *= std::log((1.0 + n) / (1.0 + df)) + 1.0;
    norm_sq += count * count;
  }
  if (norm_sq > 0.0) {
    for (auto& [term, w] : weights) w /= std::sqrt(norm_sq);
  }
  return weights;
}

// ------------------------------------------------------------ naive bayes --

struct NbToySet {
  std::vector<std::vector<double>> counts;  // doc x term
  std::vector<corpus::Label> labels;
  double alpha = 1.0;
};

inline NbToySet random_nb_toy_set(rng::Engine& eng) {
  NbToySet set;
  const auto n_docs = 2 + rng::below(eng, 7);
  const auto n_terms = 1 + rng::below(eng, 6);
  static const std::array<double, 3> kAlphas = {0.5, 1.0, 2.0};
  set.alpha = kAlphas[rng::below(eng, 3)];
  for (std::uint64_t d = 0; d < n_docs; ++d) {
    std::vector<double> row;
    for (std::uint64_t t = 0; t < n_terms; ++t) {
      row.push_back(static_cast<double>(rng::below(eng, 5)));
    }
    set.counts.push_back(std::move(row));
    // force both classes to appear
    const bool informative =
        d == 0 || (d != 1 && rng::below(eng, 2) == 0);
    set.labels.push_back(informative ? corpus::Label::Informative
                                     : corpus::Label::Uninformative);
  }
  return set;
}

// P(informative | doc), by direct probability arithmetic over the joint
// counts (no log-space tricks).
inline double nb_oracle_posterior(const NbToySet& set, std::size_t doc) {
  const std::size_t v = set.counts[0].size();
  std::array<double, 2> prior{0.0, 0.0};
  std::array<std::vector<double>, 2> class_counts{
      std::vector<double>(v, 0.0), std::vector<double>(v, 0.0)};
  for (std::size_t d = 0; d < set.counts.size(); ++d) {
    const int c = set.labels[d] == corpus::Label::Informative ? 0 : 1;
    prior[c] += 1.0;
    for (std::size_t t = 0; t < v; ++t) {
      class_counts[c][t] += set.counts[d][t];
    }
  }
  std::array<double, 2> likelihood{1.0, 1.0};
  for (int c = 0; c < 2; ++c) {
    prior[c] /= static_cast<double>(set.counts.size());
    double total = set.alpha * static_cast<double>(v);
    for (std::size_t t = 0; t < v; ++t) total += class_counts[c][t];
    for (std::size_t t = 0; t < v; ++t) {
      const double theta = (class_counts[c][t] + set.alpha) / total;
      likelihood[c] *= std::pow(theta, set.counts[doc][t]);
    }
  }
  const double joint0 = prior[0] * likelihood[0];
  const double joint1 = prior[1] * likelihood[1];
  return joint0 / (joint0 + joint1);
}

inline features::SparseVector dense_to_sparse(const std::vector<double>& row) {
  features::SparseVector x;
  x.dim = static_cast<std::int32_t>(row.size());
  for (std::size_t t = 0; t < row.size(); ++t) {
    if (row[t] != 0.0) {
      x.indices.push_back(static_cast<std::int32_t>(t));
      x.values.push_back(row[t]);
    }
  }
  return x;
}

}  // namespace covtweet::oracles
