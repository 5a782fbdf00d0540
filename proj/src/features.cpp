#include "covtweet/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "covtweet/errors.hpp"

namespace covtweet::features {

namespace {

bool is_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' ||
         (c >= 'A' && c <= 'Z');
}

// term index -> count, sorted by construction (std::map).
std::map<std::int32_t, double> term_counts(std::string_view text,
                                           const Vocabulary& vocab) {
  std::map<std::int32_t, double> counts;
  for (const std::string& term : tokenize_terms(text)) {
    const auto it = vocab.term_to_index.find(term);
    if (it != vocab.term_to_index.end()) {
      counts[it->second] += 1.0;
    }
  }
  return counts;
}

}  // namespace

double SparseVector::at(std::int32_t index) const {
  const auto it = std::lower_bound(indices.begin(), indices.end(), index);
  if (it == indices.end() || *it != index) return 0.0;
  return values[static_cast<std::size_t>(it - indices.begin())];
}

std::vector<std::string> tokenize_terms(std::string_view text) {
  std::vector<std::string> terms;
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_word_char(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < text.size() && is_word_char(text[j])) ++j;
    if (j - i >= 2) {
      terms.emplace_back(text.substr(i, j - i));
    }
    i = j;
  }
  return terms;
}

Vocabulary build_vocabulary(const std::vector<std::string>& corpus) {
  if (corpus.empty()) {
    throw DataError("build_vocabulary: empty corpus");
  }
  std::map<std::string, std::int32_t> sorted_terms;
  for (const std::string& doc : corpus) {
    for (std::string& term : tokenize_terms(doc)) {
      sorted_terms.emplace(std::move(term), 0);
    }
  }
  Vocabulary vocab;
  vocab.index_to_term.reserve(sorted_terms.size());
  for (auto& [term, unused] : sorted_terms) {
    vocab.term_to_index.emplace(term,
                                static_cast<std::int32_t>(vocab.size()));
    vocab.index_to_term.push_back(term);
  }
  return vocab;
}

SparseVector bow_vector(std::string_view text, const Vocabulary& vocab) {
  SparseVector v;
  v.dim = vocab.size();
  for (const auto& [index, count] : term_counts(text, vocab)) {
    v.indices.push_back(index);
    v.values.push_back(count);
  }
  return v;
}

TfidfModel tfidf_fit(const std::vector<std::string>& corpus) {
  TfidfModel model;
  model.vocab = build_vocabulary(corpus);  // errors on an empty corpus
  model.n_docs = static_cast<std::int64_t>(corpus.size());
  std::vector<std::int64_t> df(static_cast<std::size_t>(model.vocab.size()),
                               0);
  for (const std::string& doc : corpus) {
    for (const auto& [index, unused] : term_counts(doc, model.vocab)) {
      df[static_cast<std::size_t>(index)] += 1;
    }
  }
  model.idf.resize(df.size());
  for (std::size_t t = 0; t < df.size(); ++t) {
    model.idf[t] = std::log(static_cast<double>(1 + model.n_docs) /
                            static_cast<double>(1 + df[t])) +
                   1.0;
  }
  return model;
}

SparseVector tfidf_transform(std::string_view text, const TfidfModel& model) {
  SparseVector v;
  v.dim = model.vocab.size();
  double norm_sq = 0.0;
  for (const auto& [index, count] : term_counts(text, model.vocab)) {
    const double w = count * model.idf[static_cast<std::size_t>(index)];
    v.indices.push_back(index);
    v.values.push_back(w);
    norm_sq += w * w;
  }
  if (norm_sq > 0.0) {
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (double& w : v.values) w *= inv;
  }
  return v;
}

void dump_vocabulary_tsv(std::ostream& out, const TfidfModel& model) {
  for (std::int32_t t = 0; t < model.vocab.size(); ++t) {
    out << model.vocab.index_to_term[static_cast<std::size_t>(t)] << '\t' << t
        << '\t' << model.idf[static_cast<std::size_t>(t)] << '\n';
  }
}

}  // namespace covtweet::features
