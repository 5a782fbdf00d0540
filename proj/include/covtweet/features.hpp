#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace covtweet::features {

struct Vocabulary {
  std::unordered_map<std::string, std::int32_t> term_to_index;
  std::vector<std::string> index_to_term;

  std::int32_t size() const {
    return static_cast<std::int32_t>(index_to_term.size());
  }
};

// Sorted indices with non-zero parallel values.
struct SparseVector {
  std::vector<std::int32_t> indices;
  std::vector<double> values;
  std::int32_t dim = 0;

  std::size_t nnz() const { return indices.size(); }
  // 0.0 for absent indices.
  double at(std::int32_t index) const;
};

struct TfidfModel {
  Vocabulary vocab;
  std::vector<double> idf;  // parallel to vocab indices
  std::int64_t n_docs = 0;
};

// Maximal runs of >= 2 word characters ([a-z0-9_]) of cleaned text.
std::vector<std::string> tokenize_terms(std::string_view text);

// Distinct terms across the corpus, indexed in lexicographic order.
Vocabulary build_vocabulary(const std::vector<std::string>& corpus);

// Raw term counts; out-of-vocabulary terms are ignored.
SparseVector bow_vector(std::string_view text, const Vocabulary& vocab);

// idf[t] = ln((1 + N) / (1 + df(t))) + 1.
TfidfModel tfidf_fit(const std::vector<std::string>& corpus);

// count(t) * idf[t], L2-normalized. All-OOV text stays the zero vector.
SparseVector tfidf_transform(std::string_view text, const TfidfModel& model);

// `term<TAB>index<TAB>idf` rows.
void dump_vocabulary_tsv(std::ostream& out, const TfidfModel& model);

}  // namespace covtweet::features
