#include <doctest.h>

#include <cmath>
#include <sstream>

#include "covtweet/errors.hpp"
#include "covtweet/features.hpp"
#include "covtweet/rng.hpp"
#include "oracles.hpp"

using namespace covtweet;
using features::SparseVector;

TEST_CASE("tokenize_terms") {
  CHECK(features::tokenize_terms("covid cases rise") ==
        std::vector<std::string>{"covid", "cases", "rise"});
  CHECK(features::tokenize_terms("a i u").empty());
  CHECK(features::tokenize_terms("covid-19") ==
        std::vector<std::string>{"covid", "19"});
  CHECK(features::tokenize_terms("").empty());
}

TEST_CASE("build_vocabulary assigns lexicographic indices") {
  const auto vocab =
      features::build_vocabulary({"covid cases", "covid vaccine"});
  REQUIRE(vocab.size() == 3);
  CHECK(vocab.term_to_index.at("cases") == 0);
  CHECK(vocab.term_to_index.at("covid") == 1);
  CHECK(vocab.term_to_index.at("vaccine") == 2);

  const auto single = features::build_vocabulary({"aa aa"});
  CHECK(single.size() == 1);
  CHECK(single.term_to_index.at("aa") == 0);

  CHECK_THROWS_AS(features::build_vocabulary({}), DataError);
}

TEST_CASE("bow_vector counts in-vocabulary terms") {
  const auto vocab =
      features::build_vocabulary({"covid cases", "covid vaccine"});
  const auto v = features::bow_vector("covid covid cases", vocab);
  CHECK(v.dim == 3);
  CHECK(v.indices == std::vector<std::int32_t>{0, 1});
  CHECK(v.values == std::vector<double>{1.0, 2.0});

  const auto zero = features::bow_vector("completely unrelated", vocab);
  CHECK(zero.nnz() == 0);
}

TEST_CASE("bow value sum equals in-vocab occurrences on random texts") {
  auto eng = rng::make_engine(17);
  for (int round = 0; round < 50; ++round) {
    const auto corpus = oracles::random_micro_corpus(eng);
    bool all_empty = true;
    for (const auto& d : corpus.doc_terms) all_empty = all_empty && d.empty();
    if (all_empty) continue;
    const auto vocab = features::build_vocabulary(corpus.docs);
    for (std::size_t d = 0; d < corpus.docs.size(); ++d) {
      const auto v = features::bow_vector(corpus.docs[d], vocab);
      double total = 0.0;
      for (const double x : v.values) total += x;
      // independent recount
      double expected = 0.0;
      for (const auto& term : corpus.doc_terms[d]) {
        if (vocab.term_to_index.count(term) > 0) expected += 1.0;
      }
      CHECK(total == doctest::Approx(expected).epsilon(1e-12));
      for (std::size_t k = 1; k < v.indices.size(); ++k) {
        CHECK(v.indices[k] > v.indices[k - 1]);  // strictly increasing
      }
      for (const double x : v.values) CHECK(x > 0.0);
    }
  }
}

TEST_CASE("tfidf_fit matches the hand-evaluated formula") {
  const auto model = features::tfidf_fit({"covid cases", "covid vaccine"});
  CHECK(model.n_docs == 2);
  const auto idx_covid = model.vocab.term_to_index.at("covid");
  const auto idx_cases = model.vocab.term_to_index.at("cases");
  CHECK(model.idf[idx_covid] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(model.idf[idx_cases] ==
        doctest::Approx(1.4054651081081644).epsilon(1e-12));
  CHECK_THROWS_AS(features::tfidf_fit({}), DataError);
}

TEST_CASE("a term in every document has idf exactly 1") {
  const auto model =
      features::tfidf_fit({"aa bb", "aa cc", "aa dd", "aa ee"});
  CHECK(model.idf[model.vocab.term_to_index.at("aa")] == 1.0);
}

TEST_CASE("tfidf_transform hand evaluation and normalization") {
  const auto model = features::tfidf_fit({"covid cases", "covid vaccine"});
  const auto v = features::tfidf_transform("covid cases", model);
  const double w_covid = 1.0;
  const double w_cases = 1.4054651081081644;
  const double norm = std::sqrt(w_covid * w_covid + w_cases * w_cases);
  CHECK(v.at(model.vocab.term_to_index.at("covid")) ==
        doctest::Approx(w_covid / norm).epsilon(1e-12));
  CHECK(v.at(model.vocab.term_to_index.at("cases")) ==
        doctest::Approx(w_cases / norm).epsilon(1e-12));

  double norm_sq = 0.0;
  for (const double x : v.values) norm_sq += x * x;
  CHECK(std::abs(std::sqrt(norm_sq) - 1.0) < 1e-9);

  CHECK(features::tfidf_transform("all oov terms", model).nnz() == 0);
}

TEST_CASE("tfidf matches the brute-force oracle on random micro corpora") {
  auto eng = rng::make_engine(23);
  int checked = 0;
  for (int round = 0; round < 120 && checked < 100; ++round) {
    const auto corpus = oracles::random_micro_corpus(eng);
    bool all_empty = true;
    for (const auto& d : corpus.doc_terms) all_empty = all_empty && d.empty();
    if (all_empty) continue;
    ++checked;
    const auto model = features::tfidf_fit(corpus.docs);
    for (std::size_t d = 0; d < corpus.docs.size(); ++d) {
      const auto got = features::tfidf_transform(corpus.docs[d], model);
      const auto expected = oracles::tfidf_oracle_weights(corpus, d);
      REQUIRE(got.nnz() == expected.size());
      for (const auto& [term, weight] : expected) {
        const auto idx = model.vocab.term_to_index.at(term);
        CHECK(std::abs(got.at(idx) - weight) < 1e-12);
      }
    }
  }
  CHECK(checked == 100);
}

TEST_CASE("document order does not change fitted idf values") {
  const std::vector<std::string> docs = {"aa bb cc", "aa", "bb bb dd",
                                         "aa cc"};
  std::vector<std::string> reversed(docs.rbegin(), docs.rend());
  const auto a = features::tfidf_fit(docs);
  const auto b = features::tfidf_fit(reversed);
  REQUIRE(a.vocab.size() == b.vocab.size());
  for (std::int32_t t = 0; t < a.vocab.size(); ++t) {
    CHECK(a.idf[t] == b.idf[t]);  // identical, not just approximate
    CHECK(a.vocab.index_to_term[t] == b.vocab.index_to_term[t]);
  }
}

TEST_CASE("vocabulary dump is term<TAB>index<TAB>idf") {
  const auto model = features::tfidf_fit({"bb aa", "aa"});
  std::ostringstream out;
  features::dump_vocabulary_tsv(out, model);
  std::istringstream in(out.str());
  std::string term;
  int index = -1;
  double idf = 0.0;
  REQUIRE((in >> term >> index >> idf));
  CHECK(term == "aa");
  CHECK(index == 0);
  CHECK(idf == doctest::Approx(1.0));
  REQUIRE((in >> term >> index >> idf));
  CHECK(term == "bb");
  CHECK(index == 1);
  CHECK(idf == doctest::Approx(std::log(3.0 / 2.0) + 1.0));
}
