#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "covtweet/corpus.hpp"
#include "covtweet/errors.hpp"
#include "covtweet/rng.hpp"
#include "test_util.hpp"

using namespace covtweet;
using corpus::Dataset;
using corpus::Label;
using testutil::write_temp_file;

TEST_CASE("load_tsv maps fields directly") {
  const auto path = write_temp_file(
      "corpus_basic.tsv", "Id\tText\tLabel\nx1\thello covid\tINFORMATIVE\n");
  const Dataset d = corpus::load_tsv(path);
  REQUIRE(d.size() == 1);
  CHECK(d.tweets[0].id == "x1");
  CHECK(d.tweets[0].text == "hello covid");
  CHECK(d.tweets[0].label == Label::Informative);
}

TEST_CASE("load_tsv with only a header yields an empty dataset") {
  const auto path = write_temp_file("corpus_empty.tsv", "Id\tText\tLabel\n");
  CHECK(corpus::load_tsv(path).empty());
}

TEST_CASE("load_tsv parses labels case-insensitively") {
  const auto path = write_temp_file(
      "corpus_case.tsv",
      "Id\tText\tLabel\na\tt1\tinformative\nb\tt2\tUninformative\n");
  const Dataset d = corpus::load_tsv(path);
  CHECK(d.tweets[0].label == Label::Informative);
  CHECK(d.tweets[1].label == Label::Uninformative);
}

TEST_CASE("load_tsv keeps unlabeled rows unlabeled") {
  const auto path = write_temp_file(
      "corpus_unlabeled.tsv", "Id\tText\tLabel\na\tt1\t?\nb\tt2\t\n");
  const Dataset d = corpus::load_tsv(path);
  CHECK_FALSE(d.tweets[0].label.has_value());
  CHECK_FALSE(d.tweets[1].label.has_value());
}

TEST_CASE("load_tsv errors name the offending line") {
  const auto two_fields = write_temp_file(
      "corpus_fields.tsv", "Id\tText\tLabel\nok\tt\tINFORMATIVE\nbad line\n");
  CHECK_THROWS_WITH_AS(corpus::load_tsv(two_fields),
                       doctest::Contains(":3:"), DataError);

  const auto bad_label = write_temp_file(
      "corpus_label.tsv", "Id\tText\tLabel\na\tt\tMAYBE\n");
  CHECK_THROWS_WITH_AS(corpus::load_tsv(bad_label),
                       doctest::Contains("MAYBE"), DataError);

  const auto dup_id = write_temp_file(
      "corpus_dup.tsv",
      "Id\tText\tLabel\na\tt\tINFORMATIVE\na\tu\tINFORMATIVE\n");
  CHECK_THROWS_AS(corpus::load_tsv(dup_id), DataError);

  CHECK_THROWS_AS(corpus::load_tsv("/nonexistent/file.tsv"), DataError);
}

namespace {

Dataset make_dataset(const std::vector<std::pair<std::string, Label>>& rows) {
  Dataset d;
  d.name = "test";
  int i = 0;
  for (const auto& [text, label] : rows) {
    d.tweets.push_back({"t" + std::to_string(i++), text, label});
  }
  return d;
}

}  // namespace

TEST_CASE("class_counts") {
  CHECK(corpus::class_counts(Dataset{}) ==
        std::pair<std::int64_t, std::int64_t>{0, 0});
  const Dataset d = make_dataset({{"a", Label::Informative},
                                  {"b", Label::Uninformative},
                                  {"c", Label::Uninformative}});
  CHECK(corpus::class_counts(d) ==
        std::pair<std::int64_t, std::int64_t>{1, 2});

  Dataset unlabeled = d;
  unlabeled.tweets[1].label.reset();
  CHECK_THROWS_AS(corpus::class_counts(unlabeled), DataError);
}

TEST_CASE("class_counts components sum to dataset size") {
  auto eng = rng::make_engine(7);
  for (int round = 0; round < 20; ++round) {
    Dataset d;
    const auto n = rng::below(eng, 40);
    for (std::uint64_t i = 0; i < n; ++i) {
      d.tweets.push_back({"t" + std::to_string(i), "x",
                          rng::below(eng, 2) == 0 ? Label::Informative
                                                  : Label::Uninformative});
    }
    const auto [pos, neg] = corpus::class_counts(d);
    CHECK(pos + neg == static_cast<std::int64_t>(d.size()));
  }
}

TEST_CASE("word_count_stats on a single tweet") {
  const Dataset d = make_dataset({{"a b c", Label::Informative}});
  const auto stats = corpus::word_count_stats(d);
  CHECK(stats.wc_max == 3);
  CHECK(stats.wc_min == 3);
  CHECK(stats.wc_avg == doctest::Approx(3.0));
  CHECK(stats.count_informative == 1);
}

TEST_CASE("word_count_stats counts unicode whitespace separations") {
  // U+00A0 no-break space and U+2003 em space both separate words
  const Dataset d =
      make_dataset({{"one\xC2\xA0two\xE2\x80\x83three", Label::Informative}});
  CHECK(corpus::word_count_stats(d).wc_max == 3);
}

TEST_CASE("word_count_stats rejects an empty dataset") {
  CHECK_THROWS_AS(corpus::word_count_stats(Dataset{}), DataError);
}

TEST_CASE("word_count_stats of identical tweets has max = min = avg") {
  auto eng = rng::make_engine(11);
  for (int round = 0; round < 10; ++round) {
    const auto words = 1 + rng::below(eng, 30);
    std::string text;
    for (std::uint64_t w = 0; w < words; ++w) {
      if (!text.empty()) text += ' ';
      text += "w" + std::to_string(w);
    }
    Dataset d;
    const auto n = 1 + rng::below(eng, 15);
    for (std::uint64_t i = 0; i < n; ++i) {
      d.tweets.push_back({"t" + std::to_string(i), text, Label::Informative});
    }
    const auto stats = corpus::word_count_stats(d);
    CHECK(stats.wc_max == stats.wc_min);
    CHECK(stats.wc_avg == doctest::Approx(static_cast<double>(stats.wc_max)));
  }
}

TEST_CASE("split_train_dev splits 10 tweets into 9 + 1") {
  Dataset d;
  for (int i = 0; i < 10; ++i) {
    d.tweets.push_back({"t" + std::to_string(i), "x", Label::Informative});
  }
  const auto [train, dev] = corpus::split_train_dev(d, 0);
  CHECK(train.size() == 9);
  CHECK(dev.size() == 1);

  std::multiset<std::string> all;
  for (const auto& t : train.tweets) all.insert(t.id);
  for (const auto& t : dev.tweets) all.insert(t.id);
  std::multiset<std::string> expected;
  for (const auto& t : d.tweets) expected.insert(t.id);
  CHECK(all == expected);
}

TEST_CASE("split_train_dev is deterministic per seed") {
  Dataset d;
  for (int i = 0; i < 57; ++i) {
    d.tweets.push_back({"t" + std::to_string(i), "x", Label::Informative});
  }
  const auto [a_train, a_dev] = corpus::split_train_dev(d, 123);
  const auto [b_train, b_dev] = corpus::split_train_dev(d, 123);
  REQUIRE(a_train.size() == b_train.size());
  for (std::size_t i = 0; i < a_train.size(); ++i) {
    CHECK(a_train.tweets[i].id == b_train.tweets[i].id);
  }
  for (std::size_t i = 0; i < a_dev.size(); ++i) {
    CHECK(a_dev.tweets[i].id == b_dev.tweets[i].id);
  }

  const auto [c_train, c_dev] = corpus::split_train_dev(d, 124);
  bool any_difference = c_dev.size() != a_dev.size();
  for (std::size_t i = 0; !any_difference && i < a_dev.size(); ++i) {
    any_difference = a_dev.tweets[i].id != c_dev.tweets[i].id;
  }
  CHECK(any_difference);
}

TEST_CASE("split_train_dev sizes and disjointness over random sizes") {
  auto eng = rng::make_engine(13);
  for (int round = 0; round < 15; ++round) {
    Dataset d;
    const auto n = 10 + rng::below(eng, 200);
    for (std::uint64_t i = 0; i < n; ++i) {
      d.tweets.push_back({"t" + std::to_string(i), "x", Label::Informative});
    }
    const auto [train, dev] = corpus::split_train_dev(d, eng());
    const auto expected_train =
        static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(n)));
    CHECK(train.size() == expected_train);
    CHECK(train.size() + dev.size() == n);
    std::set<std::string> train_ids;
    for (const auto& t : train.tweets) train_ids.insert(t.id);
    for (const auto& t : dev.tweets) {
      CHECK(train_ids.count(t.id) == 0);
    }
  }
}

TEST_CASE("split_train_dev rejects datasets below 10 tweets") {
  Dataset d;
  for (int i = 0; i < 9; ++i) {
    d.tweets.push_back({"t" + std::to_string(i), "x", Label::Informative});
  }
  CHECK_THROWS_AS(corpus::split_train_dev(d, 0), DataError);
}

TEST_CASE("bundled mini corpus has the pinned shape") {
  const Dataset train = corpus::load_tsv(testutil::mini_train_tsv());
  const Dataset valid = corpus::load_tsv(testutil::mini_valid_tsv());
  CHECK(train.size() == 700);
  CHECK(valid.size() == 100);
  CHECK(corpus::class_counts(train) ==
        std::pair<std::int64_t, std::int64_t>{330, 370});
  CHECK(corpus::class_counts(valid) ==
        std::pair<std::int64_t, std::int64_t>{47, 53});
  // the official 7000-tweet train file would split 6300 + 700; scaled here
  const auto [fit_part, dev_part] = corpus::split_train_dev(train, 0);
  CHECK(fit_part.size() == 630);
  CHECK(dev_part.size() == 70);
}
