#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace covtweet::corpus {

enum class Label { Informative, Uninformative };

// Case-insensitive. Anything other than the two label names is a DataError.
Label parse_label(std::string_view s);
std::string_view label_name(Label l);

struct Tweet {
  std::string id;
  std::string text;
  std::optional<Label> label;
};

struct Dataset {
  std::string name;
  std::vector<Tweet> tweets;

  std::size_t size() const { return tweets.size(); }
  bool empty() const { return tweets.empty(); }
};

struct CorpusStats {
  std::int64_t count_informative = 0;
  std::int64_t count_uninformative = 0;
  std::int64_t wc_max = 0;
  std::int64_t wc_min = 0;
  double wc_avg = 0.0;  // whitespace-separated words per tweet
};

// Shared-task file layout: one header row, then `Id<TAB>Text<TAB>Label`
// lines. An empty label field or "?" loads as an unlabeled tweet (the test
// split ships without labels).
Dataset load_tsv(const std::filesystem::path& path);

// (informative, uninformative). Every tweet must be labeled.
std::pair<std::int64_t, std::int64_t> class_counts(const Dataset& d);

// Word-count stats over tweet texts; class counts are filled in when the
// whole dataset is labeled. Errors on an empty dataset.
CorpusStats word_count_stats(const Dataset& d);

// Uniform random 9:1 split, ceil(0.9*n) tweets in the first part. The
// permutation is fully determined by the seed. Requires n >= 10.
std::pair<Dataset, Dataset> split_train_dev(const Dataset& d,
                                            std::uint64_t seed);

}  // namespace covtweet::corpus
