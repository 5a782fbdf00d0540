#include "covtweet/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "covtweet/errors.hpp"
#include "covtweet/rng.hpp"
#include "covtweet/unicode.hpp"

namespace covtweet::corpus {

namespace {

std::string ascii_upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 32);
  }
  return out;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

}  // namespace

Label parse_label(std::string_view s) {
  const std::string up = ascii_upper(s);
  if (up == "INFORMATIVE") return Label::Informative;
  if (up == "UNINFORMATIVE") return Label::Uninformative;
  throw DataError("unknown label: \"" + std::string(s) + "\"");
}

std::string_view label_name(Label l) {
  return l == Label::Informative ? "INFORMATIVE" : "UNINFORMATIVE";
}

Dataset load_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open dataset file: " + path.string());
  }
  Dataset d;
  d.name = path.filename().string();

  std::string line;
  if (!std::getline(in, line)) {
    throw DataError(path.string() + ": missing header line");
  }

  std::unordered_set<std::string> seen_ids;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto fields = split_tabs(line);
    if (fields.size() != 3) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected 3 tab-separated fields, got " +
                      std::to_string(fields.size()));
    }
    Tweet t;
    t.id = std::string(fields[0]);
    t.text = std::string(fields[1]);
    if (t.id.empty()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": empty tweet id");
    }
    if (t.text.empty()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": empty tweet text");
    }
    if (!seen_ids.insert(t.id).second) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": duplicate tweet id \"" + t.id + "\"");
    }
    if (!(fields[2].empty() || fields[2] == "?")) {
      try {
        t.label = parse_label(fields[2]);
      } catch (const DataError& e) {
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": " +
                        e.what());
      }
    }
    d.tweets.push_back(std::move(t));
  }
  return d;
}

std::pair<std::int64_t, std::int64_t> class_counts(const Dataset& d) {
  std::int64_t informative = 0;
  std::int64_t uninformative = 0;
  for (const Tweet& t : d.tweets) {
    if (!t.label) {
      throw DataError("dataset \"" + d.name + "\": tweet " + t.id +
                      " is unlabeled");
    }
    (*t.label == Label::Informative ? informative : uninformative) += 1;
  }
  return {informative, uninformative};
}

CorpusStats word_count_stats(const Dataset& d) {
  if (d.empty()) {
    throw DataError("word_count_stats: dataset \"" + d.name + "\" is empty");
  }
  CorpusStats stats;
  stats.wc_min = std::numeric_limits<std::int64_t>::max();
  std::int64_t total = 0;
  bool all_labeled = true;
  for (const Tweet& t : d.tweets) {
    const auto wc = static_cast<std::int64_t>(unicode::count_words(t.text));
    stats.wc_max = std::max(stats.wc_max, wc);
    stats.wc_min = std::min(stats.wc_min, wc);
    total += wc;
    all_labeled = all_labeled && t.label.has_value();
  }
  stats.wc_avg = static_cast<double>(total) / static_cast<double>(d.size());
  if (all_labeled) {
    std::tie(stats.count_informative, stats.count_uninformative) =
        class_counts(d);
  }
  return stats;
}

std::pair<Dataset, Dataset> split_train_dev(const Dataset& d,
                                            std::uint64_t seed) {
  const std::size_t n = d.size();
  if (n < 10) {
    throw DataError("split_train_dev: dataset \"" + d.name + "\" has " +
                    std::to_string(n) + " tweets, need at least 10");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto eng = rng::make_engine(seed, /*stream=*/17);
  rng::shuffle(order, eng);

  const auto n_train = static_cast<std::size_t>(
      std::ceil(0.9 * static_cast<double>(n)));
  Dataset train{d.name + ".train", {}};
  Dataset dev{d.name + ".dev", {}};
  train.tweets.reserve(n_train);
  dev.tweets.reserve(n - n_train);
  for (std::size_t i = 0; i < n; ++i) {
    (i < n_train ? train : dev).tweets.push_back(d.tweets[order[i]]);
  }
  return {std::move(train), std::move(dev)};
}

}  // namespace covtweet::corpus
