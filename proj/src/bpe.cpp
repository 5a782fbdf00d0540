#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <map>
#include <set>

#include "covtweet/encoder.hpp"
#include "covtweet/errors.hpp"

namespace covtweet::encoder {

namespace {

constexpr std::array<const char*, 4> kSpecialNames = {"[PAD]", "[CLS]",
                                                      "[SEP]", "[UNK]"};

std::uint64_t pair_key(std::int32_t left, std::int32_t right) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(left))
          << 32) |
         static_cast<std::uint32_t>(right);
}

std::vector<std::string_view> whitespace_words(std::string_view text) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(
                                  text[i]))) {
      ++i;
    }
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(
                                  text[j]))) {
      ++j;
    }
    if (j > i) words.push_back(text.substr(i, j - i));
    i = j;
  }
  return words;
}

}  // namespace

void SubwordVocab::append_word_ids(std::string_view word,
                                   std::vector<std::int32_t>& out) const {
  std::vector<std::int32_t> syms;
  syms.reserve(word.size());
  for (const char c : word) {
    const auto it = token_to_id.find(std::string(1, c));
    syms.push_back(it == token_to_id.end() ? kUnk : it->second);
  }
  // Repeatedly apply the earliest-learned merge present in the word.
  while (syms.size() >= 2) {
    std::int32_t best_rank = -1;
    for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
      const auto it = pair_rank.find(pair_key(syms[i], syms[i + 1]));
      if (it != pair_rank.end() &&
          (best_rank < 0 || it->second < best_rank)) {
        best_rank = it->second;
      }
    }
    if (best_rank < 0) break;
    const std::int32_t merged = first_merge_id + best_rank;
    const auto& [left_tok, right_tok] =
        merges[static_cast<std::size_t>(best_rank)];
    const std::int32_t left = token_to_id.at(left_tok);
    const std::int32_t right = token_to_id.at(right_tok);
    std::vector<std::int32_t> next;
    next.reserve(syms.size());
    std::size_t i = 0;
    while (i < syms.size()) {
      if (i + 1 < syms.size() && syms[i] == left && syms[i + 1] == right) {
        next.push_back(merged);
        i += 2;
      } else {
        next.push_back(syms[i]);
        ++i;
      }
    }
    syms.swap(next);
  }
  out.insert(out.end(), syms.begin(), syms.end());
}

SubwordVocab bpe_train(const std::vector<std::string>& corpus,
                       std::int32_t vocab_size) {
  // Unique words with frequencies.
  std::map<std::string, std::int64_t> word_freq;
  for (const std::string& doc : corpus) {
    for (const auto word : whitespace_words(doc)) {
      word_freq[std::string(word)] += 1;
    }
  }
  std::set<char> alphabet;
  for (const auto& [word, unused] : word_freq) {
    for (const char c : word) alphabet.insert(c);
  }

  SubwordVocab vocab;
  for (const char* name : kSpecialNames) {
    vocab.token_to_id.emplace(name, vocab.size());
    vocab.id_to_token.emplace_back(name);
  }
  for (const char c : alphabet) {
    vocab.token_to_id.emplace(std::string(1, c), vocab.size());
    vocab.id_to_token.emplace_back(1, c);
  }
  vocab.first_merge_id = vocab.size();
  if (vocab_size < vocab.size()) {
    throw DataError("bpe_train: vocab_size " + std::to_string(vocab_size) +
                    " is below the base alphabet size " +
                    std::to_string(vocab.size()));
  }

  // Symbol sequences per unique word.
  std::vector<std::vector<std::int32_t>> symbols;
  std::vector<std::int64_t> freqs;
  symbols.reserve(word_freq.size());
  for (const auto& [word, freq] : word_freq) {
    std::vector<std::int32_t> syms;
    syms.reserve(word.size());
    for (const char c : word) {
      syms.push_back(vocab.token_to_id.at(std::string(1, c)));
    }
    symbols.push_back(std::move(syms));
    freqs.push_back(freq);
  }

  std::unordered_map<std::uint64_t, std::int64_t> pair_counts;
  while (vocab.size() < vocab_size) {
    pair_counts.clear();
    for (std::size_t w = 0; w < symbols.size(); ++w) {
      const auto& syms = symbols[w];
      for (std::size_t i = 0; i + 1 < syms.size(); ++i) {
        pair_counts[pair_key(syms[i], syms[i + 1])] += freqs[w];
      }
    }
    if (pair_counts.empty()) break;

    // Highest count; ties break on the lexicographically smallest
    // (left token, right token) pair.
    std::int64_t best_count = -1;
    std::uint64_t best_key = 0;
    std::pair<std::string_view, std::string_view> best_pair;
    for (const auto& [key, count] : pair_counts) {
      if (count < best_count) continue;
      const auto left = static_cast<std::int32_t>(key >> 32);
      const auto right = static_cast<std::int32_t>(key & 0xFFFFFFFF);
      const std::pair<std::string_view, std::string_view> cand{
          vocab.id_to_token[static_cast<std::size_t>(left)],
          vocab.id_to_token[static_cast<std::size_t>(right)]};
      if (count > best_count || cand < best_pair) {
        best_count = count;
        best_key = key;
        best_pair = cand;
      }
    }

    const auto left = static_cast<std::int32_t>(best_key >> 32);
    const auto right = static_cast<std::int32_t>(best_key & 0xFFFFFFFF);
    const std::int32_t merged = vocab.size();
    const std::string merged_tok =
        vocab.id_to_token[static_cast<std::size_t>(left)] +
        vocab.id_to_token[static_cast<std::size_t>(right)];
    vocab.pair_rank.emplace(
        best_key, static_cast<std::int32_t>(vocab.merges.size()));
    vocab.merges.emplace_back(
        vocab.id_to_token[static_cast<std::size_t>(left)],
        vocab.id_to_token[static_cast<std::size_t>(right)]);
    vocab.token_to_id.emplace(merged_tok, merged);
    vocab.id_to_token.push_back(merged_tok);

    for (auto& syms : symbols) {
      if (syms.size() < 2) continue;
      std::size_t out = 0;
      std::size_t i = 0;
      while (i < syms.size()) {
        if (i + 1 < syms.size() && syms[i] == left &&
            syms[i + 1] == right) {
          syms[out++] = merged;
          i += 2;
        } else {
          syms[out++] = syms[i++];
        }
      }
      syms.resize(out);
    }
  }
  return vocab;
}

std::int32_t TokenizedInput::length() const {
  std::int32_t n = 0;
  for (const auto m : mask) {
    if (m != 0) ++n;
  }
  return n;
}

TokenizedInput encode(std::string_view text, const SubwordVocab& vocab) {
  std::vector<std::int32_t> sub;
  for (const auto word : whitespace_words(text)) {
    vocab.append_word_ids(word, sub);
  }
  if (sub.size() > static_cast<std::size_t>(kMaxLen - 2)) {
    sub.resize(kMaxLen - 2);
  }

  TokenizedInput out;
  out.ids.reserve(kMaxLen);
  out.ids.push_back(SubwordVocab::kCls);
  out.ids.insert(out.ids.end(), sub.begin(), sub.end());
  out.ids.push_back(SubwordVocab::kSep);
  out.ids.resize(kMaxLen, SubwordVocab::kPad);
  out.mask.resize(kMaxLen);
  for (std::int32_t i = 0; i < kMaxLen; ++i) {
    out.mask[static_cast<std::size_t>(i)] =
        out.ids[static_cast<std::size_t>(i)] != SubwordVocab::kPad ? 1 : 0;
  }
  return out;
}

void save_vocab(const std::filesystem::path& path, const SubwordVocab& v) {
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot write vocab file: " + path.string());
  }
  out << "covtweet-subword-vocab v1\n";
  out << "merges " << v.merges.size() << "\n";
  for (const auto& [left, right] : v.merges) {
    out << left << '\t' << right << '\n';
  }
  out << "tokens " << v.id_to_token.size() << "\n";
  for (std::size_t i = 0; i < v.id_to_token.size(); ++i) {
    out << v.id_to_token[i] << '\t' << i << '\n';
  }
}

SubwordVocab load_vocab(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open vocab file: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line) || line != "covtweet-subword-vocab v1") {
    throw DataError(path.string() + ": not a subword vocab file");
  }
  const auto read_count = [&](const char* tag) -> std::size_t {
    if (!std::getline(in, line) || line.rfind(tag, 0) != 0) {
      throw DataError(path.string() + ": expected `" + tag + " N` line");
    }
    return std::stoull(line.substr(std::string_view(tag).size() + 1));
  };

  SubwordVocab v;
  const std::size_t n_merges = read_count("merges");
  v.merges.reserve(n_merges);
  for (std::size_t i = 0; i < n_merges; ++i) {
    if (!std::getline(in, line)) {
      throw DataError(path.string() + ": truncated merge list");
    }
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(path.string() + ": malformed merge line");
    }
    v.merges.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  const std::size_t n_tokens = read_count("tokens");
  v.id_to_token.reserve(n_tokens);
  for (std::size_t i = 0; i < n_tokens; ++i) {
    if (!std::getline(in, line)) {
      throw DataError(path.string() + ": truncated token table");
    }
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos ||
        std::stoull(line.substr(tab + 1)) != i) {
      throw DataError(path.string() + ": malformed token line " +
                      std::to_string(i));
    }
    v.id_to_token.push_back(line.substr(0, tab));
    v.token_to_id.emplace(v.id_to_token.back(),
                          static_cast<std::int32_t>(i));
  }

  v.first_merge_id = static_cast<std::int32_t>(n_tokens - n_merges);
  for (std::size_t r = 0; r < v.merges.size(); ++r) {
    const auto& [left, right] = v.merges[r];
    v.pair_rank.emplace(
        pair_key(v.token_to_id.at(left), v.token_to_id.at(right)),
        static_cast<std::int32_t>(r));
  }
  return v;
}

}  // namespace covtweet::encoder
