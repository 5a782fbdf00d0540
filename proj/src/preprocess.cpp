#include "covtweet/preprocess.hpp"

#include <algorithm>
#include <array>
#include <fstream>

#include "covtweet/errors.hpp"
#include "covtweet/unicode.hpp"

namespace covtweet::preprocess {

namespace {

constexpr std::array<std::string_view, 3> kUrlPrefixes = {"http://", "https://",
                                                          "www."};

bool is_url_token(std::string_view token) {
  for (const auto prefix : kUrlPrefixes) {
    if (token.starts_with(prefix)) return true;
  }
  return false;
}

bool is_ascii_word_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_';
}

bool is_token_char(char c) { return is_ascii_word_char(c) || c == '\''; }

// Values must survive a second trip through the pipeline unchanged.
void check_value(const std::string& key, const std::string& value,
                 const char* which) {
  for (const char c : value) {
    const auto uc = static_cast<unsigned char>(c);
    if (uc > 0x7F || (c >= 'A' && c <= 'Z')) {
      throw DataError(std::string(which) + " lexicon value for \"" + key +
                      "\" must be lowercase ASCII: \"" + value + "\"");
    }
  }
  std::size_t start = 0;
  while (start < value.size()) {
    std::size_t end = value.find(' ', start);
    if (end == std::string::npos) end = value.size();
    if (is_url_token(std::string_view(value).substr(start, end - start))) {
      throw DataError(std::string(which) + " lexicon value for \"" + key +
                      "\" contains a URL token: \"" + value + "\"");
    }
    start = end + 1;
  }
}

std::map<std::string, std::string> load_tsv_map(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open lexicon file: " + path.string());
  }
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw DataError(path.string() + ":" + std::to_string(line_no) +
                      ": expected `key<TAB>value`");
    }
    out[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return out;
}

}  // namespace

Lexicons Lexicons::load(const std::filesystem::path& emoji_tsv,
                        const std::filesystem::path& contractions_tsv) {
  Lexicons lex;
  lex.emoji_ = load_tsv_map(emoji_tsv);
  lex.contractions_ = load_tsv_map(contractions_tsv);
  lex.validate();
  lex.build_index();
  return lex;
}

Lexicons Lexicons::from_maps(std::map<std::string, std::string> emoji,
                             std::map<std::string, std::string> contractions) {
  Lexicons lex;
  lex.emoji_ = std::move(emoji);
  lex.contractions_ = std::move(contractions);
  lex.validate();
  lex.build_index();
  return lex;
}

void Lexicons::validate() const {
  for (const auto& [key, value] : emoji_) {
    check_value(key, value, "emoji");
  }
  for (const auto& [key, value] : contractions_) {
    check_value(key, value, "contraction");
    // An expansion containing a key would re-expand on a second pass.
    for (const auto& [other_key, unused] : contractions_) {
      const std::size_t at = value.find(other_key);
      if (at == std::string::npos) continue;
      const bool left_ok = at == 0 || !is_token_char(value[at - 1]);
      const std::size_t end = at + other_key.size();
      const bool right_ok = end == value.size() || !is_token_char(value[end]);
      if (left_ok && right_ok) {
        throw DataError("contraction expansion for \"" + key +
                        "\" contains the contraction \"" + other_key + "\"");
      }
    }
  }
}

void Lexicons::build_index() {
  const auto index =
      [](const std::map<std::string, std::string>& map,
         std::map<unsigned char, std::vector<const std::string*>>& idx) {
        idx.clear();
        for (const auto& [key, unused] : map) {
          idx[static_cast<unsigned char>(key[0])].push_back(&key);
        }
        for (auto& [unused, keys] : idx) {
          std::sort(keys.begin(), keys.end(),
                    [](const std::string* a, const std::string* b) {
                      return a->size() != b->size() ? a->size() > b->size()
                                                    : *a < *b;
                    });
        }
      };
  index(emoji_, emoji_index_);
  index(contractions_, contraction_index_);
}

namespace {

std::string_view match_in_index(
    const std::map<unsigned char, std::vector<const std::string*>>& idx,
    std::string_view text, std::size_t pos) {
  const auto it = idx.find(static_cast<unsigned char>(text[pos]));
  if (it == idx.end()) return {};
  for (const std::string* key : it->second) {
    if (text.substr(pos, key->size()) == *key) return *key;
  }
  return {};
}

}  // namespace

std::string_view Lexicons::match_emoji(std::string_view text,
                                       std::size_t pos) const {
  return match_in_index(emoji_index_, text, pos);
}

std::string_view Lexicons::match_contraction(std::string_view text,
                                             std::size_t pos) const {
  const auto it = contraction_index_.find(static_cast<unsigned char>(text[pos]));
  if (it == contraction_index_.end()) return {};
  for (const std::string* key : it->second) {
    if (text.substr(pos, key->size()) != *key) continue;
    const std::size_t end = pos + key->size();
    if (end == text.size() || !is_token_char(text[end])) return *key;
  }
  return {};
}

std::string lowercase(std::string_view text) { return unicode::to_lower(text); }

std::string replace_emojis(std::string_view text, const Lexicons& lex) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::string_view key = lex.match_emoji(text, pos);
    if (!key.empty()) {
      out.push_back(' ');
      out.append(lex.emoji_map().at(std::string(key)));
      out.push_back(' ');
      pos += key.size();
    } else {
      out.push_back(text[pos]);
      ++pos;
    }
  }
  return out;
}

std::string expand_contractions(std::string_view text, const Lexicons& lex) {
  // Normalize the common Unicode apostrophes so curly-quoted contractions
  // match the straight-quoted lexicon keys.
  std::string normalized;
  normalized.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t start = pos;
    const char32_t cp = unicode::decode_utf8(text, pos);
    if (cp == 0x2019 || cp == 0x02BC) {
      normalized.push_back('\'');
    } else {
      normalized.append(text.substr(start, pos - start));
    }
  }

  std::string out;
  out.reserve(normalized.size());
  bool prev_is_token_char = false;
  pos = 0;
  while (pos < normalized.size()) {
    if (!prev_is_token_char) {
      const std::string_view key = lex.match_contraction(normalized, pos);
      if (!key.empty()) {
        const std::string& expansion =
            lex.contraction_map().at(std::string(key));
        out.append(expansion);
        pos += key.size();
        prev_is_token_char =
            !expansion.empty() && is_token_char(expansion.back());
        continue;
      }
    }
    const char c = normalized[pos];
    out.push_back(c);
    prev_is_token_char = is_token_char(c);
    ++pos;
  }
  return out;
}

std::string strip_urls(std::string_view text) {
  // Alternating whitespace runs and tokens. A removed token merges the runs
  // around it into a single space; elsewhere whitespace is preserved.
  const auto scan_run = [&text](std::size_t pos, bool space) {
    while (pos < text.size()) {
      std::size_t next = pos;
      if (unicode::is_space(unicode::decode_utf8(text, next)) != space) break;
      pos = next;
    }
    return pos;
  };

  std::string out;
  out.reserve(text.size());
  bool kept_any = false;
  bool removed = false;

  std::size_t i = scan_run(0, /*space=*/true);
  std::string pending(text.substr(0, i));  // separator before next kept token
  while (i < text.size()) {
    const std::size_t tok_end = scan_run(i, /*space=*/false);
    const std::string_view token = text.substr(i, tok_end - i);
    const std::size_t ws_end = scan_run(tok_end, /*space=*/true);
    const std::string_view ws = text.substr(tok_end, ws_end - tok_end);
    i = ws_end;

    if (is_url_token(token)) {
      removed = true;
    } else {
      if (kept_any) {
        out.append(removed ? " " : pending);
      } else if (!removed) {
        out.append(pending);
      }
      out.append(token);
      kept_any = true;
      removed = false;
      pending = std::string(ws);
    }
  }
  if (!removed) out.append(pending);
  return out;
}

std::string strip_non_ascii(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (const char c : text) {
    if (static_cast<unsigned char>(c) <= 0x7F) out.push_back(c);
  }
  return out;
}

namespace {

std::string run_pipeline_once(std::string_view text, const Lexicons& lex) {
  std::string s = lowercase(text);
  s = replace_emojis(s, lex);
  s = expand_contractions(s, lex);
  s = strip_urls(s);
  s = strip_non_ascii(s);

  // Collapse whitespace runs and trim; the text is pure ASCII here.
  std::string collapsed;
  collapsed.reserve(s.size());
  bool in_space = true;  // swallows leading whitespace
  for (const char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
        c == '\f') {
      in_space = true;
    } else {
      if (in_space && !collapsed.empty()) collapsed.push_back(' ');
      collapsed.push_back(c);
      in_space = false;
    }
  }
  return collapsed;
}

}  // namespace

PreprocessReport clean(std::string_view text, const Lexicons& lex) {
  PreprocessReport report;
  report.original = std::string(text);
  report.steps_applied = {"lowercase", "replace_emojis", "expand_contractions",
                          "strip_urls", "strip_non_ascii"};

  // Deleting non-ascii codepoints can expose url prefixes or contractions
  // the earlier steps could not see ("xxxБhttps://y"), so iterate to the
  // fixed point; it is reached by the second pass for any input.
  std::string s = run_pipeline_once(text, lex);
  while (true) {
    std::string next = run_pipeline_once(s, lex);
    if (next == s) break;
    s = std::move(next);
  }
  report.cleaned = std::move(s);
  return report;
}

}  // namespace covtweet::preprocess
