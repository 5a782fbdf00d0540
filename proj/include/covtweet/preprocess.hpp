#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace covtweet::preprocess {

// Emoji descriptions and contraction expansions, loaded from two-column TSV
// files. Every value must be lowercase ASCII, contain no URL tokens and no
// contraction keys; those constraints make the cleaning pipeline idempotent
// and are checked at load time.
class Lexicons {
 public:
  static Lexicons load(const std::filesystem::path& emoji_tsv,
                       const std::filesystem::path& contractions_tsv);
  static Lexicons from_maps(std::map<std::string, std::string> emoji,
                            std::map<std::string, std::string> contractions);

  const std::map<std::string, std::string>& emoji_map() const {
    return emoji_;
  }
  const std::map<std::string, std::string>& contraction_map() const {
    return contractions_;
  }

  // Longest emoji key starting at text[pos]; empty view if none matches.
  std::string_view match_emoji(std::string_view text, std::size_t pos) const;
  // Longest contraction key starting at text[pos] that is not followed by a
  // word character or apostrophe.
  std::string_view match_contraction(std::string_view text,
                                     std::size_t pos) const;

 private:
  Lexicons() = default;
  void build_index();
  void validate() const;

  std::map<std::string, std::string> emoji_;
  std::map<std::string, std::string> contractions_;
  // First byte -> keys with that first byte, longest first.
  std::map<unsigned char, std::vector<const std::string*>> emoji_index_;
  std::map<unsigned char, std::vector<const std::string*>> contraction_index_;
};

struct PreprocessReport {
  std::string original;
  std::string cleaned;
  std::vector<std::string> steps_applied;
};

// Locale-independent Unicode lowercase.
std::string lowercase(std::string_view text);

// Each maximal mapped emoji sequence becomes " <description> ". Unmapped
// emoji pass through untouched (strip_non_ascii deletes them later).
std::string replace_emojis(std::string_view text, const Lexicons& lex);

// Longest-match expansion of contraction keys occurring as whole tokens;
// token boundaries treat apostrophes as word characters, so "can't" never
// matches inside "can't've". Expects already-lowercased text. U+2019 and
// U+02BC are read as apostrophes.
std::string expand_contractions(std::string_view text, const Lexicons& lex);

// Removes every whitespace-delimited token starting with http://, https://
// or www.; the whitespace around a removed token collapses to one space.
std::string strip_urls(std::string_view text);

// Deletes every codepoint above 0x7F, no replacement character.
std::string strip_non_ascii(std::string_view text);

// lowercase -> replace_emojis -> expand_contractions -> strip_urls ->
// strip_non_ascii, then whitespace collapse and trim, iterated to the
// fixed point (stripping non-ascii can expose new url/contraction tokens).
PreprocessReport clean(std::string_view text, const Lexicons& lex);

}  // namespace covtweet::preprocess
