#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace covtweet::unicode {

// Decodes the UTF-8 sequence starting at text[pos] and advances pos past it.
// Invalid bytes decode as U+FFFD and advance by one byte.
char32_t decode_utf8(std::string_view text, std::size_t& pos);

void append_utf8(std::string& out, char32_t cp);

std::vector<char32_t> decode_string(std::string_view text);

// Locale-independent full Unicode lowercase; a codepoint may map to two.
std::string to_lower(std::string_view text);

// Unicode White_Space property.
bool is_space(char32_t cp);

// Number of maximal runs of non-whitespace codepoints.
std::size_t count_words(std::string_view text);

}  // namespace covtweet::unicode
