#pragma once

#include <string>
#include <string_view>

namespace varicart::utf8 {

// Invalid sequences decode to U+FFFD, one per offending byte.
std::u32string decode(std::string_view s);
std::string encode(std::u32string_view s);
void append(std::string& out, char32_t cp);

// Letters: ASCII, Latin-1 Supplement, Latin Extended-A/B, Greek, Cyrillic.
bool is_letter(char32_t c);
bool is_digit(char32_t c);
inline bool is_alnum(char32_t c) { return is_letter(c) || is_digit(c); }
bool is_space(char32_t c);
bool is_upper(char32_t c);
char32_t to_lower(char32_t c);
std::u32string to_lower(std::u32string_view s);
std::string to_lower(std::string_view s);

}  // namespace varicart::utf8
