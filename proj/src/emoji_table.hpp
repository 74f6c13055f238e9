#pragma once

#include <string_view>
#include <vector>

namespace varicart::detail {

struct EmojiName {
  char32_t codepoint;
  std::string_view es;
  std::string_view en;
};

struct FlagName {
  std::string_view region;  // ISO 3166-1 alpha-2, upper case
  std::string_view es;
  std::string_view en;
};

// Both sorted by key.
const std::vector<EmojiName>& emoji_names();
const std::vector<FlagName>& flag_names();

}  // namespace varicart::detail
