#pragma once

#include <string>
#include <string_view>

namespace varicart {

class Dataset;
class KeyValueConfig;

enum class EmojiLanguage { es, en };

struct NormalizationConfig {
  std::string mention_token = "@usuario";
  std::string url_token = "url";
  int max_consecutive_mentions = 2;
  int max_letter_repeat = 2;
  std::string laugh_token = "jaja";
  EmojiLanguage emoji_language = EmojiLanguage::es;
  // Also treat h-laughs ("hahaha", "jejeje") as laughs.
  bool laugh_with_h = false;

  // Throws ConfigError on out-of-range values.
  void validate() const;
  // Reads keys named after the fields, under `prefix`; unknown keys there
  // are a ConfigError.
  static NormalizationConfig from(const KeyValueConfig& kv, const std::string& prefix = "");
};

// Splits a hashtag body on case and letter/digit boundaries:
// "CubaIslaBella" -> "Cuba isla bella", "SOSCuba" -> "SOS cuba".
// Underscores separate words. Tags with other characters come back unchanged.
std::string segment_hashtag(std::string_view tag);

// Line breaks, URLs, mentions, hashtags, emojis, laughs, letter
// repetitions, whitespace -- in that order. The chain is repeated until the
// text stops changing, so the result is a fixed point.
std::string normalize_text(std::string_view text, const NormalizationConfig& config = {});

// Fills normalized_text for every instance. Runs in parallel.
Dataset normalize_dataset(const Dataset& dataset, const NormalizationConfig& config);

}  // namespace varicart
