#include "varicart/preprocess.hpp"

#include <algorithm>

#include "emoji_table.hpp"
#include "varicart/common.hpp"
#include "varicart/config.hpp"
#include "varicart/corpus.hpp"
#include "varicart/utf8.hpp"

namespace varicart {

using std::u32string;
using std::u32string_view;

void NormalizationConfig::validate() const {
  if (max_consecutive_mentions < 1) throw ConfigError("max_consecutive_mentions must be >= 1");
  if (max_letter_repeat < 1) throw ConfigError("max_letter_repeat must be >= 1");
  if (mention_token.empty()) throw ConfigError("mention_token must not be empty");
  if (url_token.empty()) throw ConfigError("url_token must not be empty");
}

NormalizationConfig NormalizationConfig::from(const KeyValueConfig& kv, const std::string& prefix) {
  NormalizationConfig c;
  if (auto v = kv.get_string(prefix + "mention_token")) c.mention_token = *v;
  if (auto v = kv.get_string(prefix + "url_token")) c.url_token = *v;
  if (auto v = kv.get_int(prefix + "max_consecutive_mentions")) c.max_consecutive_mentions = static_cast<int>(*v);
  if (auto v = kv.get_int(prefix + "max_letter_repeat")) c.max_letter_repeat = static_cast<int>(*v);
  if (auto v = kv.get_string(prefix + "laugh_token")) c.laugh_token = *v;
  if (auto v = kv.get_bool(prefix + "laugh_with_h")) c.laugh_with_h = *v;
  if (auto v = kv.get_string(prefix + "emoji_language")) {
    if (*v == "es")
      c.emoji_language = EmojiLanguage::es;
    else if (*v == "en")
      c.emoji_language = EmojiLanguage::en;
    else
      throw ConfigError("emoji_language must be 'es' or 'en'");
  }
  auto unknown = kv.unused_keys(prefix);
  if (!unknown.empty()) throw ConfigError("unknown normalization key '" + unknown.front() + "'");
  c.validate();
  return c;
}

namespace {

bool is_tag_char(char32_t c) { return utf8::is_alnum(c) || c == '_'; }

bool is_lower_letter(char32_t c) { return utf8::is_letter(c) && !utf8::is_upper(c); }

bool starts_with_ci(u32string_view s, std::size_t at, std::string_view ascii) {
  if (at + ascii.size() > s.size()) return false;
  for (std::size_t k = 0; k < ascii.size(); ++k)
    if (utf8::to_lower(s[at + k]) != static_cast<char32_t>(ascii[k])) return false;
  return true;
}

// Modifiers that never stand alone: variation selectors, ZWJ, keycap,
// skin tones, tag characters.
bool is_emoji_modifier(char32_t c) {
  return c == 0xFE0E || c == 0xFE0F || c == 0x200D || c == 0x20E3 || (c >= 0x1F3FB && c <= 0x1F3FF) ||
         (c >= 0xE0020 && c <= 0xE007F);
}

bool is_regional_indicator(char32_t c) { return c >= 0x1F1E6 && c <= 0x1F1FF; }

bool is_emoji(char32_t c) {
  if (c >= 0x1F000 && c <= 0x1FAFF) return true;
  if (c >= 0x2600 && c <= 0x27BF) return true;
  switch (c) {
    case 0x231A: case 0x231B: case 0x2328: case 0x23CF: case 0x2B05: case 0x2B06: case 0x2B07:
    case 0x2B1B: case 0x2B1C: case 0x2B50: case 0x2B55: case 0x3030: case 0x303D: case 0x3297:
    case 0x3299: case 0x2934: case 0x2935:
      return true;
    default:
      break;
  }
  return (c >= 0x23E9 && c <= 0x23F3) || (c >= 0x23F8 && c <= 0x23FA);
}

std::string describe_emoji(char32_t c, EmojiLanguage lang) {
  const auto& table = detail::emoji_names();
  auto it = std::lower_bound(table.begin(), table.end(), c,
                             [](const detail::EmojiName& e, char32_t v) { return e.codepoint < v; });
  if (it != table.end() && it->codepoint == c) return std::string(lang == EmojiLanguage::es ? it->es : it->en);
  return lang == EmojiLanguage::es ? "símbolo" : "symbol";
}

std::string describe_flag(char32_t a, char32_t b, EmojiLanguage lang) {
  std::string region;
  region.push_back(static_cast<char>('A' + (a - 0x1F1E6)));
  region.push_back(static_cast<char>('A' + (b - 0x1F1E6)));
  const auto& table = detail::flag_names();
  auto it = std::lower_bound(table.begin(), table.end(), region,
                             [](const detail::FlagName& e, const std::string& v) { return e.region < v; });
  const std::string prefix = lang == EmojiLanguage::es ? "bandera " : "flag ";
  if (it != table.end() && it->region == region)
    return prefix + std::string(lang == EmojiLanguage::es ? it->es : it->en);
  return prefix + utf8::to_lower(region);
}

// (1) line breaks become ". "
u32string replace_line_breaks(u32string_view s) {
  u32string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char32_t c = s[i];
    if (c == '\r' || c == '\n' || c == 0x2028 || c == 0x2029 || c == 0x85) {
      if (c == '\r' && i + 1 < s.size() && s[i + 1] == '\n') ++i;
      out += U". ";
    } else {
      out.push_back(c);
    }
  }
  return out;
}

// (2) http(s):// and bare www. links, starting at a word boundary and
// running to the next whitespace.
u32string replace_urls(u32string_view s, const u32string& token) {
  u32string out;
  std::size_t i = 0;
  while (i < s.size()) {
    const bool boundary = i == 0 || !utf8::is_alnum(s[i - 1]);
    std::size_t prefix = 0;
    if (boundary) {
      if (starts_with_ci(s, i, "https://"))
        prefix = 8;
      else if (starts_with_ci(s, i, "http://"))
        prefix = 7;
      else if (starts_with_ci(s, i, "www."))
        prefix = 4;
    }
    if (prefix && i + prefix < s.size() && !utf8::is_space(s[i + prefix])) {
      std::size_t j = i + prefix;
      while (j < s.size() && !utf8::is_space(s[j])) ++j;
      out += token;
      i = j;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

std::vector<u32string> split_ws(u32string_view s) {
  std::vector<u32string> words;
  u32string cur;
  for (char32_t c : s) {
    if (utf8::is_space(c)) {
      if (!cur.empty()) words.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

u32string join_ws(const std::vector<u32string>& words) {
  u32string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out.push_back(' ');
    out += words[i];
  }
  return out;
}

// (3) @handles become the mention token; runs longer than the limit shrink.
u32string replace_mentions(u32string_view s, const u32string& token, int max_run) {
  u32string replaced;
  std::size_t i = 0;
  while (i < s.size()) {
    const bool boundary = i == 0 || !is_tag_char(s[i - 1]);
    if (s[i] == '@' && boundary && i + 1 < s.size() && is_tag_char(s[i + 1])) {
      std::size_t j = i + 1;
      while (j < s.size() && is_tag_char(s[j])) ++j;
      replaced += token;
      i = j;
    } else {
      replaced.push_back(s[i++]);
    }
  }
  std::vector<u32string> kept;
  int run = 0;
  for (auto& w : split_ws(replaced)) {
    run = (w == token) ? run + 1 : 0;
    if (run <= max_run) kept.push_back(std::move(w));
  }
  return join_ws(kept);
}

u32string segment_tag(u32string_view tag) {
  if (tag.empty() || !std::all_of(tag.begin(), tag.end(), is_tag_char)) return u32string(tag);
  std::vector<u32string> words;
  u32string cur;
  auto flush = [&] {
    if (!cur.empty()) words.push_back(std::move(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < tag.size(); ++i) {
    const char32_t c = tag[i];
    if (c == '_') {
      flush();
      continue;
    }
    if (!cur.empty()) {
      const char32_t p = tag[i - 1];
      const bool lower_to_upper = is_lower_letter(p) && utf8::is_upper(c);
      const bool letter_digit = (utf8::is_letter(p) && utf8::is_digit(c)) || (utf8::is_digit(p) && utf8::is_letter(c));
      const bool caps_run_end = utf8::is_upper(p) && utf8::is_upper(c) && i + 1 < tag.size() &&
                                is_lower_letter(tag[i + 1]);
      if (lower_to_upper || letter_digit || caps_run_end) flush();
    }
    cur.push_back(c);
  }
  flush();
  for (std::size_t w = 1; w < words.size(); ++w) words[w] = utf8::to_lower(words[w]);
  return join_ws(words);
}

// (4) every '#' goes; a following tag body is segmented.
u32string replace_hashtags(u32string_view s) {
  u32string out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] != '#') {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t j = i + 1;
    while (j < s.size() && is_tag_char(s[j])) ++j;
    out += segment_tag(s.substr(i + 1, j - i - 1));
    i = j;
  }
  return out;
}

// (5) emojis become "emoji <description> emoji"; a run of the same emoji,
// possibly separated by whitespace, is described once.
u32string replace_emojis(u32string_view s, EmojiLanguage lang) {
  u32string out;
  std::string last_desc;
  bool last_was_emoji = false;
  std::size_t i = 0;
  while (i < s.size()) {
    const char32_t c = s[i];
    if (is_emoji_modifier(c)) {
      ++i;
      continue;
    }
    std::string desc;
    if (is_regional_indicator(c)) {
      std::size_t j = i + 1;
      while (j < s.size() && is_emoji_modifier(s[j])) ++j;
      if (j < s.size() && is_regional_indicator(s[j])) {
        desc = describe_flag(c, s[j], lang);
        i = j + 1;
      } else {
        desc = describe_emoji(c, lang);
        i = i + 1;
      }
    } else if (is_emoji(c)) {
      desc = describe_emoji(c, lang);
      ++i;
    } else {
      if (!utf8::is_space(c)) last_was_emoji = false;
      out.push_back(c);
      ++i;
      continue;
    }
    if (last_was_emoji && desc == last_desc) continue;
    out += U" emoji ";
    out += utf8::decode(desc);
    out += U" emoji ";
    last_desc = std::move(desc);
    last_was_emoji = true;
  }
  return out;
}

bool is_laugh(u32string_view run, bool with_h) {
  if (run.size() < 4) return false;
  int markers = 0;
  for (char32_t c : run) {
    const char32_t l = utf8::to_lower(c);
    if (l == 'j' || (with_h && l == 'h'))
      ++markers;
    else if (l != 'a' && l != 'e' && l != 'i')
      return false;
  }
  return markers >= 2;
}

// (6) letter runs made of laugh syllables become the laugh token.
u32string replace_laughs(u32string_view s, const u32string& token, bool with_h) {
  u32string out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!utf8::is_letter(s[i])) {
      out.push_back(s[i++]);
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && utf8::is_letter(s[j])) ++j;
    u32string_view run = s.substr(i, j - i);
    if (is_laugh(run, with_h))
      out += token;
    else
      out += run;
    i = j;
  }
  return out;
}

// (7) caps runs of one repeated letter.
u32string cap_letter_repeats(u32string_view s, int max_repeat) {
  u32string out;
  int run = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char32_t c = s[i];
    run = (i > 0 && s[i - 1] == c) ? run + 1 : 1;
    if (utf8::is_letter(c) && run > max_repeat) continue;
    out.push_back(c);
  }
  return out;
}

// (8)
u32string collapse_whitespace(u32string_view s) { return join_ws(split_ws(s)); }

u32string normalize_once(u32string_view text, const NormalizationConfig& cfg, const u32string& mention,
                         const u32string& url, const u32string& laugh) {
  u32string s = replace_line_breaks(text);
  s = replace_urls(s, url);
  s = replace_mentions(s, mention, cfg.max_consecutive_mentions);
  s = replace_hashtags(s);
  s = replace_emojis(s, cfg.emoji_language);
  s = replace_laughs(s, laugh, cfg.laugh_with_h);
  s = cap_letter_repeats(s, cfg.max_letter_repeat);
  return collapse_whitespace(s);
}

}  // namespace

std::string segment_hashtag(std::string_view tag) {
  if (!tag.empty() && tag.front() == '#') tag.remove_prefix(1);
  return utf8::encode(segment_tag(utf8::decode(tag)));
}

std::string normalize_text(std::string_view text, const NormalizationConfig& config) {
  config.validate();
  const u32string mention = utf8::decode(config.mention_token);
  const u32string url = utf8::decode(config.url_token);
  const u32string laugh = utf8::decode(config.laugh_token);
  u32string current = normalize_once(utf8::decode(text), config, mention, url, laugh);
  // A pass can expose a new match (e.g. "htttp://x" capped to "http://x").
  for (int pass = 0; pass < 8; ++pass) {
    u32string next = normalize_once(current, config, mention, url, laugh);
    if (next == current) break;
    current = std::move(next);
  }
  return utf8::encode(current);
}

Dataset normalize_dataset(const Dataset& dataset, const NormalizationConfig& config) {
  config.validate();
  std::vector<Instance> out = dataset.instances();
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i].normalized_text = normalize_text(out[i].raw_text, config);
  Dataset result(dataset.labels(), std::move(out));
  result.rejections = dataset.rejections;
  result.discarded = dataset.discarded;
  return result;
}

}  // namespace varicart
