#include "varicart/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

namespace varicart {

namespace {

// Pronounceable pseudo-words so character n-grams behave like real text.
std::vector<std::string> make_vocabulary(SplitMix64& rng, std::size_t count, std::set<std::string>& taken) {
  static const char* onsets[] = {"b", "c", "d", "f", "g", "l", "m", "n", "p", "r", "s", "t", "v", "ch", "ll", "qu"};
  static const char* vowels[] = {"a", "e", "i", "o", "u", "ia", "ue"};
  std::vector<std::string> out;
  while (out.size() < count) {
    const int syllables = 2 + static_cast<int>(rng.next_below(3));
    std::string w;
    for (int s = 0; s < syllables; ++s) {
      w += onsets[rng.next_below(std::size(onsets))];
      w += vowels[rng.next_below(std::size(vowels))];
    }
    if (taken.insert(w).second) out.push_back(std::move(w));
  }
  return out;
}

}  // namespace

Dataset make_planted_dataset(const PlantedConfig& c) {
  if (c.instances == 0 || c.markers_per_class == 0 || c.neutral_words == 0 || c.min_words < 2 ||
      c.max_words < c.min_words || c.common_fraction < 0 || c.common_fraction > 1)
    throw ConfigError("invalid planted-dataset configuration");
  SplitMix64 rng(c.seed);
  std::set<std::string> taken;
  const auto neutral = make_vocabulary(rng, c.neutral_words, taken);
  const std::vector<std::vector<std::string>> markers = {make_vocabulary(rng, c.markers_per_class, taken),
                                                         make_vocabulary(rng, c.markers_per_class, taken)};
  const LabelSet labels = LabelSet::dsl_tl();
  const auto commons = static_cast<std::size_t>(static_cast<double>(c.instances) * c.common_fraction + 0.5);

  auto pick = [&](const std::vector<std::string>& v) -> const std::string& { return v[rng.next_below(v.size())]; };

  std::vector<Instance> out;
  out.reserve(c.instances);
  for (std::size_t n = 0; n < c.instances; ++n) {
    const bool common = n < commons;
    const int len = c.min_words + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(c.max_words - c.min_words + 1)));
    std::vector<std::string> words;
    Instance inst;
    inst.is_common = common;
    if (common) {
      // One to two markers of each class, placed among neutral words.
      const int each = 1 + static_cast<int>(rng.next_below(2));
      for (int k = 0; k < each; ++k) {
        words.push_back(pick(markers[0]));
        words.push_back(pick(markers[1]));
      }
    } else {
      const std::size_t cls = rng.next_below(2);
      inst.train_label = cls == 0 ? labels.variety_a : labels.variety_b;
      words.push_back(pick(markers[cls]));
      for (int k = 1; k < len; ++k)
        if (rng.next_unit() < c.marker_rate) words.push_back(pick(markers[cls]));
    }
    while (static_cast<int>(words.size()) < len) words.push_back(pick(neutral));
    for (std::size_t i = words.size(); i > 1; --i) std::swap(words[i - 1], words[rng.next_below(i)]);
    std::string text;
    for (const auto& w : words) {
      if (!text.empty()) text.push_back(' ');
      text += w;
    }
    inst.raw_text = std::move(text);
    out.push_back(std::move(inst));
  }
  // Interleave commons with the rest, then number in final order.
  for (std::size_t i = out.size(); i > 1; --i) std::swap(out[i - 1], out[rng.next_below(i)]);
  for (std::size_t i = 0; i < out.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "s%06zu", i);
    out[i].id = buf;
  }
  return Dataset(labels, std::move(out));
}

}  // namespace varicart
