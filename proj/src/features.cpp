#include "varicart/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "varicart/common.hpp"
#include "varicart/utf8.hpp"

namespace varicart {

void FeatureConfig::validate() const {
  if (hash_dim < 2 || (hash_dim & (hash_dim - 1)) != 0) throw ConfigError("hash_dim must be a power of two >= 2");
  if (hash_dim > (std::uint64_t{1} << 32)) throw ConfigError("hash_dim must not exceed 2^32");
  auto check = [](const NgramRange& r, const char* what) {
    // {0, 0} switches a family off; otherwise lengths start at 1.
    const bool off = r.min == 0 && r.max == 0;
    if (!off && (r.min < 1 || r.max < r.min)) throw ConfigError(std::string(what) + " range is invalid");
  };
  check(word_ngrams, "word n-gram");
  check(char_ngrams, "char n-gram");
  if (word_ngrams.max == 0 && char_ngrams.max == 0) throw ConfigError("no feature n-grams enabled");
}

Featurizer::Featurizer(FeatureConfig config) : config_(config) { config_.validate(); }

namespace {

struct Tokenized {
  std::u32string lowered;
  std::vector<Token> tokens;
};

Tokenized tokenize_cps(std::string_view text) {
  Tokenized t;
  t.lowered = utf8::to_lower(utf8::decode(text));
  const auto& s = t.lowered;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!utf8::is_alnum(s[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && utf8::is_alnum(s[j])) ++j;
    t.tokens.push_back({utf8::encode(s.substr(i, j - i)), i, j});
    i = j;
  }
  return t;
}

// Token whose span holds `pos`, else the nearest one to the left, else
// the first one to the right.
int owner_of(const std::vector<Token>& tokens, std::size_t pos) {
  if (tokens.empty()) return -1;
  int left = -1;
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    if (tokens[k].begin <= pos && pos < tokens[k].end) return static_cast<int>(k);
    if (tokens[k].end <= pos) left = static_cast<int>(k);
  }
  return left >= 0 ? left : 0;
}

struct RawOccurrence {
  std::uint64_t hash;
  int owner;
};

std::vector<RawOccurrence> enumerate(const Tokenized& t, const FeatureConfig& c) {
  std::vector<RawOccurrence> occ;
  const int ntok = static_cast<int>(t.tokens.size());
  for (int n = std::max(1, c.word_ngrams.min); n <= c.word_ngrams.max; ++n) {
    for (int s = 0; s + n <= ntok; ++s) {
      std::string key = "w" + std::to_string(n) + ":";
      for (int k = 0; k < n; ++k) {
        if (k) key.push_back('\x1f');
        key += t.tokens[static_cast<std::size_t>(s + k)].text;
      }
      occ.push_back({fnv1a64(key), s + (n - 1) / 2});
    }
  }
  const auto len = t.lowered.size();
  for (int n = std::max(1, c.char_ngrams.min); n <= c.char_ngrams.max; ++n) {
    const auto un = static_cast<std::size_t>(n);
    for (std::size_t s = 0; s + un <= len; ++s) {
      std::string key = "c:" + utf8::encode(std::u32string_view(t.lowered).substr(s, un));
      occ.push_back({fnv1a64(key), owner_of(t.tokens, s + (un - 1) / 2)});
    }
  }
  return occ;
}

}  // namespace

std::vector<Token> Featurizer::tokenize(std::string_view text) { return tokenize_cps(text).tokens; }

FeatureBreakdown Featurizer::breakdown(std::string_view text) const {
  const Tokenized t = tokenize_cps(text);
  const auto raw = enumerate(t, config_);
  const std::uint64_t mask = config_.hash_dim - 1;
  std::map<std::uint32_t, double> counts;
  for (const auto& r : raw) counts[static_cast<std::uint32_t>(r.hash & mask)] += 1.0;
  double norm = 0.0;
  for (const auto& [k, c] : counts) norm += c * c;
  norm = std::sqrt(norm);

  FeatureBreakdown b;
  b.tokens = t.tokens;
  b.occurrences.reserve(raw.size());
  for (const auto& r : raw) b.occurrences.push_back({static_cast<std::uint32_t>(r.hash & mask), 1.0 / norm, r.owner});
  return b;
}

FeatureVector Featurizer::extract(std::string_view text) const {
  const Tokenized t = tokenize_cps(text);
  const auto raw = enumerate(t, config_);
  const std::uint64_t mask = config_.hash_dim - 1;
  std::vector<std::uint32_t> idx;
  idx.reserve(raw.size());
  for (const auto& r : raw) idx.push_back(static_cast<std::uint32_t>(r.hash & mask));
  std::sort(idx.begin(), idx.end());

  FeatureVector v;
  double norm = 0.0;
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j < idx.size() && idx[j] == idx[i]) ++j;
    const double c = static_cast<double>(j - i);
    v.index.push_back(idx[i]);
    v.value.push_back(c);
    norm += c * c;
    i = j;
  }
  norm = std::sqrt(norm);
  for (auto& x : v.value) x /= norm;
  return v;
}

}  // namespace varicart
