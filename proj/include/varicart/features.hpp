#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace varicart {

struct NgramRange {
  int min = 1;
  int max = 1;
  friend bool operator==(const NgramRange&, const NgramRange&) = default;
};

struct FeatureConfig {
  NgramRange word_ngrams{1, 2};
  NgramRange char_ngrams{3, 5};
  std::uint64_t hash_dim = std::uint64_t{1} << 20;  // power of two

  void validate() const;
  friend bool operator==(const FeatureConfig&, const FeatureConfig&) = default;
};

// Sparse, L2-normalised feature vector with strictly increasing indices.
struct FeatureVector {
  std::vector<std::uint32_t> index;
  std::vector<double> value;

  std::size_t nnz() const { return index.size(); }
};

// A word token: lower-cased alphanumeric run and its code-point span in
// the lower-cased text.
struct Token {
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;
};

// One n-gram occurrence, its hashed slot, its share of that slot's value
// and the token it is attributed to (-1 only when the text has no tokens).
struct FeatureOccurrence {
  std::uint32_t index = 0;
  double value = 0.0;
  int owner = -1;
};

struct FeatureBreakdown {
  std::vector<Token> tokens;
  std::vector<FeatureOccurrence> occurrences;
};

// Lower-cases, splits on non-alphanumerics, hashes word n-grams and
// character n-grams of the whole lower-cased string with FNV-1a into
// hash_dim slots, then scales counts to unit L2 norm. A feature's value is
// the sum of its occurrences' values.
class Featurizer {
 public:
  explicit Featurizer(FeatureConfig config);

  const FeatureConfig& config() const { return config_; }

  FeatureVector extract(std::string_view text) const;

  // Word n-grams belong to their centre token; character n-grams to the
  // token holding their centre character (ties to the left), or to the
  // nearest token on the left (else right) when the centre is a separator.
  FeatureBreakdown breakdown(std::string_view text) const;

  static std::vector<Token> tokenize(std::string_view text);

 private:
  FeatureConfig config_;
};

}  // namespace varicart
