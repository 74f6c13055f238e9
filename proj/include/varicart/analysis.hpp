#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "varicart/corpus.hpp"
#include "varicart/dynamics.hpp"
#include "varicart/preprocess.hpp"
#include "varicart/trainer.hpp"

namespace varicart {

using WordSet = std::unordered_set<std::string>;

// The embedded Spanish list (data/stopwords_es.txt).
const WordSet& spanish_stopwords();
// One word per line; blank lines and '#' comments skipped; lower-cased.
WordSet load_stopwords(const std::filesystem::path& path);

// Top-N ranked instances that are not common: the scorer's "errors".
struct ErrorSlice {
  std::size_t n = 0;
  std::vector<std::string> error_ids;  // rank order
};

// Throws ConfigError when n is outside [1, |ranked|], DataError when a
// ranked id is not in the dataset.
ErrorSlice error_slice(const RankedList& ranked, const Dataset& dataset, std::size_t n);

struct WordCount {
  std::string word;
  std::size_t count = 0;
  friend bool operator==(const WordCount&, const WordCount&) = default;
};

// Token frequencies over the error slice's texts, without stopwords and
// the pipeline's own tokens (mention, url, "emoji"). Count descending,
// then word ascending.
std::vector<WordCount> top_error_words(const RankedList& ranked, const Dataset& dataset, std::size_t n,
                                       const WordSet& stopwords, const NormalizationConfig& normalization = {});

struct KeywordFraction {
  std::size_t n = 0;
  std::size_t errors = 0;
  std::size_t with_keyword = 0;
  std::optional<double> fraction;  // nullopt when the slice is empty
};

// Case-insensitive whole-token match.
std::vector<KeywordFraction> keyword_error_fraction(const RankedList& ranked, const Dataset& dataset,
                                                    const std::string& keyword, const std::vector<std::size_t>& grid);
// Same fraction over every non-common instance, for comparison.
std::optional<double> corpus_keyword_fraction(const Dataset& dataset, const std::string& keyword);

struct AgreementPoint {
  std::size_t n = 0;
  std::size_t errors = 0;        // with usable annotations
  std::size_t partial = 0;       // exactly a 2-vs-1 split
  std::size_t unannotated = 0;   // excluded: fewer than two records
  std::optional<double> fraction_partial;
};

struct AgreementProfile {
  std::vector<AgreementPoint> points;
  // Full-agreement rate among annotated non-common instances.
  std::optional<double> corpus_full_rate;
};

AgreementProfile agreement_error_profile(const RankedList& ranked, const Dataset& dataset,
                                         const std::vector<std::size_t>& grid);

struct TokenContribution {
  std::string token;
  std::size_t begin = 0;  // code points in the lower-cased text
  std::size_t end = 0;
  double contribution = 0.0;
};

struct Attribution {
  std::vector<TokenContribution> tokens;
  double centered_bias = 0.0;
  double centered_logit = 0.0;
};

// Exact split of the centred logit of `target` (its logit minus the mean
// logit over labels) into per-token shares plus the centred bias. Text
// with features but no word tokens (only punctuation, say) gets a single
// entry spanning the whole text. Throws ConfigError for an unknown label.
Attribution token_attribution(const LinearModel& model, std::string_view text, const VarietyLabel& target);

void write_word_counts_csv(std::ostream& out, const std::vector<WordCount>& counts);
void write_keyword_fraction_csv(std::ostream& out, const std::vector<KeywordFraction>& rows);
void write_agreement_profile_csv(std::ostream& out, const AgreementProfile& profile);
// One JSON object per token: {"token":..,"begin":..,"end":..,"score":..}
void write_attribution_jsonl(std::ostream& out, const Attribution& a);

}  // namespace varicart
