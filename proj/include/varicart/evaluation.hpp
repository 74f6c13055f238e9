#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "varicart/corpus.hpp"
#include "varicart/dynamics.hpp"

namespace varicart {

using CommonFlags = std::unordered_map<std::string, bool>;
CommonFlags common_flags(const Dataset& dataset);

// is_common for each ranked id, in rank order. Throws DataError for ids
// without a flag.
std::vector<char> flags_in_rank_order(const RankedList& ranked, const CommonFlags& is_common);

// Mean of precision@k over the ranks k holding a common instance, as a
// percentage. nullopt when there are no commons.
std::optional<double> average_precision(const RankedList& ranked, const CommonFlags& is_common);
std::optional<double> average_precision(const std::vector<char>& flags);

struct AtN {
  std::size_t n = 0;
  double precision = 0.0;  // percent
  double recall = 0.0;     // percent
};

// Throws ConfigError when n is outside [1, |ranked|], DataError when the
// list holds no commons.
AtN precision_recall_at(const RankedList& ranked, const CommonFlags& is_common, std::size_t n);

// Grid start, start+step, ..., always ending at |ranked|.
std::vector<AtN> pr_series(const RankedList& ranked, const CommonFlags& is_common, std::size_t start = 10,
                           std::size_t step = 10);
std::vector<AtN> pr_series(const std::vector<char>& flags, std::size_t start = 10, std::size_t step = 10);

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation
  std::string formatted() const;  // "55.00 ± 7.07"
};

struct AggregatedMetrics {
  MeanStd aps;
  std::vector<MeanStd> precision;  // aligned with EvalReport::at_n
  std::vector<MeanStd> recall;
};

struct EvalReport {
  std::string scorer;
  double aps = 0.0;
  std::vector<AtN> at_n;
  std::vector<std::uint64_t> seeds_used;
  // Filled by aggregate_over_seeds; aps/at_n then hold the means.
  std::optional<AggregatedMetrics> aggregated;
};

// AP plus the default 10-step series. Throws DataError without commons.
EvalReport evaluate(const RankedList& ranked, const CommonFlags& is_common, const std::string& scorer,
                    std::uint64_t seed);

// Evaluates several rankings in parallel. Output order matches input.
struct RankingJob {
  const RankedList* ranked = nullptr;
  std::string scorer;
  std::uint64_t seed = 0;
};
std::vector<EvalReport> evaluate_all(const std::vector<RankingJob>& jobs, const CommonFlags& is_common);

// Per-metric mean and sample std over >= 2 per-seed reports of one scorer
// that share an N grid.
EvalReport aggregate_over_seeds(const std::vector<EvalReport>& reports);

// One row per scorer × N.
void write_report_csv(std::ostream& out, const std::vector<EvalReport>& reports);
// N,precision,recall
void write_pr_series_csv(std::ostream& out, const EvalReport& report);
// Model | APS | Prec-N | Recall-N ... for each cutoff; "-" when N is off the grid.
void write_report_table(std::ostream& out, const std::vector<EvalReport>& reports,
                        const std::vector<std::size_t>& cutoffs = {500, 1000});

}  // namespace varicart
