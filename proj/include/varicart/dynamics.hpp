#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "varicart/epoch_log.hpp"

namespace varicart {

enum class Scorer { dm_mean_pred, dm_std_pred, dm_gold_confidence, random };

std::string to_string(Scorer s);
Scorer parse_scorer(const std::string& s);

struct ScoreRecord {
  std::string instance_id;
  Scorer scorer = Scorer::random;
  double score = 0.0;

  friend bool operator==(const ScoreRecord&, const ScoreRecord&) = default;
};

// Highest score first.
struct RankedList {
  std::vector<ScoreRecord> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
  const std::string& id(std::size_t k) const { return entries[k].instance_id; }
};

// Confidence on the predicted label, negated: -(1/E) Σ_e max_j p[i,j,e].
// Bounded by [-1, -1/K].
std::vector<ScoreRecord> dm_mean_pred(const EpochProbabilityLog& log);

// Population standard deviation over epochs of max_j p[i,j,e].
std::vector<ScoreRecord> dm_std_pred(const EpochProbabilityLog& log);

// Classic cartography confidence on the gold label, negated so that
// harder instances score higher: -(1/E) Σ_e p[i,gold,e].
std::vector<ScoreRecord> dm_gold_confidence(const EpochProbabilityLog& log);

// Single-threaded versions of the three kernels above.
namespace serial {
std::vector<ScoreRecord> dm_mean_pred(const EpochProbabilityLog& log);
std::vector<ScoreRecord> dm_std_pred(const EpochProbabilityLog& log);
std::vector<ScoreRecord> dm_gold_confidence(const EpochProbabilityLog& log);
}  // namespace serial

std::vector<ScoreRecord> score(const EpochProbabilityLog& log, Scorer scorer, std::uint64_t seed);

// Uniform [0,1) per id: SplitMix64 finaliser of (seed + FNV-1a(id)), top
// 53 bits. Depends only on (seed, id), never on list order.
std::vector<ScoreRecord> random_scores(const std::vector<std::string>& instance_ids, std::uint64_t seed);

// Descending score, ties by ascending id. Throws DataError on duplicate ids.
RankedList rank_by_score(std::vector<ScoreRecord> scores);

// CSV "instance_id,scorer,score", in the given order.
void write_scores_csv(std::ostream& out, const std::vector<ScoreRecord>& scores);
// Accepts the score CSV, optionally with a leading "rank" column.
std::vector<ScoreRecord> read_scores_csv(std::istream& in);

// CSV "rank,instance_id,scorer,score", 1-based ranks.
void write_ranking_csv(std::ostream& out, const RankedList& ranked);
RankedList read_ranking_csv(std::istream& in);

}  // namespace varicart
