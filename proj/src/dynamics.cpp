#include "varicart/dynamics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "varicart/delimited.hpp"

namespace varicart {

std::string to_string(Scorer s) {
  switch (s) {
    case Scorer::dm_mean_pred: return "dm_mean_pred";
    case Scorer::dm_std_pred: return "dm_std_pred";
    case Scorer::dm_gold_confidence: return "dm_gold_confidence";
    case Scorer::random: return "random";
  }
  return "random";
}

Scorer parse_scorer(const std::string& s) {
  if (s == "dm_mean_pred") return Scorer::dm_mean_pred;
  if (s == "dm_std_pred") return Scorer::dm_std_pred;
  if (s == "dm_gold_confidence") return Scorer::dm_gold_confidence;
  if (s == "random") return Scorer::random;
  throw ConfigError("unknown scorer '" + s + "'");
}

namespace {

void require_nonempty(const EpochProbabilityLog& log) {
  if (log.empty()) throw DataError("cannot score an empty epoch log");
}

double max_prob(const EpochProbabilityLog& log, std::size_t i, int e) {
  const double* p = log.row(i, e);
  return *std::max_element(p, p + log.num_labels());
}

// Per-instance statistic, shared by the parallel and serial drivers.
double mean_pred(const EpochProbabilityLog& log, std::size_t i) {
  double s = 0.0;
  for (int e = 1; e <= log.epochs(); ++e) s += max_prob(log, i, e);
  return -s / log.epochs();
}

double std_pred(const EpochProbabilityLog& log, std::size_t i) {
  // Shifted by the first epoch so a constant sequence gives exactly 0.
  const int E = log.epochs();
  const double m1 = max_prob(log, i, 1);
  double mean = 0.0;
  for (int e = 1; e <= E; ++e) mean += max_prob(log, i, e) - m1;
  mean /= E;
  double var = 0.0;
  for (int e = 1; e <= E; ++e) {
    const double d = max_prob(log, i, e) - m1 - mean;
    var += d * d;
  }
  return std::sqrt(var / E);
}

double gold_confidence(const EpochProbabilityLog& log, std::size_t i) {
  double s = 0.0;
  for (int e = 1; e <= log.epochs(); ++e) s += log.prob(i, e, log.gold_index(i));
  return -s / log.epochs();
}

template <double (*Stat)(const EpochProbabilityLog&, std::size_t)>
std::vector<ScoreRecord> parallel_scores(const EpochProbabilityLog& log, Scorer which) {
  require_nonempty(log);
  std::vector<ScoreRecord> out(log.num_instances());
  const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto u = static_cast<std::size_t>(i);
    out[u].instance_id = log.instance_ids()[u];
    out[u].scorer = which;
    out[u].score = Stat(log, u);
  }
  return out;
}

template <double (*Stat)(const EpochProbabilityLog&, std::size_t)>
std::vector<ScoreRecord> serial_scores(const EpochProbabilityLog& log, Scorer which) {
  require_nonempty(log);
  std::vector<ScoreRecord> out;
  out.reserve(log.num_instances());
  for (std::size_t i = 0; i < log.num_instances(); ++i) out.push_back({log.instance_ids()[i], which, Stat(log, i)});
  return out;
}

}  // namespace

std::vector<ScoreRecord> dm_mean_pred(const EpochProbabilityLog& log) {
  return parallel_scores<mean_pred>(log, Scorer::dm_mean_pred);
}
std::vector<ScoreRecord> dm_std_pred(const EpochProbabilityLog& log) {
  return parallel_scores<std_pred>(log, Scorer::dm_std_pred);
}
std::vector<ScoreRecord> dm_gold_confidence(const EpochProbabilityLog& log) {
  return parallel_scores<gold_confidence>(log, Scorer::dm_gold_confidence);
}

namespace serial {
std::vector<ScoreRecord> dm_mean_pred(const EpochProbabilityLog& log) {
  return serial_scores<mean_pred>(log, Scorer::dm_mean_pred);
}
std::vector<ScoreRecord> dm_std_pred(const EpochProbabilityLog& log) {
  return serial_scores<std_pred>(log, Scorer::dm_std_pred);
}
std::vector<ScoreRecord> dm_gold_confidence(const EpochProbabilityLog& log) {
  return serial_scores<gold_confidence>(log, Scorer::dm_gold_confidence);
}
}  // namespace serial

std::vector<ScoreRecord> random_scores(const std::vector<std::string>& instance_ids, std::uint64_t seed) {
  std::unordered_set<std::string> seen;
  std::vector<ScoreRecord> out;
  out.reserve(instance_ids.size());
  for (const auto& id : instance_ids) {
    if (!seen.insert(id).second) throw DataError("duplicate instance id '" + id + "'");
    const std::uint64_t bits = SplitMix64::mix(seed + fnv1a64(id));
    out.push_back({id, Scorer::random, static_cast<double>(bits >> 11) * 0x1.0p-53});
  }
  return out;
}

std::vector<ScoreRecord> score(const EpochProbabilityLog& log, Scorer scorer, std::uint64_t seed) {
  switch (scorer) {
    case Scorer::dm_mean_pred: return dm_mean_pred(log);
    case Scorer::dm_std_pred: return dm_std_pred(log);
    case Scorer::dm_gold_confidence: return dm_gold_confidence(log);
    case Scorer::random: return random_scores(log.instance_ids(), seed);
  }
  return {};
}

RankedList rank_by_score(std::vector<ScoreRecord> scores) {
  std::unordered_set<std::string> seen;
  for (const auto& s : scores)
    if (!seen.insert(s.instance_id).second) throw DataError("duplicate instance id '" + s.instance_id + "' in scores");
  std::sort(scores.begin(), scores.end(), [](const ScoreRecord& a, const ScoreRecord& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.instance_id < b.instance_id;
  });
  return RankedList{std::move(scores)};
}

// ------------------------------------------------------------ CSV

namespace {

double parse_score(const std::string& s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw DataError("not a score: '" + s + "'");
  return v;
}

}  // namespace

void write_scores_csv(std::ostream& out, const std::vector<ScoreRecord>& scores) {
  write_row(out, {"instance_id", "scorer", "score"}, ',');
  for (const auto& s : scores) write_row(out, {s.instance_id, to_string(s.scorer), format_double(s.score)}, ',');
}

std::vector<ScoreRecord> read_scores_csv(std::istream& in) {
  DelimitedReader reader(in, ',');
  auto header = reader.next();
  if (!header) return {};
  std::size_t base = 0;
  if (!header->empty() && (*header)[0] == "rank") base = 1;
  if (header->size() < base + 3 || (*header)[base] != "instance_id" || (*header)[base + 1] != "scorer" ||
      (*header)[base + 2] != "score")
    throw DataError("score file must have columns instance_id,scorer,score");
  std::vector<ScoreRecord> out;
  while (auto row = reader.next()) {
    if (row->size() < base + 3) throw DataError("score file line " + std::to_string(reader.line()) + ": too few fields");
    try {
      out.push_back({(*row)[base], parse_scorer((*row)[base + 1]), parse_score((*row)[base + 2])});
    } catch (const ConfigError& e) {
      throw DataError(e.what());
    }
  }
  return out;
}

void write_ranking_csv(std::ostream& out, const RankedList& ranked) {
  write_row(out, {"rank", "instance_id", "scorer", "score"}, ',');
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    const auto& s = ranked.entries[k];
    write_row(out, {std::to_string(k + 1), s.instance_id, to_string(s.scorer), format_double(s.score)}, ',');
  }
}

RankedList read_ranking_csv(std::istream& in) { return rank_by_score(read_scores_csv(in)); }

}  // namespace varicart
