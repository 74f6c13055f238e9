#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "varicart/analysis.hpp"
#include "varicart/corpus.hpp"
#include "varicart/dynamics.hpp"
#include "varicart/trainer.hpp"

namespace varicart {

enum class DecidedLabel { variety_a, variety_b, common, irrelevant };
std::string to_string(DecidedLabel l);
// Accepts the enum names and, given a label set, the dataset's own codes.
std::optional<DecidedLabel> parse_decided_label(const std::string& s, const LabelSet* labels = nullptr);

struct LabelDecision {
  std::string instance_id;
  DecidedLabel label = DecidedLabel::common;
  std::string annotator_id;
  std::string timestamp;  // UTC, ISO 8601
  friend bool operator==(const LabelDecision&, const LabelDecision&) = default;
};

// Latest decision per (instance, annotator), in first-decided order.
std::vector<LabelDecision> active_decisions(const std::vector<LabelDecision>& log);

// Plurality of the active decisions for one instance; nullopt on a tie.
std::optional<DecidedLabel> merged_label(const std::vector<LabelDecision>& active_for_instance);

struct MergeResult {
  Dataset dataset;
  std::vector<std::string> dropped;     // irrelevant plurality
  std::vector<std::string> unresolved;  // tied; original labels kept
};

// Applies the decision log to the dataset: a variety plurality sets the
// train label and clears is_common, a common plurality sets is_common, an
// irrelevant plurality drops the instance.
MergeResult merge_decisions(const Dataset& dataset, const std::vector<LabelDecision>& log);

struct CandidateView {
  std::string id;
  std::string text;
  double score = 0.0;
  std::size_t rank = 0;  // 1-based
  std::string current_label;
  std::vector<TokenContribution> top_tokens;
};

struct TriageStats {
  std::size_t reviewed_count = 0;
  std::size_t total_count = 0;
  std::size_t confirmed_common_in_reviewed = 0;
  std::optional<double> live_precision;  // nullopt before any review
};

struct NotFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct Invalid : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Review queue over precomputed rankings. Every accepted decision is
// appended to the decision log before it becomes visible; constructing a
// service on an existing log replays it. Thread-safe.
class TriageService {
 public:
  using Clock = std::function<std::string()>;

  TriageService(Dataset dataset, std::map<std::string, RankedList> rankings, std::optional<LinearModel> model,
                std::filesystem::path decision_log, Clock clock = {});

  // Highest-ranked instances this annotator has not decided, rank order.
  // Throws NotFound for an unknown scorer, Invalid for limit < 1.
  std::vector<CandidateView> next_batch(const std::string& scorer, std::size_t limit,
                                        const std::string& annotator) const;

  // Stamps, persists and applies the decision. Throws NotFound for an
  // unknown instance, Invalid for an empty annotator.
  LabelDecision record_decision(LabelDecision decision);

  TriageStats stats() const;
  MergeResult export_merged() const;

  const Dataset& dataset() const { return dataset_; }
  std::vector<std::string> scorers() const;
  const std::map<std::string, RankedList>& rankings() const { return rankings_; }
  std::vector<LabelDecision> decisions() const;
  // Attribution toward variety_a (negative = toward variety_b); empty
  // without a model.
  std::vector<TokenContribution> attribution(const Instance& instance) const;
  // Merged label if resolved, else the dataset label ("common" for commons).
  std::string current_label(const Instance& instance) const;

 private:
  void apply(const LabelDecision& d);

  Dataset dataset_;
  std::map<std::string, RankedList> rankings_;
  std::optional<LinearModel> model_;
  std::filesystem::path log_path_;
  Clock clock_;

  mutable std::shared_mutex mutex_;
  std::ofstream log_;
  std::vector<LabelDecision> history_;
  // instance -> annotator -> label
  std::map<std::string, std::map<std::string, DecidedLabel>> active_;
};

// JSONL helpers for the decision log.
std::string decision_to_json(const LabelDecision& d);
LabelDecision decision_from_json(const std::string& line, const LabelSet* labels = nullptr);
std::vector<LabelDecision> read_decision_log(const std::filesystem::path& path, const LabelSet* labels = nullptr);

std::string utc_now_iso8601();

}  // namespace varicart
