#include "varicart/triage.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <mutex>

#include "json.hpp"

namespace varicart {

using nlohmann::json;

std::string to_string(DecidedLabel l) {
  switch (l) {
    case DecidedLabel::variety_a: return "variety_a";
    case DecidedLabel::variety_b: return "variety_b";
    case DecidedLabel::common: return "common";
    case DecidedLabel::irrelevant: return "irrelevant";
  }
  return "irrelevant";
}

std::optional<DecidedLabel> parse_decided_label(const std::string& s, const LabelSet* labels) {
  if (s == "variety_a") return DecidedLabel::variety_a;
  if (s == "variety_b") return DecidedLabel::variety_b;
  if (s == "common") return DecidedLabel::common;
  if (s == "irrelevant") return DecidedLabel::irrelevant;
  if (labels) {
    if (s == labels->variety_a.code()) return DecidedLabel::variety_a;
    if (s == labels->variety_b.code()) return DecidedLabel::variety_b;
    if (s == labels->common.code()) return DecidedLabel::common;
  }
  return std::nullopt;
}

std::string utc_now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[40];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[48];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

// ------------------------------------------------------------ merge rules

std::vector<LabelDecision> active_decisions(const std::vector<LabelDecision>& log) {
  std::vector<LabelDecision> out;
  std::map<std::pair<std::string, std::string>, std::size_t> slot;
  for (const auto& d : log) {
    auto [it, inserted] = slot.emplace(std::make_pair(d.instance_id, d.annotator_id), out.size());
    if (inserted)
      out.push_back(d);
    else
      out[it->second] = d;
  }
  return out;
}

std::optional<DecidedLabel> merged_label(const std::vector<LabelDecision>& active) {
  std::map<DecidedLabel, int> votes;
  for (const auto& d : active) ++votes[d.label];
  std::optional<DecidedLabel> best;
  int best_count = 0;
  bool tie = false;
  for (const auto& [label, n] : votes) {
    if (n > best_count) {
      best = label;
      best_count = n;
      tie = false;
    } else if (n == best_count) {
      tie = true;
    }
  }
  if (tie) return std::nullopt;
  return best;
}

namespace {

std::map<std::string, std::vector<LabelDecision>> by_instance(const std::vector<LabelDecision>& log) {
  std::map<std::string, std::vector<LabelDecision>> out;
  for (const auto& d : active_decisions(log)) out[d.instance_id].push_back(d);
  return out;
}

}  // namespace

MergeResult merge_decisions(const Dataset& dataset, const std::vector<LabelDecision>& log) {
  const auto grouped = by_instance(log);
  MergeResult r;
  std::vector<Instance> kept;
  kept.reserve(dataset.size());
  for (const auto& inst : dataset.instances()) {
    auto it = grouped.find(inst.id);
    if (it == grouped.end()) {
      kept.push_back(inst);
      continue;
    }
    const auto label = merged_label(it->second);
    if (!label) {
      r.unresolved.push_back(inst.id);
      kept.push_back(inst);
      continue;
    }
    Instance out = inst;
    switch (*label) {
      case DecidedLabel::irrelevant: r.dropped.push_back(inst.id); continue;
      case DecidedLabel::common: out.is_common = true; break;
      case DecidedLabel::variety_a:
        out.is_common = false;
        out.train_label = dataset.labels().variety_a;
        break;
      case DecidedLabel::variety_b:
        out.is_common = false;
        out.train_label = dataset.labels().variety_b;
        break;
    }
    kept.push_back(std::move(out));
  }
  r.dataset = Dataset(dataset.labels(), std::move(kept));
  return r;
}

// ------------------------------------------------------------ log format

std::string decision_to_json(const LabelDecision& d) {
  json j = {{"instance_id", d.instance_id},
            {"decided_label", to_string(d.label)},
            {"annotator_id", d.annotator_id},
            {"timestamp", d.timestamp}};
  return j.dump();
}

LabelDecision decision_from_json(const std::string& line, const LabelSet* labels) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error&) {
    throw Invalid("decision is not valid JSON");
  }
  if (!j.is_object()) throw Invalid("decision must be an object");
  auto str = [&](const char* key, bool required) -> std::string {
    if (!j.contains(key)) {
      if (required) throw Invalid(std::string("decision lacks '") + key + "'");
      return "";
    }
    if (!j[key].is_string()) throw Invalid(std::string("'") + key + "' must be a string");
    return j[key].get<std::string>();
  };
  LabelDecision d;
  d.instance_id = str("instance_id", true);
  const auto label = str("decided_label", true);
  const auto parsed = parse_decided_label(label, labels);
  if (!parsed) throw Invalid("unknown decided_label '" + label + "'");
  d.label = *parsed;
  d.annotator_id = str("annotator_id", true);
  d.timestamp = str("timestamp", false);
  return d;
}

std::vector<LabelDecision> read_decision_log(const std::filesystem::path& path, const LabelSet* labels) {
  std::vector<LabelDecision> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(decision_from_json(line, labels));
    } catch (const Invalid& e) {
      throw DataError("decision log '" + path.string() + "' line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

// ------------------------------------------------------------ service

TriageService::TriageService(Dataset dataset, std::map<std::string, RankedList> rankings,
                             std::optional<LinearModel> model, std::filesystem::path decision_log, Clock clock)
    : dataset_(std::move(dataset)),
      rankings_(std::move(rankings)),
      model_(std::move(model)),
      log_path_(std::move(decision_log)),
      clock_(clock ? std::move(clock) : Clock(utc_now_iso8601)) {
  for (const auto& [name, r] : rankings_)
    for (const auto& e : r.entries)
      if (!dataset_.find(e.instance_id))
        throw DataError("ranking '" + name + "' refers to unknown instance '" + e.instance_id + "'");
  for (const auto& d : read_decision_log(log_path_, &dataset_.labels())) {
    if (!dataset_.find(d.instance_id))
      throw DataError("decision log refers to unknown instance '" + d.instance_id + "'");
    apply(d);
  }
  if (log_path_.has_parent_path()) std::filesystem::create_directories(log_path_.parent_path());
  log_.open(log_path_, std::ios::app);
  if (!log_) throw ConfigError("cannot open decision log '" + log_path_.string() + "' for appending");
}

void TriageService::apply(const LabelDecision& d) {
  history_.push_back(d);
  active_[d.instance_id][d.annotator_id] = d.label;
}

std::vector<std::string> TriageService::scorers() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : rankings_) out.push_back(k);
  return out;
}

std::vector<LabelDecision> TriageService::decisions() const {
  std::shared_lock lock(mutex_);
  return history_;
}

namespace {

std::optional<DecidedLabel> merged_of(const std::map<std::string, DecidedLabel>& votes) {
  std::vector<LabelDecision> v;
  for (const auto& [annotator, label] : votes) v.push_back({"", label, annotator, ""});
  return merged_label(v);
}

}  // namespace

std::string TriageService::current_label(const Instance& inst) const {
  auto it = active_.find(inst.id);
  if (it != active_.end()) {
    if (auto m = merged_of(it->second)) {
      switch (*m) {
        case DecidedLabel::variety_a: return dataset_.labels().variety_a.code();
        case DecidedLabel::variety_b: return dataset_.labels().variety_b.code();
        case DecidedLabel::common: return "common";
        case DecidedLabel::irrelevant: return "irrelevant";
      }
    }
  }
  if (inst.is_common) return "common";
  return inst.train_label ? inst.train_label->code() : "";
}

std::vector<TokenContribution> TriageService::attribution(const Instance& inst) const {
  if (!model_) return {};
  const auto& order = model_->label_order();
  const auto target = std::find(order.begin(), order.end(), dataset_.labels().variety_a) != order.end()
                          ? dataset_.labels().variety_a
                          : order.front();
  return token_attribution(*model_, inst.text(), target).tokens;
}

std::vector<CandidateView> TriageService::next_batch(const std::string& scorer, std::size_t limit,
                                                     const std::string& annotator) const {
  if (limit < 1) throw Invalid("limit must be >= 1");
  auto r = rankings_.find(scorer);
  if (r == rankings_.end()) throw NotFound("no ranking loaded for scorer '" + scorer + "'");
  std::shared_lock lock(mutex_);
  std::vector<CandidateView> out;
  for (std::size_t k = 0; k < r->second.size() && out.size() < limit; ++k) {
    const auto& e = r->second.entries[k];
    auto a = active_.find(e.instance_id);
    if (a != active_.end() && a->second.count(annotator)) continue;
    const Instance& inst = dataset_.at(e.instance_id);
    CandidateView v;
    v.id = inst.id;
    v.text = inst.text();
    v.score = e.score;
    v.rank = k + 1;
    v.current_label = current_label(inst);
    auto tokens = attribution(inst);
    std::stable_sort(tokens.begin(), tokens.end(), [](const TokenContribution& x, const TokenContribution& y) {
      return std::abs(x.contribution) > std::abs(y.contribution);
    });
    if (tokens.size() > 3) tokens.resize(3);
    v.top_tokens = std::move(tokens);
    out.push_back(std::move(v));
  }
  return out;
}

LabelDecision TriageService::record_decision(LabelDecision d) {
  if (!dataset_.find(d.instance_id)) throw NotFound("unknown instance '" + d.instance_id + "'");
  if (d.annotator_id.empty()) throw Invalid("annotator_id must not be empty");
  std::unique_lock lock(mutex_);
  d.timestamp = clock_();
  log_ << decision_to_json(d) << '\n';
  log_.flush();
  if (!log_) throw std::runtime_error("failed to append to decision log '" + log_path_.string() + "'");
  apply(d);
  return d;
}

TriageStats TriageService::stats() const {
  std::shared_lock lock(mutex_);
  TriageStats s;
  s.total_count = dataset_.size();
  for (const auto& [id, votes] : active_) {
    ++s.reviewed_count;
    if (merged_of(votes) == DecidedLabel::common) ++s.confirmed_common_in_reviewed;
  }
  if (s.reviewed_count)
    s.live_precision = static_cast<double>(s.confirmed_common_in_reviewed) / static_cast<double>(s.reviewed_count);
  return s;
}

MergeResult TriageService::export_merged() const {
  std::shared_lock lock(mutex_);
  return merge_decisions(dataset_, history_);
}

}  // namespace varicart
