#include "varicart/epoch_log.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>

#include "json.hpp"

namespace varicart {

using nlohmann::json;

EpochProbabilityLog::EpochProbabilityLog(std::vector<VarietyLabel> label_order, std::vector<std::string> instance_ids,
                                         std::vector<std::size_t> gold_index, int epochs)
    : labels_(std::move(label_order)), ids_(std::move(instance_ids)), gold_(std::move(gold_index)), epochs_(epochs) {
  if (epochs_ < 1) throw DataError("epoch log needs at least one epoch");
  if (gold_.size() != ids_.size()) throw DataError("epoch log: gold labels and ids differ in length");
  for (auto g : gold_)
    if (g >= labels_.size()) throw DataError("epoch log: gold label index out of range");
  probs_.assign(ids_.size() * static_cast<std::size_t>(epochs_) * labels_.size(), 0.0);
}

EpochProbabilityLog EpochProbabilityLog::from_records(const std::vector<EpochRecord>& records) {
  if (records.empty()) return {};

  std::set<std::string> label_codes;
  for (const auto& [k, v] : records.front().probs) label_codes.insert(k);
  if (label_codes.size() < 2) throw DataError("epoch log: records need at least two labels");
  std::vector<VarietyLabel> labels;
  std::unordered_map<std::string, std::size_t> label_index;
  for (const auto& c : label_codes) {
    label_index[c] = labels.size();
    labels.emplace_back(c);
  }

  std::vector<std::string> ids;
  std::unordered_map<std::string, std::size_t> id_index;
  std::vector<std::string> gold_code;
  int max_epoch = 0;
  for (const auto& r : records) {
    if (r.epoch < 1) throw DataError("epoch log: epoch must be >= 1 for '" + r.instance_id + "'");
    max_epoch = std::max(max_epoch, r.epoch);
    auto [it, inserted] = id_index.emplace(r.instance_id, ids.size());
    if (inserted) {
      ids.push_back(r.instance_id);
      gold_code.push_back(r.gold_label);
    } else if (gold_code[it->second] != r.gold_label) {
      throw DataError("epoch log: gold label of '" + r.instance_id + "' changes between epochs");
    }
  }

  std::vector<std::size_t> gold;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto it = label_index.find(gold_code[i]);
    if (it == label_index.end())
      throw DataError("epoch log: gold label '" + gold_code[i] + "' of '" + ids[i] + "' is not among the labels");
    gold.push_back(it->second);
  }

  EpochProbabilityLog log(labels, ids, gold, max_epoch);
  std::vector<char> seen(ids.size() * static_cast<std::size_t>(max_epoch), 0);
  for (const auto& r : records) {
    const std::size_t i = id_index.at(r.instance_id);
    char& s = seen[i * static_cast<std::size_t>(max_epoch) + static_cast<std::size_t>(r.epoch - 1)];
    if (s) throw DataError("epoch log: duplicate record for '" + r.instance_id + "' epoch " + std::to_string(r.epoch));
    s = 1;
    if (r.probs.size() != labels.size())
      throw DataError("epoch log: record for '" + r.instance_id + "' has a different label set");
    double sum = 0.0;
    double* row = log.mutable_row(i, r.epoch);
    for (const auto& [code, p] : r.probs) {
      auto it = label_index.find(code);
      if (it == label_index.end())
        throw DataError("epoch log: record for '" + r.instance_id + "' has a different label set");
      if (!(p >= 0.0 && p <= 1.0))
        throw DataError("epoch log: probability outside [0,1] for '" + r.instance_id + "'");
      row[it->second] = p;
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-6)
      throw DataError("epoch log: probabilities of '" + r.instance_id + "' epoch " + std::to_string(r.epoch) +
                      " sum to " + std::to_string(sum));
  }
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (int e = 1; e <= max_epoch; ++e)
      if (!seen[i * static_cast<std::size_t>(max_epoch) + static_cast<std::size_t>(e - 1)])
        throw DataError("epoch log is not dense: '" + ids[i] + "' has no record for epoch " + std::to_string(e));
  return log;
}

std::vector<EpochRecord> EpochProbabilityLog::records() const {
  std::vector<EpochRecord> out;
  out.reserve(ids_.size() * static_cast<std::size_t>(epochs_));
  for (int e = 1; e <= epochs_; ++e) {
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      EpochRecord r;
      r.instance_id = ids_[i];
      r.epoch = e;
      r.gold_label = labels_[gold_[i]].code();
      for (std::size_t j = 0; j < labels_.size(); ++j) r.probs[labels_[j].code()] = prob(i, e, j);
      out.push_back(std::move(r));
    }
  }
  return out;
}

LogReadResult read_epoch_log(std::istream& in) {
  static const std::set<std::string> known = {"instance_id", "epoch", "probs", "gold_label"};
  LogReadResult result;
  std::vector<EpochRecord> records;
  std::string line;
  std::size_t line_no = 0;
  std::set<std::string> warned_fields;
  int last_epoch = 0;
  bool warned_order = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = "epoch log line " + std::to_string(line_no) + ": ";
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(where + "invalid JSON");
    }
    if (!j.is_object()) throw DataError(where + "expected an object");
    EpochRecord r;
    try {
      if (!j.contains("instance_id") || !j["instance_id"].is_string()) throw DataError(where + "instance_id must be a string");
      if (!j.contains("epoch") || !j["epoch"].is_number_integer()) throw DataError(where + "epoch must be an integer");
      if (!j.contains("probs") || !j["probs"].is_object()) throw DataError(where + "probs must be an object");
      if (!j.contains("gold_label") || !j["gold_label"].is_string()) throw DataError(where + "gold_label must be a string");
      r.instance_id = j["instance_id"].get<std::string>();
      r.epoch = j["epoch"].get<int>();
      r.gold_label = j["gold_label"].get<std::string>();
      for (const auto& [k, v] : j["probs"].items()) {
        if (!v.is_number()) throw DataError(where + "probability for '" + k + "' is not a number");
        r.probs[k] = v.get<double>();
      }
    } catch (const json::exception&) {
      throw DataError(where + "malformed record");
    }
    for (const auto& [k, v] : j.items())
      if (!known.count(k) && warned_fields.insert(k).second)
        result.warnings.push_back(where + "unknown field '" + k + "' ignored");
    if (r.epoch < last_epoch && !warned_order) {
      result.warnings.push_back(where + "records are not in epoch order");
      warned_order = true;
    }
    last_epoch = r.epoch;
    records.push_back(std::move(r));
  }
  result.log = EpochProbabilityLog::from_records(records);
  return result;
}

LogReadResult read_epoch_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open epoch log '" + path + "'");
  return read_epoch_log(in);
}

void write_epoch_log(std::ostream& out, const EpochProbabilityLog& log) {
  for (const auto& r : log.records()) {
    json j;
    j["instance_id"] = r.instance_id;
    j["epoch"] = r.epoch;
    j["probs"] = r.probs;
    j["gold_label"] = r.gold_label;
    out << j.dump() << '\n';
  }
}

}  // namespace varicart
