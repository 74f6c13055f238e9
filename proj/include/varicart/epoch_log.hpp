#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "varicart/common.hpp"

namespace varicart {

// One line of the log file.
struct EpochRecord {
  std::string instance_id;
  int epoch = 0;  // 1-based
  std::map<std::string, double> probs;
  std::string gold_label;
};

// Dense probabilities p[i, e, j] for every instance i, epoch e in 1..E and
// label j in label_order. Instances keep first-seen order.
class EpochProbabilityLog {
 public:
  EpochProbabilityLog() = default;
  EpochProbabilityLog(std::vector<VarietyLabel> label_order, std::vector<std::string> instance_ids,
                      std::vector<std::size_t> gold_index, int epochs);

  // Validates density, normalisation (1e-6), label consistency and that
  // gold labels are constant per instance. Throws DataError.
  static EpochProbabilityLog from_records(const std::vector<EpochRecord>& records);

  std::size_t num_instances() const { return ids_.size(); }
  std::size_t num_labels() const { return labels_.size(); }
  int epochs() const { return epochs_; }
  bool empty() const { return ids_.empty(); }

  const std::vector<VarietyLabel>& label_order() const { return labels_; }
  const std::vector<std::string>& instance_ids() const { return ids_; }
  std::size_t gold_index(std::size_t i) const { return gold_[i]; }

  // epoch is 1-based.
  double prob(std::size_t i, int epoch, std::size_t label) const {
    return probs_[offset(i, epoch) + label];
  }
  const double* row(std::size_t i, int epoch) const { return probs_.data() + offset(i, epoch); }
  double* mutable_row(std::size_t i, int epoch) { return probs_.data() + offset(i, epoch); }

  std::vector<EpochRecord> records() const;

 private:
  std::size_t offset(std::size_t i, int epoch) const {
    return (i * static_cast<std::size_t>(epochs_) + static_cast<std::size_t>(epoch - 1)) * labels_.size();
  }

  std::vector<VarietyLabel> labels_;
  std::vector<std::string> ids_;
  std::vector<std::size_t> gold_;
  int epochs_ = 0;
  std::vector<double> probs_;
};

struct LogReadResult {
  EpochProbabilityLog log;
  std::vector<std::string> warnings;
};

// One JSON object per line: instance_id, epoch, probs, gold_label.
// Unknown fields and out-of-order records are warnings; everything else
// that breaks the contract is a DataError naming the line.
LogReadResult read_epoch_log(std::istream& in);
LogReadResult read_epoch_log(const std::string& path);

// Epoch-major, instances in log order.
void write_epoch_log(std::ostream& out, const EpochProbabilityLog& log);

}  // namespace varicart
