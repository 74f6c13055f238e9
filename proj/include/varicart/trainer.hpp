#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "varicart/common.hpp"
#include "varicart/corpus.hpp"
#include "varicart/epoch_log.hpp"
#include "varicart/features.hpp"

namespace varicart {

class KeyValueConfig;

struct TrainConfig {
  int epochs = 10;
  double learning_rate = 0.1;
  std::uint64_t seed = 42;
  FeatureConfig features;
  double l2 = 1e-6;
  // Train and log on every instance instead of the train split only.
  bool full_dataset = false;

  void validate() const;
  // Reads keys under `prefix` (e.g. "train."): epochs, learning_rate,
  // seed, l2, full_dataset, hash_dim, word_ngrams = [1, 2], char_ngrams.
  void apply(const KeyValueConfig& kv, const std::string& prefix);
};

// Multinomial logistic regression over hashed n-gram features.
class LinearModel {
 public:
  LinearModel(std::vector<VarietyLabel> label_order, FeatureConfig features);

  const std::vector<VarietyLabel>& label_order() const { return labels_; }
  std::size_t num_labels() const { return labels_.size(); }
  std::uint64_t hash_dim() const { return features_.config().hash_dim; }
  const Featurizer& featurizer() const { return features_; }

  double weight(std::size_t label, std::uint32_t feature) const { return weights_[label * hash_dim() + feature]; }
  double& weight(std::size_t label, std::uint32_t feature) { return weights_[label * hash_dim() + feature]; }
  double bias(std::size_t label) const { return bias_[label]; }
  double& bias(std::size_t label) { return bias_[label]; }

  std::vector<double> logits(const FeatureVector& x) const;
  std::vector<double> predict_proba(const FeatureVector& x) const;
  // Index into label_order; ties go to the lowest index.
  std::size_t predict(const FeatureVector& x) const;

  void save(std::ostream& out) const;
  static LinearModel load(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static LinearModel load(const std::filesystem::path& path);

  friend bool operator==(const LinearModel& a, const LinearModel& b) {
    return a.labels_ == b.labels_ && a.features_.config() == b.features_.config() && a.weights_ == b.weights_ &&
           a.bias_ == b.bias_;
  }

 private:
  std::vector<VarietyLabel> labels_;
  Featurizer features_;
  std::vector<double> weights_;  // [label][feature]
  std::vector<double> bias_;
};

// Softmax of the linear scores. Empty text gives the bias-only softmax.
std::vector<double> predict_proba(const LinearModel& model, std::string_view text);

// Numerically stable softmax.
std::vector<double> softmax(const std::vector<double>& logits);

// Per-example objective -log p(y|x) + (l2/2)·||W||² and its gradient.
// The bias is not regularised. Dense, for checking and small models.
struct Gradient {
  std::vector<double> weights;  // same layout as the model
  std::vector<double> bias;
};
double example_loss(const LinearModel& model, const FeatureVector& x, std::size_t y, double l2);
Gradient example_gradient(const LinearModel& model, const FeatureVector& x, std::size_t y, double l2);

// Probability pass: p(label | instance) for every vector, written row by
// row into `out` (num_vectors × num_labels). Parallel over instances.
void probability_pass(const LinearModel& model, const std::vector<FeatureVector>& xs, double* out);
namespace serial {
void probability_pass(const LinearModel& model, const std::vector<FeatureVector>& xs, double* out);
}

struct TrainResult {
  LinearModel model;
  EpochProbabilityLog log;
};

// Seeded-shuffle SGD for `epochs` epochs; after each epoch every instance
// of the dynamics split is scored and recorded. Label order is the sorted
// pair of variety codes. Common instances must already carry a label.
TrainResult train_with_dynamics(const Dataset& dataset, const TrainConfig& config);

struct GroupF1 {
  int epoch = 0;
  std::optional<double> common;      // nullopt when the group is empty
  std::optional<double> non_common;
};

// Macro-F1 (over labels that occur as gold or prediction) of argmax
// predictions against train_label, separately for commons and the rest.
std::vector<GroupF1> per_group_f1(const EpochProbabilityLog& log, const Dataset& dataset);

struct ClassificationScores {
  double accuracy = 0.0;  // exact label-set match, percent
  double precision = 0.0; // macro over the two varieties, percent
  double recall = 0.0;
  double f1 = 0.0;
};

struct OneVsRestReport {
  ClassificationScores single_class;
  ClassificationScores multi_class;
  std::size_t train_count = 0;
  std::size_t eval_count = 0;
  std::string eval_source;  // "test split", "holdout" or "training data"
};

// Single multinomial model vs one binary model per variety. Commons are
// positive for both varieties. Evaluates on the test split when present,
// otherwise on a seeded 20% holdout (>= 20 instances) or the training data.
OneVsRestReport train_one_vs_rest(const Dataset& dataset, const TrainConfig& config);

}  // namespace varicart
