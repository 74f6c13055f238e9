#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "varicart/corpus.hpp"
#include "varicart/dynamics.hpp"
#include "varicart/evaluation.hpp"
#include "varicart/preprocess.hpp"
#include "varicart/trainer.hpp"

namespace varicart {

std::string version();

struct ExperimentConfig {
  std::filesystem::path dataset;
  DatasetFormat format = DatasetFormat::generic_csv;
  std::optional<LabelSet> labels;
  bool normalize = true;
  NormalizationConfig normalization;
  TrainConfig train;  // train.seed is replaced by each experiment seed
  std::vector<Scorer> scorers = {Scorer::dm_mean_pred, Scorer::dm_std_pred, Scorer::random};
  std::vector<std::uint64_t> seeds = {42, 151, 2021, 15, 98};
  std::filesystem::path output;
  // External epoch logs instead of training. "{seed}" is replaced by the
  // seed; without it every seed reads the same file.
  std::optional<std::string> logs;
  std::size_t parallel_seeds = 1;

  // Throws ConfigError. Checks that the dataset exists.
  void validate() const;

  // Sections [dataset] (path, format, labels = [a, b, common]),
  // [normalization], [train] and [experiment] (scorers, seeds, output,
  // logs, normalize, parallel_seeds). Unknown keys are a ConfigError.
  static ExperimentConfig from(const KeyValueConfig& kv);
};

struct SeedOutcome {
  std::uint64_t seed = 0;
  std::vector<EvalReport> reports;  // one per scorer, config order
  std::vector<GroupF1> group_f1;    // empty with external logs
};

struct ExperimentResult {
  std::string config_hash;
  std::vector<SeedOutcome> seeds;       // config order
  std::vector<EvalReport> aggregated;   // one per scorer; empty for a single seed
  std::vector<std::string> files;       // relative to the output directory
};

// Per seed: assign labels, train (or read logs), score, rank, evaluate.
// Then aggregate and write manifest.json. Errors carry the stage and seed
// and keep their type; a manifest with status "failed" lists whatever was
// written. Output layout:
//   seed_<s>/epoch_log.jsonl, model.vcm, group_f1.csv  (trained runs)
//   seed_<s>/ranking_<scorer>.csv, seed_<s>/report.csv
//   report.csv, manifest.json
ExperimentResult run_experiment(const ExperimentConfig& config);

// Canonical text of everything that determines the outputs.
std::string canonical_config(const ExperimentConfig& config);

}  // namespace varicart
