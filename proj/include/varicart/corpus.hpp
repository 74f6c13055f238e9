#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "varicart/common.hpp"

namespace varicart {

// One annotator's five-column judgement.
struct AnnotationRecord {
  std::string annotator_id;
  bool cuban_variety = false;      // target variety (variety_a)
  bool not_cuban_variety = false;  // anything but the target (variety_b)
  std::string specific_variety;    // free text, kept verbatim
  bool not_able_to_identify = false;
  bool irrelevant = false;
};

enum class Split { train, dev, test };
std::string to_string(Split s);
Split parse_split(const std::string& s);

enum class AgreementKind { full, partial, disagreement };
std::string to_string(AgreementKind k);

struct Instance {
  std::string id;
  std::string raw_text;
  std::optional<std::string> normalized_text;
  // Always one of the two variety codes once assigned. Common instances
  // loaded from annotations have no label until assign_single_labels runs.
  std::optional<VarietyLabel> train_label;
  bool is_common = false;
  std::vector<AnnotationRecord> annotations;
  Split split = Split::train;

  const std::string& text() const { return normalized_text ? *normalized_text : raw_text; }
};

struct Rejection {
  std::string id;
  std::string reason;
};

enum class DiscardReason { irrelevant, disagreement };
std::string to_string(DiscardReason r);

struct Discarded {
  Instance instance;
  DiscardReason reason;
};

enum class DatasetFormat { dsl_tl, cuban_tsv, generic_csv };
DatasetFormat parse_format(const std::string& s);
std::string to_string(DatasetFormat f);

class Dataset {
 public:
  Dataset() = default;
  Dataset(LabelSet labels, std::vector<Instance> instances);

  const LabelSet& labels() const { return labels_; }
  const std::vector<Instance>& instances() const { return instances_; }
  std::size_t size() const { return instances_.size(); }
  bool empty() const { return instances_.empty(); }

  const Instance* find(const std::string& id) const;
  const Instance& at(const std::string& id) const;

  // Rows rejected at load time, in file order.
  std::vector<Rejection> rejections;
  // Irrelevant rows and all-distinct annotator triples. Disagreements stay
  // here so a triage queue can pick them up.
  std::vector<Discarded> discarded;

  std::size_t common_count() const;
  // Instances whose split is `s`.
  std::vector<const Instance*> in_split(Split s) const;

 private:
  LabelSet labels_;
  std::vector<Instance> instances_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct LoadOptions {
  DatasetFormat format = DatasetFormat::generic_csv;
  // Defaults: dsl_tl -> ES-AR/ES-ES/ES, cuban_tsv -> ES-CU/not-ES-CU/ES,
  // generic_csv -> the (at most two) codes seen in the file plus "ES".
  std::optional<LabelSet> labels;
  // Throw on the first rejected row instead of reporting it.
  bool strict = false;
};

Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options);
Dataset load_dataset(std::istream& in, const LoadOptions& options);

// Writes id,text,train_label,is_common,split. Text is the raw text.
void write_generic_csv(std::ostream& out, const Dataset& dataset);

// "id<TAB>reason" per rejected row.
void write_rejections(std::ostream& out, const Dataset& dataset);

// Per-annotator label: variety_a, variety_b or common. nullopt for an
// irrelevant record. Throws DataError for malformed or empty records.
std::optional<VarietyLabel> annotator_label(const AnnotationRecord& record, const LabelSet& labels);

struct Discard {
  DiscardReason reason;
  friend bool operator==(const Discard&, const Discard&) = default;
};
using Aggregate = std::variant<VarietyLabel, Discard>;

// Two-of-N majority rule; any irrelevant record discards the instance.
Aggregate aggregate_annotations(const std::vector<AnnotationRecord>& records, const LabelSet& labels);

// Classification of the non-irrelevant per-annotator labels.
AgreementKind agreement_of(const std::vector<AnnotationRecord>& records, const LabelSet& labels);

struct AgreementSummary {
  std::size_t full_count = 0;
  std::size_t partial_count = 0;
  std::size_t disagreement_count = 0;
  double full_fraction = 0.0;
  double partial_fraction = 0.0;
  double disagreement_fraction = 0.0;

  std::size_t total() const { return full_count + partial_count + disagreement_count; }
};

// Counts retained instances plus the disagreement side list; irrelevant
// discards are excluded.
AgreementSummary agreement_summary(const Dataset& dataset);

// Gives every common instance one of the two variety codes with
// probability 1/2 each. Draws come from SplitMix64(seed), one per common
// instance in dataset order: the top bit selects variety_b.
Dataset assign_single_labels(const Dataset& dataset, std::uint64_t seed);

}  // namespace varicart
