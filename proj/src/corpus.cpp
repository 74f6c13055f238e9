#include "varicart/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "varicart/delimited.hpp"

namespace varicart {

std::string to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  return "train";
}

Split parse_split(const std::string& s) {
  if (s.empty() || s == "train") return Split::train;
  if (s == "dev" || s == "validation") return Split::dev;
  if (s == "test") return Split::test;
  throw DataError("unknown split '" + s + "'");
}

std::string to_string(AgreementKind k) {
  switch (k) {
    case AgreementKind::full: return "full";
    case AgreementKind::partial: return "partial";
    case AgreementKind::disagreement: return "disagreement";
  }
  return "full";
}

std::string to_string(DiscardReason r) {
  return r == DiscardReason::irrelevant ? "irrelevant" : "disagreement";
}

DatasetFormat parse_format(const std::string& s) {
  if (s == "dsl_tl") return DatasetFormat::dsl_tl;
  if (s == "cuban_tsv") return DatasetFormat::cuban_tsv;
  if (s == "generic_csv") return DatasetFormat::generic_csv;
  throw ConfigError("unknown dataset format '" + s + "' (expected dsl_tl, cuban_tsv or generic_csv)");
}

std::string to_string(DatasetFormat f) {
  switch (f) {
    case DatasetFormat::dsl_tl: return "dsl_tl";
    case DatasetFormat::cuban_tsv: return "cuban_tsv";
    case DatasetFormat::generic_csv: return "generic_csv";
  }
  return "generic_csv";
}

Dataset::Dataset(LabelSet labels, std::vector<Instance> instances)
    : labels_(std::move(labels)), instances_(std::move(instances)) {
  index_.reserve(instances_.size());
  for (std::size_t i = 0; i < instances_.size(); ++i) {
    const Instance& inst = instances_[i];
    if (!index_.emplace(inst.id, i).second) throw DataError("duplicate id '" + inst.id + "'");
    if (inst.train_label && !labels_.is_variety(*inst.train_label))
      throw DataError("instance '" + inst.id + "' has train label '" + inst.train_label->code() +
                      "' which is not a variety code");
    if (!inst.train_label && !inst.is_common)
      throw DataError("instance '" + inst.id + "' has no train label");
  }
}

const Instance* Dataset::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &instances_[it->second];
}

const Instance& Dataset::at(const std::string& id) const {
  const Instance* p = find(id);
  if (!p) throw DataError("unknown instance id '" + id + "'");
  return *p;
}

std::size_t Dataset::common_count() const {
  return static_cast<std::size_t>(
      std::count_if(instances_.begin(), instances_.end(), [](const Instance& i) { return i.is_common; }));
}

std::vector<const Instance*> Dataset::in_split(Split s) const {
  std::vector<const Instance*> out;
  for (const auto& inst : instances_)
    if (inst.split == s) out.push_back(&inst);
  return out;
}

std::optional<VarietyLabel> annotator_label(const AnnotationRecord& r, const LabelSet& labels) {
  if (r.cuban_variety && r.not_cuban_variety)
    throw DataError("annotator " + r.annotator_id + ": both variety flags set");
  if (r.irrelevant) return std::nullopt;
  if (r.cuban_variety) return labels.variety_a;
  if (r.not_cuban_variety) return labels.variety_b;
  // A named variety other than the target counts as "not target".
  if (!r.specific_variety.empty()) return labels.variety_b;
  if (r.not_able_to_identify) return labels.common;
  throw DataError("annotator " + r.annotator_id + ": record carries no signal");
}

namespace {

std::vector<VarietyLabel> per_annotator_labels(const std::vector<AnnotationRecord>& records,
                                               const LabelSet& labels, bool* any_irrelevant) {
  std::vector<VarietyLabel> out;
  *any_irrelevant = false;
  for (const auto& r : records) {
    auto l = annotator_label(r, labels);
    if (l)
      out.push_back(*l);
    else
      *any_irrelevant = true;
  }
  return out;
}

}  // namespace

Aggregate aggregate_annotations(const std::vector<AnnotationRecord>& records, const LabelSet& labels) {
  if (records.empty()) throw DataError("aggregate_annotations: no records");
  bool irrelevant = false;
  auto votes = per_annotator_labels(records, labels, &irrelevant);
  if (irrelevant) return Discard{DiscardReason::irrelevant};

  std::map<VarietyLabel, int> counts;
  for (const auto& v : votes) ++counts[v];
  const VarietyLabel* best = nullptr;
  int best_count = 0;
  bool tie = false;
  for (const auto& [label, c] : counts) {
    if (c > best_count) {
      best = &label;
      best_count = c;
      tie = false;
    } else if (c == best_count) {
      tie = true;
    }
  }
  if (best_count >= 2 && !tie) return *best;
  return Discard{DiscardReason::disagreement};
}

AgreementKind agreement_of(const std::vector<AnnotationRecord>& records, const LabelSet& labels) {
  bool irrelevant = false;
  auto votes = per_annotator_labels(records, labels, &irrelevant);
  if (votes.size() < 2) throw DataError("agreement needs at least two usable annotation records");
  std::set<VarietyLabel> distinct(votes.begin(), votes.end());
  if (distinct.size() == 1) return AgreementKind::full;
  if (distinct.size() == votes.size()) return AgreementKind::disagreement;
  return AgreementKind::partial;
}

AgreementSummary agreement_summary(const Dataset& dataset) {
  AgreementSummary s;
  auto count = [&](const Instance& inst) {
    if (inst.annotations.size() < 2)
      throw DataError("instance '" + inst.id + "' has fewer than two annotation records");
    switch (agreement_of(inst.annotations, dataset.labels())) {
      case AgreementKind::full: ++s.full_count; break;
      case AgreementKind::partial: ++s.partial_count; break;
      case AgreementKind::disagreement: ++s.disagreement_count; break;
    }
  };
  for (const auto& inst : dataset.instances()) count(inst);
  for (const auto& d : dataset.discarded)
    if (d.reason == DiscardReason::disagreement) count(d.instance);

  const double n = static_cast<double>(s.total());
  if (n > 0) {
    s.full_fraction = s.full_count / n;
    s.partial_fraction = s.partial_count / n;
    s.disagreement_fraction = s.disagreement_count / n;
  }
  return s;
}

Dataset assign_single_labels(const Dataset& dataset, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<Instance> out = dataset.instances();
  for (auto& inst : out) {
    if (!inst.is_common) continue;
    const bool pick_b = (rng.next() >> 63) != 0;
    inst.train_label = pick_b ? dataset.labels().variety_b : dataset.labels().variety_a;
  }
  Dataset result(dataset.labels(), std::move(out));
  result.rejections = dataset.rejections;
  result.discarded = dataset.discarded;
  return result;
}

// ---------------------------------------------------------------- loading

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool parse_bool(const std::string& raw) {
  const std::string v = lower(trim(raw));
  if (v.empty() || v == "0" || v == "false" || v == "f" || v == "no" || v == "n") return false;
  if (v == "1" || v == "true" || v == "t" || v == "yes" || v == "y" || v == "x") return true;
  throw DataError("not a boolean: '" + raw + "'");
}

class Header {
 public:
  explicit Header(const Row& names) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      std::string n = trim(names[i]);
      if (i == 0 && n.rfind("\xEF\xBB\xBF", 0) == 0) n = n.substr(3);
      cols_[n] = i;
    }
  }
  std::optional<std::size_t> find(const std::string& name) const {
    auto it = cols_.find(name);
    if (it == cols_.end()) return std::nullopt;
    return it->second;
  }
  std::size_t require(const std::string& name) const {
    auto c = find(name);
    if (!c) throw DataError("missing required column '" + name + "'");
    return *c;
  }
  const std::map<std::string, std::size_t>& columns() const { return cols_; }

 private:
  std::map<std::string, std::size_t> cols_;
};

struct AnnotatorColumns {
  std::optional<std::size_t> cuban, not_cuban, specific, unable, irrelevant;
};

// Recognises "<field>_<annotator>" headers.
std::map<std::string, AnnotatorColumns> annotator_columns(const Header& h) {
  static const std::vector<std::pair<std::string, int>> fields = {
      {"not_cuban_variety_", 1}, {"cuban_variety_", 0},         {"specific_variety_", 2},
      {"not_able_to_identify_", 3}, {"unable_to_identify_variety_", 3}, {"irrelevant_", 4}};
  std::map<std::string, AnnotatorColumns> out;
  for (const auto& [name, idx] : h.columns()) {
    for (const auto& [prefix, which] : fields) {
      if (name.rfind(prefix, 0) != 0 || name.size() == prefix.size()) continue;
      auto& a = out[name.substr(prefix.size())];
      switch (which) {
        case 0: a.cuban = idx; break;
        case 1: a.not_cuban = idx; break;
        case 2: a.specific = idx; break;
        case 3: a.unable = idx; break;
        case 4: a.irrelevant = idx; break;
      }
      break;
    }
  }
  for (const auto& [id, a] : out) {
    if (!a.cuban || !a.not_cuban || !a.unable || !a.irrelevant)
      throw DataError("annotator '" + id + "' is missing one of the required annotation columns");
  }
  if (out.empty()) throw DataError("missing required column 'cuban_variety_<annotator>'");
  return out;
}

const std::string& field(const Row& row, std::size_t col) {
  static const std::string empty;
  return col < row.size() ? row[col] : empty;
}

struct RowError {
  std::string reason;
};

}  // namespace

Dataset load_dataset(std::istream& in, const LoadOptions& options) {
  const char delim = options.format == DatasetFormat::cuban_tsv ? '\t' : ',';
  DelimitedReader reader(in, delim);
  auto header_row = reader.next();

  LabelSet labels;
  if (options.labels) {
    labels = *options.labels;
  } else if (options.format == DatasetFormat::dsl_tl) {
    labels = LabelSet::dsl_tl();
  } else if (options.format == DatasetFormat::cuban_tsv) {
    labels = LabelSet::cuban();
  }

  if (!header_row) {
    if (options.format == DatasetFormat::generic_csv && !options.labels)
      labels = {VarietyLabel("A"), VarietyLabel("B"), VarietyLabel("ES")};
    return Dataset(labels, {});
  }
  Header header(*header_row);

  std::vector<Instance> instances;
  std::vector<Rejection> rejections;
  std::vector<Discarded> discarded;
  std::set<std::string> seen_ids;

  const std::size_t id_col = header.require("id");
  const std::size_t text_col = header.require("text");
  const auto split_col = header.find("split");

  auto reject = [&](const std::string& id, const std::string& reason) {
    if (options.strict) throw DataError("row '" + id + "': " + reason);
    rejections.push_back({id, reason});
  };
  auto check_unique = [&](const std::string& id) {
    if (!seen_ids.insert(id).second) throw DataError("duplicate id '" + id + "'");
  };

  if (options.format == DatasetFormat::dsl_tl) {
    const std::size_t orig_col = header.require("original_label");
    const std::size_t new_col = header.require("true_label");
    while (auto row = reader.next()) {
      const std::string id = trim(field(*row, id_col));
      try {
        if (id.empty()) throw RowError{"empty id"};
        check_unique(id);
        VarietyLabel orig(trim(field(*row, orig_col)));
        VarietyLabel truth(trim(field(*row, new_col)));
        if (!labels.is_variety(orig)) throw RowError{"unknown original label '" + orig.code() + "'"};
        if (!labels.contains(truth)) throw RowError{"unknown label '" + truth.code() + "'"};
        Instance inst;
        inst.id = id;
        inst.raw_text = field(*row, text_col);
        inst.train_label = orig;
        inst.is_common = truth == labels.common;
        if (split_col) inst.split = parse_split(trim(field(*row, *split_col)));
        instances.push_back(std::move(inst));
      } catch (const RowError& e) {
        reject(id, e.reason);
      }
    }
  } else if (options.format == DatasetFormat::cuban_tsv) {
    const auto annotators = annotator_columns(header);
    while (auto row = reader.next()) {
      const std::string id = trim(field(*row, id_col));
      try {
        if (id.empty()) throw RowError{"empty id"};
        check_unique(id);
        Instance inst;
        inst.id = id;
        inst.raw_text = field(*row, text_col);
        if (split_col) inst.split = parse_split(trim(field(*row, *split_col)));
        for (const auto& [annotator, cols] : annotators) {
          AnnotationRecord r;
          r.annotator_id = annotator;
          try {
            r.cuban_variety = parse_bool(field(*row, *cols.cuban));
            r.not_cuban_variety = parse_bool(field(*row, *cols.not_cuban));
            r.not_able_to_identify = parse_bool(field(*row, *cols.unable));
            r.irrelevant = parse_bool(field(*row, *cols.irrelevant));
          } catch (const DataError& e) {
            throw RowError{e.what()};
          }
          if (cols.specific) r.specific_variety = trim(field(*row, *cols.specific));
          inst.annotations.push_back(std::move(r));
        }
        Aggregate agg;
        try {
          agg = aggregate_annotations(inst.annotations, labels);
        } catch (const DataError& e) {
          throw RowError{std::string("malformed annotation: ") + e.what()};
        }
        if (const auto* d = std::get_if<Discard>(&agg)) {
          discarded.push_back({std::move(inst), d->reason});
          continue;
        }
        const auto& label = std::get<VarietyLabel>(agg);
        if (label == labels.common)
          inst.is_common = true;
        else
          inst.train_label = label;
        instances.push_back(std::move(inst));
      } catch (const RowError& e) {
        reject(id, e.reason);
      }
    }
  } else {
    const std::size_t label_col = header.require("train_label");
    const std::size_t common_col = header.require("is_common");
    struct Raw {
      Instance inst;
      std::string label;
    };
    std::vector<Raw> raws;
    while (auto row = reader.next()) {
      const std::string id = trim(field(*row, id_col));
      try {
        if (id.empty()) throw RowError{"empty id"};
        check_unique(id);
        Raw r;
        r.inst.id = id;
        r.inst.raw_text = field(*row, text_col);
        try {
          r.inst.is_common = parse_bool(field(*row, common_col));
        } catch (const DataError& e) {
          throw RowError{e.what()};
        }
        if (split_col) r.inst.split = parse_split(trim(field(*row, *split_col)));
        r.label = trim(field(*row, label_col));
        if (r.label.empty() && !r.inst.is_common) throw RowError{"missing train_label"};
        raws.push_back(std::move(r));
      } catch (const RowError& e) {
        reject(id, e.reason);
      }
    }
    if (!options.labels) {
      std::set<std::string> codes;
      for (const auto& r : raws)
        if (!r.label.empty()) codes.insert(r.label);
      if (codes.size() > 2) throw DataError("generic_csv declares more than two variety codes; pass explicit labels");
      std::vector<std::string> v(codes.begin(), codes.end());
      while (v.size() < 2) v.push_back(v.empty() ? "A" : (v[0] == "B" ? "A" : "B"));
      std::sort(v.begin(), v.end());
      labels = {VarietyLabel(v[0]), VarietyLabel(v[1]), VarietyLabel("ES")};
    }
    for (auto& r : raws) {
      if (!r.label.empty()) {
        VarietyLabel l(r.label);
        if (!labels.is_variety(l)) {
          reject(r.inst.id, "unknown label '" + r.label + "'");
          continue;
        }
        r.inst.train_label = l;
      }
      instances.push_back(std::move(r.inst));
    }
  }

  Dataset ds(labels, std::move(instances));
  ds.rejections = std::move(rejections);
  ds.discarded = std::move(discarded);
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open dataset '" + path.string() + "'");
  return load_dataset(in, options);
}

void write_generic_csv(std::ostream& out, const Dataset& dataset) {
  write_row(out, {"id", "text", "train_label", "is_common", "split"}, ',');
  for (const auto& inst : dataset.instances()) {
    write_row(out,
              {inst.id, inst.raw_text, inst.train_label ? inst.train_label->code() : std::string(),
               inst.is_common ? "true" : "false", to_string(inst.split)},
              ',');
  }
}

void write_rejections(std::ostream& out, const Dataset& dataset) {
  for (const auto& r : dataset.rejections) out << r.id << '\t' << r.reason << '\n';
}

}  // namespace varicart
