#include "varicart/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "varicart/config.hpp"

#ifndef VARICART_VERSION
#define VARICART_VERSION "0.0.0"
#endif

namespace varicart {

namespace fs = std::filesystem;
using nlohmann::json;

std::string version() { return VARICART_VERSION; }

namespace {

constexpr int kEpochLogSchema = 1;
constexpr int kReportFormat = 1;

std::string read_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string seed_path(const std::string& pattern, std::uint64_t seed) {
  std::string out = pattern;
  const std::string key = "{seed}";
  for (auto at = out.find(key); at != std::string::npos; at = out.find(key, at))
    out.replace(at, key.size(), std::to_string(seed));
  return out;
}

std::vector<std::uint64_t> to_seeds(const std::vector<std::int64_t>& v) {
  std::vector<std::uint64_t> out;
  for (auto s : v) {
    if (s < 0) throw ConfigError("experiment.seeds: seeds must be non-negative");
    out.push_back(static_cast<std::uint64_t>(s));
  }
  return out;
}

json config_json(const ExperimentConfig& c, const std::string& dataset_hash) {
  const auto& n = c.normalization;
  const auto& t = c.train;
  json j;
  j["dataset"] = {{"path", c.dataset.generic_string()}, {"format", to_string(c.format)}, {"fnv1a64", dataset_hash}};
  if (c.labels)
    j["dataset"]["labels"] = {c.labels->variety_a.code(), c.labels->variety_b.code(), c.labels->common.code()};
  j["normalize"] = c.normalize;
  j["normalization"] = {{"mention_token", n.mention_token},
                        {"url_token", n.url_token},
                        {"max_consecutive_mentions", n.max_consecutive_mentions},
                        {"max_letter_repeat", n.max_letter_repeat},
                        {"laugh_token", n.laugh_token},
                        {"laugh_with_h", n.laugh_with_h},
                        {"emoji_language", n.emoji_language == EmojiLanguage::es ? "es" : "en"}};
  j["train"] = {{"epochs", t.epochs},
                {"learning_rate", format_double(t.learning_rate)},
                {"l2", format_double(t.l2)},
                {"full_dataset", t.full_dataset},
                {"hash_dim", t.features.hash_dim},
                {"word_ngrams", {t.features.word_ngrams.min, t.features.word_ngrams.max}},
                {"char_ngrams", {t.features.char_ngrams.min, t.features.char_ngrams.max}}};
  std::vector<std::string> scorers;
  for (auto s : c.scorers) scorers.push_back(to_string(s));
  j["scorers"] = scorers;
  j["seeds"] = c.seeds;
  j["logs"] = c.logs ? json(*c.logs) : json(nullptr);
  return j;
}

// Rethrows the current exception with the stage and seed in front,
// keeping its category.
[[noreturn]] void rethrow_in(const std::string& stage, std::optional<std::uint64_t> seed) {
  std::string where = "stage '" + stage + "'";
  if (seed) where += " (seed " + std::to_string(*seed) + ")";
  try {
    throw;
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(where + ": " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(where + ": " + e.what());
  }
}

template <class F>
auto in_stage(const std::string& stage, std::optional<std::uint64_t> seed, F&& f) {
  try {
    return f();
  } catch (...) {
    rethrow_in(stage, seed);
  }
}

// Records every file written so the manifest can list it.
class OutputTree {
 public:
  explicit OutputTree(fs::path root) : root_(std::move(root)) {}

  void write(const std::string& rel, const std::function<void(std::ostream&)>& body) {
    const fs::path p = root_ / rel;
    fs::create_directories(p.parent_path());
    {
      std::ofstream out(p, std::ios::binary);
      if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
      body(out);
      if (!out) throw std::runtime_error("write failed for '" + p.string() + "'");
    }
    std::lock_guard lock(mutex_);
    files_.insert(rel);
  }

  std::vector<std::string> files() const {
    std::lock_guard lock(mutex_);
    return {files_.begin(), files_.end()};
  }

  const fs::path& root() const { return root_; }

 private:
  fs::path root_;
  mutable std::mutex mutex_;
  std::set<std::string> files_;
};

// Removes what an earlier run listed so no stale files survive, and
// refuses to touch a directory we did not create.
void prepare_output(const fs::path& dir) {
  if (!fs::exists(dir)) {
    fs::create_directories(dir);
    return;
  }
  if (!fs::is_directory(dir)) throw ConfigError("output '" + dir.string() + "' is not a directory");
  const fs::path manifest = dir / "manifest.json";
  if (!fs::exists(manifest)) {
    if (!fs::is_empty(dir))
      throw ConfigError("output directory '" + dir.string() + "' is not empty and holds no manifest.json");
    return;
  }
  json old;
  try {
    old = json::parse(read_bytes(manifest));
  } catch (const json::exception&) {
    throw ConfigError("unreadable manifest in '" + dir.string() + "'");
  }
  for (const auto& f : old.value("files", json::array())) {
    const fs::path p = dir / fs::path(f.value("path", std::string()));
    if (p != dir && fs::is_regular_file(p)) fs::remove(p);
  }
  fs::remove(manifest);
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_directory() && fs::is_empty(entry.path())) fs::remove(entry.path());
}

SeedOutcome run_seed(const ExperimentConfig& c, const Dataset& prepared, const CommonFlags& flags,
                     std::uint64_t seed, OutputTree& out) {
  SeedOutcome outcome;
  outcome.seed = seed;
  const std::string dir = "seed_" + std::to_string(seed) + "/";

  EpochProbabilityLog log;
  if (c.logs) {
    log = in_stage("ingest-logs", seed, [&] {
      auto r = read_epoch_log(seed_path(*c.logs, seed));
      for (const auto& id : r.log.instance_ids())
        if (!prepared.find(id)) throw DataError("log instance '" + id + "' is not in the dataset");
      return std::move(r.log);
    });
  } else {
    const Dataset labelled = in_stage("assign-labels", seed, [&] { return assign_single_labels(prepared, seed); });
    TrainConfig tc = c.train;
    tc.seed = seed;
    auto trained = in_stage("train", seed, [&] { return train_with_dynamics(labelled, tc); });
    outcome.group_f1 = in_stage("train", seed, [&] { return per_group_f1(trained.log, labelled); });
    in_stage("write", seed, [&] {
      out.write(dir + "epoch_log.jsonl", [&](std::ostream& o) { write_epoch_log(o, trained.log); });
      out.write(dir + "model.vcm", [&](std::ostream& o) { trained.model.save(o); });
      out.write(dir + "group_f1.csv", [&](std::ostream& o) {
        o << "epoch,f1_common,f1_non_common\n";
        for (const auto& g : outcome.group_f1)
          o << g.epoch << ',' << (g.common ? format_double(*g.common) : "") << ','
            << (g.non_common ? format_double(*g.non_common) : "") << '\n';
      });
      return 0;
    });
    log = std::move(trained.log);
  }

  for (Scorer s : c.scorers) {
    const auto name = to_string(s);
    const auto ranked = in_stage("score", seed, [&] { return rank_by_score(score(log, s, seed)); });
    in_stage("write", seed, [&] {
      out.write(dir + "ranking_" + name + ".csv", [&](std::ostream& o) { write_ranking_csv(o, ranked); });
      return 0;
    });
    outcome.reports.push_back(in_stage("eval", seed, [&] { return evaluate(ranked, flags, name, seed); }));
  }
  in_stage("write", seed, [&] {
    out.write(dir + "report.csv", [&](std::ostream& o) { write_report_csv(o, outcome.reports); });
    return 0;
  });
  return outcome;
}

void write_manifest(const OutputTree& out, const json& config, const std::string& hash, const Dataset* dataset,
                    const std::string& status, const std::string& error) {
  json files = json::array();
  for (const auto& rel : out.files()) {
    const auto bytes = read_bytes(out.root() / rel);
    files.push_back({{"path", rel}, {"bytes", bytes.size()}, {"fnv1a64", hex64(fnv1a64(bytes))}});
  }
  json m;
  m["config"] = config;
  m["config_hash"] = hash;
  m["versions"] = {{"varicart", version()},
                   {"epoch_log_schema", kEpochLogSchema},
                   {"model_format", "VCM1"},
                   {"report_format", kReportFormat}};
  if (dataset) m["dataset_summary"] = {{"instances", dataset->size()}, {"commons", dataset->common_count()}};
  m["files"] = files;
  m["status"] = status;
  if (!error.empty()) m["error"] = error;
  std::ofstream o(out.root() / "manifest.json", std::ios::binary);
  o << m.dump(2) << '\n';
}

}  // namespace

void ExperimentConfig::validate() const {
  if (scorers.empty()) throw ConfigError("at least one scorer is required");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (std::set<Scorer>(scorers.begin(), scorers.end()).size() != scorers.size())
    throw ConfigError("scorers must be distinct");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
    throw ConfigError("seeds must be distinct");
  if (parallel_seeds < 1) throw ConfigError("parallel_seeds must be >= 1");
  if (dataset.empty()) throw ConfigError("no dataset path given");
  if (output.empty()) throw ConfigError("no output directory given");
  if (!fs::is_regular_file(dataset)) throw ConfigError("dataset '" + dataset.string() + "' does not exist");
  const auto abs_out = fs::weakly_canonical(output);
  if (fs::weakly_canonical(dataset) == abs_out) throw ConfigError("dataset and output paths must differ");
  if (logs && fs::weakly_canonical(fs::path(*logs)) == abs_out)
    throw ConfigError("logs and output paths must differ");
  normalization.validate();
  train.validate();
}

ExperimentConfig ExperimentConfig::from(const KeyValueConfig& kv) {
  ExperimentConfig c;
  if (auto v = kv.get_string("dataset.path")) c.dataset = *v;
  if (auto v = kv.get_string("dataset.format")) c.format = parse_format(*v);
  if (auto v = kv.get_list("dataset.labels")) {
    if (v->size() != 3) throw ConfigError("dataset.labels must be [variety_a, variety_b, common]");
    c.labels = LabelSet{VarietyLabel((*v)[0]), VarietyLabel((*v)[1]), VarietyLabel((*v)[2])};
  }
  c.normalization = NormalizationConfig::from(kv, "normalization.");
  c.train.apply(kv, "train.");
  if (kv.has("train.seed")) throw ConfigError("train.seed is set per run; use experiment.seeds");
  if (auto v = kv.get_list("experiment.scorers")) {
    c.scorers.clear();
    for (const auto& s : *v) c.scorers.push_back(parse_scorer(s));
  }
  if (auto v = kv.get_int_list("experiment.seeds")) c.seeds = to_seeds(*v);
  if (auto v = kv.get_string("experiment.output")) c.output = *v;
  if (auto v = kv.get_string("experiment.logs"); v && !v->empty()) c.logs = *v;
  if (auto v = kv.get_bool("experiment.normalize")) c.normalize = *v;
  if (auto v = kv.get_int("experiment.parallel_seeds")) {
    if (*v < 1) throw ConfigError("experiment.parallel_seeds must be >= 1");
    c.parallel_seeds = static_cast<std::size_t>(*v);
  }
  if (auto unknown = kv.unused_keys(); !unknown.empty())
    throw ConfigError("unknown config key '" + unknown.front() + "'");
  return c;
}

std::string canonical_config(const ExperimentConfig& config) {
  return config_json(config, hex64(fnv1a64(read_bytes(config.dataset)))).dump();
}

ExperimentResult run_experiment(const ExperimentConfig& c) {
  c.validate();
  const json cfg = json::parse(canonical_config(c));
  ExperimentResult result;
  result.config_hash = hex64(fnv1a64(cfg.dump()));

  prepare_output(c.output);
  OutputTree out(c.output);
  std::optional<Dataset> prepared;
  try {
    prepared = in_stage("load", std::nullopt, [&] {
      LoadOptions lo;
      lo.format = c.format;
      lo.labels = c.labels;
      auto ds = load_dataset(c.dataset, lo);
      if (ds.empty()) throw DataError("dataset has no usable instances");
      return c.normalize ? normalize_dataset(ds, c.normalization) : ds;
    });
    const auto flags = common_flags(*prepared);

    result.seeds.resize(c.seeds.size());
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(c.seeds.size());
    auto worker = [&] {
      for (std::size_t k = next++; k < c.seeds.size(); k = next++) {
        try {
          result.seeds[k] = run_seed(c, *prepared, flags, c.seeds[k], out);
        } catch (...) {
          errors[k] = std::current_exception();
          next = c.seeds.size();  // stop handing out work
        }
      }
    };
    const std::size_t threads = std::min(c.parallel_seeds, c.seeds.size());
    if (threads <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);

    if (c.seeds.size() >= 2) {
      for (std::size_t s = 0; s < c.scorers.size(); ++s) {
        std::vector<EvalReport> per_seed;
        for (const auto& o : result.seeds) per_seed.push_back(o.reports[s]);
        result.aggregated.push_back(in_stage("aggregate", std::nullopt, [&] { return aggregate_over_seeds(per_seed); }));
      }
    }
    in_stage("write", std::nullopt, [&] {
      out.write("report.csv", [&](std::ostream& o) {
        if (!result.aggregated.empty()) {
          write_report_csv(o, result.aggregated);
        } else {
          write_report_csv(o, result.seeds.front().reports);
        }
      });
      return 0;
    });
  } catch (const std::exception& e) {
    write_manifest(out, cfg, result.config_hash, prepared ? &*prepared : nullptr, "failed", e.what());
    throw;
  }
  write_manifest(out, cfg, result.config_hash, &*prepared, "complete", "");
  result.files = out.files();
  result.files.push_back("manifest.json");
  return result;
}

}  // namespace varicart
