// Command-line front end. Exit codes: 0 ok, 2 configuration, 3 data,
// 4 anything else. Diagnostics go to stderr; tables to stdout.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "varicart/analysis.hpp"
#include "varicart/config.hpp"
#include "varicart/experiment.hpp"
#include "varicart/triage_http.hpp"

using namespace varicart;
namespace fs = std::filesystem;

namespace {

struct DataOptions {
  std::string path;
  std::string format = "generic_csv";
  std::vector<std::string> labels;

  void add(CLI::App* app, bool required = true) {
    auto* o = app->add_option("--data", path, "dataset file");
    if (required) o->required();
    app->add_option("--format", format, "dsl_tl, cuban_tsv or generic_csv");
    app->add_option("--labels", labels, "variety_a variety_b common codes")->expected(3)->delimiter(',');
  }

  Dataset load() const {
    LoadOptions lo;
    lo.format = parse_format(format);
    if (!labels.empty()) lo.labels = LabelSet{VarietyLabel(labels[0]), VarietyLabel(labels[1]), VarietyLabel(labels[2])};
    auto ds = load_dataset(path, lo);
    if (!ds.rejections.empty())
      std::cerr << "warning: " << ds.rejections.size() << " rows rejected (first: " << ds.rejections.front().id
                << ": " << ds.rejections.front().reason << ")\n";
    return ds;
  }
};

// Builds "key = value" text so overrides go through the config parser.
std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  return out + "\"";
}

class Overrides {
 public:
  void value(const std::string& key, const std::string& v) { text_ << key << " = " << quoted(v) << '\n'; }
  void raw(const std::string& key, const std::string& v) { text_ << key << " = " << v << '\n'; }
  template <class T>
  void list(const std::string& key, const std::vector<T>& v) {
    text_ << key << " = [";
    for (std::size_t i = 0; i < v.size(); ++i) {
      std::ostringstream item;
      item << v[i];
      text_ << (i ? ", " : "") << quoted(item.str());
    }
    text_ << "]\n";
  }
  // "section.key=value" strings from --set.
  void assignments(const std::vector<std::string>& sets) {
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + s + "'");
      text_ << s.substr(0, eq) << " = " << s.substr(eq + 1) << '\n';
    }
  }
  KeyValueConfig apply_to(KeyValueConfig base) const {
    base.merge(KeyValueConfig::parse(text_.str()));
    return base;
  }

 private:
  std::ostringstream text_;
};

KeyValueConfig load_config(const std::string& path) {
  return path.empty() ? KeyValueConfig{} : KeyValueConfig::load(path);
}

template <class F>
void write_to(const std::string& path, F&& body) {
  if (path.empty() || path == "-") {
    body(std::cout);
    return;
  }
  if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  body(out);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return in;
}

RankedList load_ranking(const std::string& path) {
  auto in = open_in(path);
  return read_ranking_csv(in);
}

std::string scorer_of(const RankedList& r, const std::string& path) {
  if (r.empty()) throw DataError("ranking '" + path + "' is empty");
  return to_string(r.entries.front().scorer);
}

std::vector<std::size_t> parse_grid(const std::vector<std::size_t>& given, std::size_t fallback_max) {
  if (!given.empty()) return given;
  std::vector<std::size_t> g;
  for (std::size_t n = 100; n <= fallback_max; n += 100) g.push_back(n);
  if (g.empty() || g.back() != fallback_max) g.push_back(fallback_max);
  return g;
}

TriageServer* g_server = nullptr;
extern "C" void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Common-example detection from training dynamics"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version());

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "normalize tweet text, write generic_csv");
  DataOptions pre_data;
  std::string pre_out, pre_config;
  std::vector<std::string> pre_set;
  pre->add_option("--in", pre_data.path, "raw dataset")->required();
  pre->add_option("--format", pre_data.format);
  pre->add_option("--labels", pre_data.labels)->expected(3)->delimiter(',');
  pre->add_option("--out", pre_out, "normalized generic_csv")->required();
  pre->add_option("--config", pre_config, "normalization config file");
  pre->add_option("--set", pre_set, "override, e.g. max_letter_repeat=3");

  // train
  auto* train = app.add_subcommand("train", "train the linear classifier and log its dynamics");
  DataOptions train_data;
  train_data.add(train);
  std::string train_config, train_model, train_log, train_f1, train_ovr;
  std::vector<std::string> train_set;
  std::uint64_t train_seed = 42;
  bool train_raw = false;
  train->add_option("--config", train_config, "experiment config ([train], [normalization])");
  train->add_option("--set", train_set, "override, e.g. train.epochs=5");
  train->add_option("--seed", train_seed);
  train->add_option("--model", train_model, "model output (VCM1)");
  train->add_option("--log", train_log, "epoch log output (JSONL)")->required();
  train->add_option("--f1", train_f1, "per-group F1 CSV");
  train->add_option("--one-vs-rest", train_ovr, "also write the single vs one-vs-rest comparison (JSON)");
  train->add_flag("--no-normalize", train_raw);

  // ingest-logs
  auto* ingest = app.add_subcommand("ingest-logs", "validate an external epoch log");
  std::string ingest_in, ingest_out;
  DataOptions ingest_data;
  bool ingest_strict = false;
  ingest->add_option("--in", ingest_in)->required();
  ingest_data.add(ingest, false);
  ingest->add_option("--out", ingest_out, "canonical copy");
  ingest->add_flag("--strict", ingest_strict, "treat warnings as errors");

  // score
  auto* sc = app.add_subcommand("score", "score instances from an epoch log");
  std::string score_log, score_name, score_out;
  std::uint64_t score_seed = 42;
  sc->add_option("--log", score_log)->required();
  sc->add_option("--scorer", score_name)->required();
  sc->add_option("--seed", score_seed, "seed for the random scorer");
  sc->add_option("--out", score_out);

  // rank
  auto* rk = app.add_subcommand("rank", "sort scores into a ranking");
  std::string rank_in, rank_out;
  rk->add_option("--scores", rank_in)->required();
  rk->add_option("--out", rank_out);

  // eval
  auto* ev = app.add_subcommand("eval", "APS and precision/recall@N of rankings");
  DataOptions eval_data;
  eval_data.add(ev);
  std::vector<std::string> eval_rankings;
  std::vector<std::uint64_t> eval_seeds;
  std::string eval_out, eval_series;
  ev->add_option("--ranking", eval_rankings, "ranking CSV; repeat, same scorer across seeds is aggregated")
      ->required();
  ev->add_option("--seeds", eval_seeds, "seed of each ranking")->delimiter(',');
  ev->add_option("--out", eval_out, "report CSV");
  ev->add_option("--series", eval_series, "precision/recall series CSV (single ranking)");

  // analyze
  auto* an = app.add_subcommand("analyze", "error analysis of the top-N false positives");
  DataOptions an_data;
  an_data.add(an);
  std::string an_ranking, an_out, an_keyword, an_stopwords, an_model, an_explain;
  std::size_t an_n = 500;
  std::vector<std::size_t> an_grid;
  an->add_option("--ranking", an_ranking)->required();
  an->add_option("--n", an_n, "slice depth");
  an->add_option("--out", an_out, "output directory")->required();
  an->add_option("--keyword", an_keyword);
  an->add_option("--grid", an_grid, "depths for keyword/agreement profiles")->delimiter(',');
  an->add_option("--stopwords", an_stopwords, "stopword file (default: embedded Spanish list)");
  an->add_option("--model", an_model, "model for --explain");
  an->add_option("--explain", an_explain, "instance id: write token attribution");

  // serve
  auto* sv = app.add_subcommand("serve", "triage service");
  DataOptions sv_data;
  sv_data.add(sv);
  std::vector<std::string> sv_rankings;
  std::string sv_model, sv_log = "decisions.jsonl", sv_host = "127.0.0.1", sv_ui;
  int sv_port = 8080;
  bool sv_raw = false;
  sv->add_option("--ranking", sv_rankings, "[name=]ranking.csv; repeatable")->required();
  sv->add_option("--model", sv_model);
  sv->add_option("--decisions", sv_log, "append-only decision log");
  sv->add_option("--host", sv_host);
  sv->add_option("--port", sv_port);
  sv->add_option("--ui", sv_ui, "static UI bundle directory");
  sv->add_flag("--no-normalize", sv_raw);

  // run
  auto* run = app.add_subcommand("run", "full pipeline over seeds");
  std::string run_config, run_dataset, run_format, run_out, run_logs;
  std::vector<std::string> run_set, run_scorers;
  std::vector<std::uint64_t> run_seeds;
  std::size_t run_parallel = 0;
  int run_epochs = 0;
  bool run_raw = false;
  run->add_option("--config", run_config);
  run->add_option("--data", run_dataset);
  run->add_option("--format", run_format);
  run->add_option("--out", run_out);
  run->add_option("--seeds", run_seeds)->delimiter(',');
  run->add_option("--scorers", run_scorers)->delimiter(',');
  run->add_option("--logs", run_logs, "external epoch logs; {seed} is substituted");
  run->add_option("--epochs", run_epochs);
  run->add_option("--parallel-seeds", run_parallel);
  run->add_option("--set", run_set, "override, e.g. train.hash_dim=65536");
  run->add_flag("--no-normalize", run_raw);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*pre) {
      Overrides o;
      o.assignments(pre_set);
      const auto norm = NormalizationConfig::from(o.apply_to(load_config(pre_config)));
      const auto ds = normalize_dataset(pre_data.load(), norm);
      std::vector<Instance> out;
      for (auto inst : ds.instances()) {
        inst.raw_text = inst.text();
        out.push_back(std::move(inst));
      }
      write_to(pre_out, [&](std::ostream& s) { write_generic_csv(s, Dataset(ds.labels(), out)); });
      std::cerr << "normalized " << out.size() << " instances\n";
    } else if (*train) {
      Overrides o;
      o.assignments(train_set);
      const auto kv = o.apply_to(load_config(train_config));
      TrainConfig tc;
      tc.apply(kv, "train.");
      tc.seed = train_seed;
      auto ds = train_data.load();
      if (!train_raw) ds = normalize_dataset(ds, NormalizationConfig::from(kv, "normalization."));
      const auto labelled = assign_single_labels(ds, train_seed);
      const auto r = train_with_dynamics(labelled, tc);
      write_to(train_log, [&](std::ostream& s) { write_epoch_log(s, r.log); });
      if (!train_model.empty()) r.model.save(fs::path(train_model));
      if (!train_f1.empty())
        write_to(train_f1, [&](std::ostream& s) {
          s << "epoch,f1_common,f1_non_common\n";
          for (const auto& g : per_group_f1(r.log, labelled))
            s << g.epoch << ',' << (g.common ? format_double(*g.common) : "") << ','
              << (g.non_common ? format_double(*g.non_common) : "") << '\n';
        });
      if (!train_ovr.empty()) {
        const auto rep = train_one_vs_rest(labelled, tc);
        auto scores = [](const ClassificationScores& c) {
          return nlohmann::json{{"accuracy", c.accuracy}, {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}};
        };
        nlohmann::json j = {{"single_class", scores(rep.single_class)},
                            {"one_vs_rest", scores(rep.multi_class)},
                            {"train_count", rep.train_count},
                            {"eval_count", rep.eval_count},
                            {"eval_source", rep.eval_source}};
        write_to(train_ovr, [&](std::ostream& s) { s << j.dump(2) << '\n'; });
      }
      std::cerr << "trained " << tc.epochs << " epochs on " << labelled.size() << " instances\n";
    } else if (*ingest) {
      const auto r = read_epoch_log(ingest_in);
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
      if (!ingest_data.path.empty()) {
        const auto ds = ingest_data.load();
        for (const auto& id : r.log.instance_ids())
          if (!ds.find(id)) throw DataError("log instance '" + id + "' is not in the dataset");
      }
      if (ingest_strict && !r.warnings.empty())
        throw DataError(std::to_string(r.warnings.size()) + " warnings in strict mode");
      if (!ingest_out.empty()) write_to(ingest_out, [&](std::ostream& s) { write_epoch_log(s, r.log); });
      std::cerr << "ok: " << r.log.num_instances() << " instances, " << r.log.epochs() << " epochs, "
                << r.log.num_labels() << " labels, " << r.warnings.size() << " warnings\n";
    } else if (*sc) {
      const auto r = read_epoch_log(score_log);
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
      const auto scores = score(r.log, parse_scorer(score_name), score_seed);
      write_to(score_out, [&](std::ostream& s) { write_scores_csv(s, scores); });
    } else if (*rk) {
      auto in = open_in(rank_in);
      const auto ranked = rank_by_score(read_scores_csv(in));
      write_to(rank_out, [&](std::ostream& s) { write_ranking_csv(s, ranked); });
    } else if (*ev) {
      if (!eval_seeds.empty() && eval_seeds.size() != eval_rankings.size())
        throw ConfigError("--seeds must give one seed per --ranking");
      const auto flags = common_flags(eval_data.load());
      std::vector<RankedList> lists;
      for (const auto& p : eval_rankings) lists.push_back(load_ranking(p));
      std::vector<RankingJob> jobs;
      for (std::size_t i = 0; i < lists.size(); ++i)
        jobs.push_back({&lists[i], scorer_of(lists[i], eval_rankings[i]), eval_seeds.empty() ? i : eval_seeds[i]});
      const auto reports = evaluate_all(jobs, flags);
      std::map<std::string, std::vector<EvalReport>> by_scorer;
      for (const auto& r : reports) by_scorer[r.scorer].push_back(r);
      std::vector<EvalReport> out;
      for (auto& [name, rs] : by_scorer) {
        if (rs.size() == 1) {
          out.push_back(rs.front());
        } else {
          out.push_back(aggregate_over_seeds(rs));
        }
      }
      write_report_table(std::cout, out);
      if (!eval_out.empty()) write_to(eval_out, [&](std::ostream& s) { write_report_csv(s, out); });
      if (!eval_series.empty()) {
        if (reports.size() != 1) throw ConfigError("--series needs exactly one ranking");
        write_to(eval_series, [&](std::ostream& s) { write_pr_series_csv(s, reports.front()); });
      }
    } else if (*an) {
      const auto ds = an_data.load();
      const auto ranked = load_ranking(an_ranking);
      const auto stop = an_stopwords.empty() ? spanish_stopwords() : load_stopwords(an_stopwords);
      fs::create_directories(an_out);
      const fs::path dir(an_out);
      write_to((dir / "top_words.csv").string(),
               [&](std::ostream& s) { write_word_counts_csv(s, top_error_words(ranked, ds, an_n, stop)); });
      const auto grid = parse_grid(an_grid, ranked.size());
      if (!an_keyword.empty())
        write_to((dir / "keyword_fraction.csv").string(), [&](std::ostream& s) {
          write_keyword_fraction_csv(s, keyword_error_fraction(ranked, ds, an_keyword, grid));
        });
      bool annotated = false;
      for (const auto& i : ds.instances()) annotated = annotated || !i.annotations.empty();
      if (annotated)
        write_to((dir / "agreement_profile.csv").string(), [&](std::ostream& s) {
          write_agreement_profile_csv(s, agreement_error_profile(ranked, ds, grid));
        });
      if (!an_explain.empty()) {
        if (an_model.empty()) throw ConfigError("--explain needs --model");
        const auto model = LinearModel::load(fs::path(an_model));
        const auto text = normalize_text(ds.at(an_explain).raw_text);
        write_to((dir / ("attribution_" + an_explain + ".jsonl")).string(), [&](std::ostream& s) {
          write_attribution_jsonl(s, token_attribution(model, text, ds.labels().variety_a));
        });
      }
    } else if (*sv) {
      auto ds = sv_data.load();
      if (!sv_raw) ds = normalize_dataset(ds, {});
      std::map<std::string, RankedList> rankings;
      for (const auto& spec : sv_rankings) {
        const auto eq = spec.find('=');
        const std::string path = eq == std::string::npos ? spec : spec.substr(eq + 1);
        auto r = load_ranking(path);
        const std::string name = eq == std::string::npos ? scorer_of(r, path) : spec.substr(0, eq);
        if (!rankings.emplace(name, std::move(r)).second) throw ConfigError("duplicate ranking name '" + name + "'");
      }
      std::optional<LinearModel> model;
      if (!sv_model.empty()) model = LinearModel::load(fs::path(sv_model));
      TriageService service(std::move(ds), std::move(rankings), std::move(model), sv_log);
      std::optional<fs::path> ui;
      if (!sv_ui.empty()) ui = sv_ui;
      TriageServer server(service, ui);
      const int port = server.bind(sv_host, sv_port);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on http://" << sv_host << ':' << port << '\n';
      server.listen();
      g_server = nullptr;
    } else if (*run) {
      Overrides o;
      if (!run_dataset.empty()) o.value("dataset.path", run_dataset);
      if (!run_format.empty()) o.value("dataset.format", run_format);
      if (!run_out.empty()) o.value("experiment.output", run_out);
      if (!run_logs.empty()) o.value("experiment.logs", run_logs);
      if (!run_seeds.empty()) o.list("experiment.seeds", run_seeds);
      if (!run_scorers.empty()) o.list("experiment.scorers", run_scorers);
      if (run_parallel) o.raw("experiment.parallel_seeds", std::to_string(run_parallel));
      if (run_epochs) o.raw("train.epochs", std::to_string(run_epochs));
      if (run_raw) o.raw("experiment.normalize", "false");
      o.assignments(run_set);
      const auto config = ExperimentConfig::from(o.apply_to(load_config(run_config)));
      const auto result = run_experiment(config);
      std::vector<EvalReport> shown = result.aggregated;
      if (shown.empty()) shown = result.seeds.front().reports;
      write_report_table(std::cout, shown);
      std::cerr << "config " << result.config_hash << ", " << result.files.size() << " files in "
                << config.output.string() << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
  return 0;
}
