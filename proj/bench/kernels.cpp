// Serial reference kernels against their OpenMP counterparts.
// Threads follow OMP_NUM_THREADS.

#include <map>

#include <benchmark/benchmark.h>

#include "varicart/dynamics.hpp"
#include "varicart/evaluation.hpp"
#include "varicart/synthetic.hpp"
#include "varicart/trainer.hpp"

using namespace varicart;

namespace {

EpochProbabilityLog make_log(std::size_t n, int epochs) {
  std::vector<std::string> ids;
  std::vector<std::size_t> gold;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back("i" + std::to_string(i));
    gold.push_back(i % 2);
  }
  EpochProbabilityLog log({VarietyLabel("A"), VarietyLabel("B")}, ids, gold, epochs);
  SplitMix64 rng(1);
  for (std::size_t i = 0; i < n; ++i)
    for (int e = 1; e <= epochs; ++e) {
      const double p = rng.next_unit();
      log.mutable_row(i, e)[0] = p;
      log.mutable_row(i, e)[1] = 1 - p;
    }
  return log;
}

const EpochProbabilityLog& shared_log(std::size_t n) {
  static std::map<std::size_t, EpochProbabilityLog> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_log(n, 10)).first;
  return it->second;
}

template <std::vector<ScoreRecord> (*Kernel)(const EpochProbabilityLog&)>
void BM_scorer(benchmark::State& state) {
  const auto& log = shared_log(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(log));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

BENCHMARK(BM_scorer<serial::dm_mean_pred>)->Name("dm_mean_pred/serial")->Arg(10000)->Arg(200000);
BENCHMARK(BM_scorer<dm_mean_pred>)->Name("dm_mean_pred/omp")->Arg(10000)->Arg(200000);
BENCHMARK(BM_scorer<serial::dm_std_pred>)->Name("dm_std_pred/serial")->Arg(10000)->Arg(200000);
BENCHMARK(BM_scorer<dm_std_pred>)->Name("dm_std_pred/omp")->Arg(10000)->Arg(200000);
BENCHMARK(BM_scorer<serial::dm_gold_confidence>)->Name("dm_gold_confidence/serial")->Arg(10000)->Arg(200000);
BENCHMARK(BM_scorer<dm_gold_confidence>)->Name("dm_gold_confidence/omp")->Arg(10000)->Arg(200000);

struct PassFixture {
  LinearModel model;
  std::vector<FeatureVector> xs;
  std::vector<double> out;
};

PassFixture& pass_fixture() {
  static PassFixture f = [] {
    PlantedConfig pc;
    pc.instances = 20000;
    const auto ds = make_planted_dataset(pc);
    FeatureConfig fc;
    fc.hash_dim = 1 << 18;
    PassFixture p{LinearModel({VarietyLabel("A"), VarietyLabel("B")}, fc), {}, {}};
    SplitMix64 rng(2);
    for (std::size_t k = 0; k < 2; ++k)
      for (std::uint32_t j = 0; j < fc.hash_dim; ++j) p.model.weight(k, j) = rng.next_unit() - 0.5;
    for (const auto& i : ds.instances()) p.xs.push_back(p.model.featurizer().extract(i.raw_text));
    p.out.resize(p.xs.size() * 2);
    return p;
  }();
  return f;
}

void BM_pass_serial(benchmark::State& state) {
  auto& f = pass_fixture();
  for (auto _ : state) serial::probability_pass(f.model, f.xs, f.out.data());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.xs.size()));
}
void BM_pass_omp(benchmark::State& state) {
  auto& f = pass_fixture();
  for (auto _ : state) probability_pass(f.model, f.xs, f.out.data());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.xs.size()));
}
BENCHMARK(BM_pass_serial)->Name("probability_pass/serial");
BENCHMARK(BM_pass_omp)->Name("probability_pass/omp");

struct EvalFixture {
  std::vector<RankedList> lists;
  std::vector<RankingJob> jobs;
  CommonFlags flags;
};

EvalFixture& eval_fixture() {
  static EvalFixture f = [] {
    EvalFixture e;
    const auto& log = shared_log(20000);
    for (std::size_t i = 0; i < log.num_instances(); ++i) e.flags[log.instance_ids()[i]] = i % 5 < 2;
    for (std::uint64_t s = 0; s < 15; ++s) e.lists.push_back(rank_by_score(random_scores(log.instance_ids(), s)));
    for (std::size_t k = 0; k < e.lists.size(); ++k) e.jobs.push_back({&e.lists[k], "random", k});
    return e;
  }();
  return f;
}

void BM_eval_serial(benchmark::State& state) {
  auto& f = eval_fixture();
  for (auto _ : state)
    for (const auto& j : f.jobs) benchmark::DoNotOptimize(evaluate(*j.ranked, f.flags, j.scorer, j.seed));
}
void BM_eval_omp(benchmark::State& state) {
  auto& f = eval_fixture();
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_all(f.jobs, f.flags));
}
BENCHMARK(BM_eval_serial)->Name("evaluate_15_rankings/serial");
BENCHMARK(BM_eval_omp)->Name("evaluate_15_rankings/omp");

}  // namespace

BENCHMARK_MAIN();
