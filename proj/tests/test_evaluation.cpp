#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "varicart/evaluation.hpp"

using namespace varicart;

namespace {

// Ranked list r0, r1, ... with the given common flags.
struct Case {
  RankedList ranked;
  CommonFlags flags;
};

Case make_case(const std::vector<int>& flags) {
  Case c;
  for (std::size_t k = 0; k < flags.size(); ++k) {
    const std::string id = "r" + std::to_string(k);
    c.ranked.entries.push_back({id, Scorer::random, 0.0});
    c.flags[id] = flags[k] != 0;
  }
  return c;
}

// Brute force straight from the definitions: precision at every positive
// rank, each recounted from scratch.
double oracle_ap(const std::vector<int>& f) {
  double total = 0;
  int positives = 0;
  for (int v : f) positives += v;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (!f[k]) continue;
    int hits = 0;
    for (std::size_t j = 0; j <= k; ++j) hits += f[j];
    total += static_cast<double>(hits) / static_cast<double>(k + 1);
  }
  return 100.0 * total / positives;
}

std::pair<double, double> oracle_pr(const std::vector<int>& f, std::size_t n) {
  int top = 0, all = 0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    all += f[k];
    if (k < n) top += f[k];
  }
  return {100.0 * top / static_cast<double>(n), 100.0 * top / static_cast<double>(all)};
}

EvalReport report_with(const std::string& scorer, double aps, std::vector<AtN> at_n, std::uint64_t seed) {
  EvalReport r;
  r.scorer = scorer;
  r.aps = aps;
  r.at_n = std::move(at_n);
  r.seeds_used = {seed};
  return r;
}

}  // namespace

TEST_CASE("average precision examples") {
  auto c = make_case({1, 0, 1});
  CHECK(*average_precision(c.ranked, c.flags) == doctest::Approx(100.0 * (1.0 + 2.0 / 3.0) / 2.0));
  c = make_case({1, 1, 0, 0});
  CHECK(*average_precision(c.ranked, c.flags) == 100.0);
  c = make_case({0, 0, 0});
  CHECK_FALSE(average_precision(c.ranked, c.flags).has_value());
  CHECK_THROWS_AS(evaluate(c.ranked, c.flags, "x", 1), DataError);
  c = make_case({1});
  c.flags.clear();
  CHECK_THROWS_AS(average_precision(c.ranked, c.flags), DataError);
}

TEST_CASE("precision/recall examples") {
  auto c = make_case({1, 0, 1});
  auto a = precision_recall_at(c.ranked, c.flags, 2);
  CHECK(a.precision == 50.0);
  CHECK(a.recall == 50.0);
  a = precision_recall_at(c.ranked, c.flags, 3);
  CHECK(a.precision == doctest::Approx(200.0 / 3.0));
  CHECK(a.recall == 100.0);
  CHECK_THROWS_AS(precision_recall_at(c.ranked, c.flags, 0), ConfigError);
  CHECK_THROWS_AS(precision_recall_at(c.ranked, c.flags, 4), ConfigError);
  c = make_case({1, 1, 1, 1});
  for (std::size_t n = 1; n <= 4; ++n) CHECK(precision_recall_at(c.ranked, c.flags, n).precision == 100.0);
  c = make_case({0, 0});
  CHECK_THROWS_AS(precision_recall_at(c.ranked, c.flags, 1), DataError);
}

TEST_CASE("series grid") {
  std::vector<int> f(30, 0);
  f[0] = 1;
  auto c = make_case(f);
  auto s = pr_series(c.ranked, c.flags);
  REQUIRE(s.size() == 3);
  CHECK(s[0].n == 10);
  CHECK(s[2].n == 30);
  CHECK(s[2].recall == 100.0);

  f.resize(25);
  c = make_case(f);
  s = pr_series(c.ranked, c.flags);
  REQUIRE(s.size() == 3);
  CHECK(s[2].n == 25);
  s = pr_series(c.ranked, c.flags, 5, 7);
  CHECK(s.size() == 4);  // 5 12 19 25
  CHECK(s[3].n == 25);
  CHECK_THROWS_AS(pr_series(c.ranked, c.flags, 26, 10), ConfigError);
  CHECK_THROWS_AS(pr_series(c.ranked, c.flags, 10, 0), ConfigError);

  // Small lists start the default grid at their own size.
  c = make_case({1, 0, 0});
  const auto r = evaluate(c.ranked, c.flags, "x", 0);
  REQUIRE(r.at_n.size() == 1);
  CHECK(r.at_n[0].n == 3);
}

TEST_CASE("metrics match brute force on random rankings") {
  SplitMix64 rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.next_below(200);
    std::vector<int> f(n);
    const double rate = rng.next_unit();
    for (auto& v : f) v = rng.next_unit() < rate;
    f[rng.next_below(n)] = 1;
    const auto c = make_case(f);
    CHECK(std::abs(*average_precision(c.ranked, c.flags) - oracle_ap(f)) <= 1e-9);

    const auto series = pr_series(c.ranked, c.flags, 1, 1 + rng.next_below(15));
    double last_recall = -1;
    for (const auto& a : series) {
      const auto [p, r] = oracle_pr(f, a.n);
      CHECK(std::abs(a.precision - p) <= 1e-9);
      CHECK(std::abs(a.recall - r) <= 1e-9);
      CHECK(a.recall >= last_recall);
      last_recall = a.recall;
    }
    const auto all = precision_recall_at(c.ranked, c.flags, n);
    const double proportion = 100.0 * static_cast<double>(std::count(f.begin(), f.end(), 1)) / static_cast<double>(n);
    CHECK(all.precision == doctest::Approx(proportion).epsilon(1e-12));
    CHECK(all.recall == 100.0);
    CHECK(series.back().n == n);
  }
}

TEST_CASE("reversed perfect ranking is the AP minimum") {
  for (std::size_t n = 1; n <= 12; ++n) {
    for (std::size_t p = 1; p <= n; ++p) {
      std::vector<int> f(n, 0);
      std::fill(f.begin(), f.begin() + static_cast<std::ptrdiff_t>(p), 1);
      std::sort(f.begin(), f.end());  // commons last
      const double reversed = *average_precision(std::vector<char>(f.begin(), f.end()));
      double lowest = 1e9, highest = -1;
      do {
        const double ap = oracle_ap(f);
        lowest = std::min(lowest, ap);
        highest = std::max(highest, ap);
      } while (std::next_permutation(f.begin(), f.end()));
      CHECK(std::abs(reversed - lowest) <= 1e-9);
      CHECK(highest == doctest::Approx(100.0));
    }
  }
}

TEST_CASE("aggregation over seeds") {
  const std::vector<AtN> grid = {{10, 40.0, 20.0}, {20, 30.0, 60.0}};
  auto a = report_with("dm_mean_pred", 50.0, grid, 42);
  auto b = report_with("dm_mean_pred", 60.0, {{10, 50.0, 30.0}, {20, 30.0, 60.0}}, 151);
  const auto agg = aggregate_over_seeds({a, b});
  REQUIRE(agg.aggregated);
  CHECK(agg.aggregated->aps.formatted() == "55.00 \xC2\xB1 7.07");
  CHECK(agg.aps == 55.0);
  CHECK(agg.at_n[0].precision == 45.0);
  CHECK(agg.aggregated->precision[1].std == 0.0);
  CHECK(agg.seeds_used == std::vector<std::uint64_t>{42, 151});

  const auto same = aggregate_over_seeds({a, a, a});
  CHECK(same.aggregated->aps.formatted() == "50.00 \xC2\xB1 0.00");

  CHECK_THROWS_AS(aggregate_over_seeds({a}), ConfigError);
  CHECK_THROWS_AS(aggregate_over_seeds({a, report_with("dm_mean_pred", 1, {{10, 1, 1}}, 2)}), DataError);
  CHECK_THROWS_AS(aggregate_over_seeds({a, report_with("dm_mean_pred", 1, {{10, 1, 1}, {30, 1, 1}}, 2)}), DataError);
  CHECK_THROWS_AS(aggregate_over_seeds({a, report_with("random", 1, grid, 2)}), DataError);
}

TEST_CASE("parallel evaluation matches one-by-one") {
  SplitMix64 rng(6);
  std::vector<Case> cases;
  for (int i = 0; i < 16; ++i) {
    std::vector<int> f(50 + rng.next_below(100));
    for (auto& v : f) v = rng.next_below(3) == 0;
    f[0] = 1;
    cases.push_back(make_case(f));
  }
  // Shared flag map covering every id.
  CommonFlags flags;
  std::vector<RankedList> lists;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    RankedList r;
    for (const auto& e : cases[i].ranked.entries) {
      const std::string id = std::to_string(i) + ":" + e.instance_id;
      r.entries.push_back({id, e.scorer, e.score});
      flags[id] = cases[i].flags.at(e.instance_id);
    }
    lists.push_back(std::move(r));
  }
  std::vector<RankingJob> jobs;
  for (std::size_t i = 0; i < lists.size(); ++i) jobs.push_back({&lists[i], "s" + std::to_string(i), i});
  const auto all = evaluate_all(jobs, flags);
  REQUIRE(all.size() == jobs.size());
  for (std::size_t i = 0; i < lists.size(); ++i) {
    const auto one = evaluate(lists[i], flags, jobs[i].scorer, i);
    CHECK(all[i].scorer == one.scorer);
    CHECK(all[i].aps == one.aps);
    CHECK(all[i].at_n.size() == one.at_n.size());
  }
}

TEST_CASE("report outputs") {
  std::vector<int> f(1200, 0);
  for (std::size_t k = 0; k < f.size(); k += 3) f[k] = 1;
  const auto c = make_case(f);
  auto r1 = evaluate(c.ranked, c.flags, "dm_mean_pred", 42);
  auto r2 = evaluate(c.ranked, c.flags, "dm_mean_pred", 151);
  const auto agg = aggregate_over_seeds({r1, r2});

  std::ostringstream table;
  write_report_table(table, {agg, r1});
  const auto t = table.str();
  CHECK(t.find("Model") == 0);
  CHECK(t.find("Prec-500") != std::string::npos);
  CHECK(t.find("Recall-1000") != std::string::npos);
  CHECK(t.find("\xC2\xB1 0.00") != std::string::npos);

  std::ostringstream small_table;
  const auto small = make_case({1, 0, 1});
  write_report_table(small_table, {evaluate(small.ranked, small.flags, "random", 1)});
  CHECK(small_table.str().find(" - ") != std::string::npos);

  std::ostringstream csv;
  write_report_csv(csv, {agg});
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "scorer,seeds,n,precision,precision_std,recall,recall_std,aps,aps_std");
  std::size_t rows = 0;
  while (std::getline(lines, line)) ++rows;
  CHECK(rows == agg.at_n.size());
  CHECK(csv.str().find("dm_mean_pred,42 151,10,") != std::string::npos);

  std::ostringstream series;
  write_pr_series_csv(series, r1);
  CHECK(series.str().substr(0, 19) == "n,precision,recall\n");
}
