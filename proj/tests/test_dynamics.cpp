#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "doctest.h"
#include "varicart/dynamics.hpp"

using namespace varicart;

namespace {

// Log over labels A/B with the given per-epoch probabilities of A.
EpochProbabilityLog binary_log(const std::vector<std::vector<double>>& p_a, std::vector<std::size_t> gold = {}) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < p_a.size(); ++i) ids.push_back("i" + std::to_string(i));
  if (gold.empty()) gold.assign(p_a.size(), 0);
  EpochProbabilityLog log({VarietyLabel("A"), VarietyLabel("B")}, ids, gold, static_cast<int>(p_a.front().size()));
  for (std::size_t i = 0; i < p_a.size(); ++i)
    for (std::size_t e = 0; e < p_a[i].size(); ++e) {
      log.mutable_row(i, static_cast<int>(e + 1))[0] = p_a[i][e];
      log.mutable_row(i, static_cast<int>(e + 1))[1] = 1.0 - p_a[i][e];
    }
  return log;
}

EpochProbabilityLog random_log(SplitMix64& rng, std::size_t n, int epochs, std::size_t k) {
  std::vector<VarietyLabel> labels;
  for (std::size_t j = 0; j < k; ++j) labels.emplace_back("L" + std::to_string(j));
  std::vector<std::string> ids;
  std::vector<std::size_t> gold;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back("id" + std::to_string(i));
    gold.push_back(rng.next_below(k));
  }
  EpochProbabilityLog log(labels, ids, gold, epochs);
  for (std::size_t i = 0; i < n; ++i)
    for (int e = 1; e <= epochs; ++e) {
      double* row = log.mutable_row(i, e);
      double s = 0.0;
      for (std::size_t j = 0; j < k; ++j) s += row[j] = rng.next_unit() + 1e-3;
      for (std::size_t j = 0; j < k; ++j) row[j] /= s;
    }
  return log;
}

// Straightforward reference formulas, written independently of the kernels.
double ref_mean(const EpochProbabilityLog& log, std::size_t i) {
  double total = 0;
  for (int e = 1; e <= log.epochs(); ++e) {
    double best = -1;
    for (std::size_t j = 0; j < log.num_labels(); ++j) best = std::max(best, log.prob(i, e, j));
    total += best;
  }
  return -total / log.epochs();
}

double ref_std(const EpochProbabilityLog& log, std::size_t i) {
  std::vector<double> m;
  for (int e = 1; e <= log.epochs(); ++e) {
    double best = -1;
    for (std::size_t j = 0; j < log.num_labels(); ++j) best = std::max(best, log.prob(i, e, j));
    m.push_back(best);
  }
  double mu = 0;
  for (double v : m) mu += v;
  mu /= m.size();
  double ss = 0;
  for (double v : m) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / m.size());
}

std::map<std::string, double> by_id(const std::vector<ScoreRecord>& s) {
  std::map<std::string, double> m;
  for (const auto& r : s) m[r.instance_id] = r.score;
  return m;
}

}  // namespace

TEST_CASE("hand values") {
  const auto log = binary_log({{0.9, 0.6, 0.75}, {0.1, 0.4, 0.25}, {1.0, 1.0, 1.0}, {0.5, 0.5, 0.5}});
  const auto mean = dm_mean_pred(log);
  const auto std = dm_std_pred(log);
  CHECK(mean[0].score == doctest::Approx(-0.75).epsilon(1e-12));
  CHECK(std[0].score == doctest::Approx(0.122474).epsilon(1e-6));
  // Max-probs are label-agnostic: the mirrored instance scores the same.
  CHECK(mean[1].score == doctest::Approx(-0.75).epsilon(1e-12));
  CHECK(mean[2].score == -1.0);
  CHECK(std[2].score == 0.0);
  CHECK(mean[3].score == -0.5);
  CHECK(std[3].score == 0.0);
}

TEST_CASE("gold confidence hand values") {
  const auto log = binary_log({{0.2, 0.4, 0.6}, {1.0, 1.0, 1.0}, {0.0, 0.0, 0.0}});
  const auto g = dm_gold_confidence(log);
  CHECK(g[0].score == doctest::Approx(-0.4).epsilon(1e-12));
  CHECK(g[1].score == -1.0);
  CHECK(g[2].score == 0.0);
  // Gold on the other label.
  const auto flipped = dm_gold_confidence(binary_log({{0.2, 0.4, 0.6}}, {1}));
  CHECK(flipped[0].score == doctest::Approx(-0.6).epsilon(1e-12));
}

TEST_CASE("single epoch has zero variability") {
  SplitMix64 rng(2);
  const auto log = random_log(rng, 20, 1, 3);
  for (const auto& r : dm_std_pred(log)) CHECK(r.score == 0.0);
}

TEST_CASE("kernels match the reference formulas on random logs") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    const auto log = random_log(rng, 1 + rng.next_below(50), 1 + static_cast<int>(rng.next_below(10)),
                                2 + rng.next_below(3));
    const auto mean = dm_mean_pred(log);
    const auto std = dm_std_pred(log);
    const auto gold = dm_gold_confidence(log);
    REQUIRE(mean.size() == log.num_instances());
    for (std::size_t i = 0; i < log.num_instances(); ++i) {
      CHECK(mean[i].instance_id == log.instance_ids()[i]);
      CHECK(std::abs(mean[i].score - ref_mean(log, i)) <= 1e-9);
      CHECK(std::abs(std[i].score - ref_std(log, i)) <= 1e-9);
      double g = 0;
      for (int e = 1; e <= log.epochs(); ++e) g += log.prob(i, e, log.gold_index(i));
      CHECK(std::abs(gold[i].score + g / log.epochs()) <= 1e-9);
    }
    CHECK(mean == serial::dm_mean_pred(log));
    CHECK(std == serial::dm_std_pred(log));
    CHECK(gold == serial::dm_gold_confidence(log));
  }
}

TEST_CASE("score bounds") {
  SplitMix64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng.next_below(3);
    const auto log = random_log(rng, 30, 1 + static_cast<int>(rng.next_below(10)), k);
    const auto mean = dm_mean_pred(log);
    const auto std = dm_std_pred(log);
    for (std::size_t i = 0; i < mean.size(); ++i) {
      CHECK(mean[i].score >= -1.0);
      CHECK(mean[i].score <= -1.0 / static_cast<double>(k) + 1e-12);
      CHECK(std[i].score >= 0.0);
      CHECK(std[i].score <= 0.5);
    }
  }
}

TEST_CASE("scores are invariant to epoch order") {
  SplitMix64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const int epochs = 2 + static_cast<int>(rng.next_below(9));
    const auto log = random_log(rng, 10, epochs, 2);
    std::vector<int> perm(static_cast<std::size_t>(epochs));
    std::iota(perm.begin(), perm.end(), 1);
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.next_below(i)]);
    std::vector<std::size_t> gold;
    for (std::size_t i = 0; i < log.num_instances(); ++i) gold.push_back(log.gold_index(i));
    EpochProbabilityLog shuffled(log.label_order(), log.instance_ids(), gold, epochs);
    for (std::size_t i = 0; i < log.num_instances(); ++i)
      for (int e = 1; e <= epochs; ++e)
        std::copy_n(log.row(i, perm[static_cast<std::size_t>(e - 1)]), 2, shuffled.mutable_row(i, e));
    const auto a = dm_mean_pred(log), b = dm_mean_pred(shuffled);
    const auto c = dm_std_pred(log), d = dm_std_pred(shuffled);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(std::abs(a[i].score - b[i].score) <= 1e-12);
      CHECK(std::abs(c[i].score - d[i].score) <= 1e-12);
    }
  }
}

TEST_CASE("zero variability iff constant max-prob sequence") {
  const auto log = binary_log({{0.7, 0.3, 0.7}, {0.7, 0.7, 0.7}, {0.7, 0.71, 0.7}});
  const auto s = dm_std_pred(log);
  CHECK(s[0].score == doctest::Approx(0.0).epsilon(1e-15));  // max-prob is 0.7 every epoch
  CHECK(s[1].score == 0.0);
  CHECK(s[2].score > 0.0);
}

TEST_CASE("empty log is an error") {
  EpochProbabilityLog empty;
  CHECK_THROWS_AS(dm_mean_pred(empty), DataError);
  CHECK_THROWS_AS(dm_std_pred(empty), DataError);
  CHECK_THROWS_AS(dm_gold_confidence(empty), DataError);
}

TEST_CASE("random scores depend on (seed, id) only") {
  std::vector<std::string> ids;
  for (int i = 0; i < 10000; ++i) ids.push_back("t" + std::to_string(i));
  const auto a = random_scores(ids, 42);
  double mean = 0;
  for (const auto& r : a) {
    CHECK(r.score >= 0.0);
    CHECK(r.score < 1.0);
    mean += r.score;
  }
  mean /= a.size();
  CHECK(std::abs(mean - 0.5) <= 0.02);

  auto reversed = ids;
  std::reverse(reversed.begin(), reversed.end());
  CHECK(by_id(random_scores(reversed, 42)) == by_id(a));
  CHECK(by_id(random_scores(ids, 43)) != by_id(a));
  CHECK(random_scores({}, 1).empty());
  CHECK_THROWS_AS(random_scores({"x", "y", "x"}, 1), DataError);

  // Pinned value: a port in another language must reproduce it.
  const double expected = static_cast<double>(SplitMix64::mix(42 + fnv1a64("t0")) >> 11) / 9007199254740992.0;
  CHECK(a[0].score == expected);
}

TEST_CASE("ranking order and ties") {
  auto r = rank_by_score({{"b", Scorer::random, 0.1}, {"a", Scorer::random, 0.9}});
  CHECK(r.id(0) == "a");
  r = rank_by_score({{"b", Scorer::random, 0.5}, {"a", Scorer::random, 0.5}, {"c", Scorer::random, 0.7}});
  CHECK(r.id(0) == "c");
  CHECK(r.id(1) == "a");
  CHECK(r.id(2) == "b");
  CHECK_THROWS_AS(rank_by_score({{"a", Scorer::random, 0.1}, {"a", Scorer::random, 0.2}}), DataError);
  CHECK(rank_by_score({}).empty());
}

TEST_CASE("ranking matches a reference sort and ignores shifts") {
  SplitMix64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ScoreRecord> s;
    for (int i = 0; i < 100; ++i)
      s.push_back({"x" + std::to_string(i), Scorer::dm_mean_pred, static_cast<double>(rng.next_below(20)) / 4.0});
    // Reference: stable sort by id, then stable sort by score.
    auto ref = s;
    std::stable_sort(ref.begin(), ref.end(), [](auto& a, auto& b) { return a.instance_id < b.instance_id; });
    std::stable_sort(ref.begin(), ref.end(), [](auto& a, auto& b) { return a.score > b.score; });
    const auto ranked = rank_by_score(s);
    REQUIRE(ranked.size() == ref.size());
    for (std::size_t k = 0; k < ref.size(); ++k) CHECK(ranked.id(k) == ref[k].instance_id);

    auto shifted = s;
    for (auto& r : shifted) r.score += 0.25;  // exact in binary
    const auto again = rank_by_score(shifted);
    for (std::size_t k = 0; k < ref.size(); ++k) CHECK(again.id(k) == ranked.id(k));
  }
}

TEST_CASE("scorer names") {
  for (auto s : {Scorer::dm_mean_pred, Scorer::dm_std_pred, Scorer::dm_gold_confidence, Scorer::random})
    CHECK(parse_scorer(to_string(s)) == s);
  CHECK_THROWS_AS(parse_scorer("confidence"), ConfigError);
}

TEST_CASE("score and ranking CSV round trip") {
  const std::vector<ScoreRecord> s = {{"a,1", Scorer::dm_std_pred, 0.125}, {"b", Scorer::dm_std_pred, 1e-17}};
  std::stringstream buf;
  write_scores_csv(buf, s);
  CHECK(buf.str().substr(0, 25) == "instance_id,scorer,score\n");
  CHECK(read_scores_csv(buf) == s);

  std::stringstream ranked;
  write_ranking_csv(ranked, rank_by_score(s));
  CHECK(ranked.str().find("1,\"a,1\",dm_std_pred,0.125") != std::string::npos);
  const auto back = read_ranking_csv(ranked);
  CHECK(back.entries == rank_by_score(s).entries);

  std::istringstream bad("instance_id,scorer,score\nx,dm_std_pred,abc\n");
  CHECK_THROWS_AS(read_scores_csv(bad), DataError);
  std::istringstream bad_scorer("instance_id,scorer,score\nx,nope,0.1\n");
  CHECK_THROWS_AS(read_scores_csv(bad_scorer), DataError);
}

// ------------------------------------------------------------ log format

TEST_CASE("epoch log JSONL round trip") {
  SplitMix64 rng(4);
  const auto log = random_log(rng, 7, 3, 2);
  std::stringstream buf;
  write_epoch_log(buf, log);
  std::string line;
  std::size_t lines = 0;
  for (std::istringstream in(buf.str()); std::getline(in, line);) ++lines;
  CHECK(lines == 21);
  const auto back = read_epoch_log(buf);
  CHECK(back.warnings.empty());
  REQUIRE(back.log.num_instances() == 7);
  CHECK(back.log.instance_ids() == log.instance_ids());
  CHECK(back.log.epochs() == 3);
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(back.log.gold_index(i) == log.gold_index(i));
    for (int e = 1; e <= 3; ++e)
      for (std::size_t j = 0; j < 2; ++j) CHECK(back.log.prob(i, e, j) == log.prob(i, e, j));
  }
}

TEST_CASE("epoch log validation") {
  auto read = [](const std::string& s) {
    std::istringstream in(s);
    return read_epoch_log(in);
  };
  const std::string ok1 = R"({"instance_id":"a","epoch":1,"probs":{"X":0.25,"Y":0.75},"gold_label":"X"})";
  const std::string ok2 = R"({"instance_id":"a","epoch":2,"probs":{"X":0.5,"Y":0.5},"gold_label":"X"})";

  CHECK(read(ok1 + "\n" + ok2 + "\n").log.epochs() == 2);
  CHECK(read("").log.empty());

  SUBCASE("unknown fields warn once") {
    auto r = read(R"({"instance_id":"a","epoch":1,"probs":{"X":1,"Y":0},"gold_label":"X","loss":0.3})" "\n");
    CHECK(r.warnings.size() == 1);
    CHECK(r.warnings[0].find("loss") != std::string::npos);
  }
  SUBCASE("out-of-order records warn but load") {
    auto r = read(ok2 + "\n" + ok1 + "\n");
    CHECK(r.warnings.size() == 1);
    CHECK(r.log.prob(0, 1, 0) == 0.25);
  }
  SUBCASE("missing epoch breaks density") {
    const std::string ok3 = R"({"instance_id":"a","epoch":3,"probs":{"X":0.5,"Y":0.5},"gold_label":"X"})";
    CHECK_THROWS_AS(read(ok1 + "\n" + ok3 + "\n"), DataError);
  }
  SUBCASE("unnormalised probabilities") {
    CHECK_THROWS_AS(read(R"({"instance_id":"a","epoch":1,"probs":{"X":0.5,"Y":0.6},"gold_label":"X"})"), DataError);
  }
  SUBCASE("probability outside [0,1]") {
    CHECK_THROWS_AS(read(R"({"instance_id":"a","epoch":1,"probs":{"X":1.5,"Y":-0.5},"gold_label":"X"})"), DataError);
  }
  SUBCASE("gold label not among labels") {
    CHECK_THROWS_AS(read(R"({"instance_id":"a","epoch":1,"probs":{"X":0.5,"Y":0.5},"gold_label":"Z"})"), DataError);
  }
  SUBCASE("gold label changes") {
    CHECK_THROWS_AS(
        read(ok1 + "\n" + R"({"instance_id":"a","epoch":2,"probs":{"X":0.5,"Y":0.5},"gold_label":"Y"})"),
        DataError);
  }
  SUBCASE("label set changes") {
    CHECK_THROWS_AS(
        read(ok1 + "\n" + R"({"instance_id":"a","epoch":2,"probs":{"X":0.5,"Z":0.5},"gold_label":"X"})"),
        DataError);
  }
  SUBCASE("duplicate record") { CHECK_THROWS_AS(read(ok1 + "\n" + ok1), DataError); }
  SUBCASE("epoch zero") {
    CHECK_THROWS_AS(read(R"({"instance_id":"a","epoch":0,"probs":{"X":0.5,"Y":0.5},"gold_label":"X"})"), DataError);
  }
  SUBCASE("bad JSON names the line") {
    try {
      read(ok1 + "\n{nope\n");
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
  SUBCASE("wrong field types") {
    CHECK_THROWS_AS(read(R"({"instance_id":1,"epoch":1,"probs":{"X":1,"Y":0},"gold_label":"X"})"), DataError);
    CHECK_THROWS_AS(read(R"({"instance_id":"a","epoch":"1","probs":{"X":1,"Y":0},"gold_label":"X"})"), DataError);
    CHECK_THROWS_AS(read(R"({"instance_id":"a","epoch":1,"probs":[1,0],"gold_label":"X"})"), DataError);
    CHECK_THROWS_AS(read(R"({"instance_id":"a","epoch":1,"probs":{"X":"1","Y":0},"gold_label":"X"})"), DataError);
    CHECK_THROWS_AS(read(R"(["a"])"), DataError);
  }
}
