#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <unistd.h>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "varicart/triage_http.hpp"

using namespace varicart;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const LabelSet kLabels = LabelSet::dsl_tl();

struct TempDir {
  fs::path path;
  TempDir() {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() /
           ("varicart_triage_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

Dataset five() {
  std::vector<Instance> v;
  for (int i = 1; i <= 5; ++i) {
    Instance x;
    x.id = "i" + std::to_string(i);
    x.raw_text = "texto número " + std::to_string(i);
    x.train_label = i % 2 ? kLabels.variety_a : kLabels.variety_b;
    x.is_common = i == 5;
    v.push_back(x);
  }
  return Dataset(kLabels, v);
}

// i1 highest, i5 lowest.
std::map<std::string, RankedList> rankings() {
  RankedList r;
  for (int i = 1; i <= 5; ++i) r.entries.push_back({"i" + std::to_string(i), Scorer::dm_mean_pred, -0.1 * i});
  return {{"dm_mean_pred", r}};
}

TriageService::Clock counter_clock() {
  auto n = std::make_shared<int>(0);
  return [n] { return "2024-01-01T00:00:" + std::to_string(10 + (*n)++) + ".000Z"; };
}

std::vector<std::string> ids(const std::vector<CandidateView>& b) {
  std::vector<std::string> out;
  for (const auto& c : b) out.push_back(c.id);
  return out;
}

LabelDecision decide(std::string id, DecidedLabel l, std::string who = "ann") {
  return {std::move(id), l, std::move(who), ""};
}

}  // namespace

TEST_CASE("queue semantics") {
  TempDir tmp;
  TriageService s(five(), rankings(), std::nullopt, tmp.path / "decisions.jsonl", counter_clock());
  auto b = s.next_batch("dm_mean_pred", 3, "ann");
  CHECK(ids(b) == std::vector<std::string>{"i1", "i2", "i3"});
  CHECK(b[0].rank == 1);
  CHECK(b[0].current_label == "ES-AR");
  CHECK(s.next_batch("dm_mean_pred", 3, "ann")[0].id == "i1");  // stable

  s.record_decision(decide("i1", DecidedLabel::common));
  CHECK(ids(s.next_batch("dm_mean_pred", 3, "ann")) == std::vector<std::string>{"i2", "i3", "i4"});
  // Another annotator still sees i1.
  CHECK(s.next_batch("dm_mean_pred", 1, "other")[0].id == "i1");

  s.record_decision(decide("i3", DecidedLabel::variety_a));
  s.record_decision(decide("i4", DecidedLabel::variety_a));
  b = s.next_batch("dm_mean_pred", 10, "ann");
  CHECK(ids(b) == std::vector<std::string>{"i2", "i5"});
  CHECK(b[1].rank == 5);

  CHECK_THROWS_AS(s.next_batch("random", 3, "ann"), NotFound);
  CHECK_THROWS_AS(s.next_batch("dm_mean_pred", 0, "ann"), Invalid);
}

TEST_CASE("decisions, supersession and stats") {
  TempDir tmp;
  TriageService s(five(), rankings(), std::nullopt, tmp.path / "d.jsonl", counter_clock());
  auto st = s.stats();
  CHECK(st.reviewed_count == 0);
  CHECK(st.total_count == 5);
  CHECK_FALSE(st.live_precision.has_value());

  const auto ack = s.record_decision(decide("i1", DecidedLabel::variety_b));
  CHECK(ack.timestamp == "2024-01-01T00:00:10.000Z");
  CHECK(s.stats().reviewed_count == 1);
  CHECK(*s.stats().live_precision == 0.0);

  s.record_decision(decide("i1", DecidedLabel::common));
  st = s.stats();
  CHECK(st.reviewed_count == 1);
  CHECK(st.confirmed_common_in_reviewed == 1);
  CHECK(*st.live_precision == 1.0);
  CHECK(s.current_label(s.dataset().at("i1")) == "common");

  CHECK_THROWS_AS(s.record_decision(decide("nope", DecidedLabel::common)), NotFound);
  CHECK_THROWS_AS(s.record_decision(decide("i2", DecidedLabel::common, "")), Invalid);
  CHECK(s.decisions().size() == 2);
}

TEST_CASE("live precision over ten reviews") {
  TempDir tmp;
  std::vector<Instance> v;
  RankedList r;
  for (int i = 0; i < 12; ++i) {
    Instance x;
    x.id = "x" + std::to_string(i);
    x.raw_text = "t";
    x.train_label = kLabels.variety_a;
    v.push_back(x);
    r.entries.push_back({x.id, Scorer::random, 1.0 - i * 0.01});
  }
  TriageService s(Dataset(kLabels, v), {{"random", r}}, std::nullopt, tmp.path / "d.jsonl", counter_clock());
  for (int i = 0; i < 10; ++i)
    s.record_decision(decide("x" + std::to_string(i), i < 6 ? DecidedLabel::common : DecidedLabel::variety_b));
  CHECK(s.stats().reviewed_count == 10);
  CHECK(*s.stats().live_precision == doctest::Approx(0.6));
}

TEST_CASE("merge rules") {
  const auto ds = five();
  SUBCASE("no decisions leaves the dataset unchanged") {
    const auto m = merge_decisions(ds, {});
    std::ostringstream a, b;
    write_generic_csv(a, ds);
    write_generic_csv(b, m.dataset);
    CHECK(a.str() == b.str());
    CHECK(m.dropped.empty());
  }
  SUBCASE("two of three common") {
    const auto m = merge_decisions(ds, {decide("i1", DecidedLabel::common, "a"), decide("i1", DecidedLabel::common, "b"),
                                        decide("i1", DecidedLabel::variety_b, "c")});
    CHECK(m.dataset.at("i1").is_common);
    CHECK(m.dataset.at("i1").train_label == kLabels.variety_a);
  }
  SUBCASE("variety plurality relabels and clears the common flag") {
    const auto m = merge_decisions(ds, {decide("i5", DecidedLabel::variety_b, "a")});
    CHECK_FALSE(m.dataset.at("i5").is_common);
    CHECK(m.dataset.at("i5").train_label == kLabels.variety_b);
  }
  SUBCASE("irrelevant plurality drops") {
    const auto m = merge_decisions(ds, {decide("i2", DecidedLabel::irrelevant, "a"),
                                        decide("i2", DecidedLabel::irrelevant, "b"), decide("i2", DecidedLabel::common, "c")});
    CHECK(m.dataset.find("i2") == nullptr);
    CHECK(m.dataset.size() == 4);
    CHECK(m.dropped == std::vector<std::string>{"i2"});
  }
  SUBCASE("ties stay unresolved") {
    const auto m = merge_decisions(ds, {decide("i3", DecidedLabel::common, "a"), decide("i3", DecidedLabel::variety_b, "b")});
    CHECK(m.unresolved == std::vector<std::string>{"i3"});
    CHECK_FALSE(m.dataset.at("i3").is_common);
    CHECK(m.dataset.at("i3").train_label == kLabels.variety_a);
  }
  SUBCASE("only the latest decision of an annotator counts") {
    const auto m = merge_decisions(ds, {decide("i3", DecidedLabel::common, "a"), decide("i3", DecidedLabel::irrelevant, "a")});
    CHECK(m.dataset.find("i3") == nullptr);
  }
  SUBCASE("merge is idempotent") {
    const std::vector<LabelDecision> log = {decide("i1", DecidedLabel::common), decide("i2", DecidedLabel::irrelevant)};
    std::ostringstream a, b;
    write_generic_csv(a, merge_decisions(ds, log).dataset);
    write_generic_csv(b, merge_decisions(ds, log).dataset);
    CHECK(a.str() == b.str());
  }
}

TEST_CASE("decision labels") {
  CHECK(parse_decided_label("common") == DecidedLabel::common);
  CHECK(parse_decided_label("ES-AR", &kLabels) == DecidedLabel::variety_a);
  CHECK(parse_decided_label("ES", &kLabels) == DecidedLabel::common);
  CHECK_FALSE(parse_decided_label("ES-AR").has_value());
  CHECK_FALSE(parse_decided_label("maybe", &kLabels).has_value());
  for (auto l : {DecidedLabel::variety_a, DecidedLabel::variety_b, DecidedLabel::common, DecidedLabel::irrelevant})
    CHECK(parse_decided_label(to_string(l)) == l);
}

TEST_CASE("replay reconstructs state") {
  TempDir tmp;
  const auto log = tmp.path / "sub" / "d.jsonl";
  std::string queue_before, stats_before, instance_before;
  {
    TriageService s(five(), rankings(), std::nullopt, log, counter_clock());
    s.record_decision(decide("i1", DecidedLabel::common, "a"));
    s.record_decision(decide("i2", DecidedLabel::variety_a, "a"));
    s.record_decision(decide("i1", DecidedLabel::variety_b, "b"));
    s.record_decision(decide("i1", DecidedLabel::common, "b"));
    queue_before = queue_json(s.next_batch("dm_mean_pred", 10, "a"));
    stats_before = stats_json(s.stats());
    instance_before = instance_json(s, "i1");
  }
  std::ifstream in(log);
  std::size_t lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  CHECK(lines == 4);

  TriageService again(five(), rankings(), std::nullopt, log, counter_clock());
  CHECK(queue_json(again.next_batch("dm_mean_pred", 10, "a")) == queue_before);
  CHECK(stats_json(again.stats()) == stats_before);
  CHECK(instance_json(again, "i1") == instance_before);
}

TEST_CASE("corrupt or foreign decision logs are rejected") {
  TempDir tmp;
  const auto log = tmp.path / "d.jsonl";
  std::ofstream(log) << "{\"instance_id\":\"i1\",\"decided_label\":\"common\",\"annotator_id\":\"a\"}\nnot json\n";
  CHECK_THROWS_AS(TriageService(five(), rankings(), std::nullopt, log), DataError);
  std::ofstream(log) << "{\"instance_id\":\"zz\",\"decided_label\":\"common\",\"annotator_id\":\"a\"}\n";
  CHECK_THROWS_AS(TriageService(five(), rankings(), std::nullopt, log), DataError);

  RankedList stray;
  stray.entries.push_back({"ghost", Scorer::random, 0.5});
  CHECK_THROWS_AS(TriageService(five(), {{"random", stray}}, std::nullopt, tmp.path / "e.jsonl"), DataError);
}

TEST_CASE("attribution tokens in the queue") {
  TempDir tmp;
  FeatureConfig fc;
  fc.hash_dim = 64;
  LinearModel m({kLabels.variety_a, kLabels.variety_b}, fc);
  for (std::uint32_t f = 0; f < 64; ++f) m.weight(0, f) = 0.1 * (f % 7);
  TriageService s(five(), rankings(), m, tmp.path / "d.jsonl", counter_clock());
  const auto b = s.next_batch("dm_mean_pred", 1, "a");
  REQUIRE(b[0].top_tokens.size() == 3);
  CHECK(std::abs(b[0].top_tokens[0].contribution) >= std::abs(b[0].top_tokens[1].contribution));
  CHECK(s.attribution(s.dataset().at("i1")).size() == 3);
}

// ------------------------------------------------------------ HTTP

namespace {

struct Running {
  TriageServer server;
  std::thread thread;
  int port;
  Running(TriageService& s, std::optional<fs::path> ui = {}) : server(s, ui) {
    port = server.bind("127.0.0.1", 0);
    thread = std::thread([this] { server.listen(); });
  }
  ~Running() {
    server.stop();
    thread.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_connection_timeout(5);
    return c;
  }
};

}  // namespace

TEST_CASE("HTTP routes") {
  TempDir tmp;
  fs::create_directories(tmp.path / "ui");
  std::ofstream(tmp.path / "ui" / "index.html") << "<html>triage</html>";
  TriageService s(five(), rankings(), std::nullopt, tmp.path / "d.jsonl", counter_clock());
  Running srv(s, tmp.path / "ui");
  auto c = srv.client();

  auto r = c.Get("/api/queue?scorer=dm_mean_pred&limit=2&annotator=a");
  REQUIRE(r);
  CHECK(r->status == 200);
  auto q = json::parse(r->body);
  REQUIRE(q.size() == 2);
  CHECK(q[0]["id"] == "i1");
  CHECK(q[0]["rank"] == 1);

  CHECK(c.Get("/api/queue?limit=2")->status == 200);  // single ranking is the default
  CHECK(c.Get("/api/queue?scorer=random")->status == 404);
  CHECK(c.Get("/api/queue?scorer=dm_mean_pred&limit=0")->status == 422);
  CHECK(c.Get("/api/queue?scorer=dm_mean_pred&limit=abc")->status == 422);

  r = c.Post("/api/decisions", R"({"instance_id":"i1","decided_label":"common","annotator_id":"a"})",
             "application/json");
  REQUIRE(r);
  CHECK(r->status == 201);
  CHECK(json::parse(r->body)["timestamp"] == "2024-01-01T00:00:10.000Z");
  CHECK(c.Post("/api/decisions", R"({"instance_id":"zz","decided_label":"common","annotator_id":"a"})",
               "application/json")->status == 404);
  CHECK(c.Post("/api/decisions", R"({"instance_id":"i1","decided_label":"maybe","annotator_id":"a"})",
               "application/json")->status == 422);
  CHECK(c.Post("/api/decisions", R"({"instance_id":"i1"})", "application/json")->status == 422);
  CHECK(c.Post("/api/decisions", "nope", "application/json")->status == 422);
  // Dataset codes are accepted as labels.
  CHECK(c.Post("/api/decisions", R"({"instance_id":"i2","decided_label":"ES","annotator_id":"a"})",
               "application/json")->status == 201);

  r = c.Get("/api/stats");
  auto st = json::parse(r->body);
  CHECK(st["reviewed_count"] == 2);
  CHECK(st["total_count"] == 5);
  CHECK(st["live_precision"] == 1.0);

  r = c.Get("/api/instances/i1");
  CHECK(r->status == 200);
  auto inst = json::parse(r->body);
  CHECK(inst["current_label"] == "common");
  CHECK(inst["decisions"].size() == 1);
  CHECK(inst["scores"]["dm_mean_pred"]["rank"] == 1);
  CHECK(c.Get("/api/instances/zz")->status == 404);

  r = c.Get("/api/export");
  CHECK(r->status == 200);
  CHECK(r->get_header_value("X-Dropped-Count") == "0");
  CHECK(r->body.rfind("id,text,train_label,is_common,split\n", 0) == 0);
  CHECK(r->body.find("i1,texto número 1,ES-AR,true") != std::string::npos);

  r = c.Get("/index.html");
  CHECK(r->status == 200);
  CHECK(r->body == "<html>triage</html>");
}

TEST_CASE("HTTP stats before any decision report null precision") {
  TempDir tmp;
  TriageService s(five(), rankings(), std::nullopt, tmp.path / "d.jsonl", counter_clock());
  Running srv(s);
  auto st = json::parse(srv.client().Get("/api/stats")->body);
  CHECK(st["live_precision"].is_null());
  CHECK(st["reviewed_count"] == 0);
}

TEST_CASE("concurrent decisions are all persisted") {
  TempDir tmp;
  const auto log = tmp.path / "d.jsonl";
  {
    TriageService s(five(), rankings(), std::nullopt, log);
    Running srv(s);
    std::vector<std::thread> workers;
    for (int w = 0; w < 4; ++w)
      workers.emplace_back([&, w] {
        auto c = srv.client();
        for (int i = 0; i < 10; ++i) {
          json body = {{"instance_id", "i" + std::to_string(1 + i % 5)},
                       {"decided_label", "common"},
                       {"annotator_id", "w" + std::to_string(w)}};
          auto r = c.Post("/api/decisions", body.dump(), "application/json");
          CHECK((r && r->status == 201));
        }
      });
    for (auto& t : workers) t.join();
    CHECK(s.decisions().size() == 40);
  }
  CHECK(read_decision_log(log).size() == 40);
  TriageService again(five(), rankings(), std::nullopt, log);
  CHECK(again.stats().reviewed_count == 5);
}
