// Drives the varicart binary end to end and checks exit codes and outputs.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "varicart/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() /
           ("varicart_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Runs the CLI with stdout and stderr captured into files under dir.
int cli(const fs::path& dir, const std::string& args) {
  const std::string cmd = "cd '" + dir.string() + "' && '" VARICART_CLI "' " + args + " >stdout.txt 2>stderr.txt";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void planted(const fs::path& dir, std::size_t n = 200) {
  varicart::PlantedConfig pc;
  pc.instances = n;
  std::ofstream out(dir / "p.csv");
  varicart::write_generic_csv(out, varicart::make_planted_dataset(pc));
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  TempDir tmp;
  CHECK(cli(tmp.path, "") == 2);
  CHECK(cli(tmp.path, "frobnicate") == 2);
  CHECK(cli(tmp.path, "score --scorer dm_mean_pred") == 2);
  CHECK(cli(tmp.path, "--help") == 0);
  CHECK(cli(tmp.path, "run --data missing.csv --out o") == 2);
  CHECK(slurp(tmp.path / "stderr.txt").find("missing.csv") != std::string::npos);
  CHECK_FALSE(fs::exists(tmp.path / "o"));
}

TEST_CASE("preprocess") {
  TempDir tmp;
  std::ofstream(tmp.path / "raw.csv") << "id,text,train_label,is_common,split\n"
                                         "1,#CubaIslaBella jajajajaja holaaaa @a @b @c,ES-CU,false,train\n";
  REQUIRE(cli(tmp.path, "preprocess --in raw.csv --out norm.csv") == 0);
  CHECK(slurp(tmp.path / "norm.csv").find("Cuba isla bella jaja holaa @usuario @usuario,") != std::string::npos);

  std::ofstream(tmp.path / "norm.toml") << "max_letter_repeat = 3\n";
  REQUIRE(cli(tmp.path, "preprocess --in raw.csv --out n3.csv --config norm.toml") == 0);
  CHECK(slurp(tmp.path / "n3.csv").find("holaaa ") != std::string::npos);
  // Flags win over the file.
  REQUIRE(cli(tmp.path, "preprocess --in raw.csv --out n4.csv --config norm.toml --set max_letter_repeat=2") == 0);
  CHECK(slurp(tmp.path / "n4.csv").find("holaa ") != std::string::npos);

  std::ofstream(tmp.path / "bad.toml") << "colour = 1\n";
  CHECK(cli(tmp.path, "preprocess --in raw.csv --out x.csv --config bad.toml") == 2);
}

TEST_CASE("step-by-step pipeline agrees with run") {
  TempDir tmp;
  planted(tmp.path);
  const std::string small = " --set train.epochs=3 --set train.hash_dim=4096";
  REQUIRE(cli(tmp.path, "run --data p.csv --out out --seeds 42,151" + small) == 0);
  CHECK(slurp(tmp.path / "stdout.txt").find("dm_mean_pred |") != std::string::npos);

  REQUIRE(cli(tmp.path, "train --data p.csv --seed 42 --log log.jsonl --model m.vcm --f1 f1.csv" + small) == 0);
  CHECK(slurp(tmp.path / "log.jsonl") == slurp(tmp.path / "out/seed_42/epoch_log.jsonl"));
  CHECK(slurp(tmp.path / "m.vcm") == slurp(tmp.path / "out/seed_42/model.vcm"));
  CHECK(slurp(tmp.path / "f1.csv") == slurp(tmp.path / "out/seed_42/group_f1.csv"));

  REQUIRE(cli(tmp.path, "ingest-logs --in log.jsonl --data p.csv --strict") == 0);
  CHECK(slurp(tmp.path / "stderr.txt").find("0 warnings") != std::string::npos);

  for (const std::string s : {"dm_mean_pred", "dm_std_pred", "random"}) {
    REQUIRE(cli(tmp.path, "score --log log.jsonl --scorer " + s + " --seed 42 --out s.csv") == 0);
    REQUIRE(cli(tmp.path, "rank --scores s.csv --out r_" + s + ".csv") == 0);
    CHECK(slurp(tmp.path / ("r_" + s + ".csv")) == slurp(tmp.path / ("out/seed_42/ranking_" + s + ".csv")));
  }

  REQUIRE(cli(tmp.path,
              "eval --data p.csv --ranking out/seed_42/ranking_dm_mean_pred.csv "
              "--ranking out/seed_151/ranking_dm_mean_pred.csv --seeds 42,151 --out rep.csv") == 0);
  const auto rep = slurp(tmp.path / "rep.csv");
  CHECK(rep.find("dm_mean_pred,42 151,") != std::string::npos);
  const auto run_report = slurp(tmp.path / "out/report.csv");
  CHECK(run_report.find(rep.substr(rep.find('\n') + 1, 60)) != std::string::npos);

  REQUIRE(cli(tmp.path, "eval --data p.csv --ranking r_random.csv --series series.csv") == 0);
  CHECK(slurp(tmp.path / "series.csv").rfind("n,precision,recall\n", 0) == 0);

  REQUIRE(cli(tmp.path, "analyze --data p.csv --ranking r_dm_mean_pred.csv --n 100 --out an --keyword x "
                        "--model m.vcm --explain s000001") == 0);
  CHECK(fs::exists(tmp.path / "an/top_words.csv"));
  CHECK(fs::exists(tmp.path / "an/keyword_fraction.csv"));
  CHECK(fs::exists(tmp.path / "an/attribution_s000001.jsonl"));
  CHECK_FALSE(fs::exists(tmp.path / "an/agreement_profile.csv"));  // no annotations
}

TEST_CASE("config file with flag overrides") {
  TempDir tmp;
  planted(tmp.path, 100);
  std::ofstream(tmp.path / "exp.toml") << "[dataset]\npath = \"p.csv\"\n[train]\nepochs = 2\nhash_dim = 1024\n"
                                          "[experiment]\nseeds = [1, 2]\noutput = \"from_file\"\n";
  REQUIRE(cli(tmp.path, "run --config exp.toml --out from_flag --epochs 3") == 0);
  CHECK_FALSE(fs::exists(tmp.path / "from_file"));
  const auto m = nlohmann::json::parse(slurp(tmp.path / "from_flag/manifest.json"));
  CHECK(m["config"]["train"]["epochs"] == 3);
  CHECK(m["config"]["seeds"] == std::vector<int>{1, 2});
}

TEST_CASE("data errors exit with 3") {
  TempDir tmp;
  planted(tmp.path, 50);
  std::ofstream(tmp.path / "bad.jsonl")
      << R"({"instance_id":"x","epoch":1,"probs":{"A":0.5,"B":0.6},"gold_label":"A"})" << '\n';
  CHECK(cli(tmp.path, "ingest-logs --in bad.jsonl") == 3);
  CHECK(slurp(tmp.path / "stderr.txt").find("data error") != std::string::npos);
  CHECK(cli(tmp.path, "score --log bad.jsonl --scorer random") == 3);

  std::ofstream(tmp.path / "stray.csv") << "rank,instance_id,scorer,score\n1,ghost,random,0.5\n";
  CHECK(cli(tmp.path, "eval --data p.csv --ranking stray.csv") == 3);

  std::ofstream(tmp.path / "warn.jsonl")
      << R"({"instance_id":"s000001","epoch":1,"probs":{"A":0.5,"B":0.5},"gold_label":"A","extra":1})" << '\n';
  CHECK(cli(tmp.path, "ingest-logs --in warn.jsonl") == 0);
  CHECK(cli(tmp.path, "ingest-logs --in warn.jsonl --strict") == 3);
}
