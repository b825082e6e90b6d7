#include <fstream>

#include <doctest.h>

#include "clusterface/cli.hpp"
#include "clusterface/io.hpp"
#include "support/temp_dir.hpp"

using namespace clusterface;
using clusterface::testing::TempDir;

namespace {

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

int synth(const TempDir& dir, const std::string& name, std::uint64_t seed,
          const std::string& split = "0.0", const std::string& bridges = "0") {
  return run_command({"synth", "--output", dir.file(name).string(), "--seed",
                      std::to_string(seed), "--identities", "4",
                      "--sets-per-identity", "3", "--dimension", "32",
                      "--within-noise", "0.01", "--condition-split", split,
                      "--bridge-count", bridges});
}

void write_all_pairs(const TempDir& dir, const std::string& manifest,
                     const std::string& out) {
  const std::vector<FaceSet> sets = load_manifest(dir.file(manifest));
  std::string text;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (std::size_t j = i + 1; j < sets.size(); ++j) {
      text += sets[i].set_id() + ',' + sets[j].set_id() + '\n';
    }
  }
  std::ofstream f(dir.file(out));
  f << text;
}

}  // namespace

TEST_CASE("synth is deterministic across invocations") {
  TempDir dir;
  REQUIRE(synth(dir, "a.jsonl", 7) == 0);
  REQUIRE(synth(dir, "b.jsonl", 7) == 0);
  CHECK(read_bytes(dir.file("a.jsonl")) == read_bytes(dir.file("b.jsonl")));
  REQUIRE(synth(dir, "c.jsonl", 8) == 0);
  CHECK(read_bytes(dir.file("a.jsonl")) != read_bytes(dir.file("c.jsonl")));
}

TEST_CASE("baseline and constrained verify agree on well-separated data") {
  TempDir dir;
  REQUIRE(synth(dir, "m.jsonl", 13) == 0);
  write_all_pairs(dir, "m.jsonl", "pairs.csv");

  REQUIRE(run_command({"verify", "--input", dir.file("m.jsonl").string(), "--pairs",
                       dir.file("pairs.csv").string(), "--output",
                       dir.file("plain.csv").string(), "--beta", "0.3", "--gamma",
                       "0.1", "--baseline"}) == 0);
  REQUIRE(run_command({"verify", "--input", dir.file("m.jsonl").string(), "--pairs",
                       dir.file("pairs.csv").string(), "--output",
                       dir.file("constrained.csv").string(), "--beta", "0.3",
                       "--gamma", "0.1"}) == 0);
  CHECK(read_bytes(dir.file("plain.csv")) == read_bytes(dir.file("constrained.csv")));
}

TEST_CASE("cluster rejects beta <= gamma with a nonzero exit") {
  TempDir dir;
  REQUIRE(synth(dir, "m.jsonl", 3) == 0);
  CHECK(run_command({"cluster", "--input", dir.file("m.jsonl").string(), "--output",
                     dir.file("out.json").string(), "--beta", "0.3", "--gamma",
                     "0.3"}) == 1);
  CHECK(run_command({"cluster", "--input", dir.file("m.jsonl").string(), "--output",
                     dir.file("out.json").string(), "--beta", "0.3", "--gamma",
                     "0.5"}) == 1);
  CHECK(!std::filesystem::exists(dir.file("out.json")));
}

TEST_CASE("unknown subcommands and flags fail with usage") {
  CHECK(run_command({"frobnicate"}) != 0);
  CHECK(run_command({"synth", "--no-such-flag", "1"}) != 0);
  CHECK(run_command({}) != 0);
  CHECK(run_command({"--help"}) == 0);
}

TEST_CASE("exit codes separate validation from I/O failures") {
  TempDir dir;
  // Unreadable input: exit 2.
  CHECK(run_command({"cluster", "--input", dir.file("missing.jsonl").string(),
                     "--output", dir.file("out.json").string()}) == 2);
  // Unwritable output directory: exit 2.
  REQUIRE(synth(dir, "m.jsonl", 2) == 0);
  CHECK(run_command({"cluster", "--input", dir.file("m.jsonl").string(), "--output",
                     (dir.path() / "no" / "dir" / "out.json").string()}) == 2);
  // Bad parameters: exit 1.
  CHECK(run_command({"cluster", "--input", dir.file("m.jsonl").string(), "--output",
                     dir.file("out.json").string(), "--beta", "3.0"}) == 1);
}

TEST_CASE("cluster emits the merge log as CSV and the full result as JSON") {
  TempDir dir;
  REQUIRE(synth(dir, "m.jsonl", 21) == 0);
  REQUIRE(run_command({"cluster", "--input", dir.file("m.jsonl").string(), "--output",
                       dir.file("log.csv").string(), "--format", "csv", "--beta",
                       "0.4", "--gamma", "0.1"}) == 0);
  const std::string csv = read_bytes(dir.file("log.csv"));
  CHECK(csv.rfind("iteration,left,right,distance,result\n", 0) == 0);

  REQUIRE(run_command({"cluster", "--input", dir.file("m.jsonl").string(), "--output",
                       dir.file("full.json").string(), "--beta", "0.4", "--gamma",
                       "0.1", "--constraints-output",
                       dir.file("cons.csv").string()}) == 0);
  CHECK(read_bytes(dir.file("full.json")).find("\"merge_log\"") != std::string::npos);
  CHECK(read_bytes(dir.file("cons.csv")).rfind("i,j,kind,label\n", 0) == 0);
}

TEST_CASE("identify and rank run end to end over probe/gallery manifests") {
  TempDir dir;
  REQUIRE(synth(dir, "full.jsonl", 17, "0.5", "2") == 0);

  // Split the JSONL by line: every third record becomes a probe.
  const std::string text = read_bytes(dir.file("full.jsonl"));
  std::string probes, gallery;
  std::size_t line = 0, pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    const std::string row = text.substr(pos, eol - pos + 1);
    ((line++ % 3 == 0) ? probes : gallery) += row;
    pos = eol + 1;
  }
  {
    std::ofstream p(dir.file("probes.jsonl"));
    p << probes;
    std::ofstream g(dir.file("gallery.jsonl"));
    g << gallery;
  }

  REQUIRE(run_command({"identify", "--probes", dir.file("probes.jsonl").string(),
                       "--gallery", dir.file("gallery.jsonl").string(), "--output",
                       dir.file("pred.csv").string(), "--metrics-output",
                       dir.file("cmc.json").string(), "--curve-output",
                       dir.file("cmc.csv").string(), "--beta", "0.5", "--gamma",
                       "0.15", "--k", "5", "--max-rank", "5"}) == 0);
  CHECK(read_bytes(dir.file("pred.csv")).rfind("probe,predicted,actual\n", 0) == 0);
  CHECK(read_bytes(dir.file("cmc.csv")).rfind("rank,accuracy\n", 0) == 0);
  CHECK(read_bytes(dir.file("cmc.json")).find("\"identification\"") != std::string::npos);

  REQUIRE(run_command({"rank", "--probes", dir.file("probes.jsonl").string(),
                       "--gallery", dir.file("gallery.jsonl").string(), "--output",
                       dir.file("ranks.csv").string(), "--beta", "0.5", "--gamma",
                       "0.15", "--k", "4"}) == 0);
  CHECK(read_bytes(dir.file("ranks.csv")).rfind("probe,rank,neighbor\n", 0) == 0);
}

TEST_CASE("verify produces ROC metrics when asked") {
  TempDir dir;
  REQUIRE(synth(dir, "m.jsonl", 29) == 0);
  write_all_pairs(dir, "m.jsonl", "pairs.csv");
  REQUIRE(run_command({"verify", "--input", dir.file("m.jsonl").string(), "--pairs",
                       dir.file("pairs.csv").string(), "--output",
                       dir.file("d.csv").string(), "--metrics-output",
                       dir.file("metrics.json").string(), "--curve-output",
                       dir.file("roc.csv").string(), "--grid-steps", "8"}) == 0);
  CHECK(read_bytes(dir.file("roc.csv")).rfind("threshold,far,tar\n", 0) == 0);
  const std::string metrics = read_bytes(dir.file("metrics.json"));
  CHECK(metrics.find("\"verification\"") != std::string::npos);
  CHECK(metrics.find("\"gamma_policy\"") != std::string::npos);
}

TEST_CASE("bench writes the scaling table") {
  TempDir dir;
  REQUIRE(run_command({"bench", "--sizes", "24,48,96", "--dimension", "8",
                       "--output", dir.file("scaling.csv").string(), "--format",
                       "csv", "--beta", "0.4", "--gamma", "0.1", "--seed", "3"}) == 0);
  const std::string csv = read_bytes(dir.file("scaling.csv"));
  CHECK(csv.rfind("sets,distance_evaluations,wall_seconds\n", 0) == 0);
  REQUIRE(run_command({"bench", "--sizes", "24,48,96", "--dimension", "8",
                       "--output", dir.file("scaling.json").string(), "--seed",
                       "3"}) == 0);
  CHECK(read_bytes(dir.file("scaling.json")).find("\"loglog_slope\"") !=
        std::string::npos);
  CHECK(run_command({"bench", "--sizes", "24,48", "--output",
                     dir.file("x.json").string()}) == 1);
  CHECK(run_command({"bench", "--sizes", "24,banana", "--output",
                     dir.file("x.json").string()}) == 1);
}

TEST_CASE("config file values sit between defaults and flags") {
  TempDir dir;
  REQUIRE(synth(dir, "m.jsonl", 5) == 0);
  {
    std::ofstream c(dir.file("config.json"));
    c << R"({"beta":0.8,"gamma":0.3,"k":9,"input":")" << dir.file("m.jsonl").string()
      << R"(","output":")" << dir.file("out.json").string() << R"("})";
  }
  // Paths come from the config file; beta is overridden by the flag.
  REQUIRE(run_command({"cluster", "--config", dir.file("config.json").string(),
                       "--beta", "1.0"}) == 0);
  const std::string out = read_bytes(dir.file("out.json"));
  CHECK(out.find("\"beta\": 1.0") != std::string::npos);
  CHECK(out.find("\"gamma\": 0.3") != std::string::npos);
  CHECK(out.find("\"k\": 9") != std::string::npos);

  std::ofstream bad(dir.file("bad.json"));
  bad << R"({"betta":0.8})";
  bad.close();
  CHECK(run_command({"cluster", "--config", dir.file("bad.json").string(), "--input",
                     dir.file("m.jsonl").string(), "--output",
                     dir.file("x.json").string()}) == 1);
}
