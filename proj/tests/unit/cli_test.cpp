#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "cli/cli.hpp"
#include "stocs/io.hpp"

namespace stocs::cli {
namespace {

namespace fs = std::filesystem;

const std::string kData = STOCS_TEST_DATA_DIR;
const std::string kGolden = STOCS_TEST_GOLDEN_DIR;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return kData + "/" + name; }

fs::path scratch_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("stocs_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(Cli, SolveDecideSat) {
  CliRun r = run({"solve", data("instance_a.scsp"), "--algorithm", "fc", "--mode", "decide"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "SAT p>=0.500000000\n");
}

TEST(Cli, SolveDecideUnsat) {
  CliRun r = run({"solve", data("instance_a.scsp"), "--theta", "0.6"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out, "UNSAT max=0.500000000\n");
  r = run({"solve", data("instance_a.scsp"), "--theta", "0.6", "--algorithm", "bt"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out, "UNSAT max=0.500000000\n");
}

TEST(Cli, MissingFileIsUsageError) {
  CliRun r = run({"solve", "missing.scsp"});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(r.out.empty());
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"solve", data("instance_a.scsp"), "--algorithm", "dfs"}).code, 2);
  EXPECT_EQ(run({"solve", data("instance_a.scsp"), "--theta", "2"}).code, 2);
  EXPECT_EQ(run({"approx", data("instance_a.scsp")}).code, 2);
  EXPECT_EQ(run({"approx", data("instance_a.scsp"), "--epsilon", "0.1", "--top-k", "2"}).code, 2);
  EXPECT_EQ(run({"approx", data("instance_a.scsp"), "--epsilon", "3"}).code, 2);
  EXPECT_EQ(run({"optimize", data("instance_a.scsp")}).code, 2);
  EXPECT_EQ(run({"oracle", data("production_planning.scsp"), "--cap", "10"}).code, 2);
}

TEST(Cli, MalformedInstanceIsUsageError) {
  fs::path dir = scratch_dir("malformed");
  write_file((dir / "bad.scsp").string(), "{\"theta\": 0.5, \"variables\": [");
  CliRun r = run({"solve", (dir / "bad.scsp").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("SyntaxError"), std::string::npos) << r.err;
}

TEST(Cli, HelpAndVersion) {
  CliRun h = run({"--help"});
  EXPECT_EQ(h.code, 0);
  EXPECT_NE(h.out.find("solve"), std::string::npos);
  CliRun v = run({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_EQ(v.out, std::string(kToolVersion) + "\n");
}

TEST(Cli, PolicyOutThenEval) {
  fs::path dir = scratch_dir("policy");
  std::string policy = (dir / "p.json").string();
  CliRun s = run({"solve", data("instance_c.scsp"), "--mode", "max", "--policy-out", policy});
  EXPECT_EQ(s.code, 0);
  EXPECT_EQ(s.out, "MAX p=0.500000000\n");
  CliRun e = run({"eval", data("instance_c.scsp"), "--policy", policy});
  EXPECT_EQ(e.code, 0);
  EXPECT_EQ(e.out, "EXACT p=0.500000000\n");
  CliRun mc = run({"eval", data("instance_c.scsp"), "--policy", policy, "--samples", "2000", "--seed", "9"});
  EXPECT_EQ(mc.code, 0);
  EXPECT_EQ(mc.out, run({"eval", data("instance_c.scsp"), "--policy", policy, "--samples", "2000", "--seed", "9"}).out);
  EXPECT_NE(mc.out.find("seed=9"), std::string::npos);

  CliRun wrong = run({"eval", data("instance_a.scsp"), "--policy", policy});
  EXPECT_EQ(wrong.code, 2);
  EXPECT_NE(wrong.err.find("MalformedPolicy"), std::string::npos) << wrong.err;
}

TEST(Cli, HeuristicWithoutSolutionExitsOne) {
  fs::path dir = scratch_dir("heuristic");
  write_file((dir / "h.scsp").string(), R"({"theta": 0.5, "variables": [{"name": "x", "kind": "decision", "domain": [0]}],
    "constraints": [{"type": "expr", "text": "x != x"}]})");
  CliRun r = run({"approx", (dir / "h.scsp").string(), "--heuristic"});
  EXPECT_EQ(r.code, 1);
}

TEST(Cli, OptimizeWarnsAboutViolationValue) {
  fs::path dir = scratch_dir("optimize");
  write_file((dir / "o.scsp").string(), R"({"theta": 0.5,
    "variables": [{"name": "x", "kind": "decision", "domain": [0, 1]},
                  {"name": "s", "kind": "stochastic", "domain": [0, 1], "probabilities": [0.5, 0.5]}],
    "constraints": [{"type": "expr", "text": "x = s"}],
    "objective": {"text": "x", "violation_value": 3}})");
  CliRun r = run({"optimize", (dir / "o.scsp").string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_EQ(r.out, "OPTIMUM expected=2.000000000 p=0.500000000\n");
}

TEST(Cli, BenchOnInstanceA) {
  fs::path dir = scratch_dir("bench_a");
  fs::copy_file(data("instance_a.scsp"), dir / "a.scsp");
  std::string csv = (dir / "out.csv").string();
  CliRun r = run({"bench", dir.string(), "--out", csv});
  EXPECT_EQ(r.code, 0) << r.err;
  std::istringstream lines(read_file(csv));
  std::string header, bt, fc, extra;
  std::getline(lines, header);
  std::getline(lines, bt);
  std::getline(lines, fc);
  EXPECT_FALSE(std::getline(lines, extra));
  EXPECT_EQ(header, csv_header());
  EXPECT_EQ(bt.rfind("instance_a,bt,decide,0.500000000,SAT,0.500000000,", 0), 0u) << bt;
  EXPECT_EQ(fc.rfind("instance_a,fc,decide,0.500000000,SAT,0.500000000,", 0), 0u) << fc;
}

TEST(Cli, BenchEmptyDirectory) {
  fs::path dir = scratch_dir("bench_empty");
  fs::path out = scratch_dir("bench_empty_out") / "out.csv";
  CliRun r = run({"bench", dir.string(), "--out", out.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(read_file(out.string()), std::string(csv_header()) + "\n");
}

TEST(Cli, BenchReportsMalformedAndContinues) {
  fs::path dir = scratch_dir("bench_bad");
  fs::copy_file(data("instance_a.scsp"), dir / "a.scsp");
  fs::copy_file(data("instance_c.scsp"), dir / "c.scsp");
  write_file((dir / "b.scsp").string(), "not json");
  fs::path out = scratch_dir("bench_bad_out") / "out.csv";
  CliRun r = run({"bench", dir.string(), "--out", out.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("b.scsp"), std::string::npos);
  std::istringstream lines(read_file(out.string()));
  std::string line;
  int rows = -1;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 4);
}

TEST(Cli, BenchMissingDirectory) {
  EXPECT_EQ(run({"bench", "/nonexistent/dir", "--out", "/tmp/x.csv"}).code, 2);
}

TEST(Cli, RunRecordCsv) {
  RunRecord rec;
  rec.instance = "a,b";
  rec.algorithm = "bt";
  rec.mode = "decide";
  rec.theta = 0.25;
  rec.verdict = "SAT";
  rec.probability = 0.5;
  rec.stats.nodes_visited = 7;
  rec.ms = 1.23456;
  rec.version = "9.9.9";
  EXPECT_EQ(rec.csv_row(), "\"a,b\",bt,decide,0.250000000,SAT,0.500000000,7,0,0,0,0,1.235,9.9.9,");
  rec.seed = 4;
  EXPECT_EQ(rec.csv_row().substr(rec.csv_row().size() - 2), ",4");
}

// Each case runs twice: both runs must match the golden file and each other.
struct GoldenCase {
  std::string name;
  std::vector<std::string> args;
  int code;
};

std::vector<GoldenCase> golden_cases() {
  return {
      {"solve_a_fc", {"solve", data("instance_a.scsp"), "--algorithm", "fc", "--stats"}, 0},
      {"solve_a_bt_unsat", {"solve", data("instance_a.scsp"), "--algorithm", "bt", "--theta", "0.6"}, 1},
      {"solve_b_max", {"solve", data("instance_b.scsp"), "--mode", "max", "--stats"}, 0},
      {"solve_c_fc", {"solve", data("instance_c.scsp"), "--stats"}, 0},
      {"solve_fc_example", {"solve", data("fc_not_equal.scsp"), "--stats"}, 0},
      {"solve_fc_example_bt", {"solve", data("fc_not_equal.scsp"), "--algorithm", "bt", "--stats"}, 0},
      {"solve_production_max", {"solve", data("production_planning.scsp"), "--mode", "max"}, 0},
      {"solve_conditional", {"solve", data("conditional.scsp"), "--mode", "max", "--algorithm", "fc"}, 0},
      {"oracle_c", {"oracle", data("instance_c.scsp")}, 0},
      {"oracle_a_theta", {"oracle", data("fc_not_equal.scsp")}, 0},
      {"approx_eps", {"approx", data("instance_c.scsp"), "--epsilon", "0.6"}, 0},
      {"approx_topk", {"approx", data("fc_not_equal.scsp"), "--top-k", "1"}, 0},
      {"approx_heuristic", {"approx", data("instance_b.scsp"), "--heuristic"}, 0},
      {"optimize_b", {"optimize", data("instance_b.scsp")}, 0},
      {"optimize_b_constrained", {"optimize", data("instance_b.scsp"), "--chance-constrained"}, 0},
  };
}

TEST(CliGolden, OutputsMatchAndAreStable) {
  for (const auto& c : golden_cases()) {
    CliRun first = run(c.args);
    CliRun second = run(c.args);
    EXPECT_EQ(first.code, c.code) << c.name << ": " << first.err;
    EXPECT_EQ(first.out, second.out) << c.name;
    EXPECT_EQ(first.err, second.err) << c.name;
    std::string golden = kGolden + "/" + c.name + ".out";
    if (std::getenv("STOCS_UPDATE_GOLDEN")) write_file(golden, first.out);
    EXPECT_EQ(first.out, read_file(golden)) << c.name;
  }
}

}  // namespace
}  // namespace stocs::cli
