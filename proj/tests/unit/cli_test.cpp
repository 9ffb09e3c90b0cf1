#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "dcolor/graph.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int status = 0;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dcolor_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  CliResult run(const std::string& args) const {
    const std::string out = path("stdout.txt"), err = path("stderr.txt");
    const std::string cmd = std::string(DCOLOR_CLI) + " " + args + " >" + out + " 2>" + err;
    const int raw = std::system(cmd.c_str());
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, RunPathWritesVerifiableColoring) {
  const CliResult r = run("run --gen path,5 --mode mis --out " + path("c.json") + " --save-instance " +
                          path("i.json") + " --trace " + path("t.jsonl"));
  ASSERT_EQ(r.status, 0) << r.err;
  const auto stats = nlohmann::json::parse(r.out);
  EXPECT_EQ(stats["n"], 5);
  EXPECT_GE(stats["phases"].get<int>(), 1);
  EXPECT_TRUE(stats["stats"]["max_msg_bits"].contains("algorithm"));
  EXPECT_TRUE(stats["stats"]["max_msg_bits"].contains("aggregation"));
  EXPECT_FALSE(slurp(path("t.jsonl")).empty());
  const CliResult v = run("verify --instance " + path("i.json") + " --coloring " + path("c.json"));
  EXPECT_EQ(v.status, 0) << v.out;
}

TEST_F(Cli, ExhaustiveOnThirtySeedBitsHitsTheCap) {
  write("big.json", R"({"n":2,"edges":[[0,1]],"psi":{"0":0,"1":32767}})");
  const CliResult r = run("run --graph " + path("big.json") + " --kmode ids --strategy exhaustive");
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.err.find("cap"), std::string::npos) << r.err;
}

TEST_F(Cli, GeneratedDecompositionOnGnp) {
  const CliResult r = run("run --gen gnp,100,0.05 --decomp generate --out " + path("c.json"));
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(nlohmann::json::parse(r.out).contains("decomposition"));
}

TEST_F(Cli, DecompositionFromFile) {
  write("d.json", R"({"alpha":2,"clusters":[{"id":0,"color":1,"nodes":[0,1],"tree_edges":[[0,1]]},)"
                  R"({"id":1,"color":2,"nodes":[2,3],"tree_edges":[[2,3]]}]})");
  EXPECT_EQ(run("run --gen path,4 --decomp " + path("d.json")).status, 0);
  write("bad.json", R"({"alpha":1,"clusters":[{"id":0,"color":1,"nodes":[0,1],"tree_edges":[[0,1]]},)"
                    R"({"id":1,"color":1,"nodes":[2,3],"tree_edges":[[2,3]]}]})");
  EXPECT_NE(run("run --gen path,4 --decomp " + path("bad.json")).status, 0);
}

TEST_F(Cli, VerifyFlagsMonochromaticEdge) {
  write("i.json", R"({"n":3,"edges":[[0,1],[1,2]]})");
  write("c.json", R"({"n":3,"colors":[0,0,1]})");
  const CliResult r = run("verify --instance " + path("i.json") + " --coloring " + path("c.json"));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.out.find("{0,1}"), std::string::npos) << r.out;
}

TEST_F(Cli, VerifyFlagsMissingColor) {
  write("i.json", R"({"n":3,"edges":[[0,1],[1,2]]})");
  write("c.json", R"({"n":3,"colors":[0,1,null]})");
  const CliResult r = run("verify --instance " + path("i.json") + " --coloring " + path("c.json"));
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.out.find("node 2"), std::string::npos) << r.out;
}

TEST_F(Cli, ColorsModes) {
  write("i.json", R"({"n":3,"edges":[[0,1],[1,2]],"C":9,"lists":{"0":[5,8],"1":[2,5,8],"2":[7,8]}})");
  const CliResult lists = run("run --graph " + path("i.json") + " --out " + path("c.json"));
  ASSERT_EQ(lists.status, 0) << lists.err;
  const auto inst = dcolor::load_instance(path("i.json"));
  const auto c = dcolor::load_coloring(path("c.json"), 3);
  EXPECT_TRUE(dcolor::verify_coloring(inst, c, true).ok());

  ASSERT_EQ(run("run --graph " + path("i.json") + " --colors-mode delta1 --out " + path("d.json")).status, 0);
  const auto d = dcolor::load_coloring(path("d.json"), 3);
  for (const auto& x : d.assignment) EXPECT_LE(*x, 2u);
  EXPECT_EQ(run("run --gen star,9 --colors-mode degree1 --mode avoid-mis").status, 0);
}

TEST_F(Cli, BadInputsFail) {
  EXPECT_NE(run("run").status, 0);
  EXPECT_NE(run("run --gen torus,4").status, 0);
  EXPECT_NE(run("run --gen path,4 --mode luby").status, 0);
  EXPECT_NE(run("run --gen path,4 --bandwidth wide").status, 0);
  EXPECT_NE(run("run --gen path,40 --round-cap 5").status, 0);
}

TEST_F(Cli, BenchRowsAndDeterminism) {
  const std::string args = "bench --gen path,8 --gen cycle,9 --gen clique,5 --no-timing";
  const CliResult a = run(args);
  ASSERT_EQ(a.status, 0) << a.err;
  std::istringstream lines(a.out);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) ++count;
  EXPECT_EQ(count, 4);
  EXPECT_EQ(run(args).out, a.out);

  const CliResult empty = run("bench");
  EXPECT_EQ(empty.status, 0);
  EXPECT_EQ(std::count(empty.out.begin(), empty.out.end(), '\n'), 1);
  EXPECT_EQ(empty.out.rfind("instance,n,delta,C,phases,rounds", 0), 0u);
}

TEST_F(Cli, RunIsByteIdenticalAcrossRepeats) {
  const std::string args = "run --gen gnp,60,0.1 --rng-seed 9 --mode avoid-mis --trace ";
  const CliResult a = run(args + path("a.jsonl") + " --out " + path("a.json"));
  const CliResult b = run(args + path("b.jsonl") + " --out " + path("b.json"));
  ASSERT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(slurp(path("a.jsonl")), slurp(path("b.jsonl")));
  EXPECT_EQ(slurp(path("a.json")), slurp(path("b.json")));
}
