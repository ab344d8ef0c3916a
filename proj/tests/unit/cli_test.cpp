#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "adcl/driver.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  Run r;
  std::string cmd = std::string(ADCL_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string bench(const std::string& name) { return std::string(ADCL_BENCH_DIR) + "/" + name; }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() / ("adcl-cli-" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }
  std::string path(const std::string& f) const { return (dir / f).string(); }
  fs::path dir;
};

}  // namespace

TEST_F(Cli, SolveAnswers) {
  auto r = run("solve " + bench("ex1.smt2"));
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "unsat\n");
  EXPECT_EQ(run("solve --no-restarts " + bench("ex1_sat.smt2")).out, "sat\n");
  EXPECT_EQ(run("solve --no-sat " + bench("ex1_sat.smt2")).out, "unknown\n");
  EXPECT_EQ(run("solve " + bench("div.smt2")).out, "unknown\n");
}

TEST_F(Cli, WitnessRoundTrip) {
  auto w = path("w.txt"), x = path("x.txt");
  ASSERT_EQ(run("solve --witness " + w + " " + bench("ex1.smt2")).status, 0);
  auto c = run("check-witness " + bench("ex1.smt2") + " " + w);
  EXPECT_EQ(c.status, 0);
  EXPECT_EQ(c.out, "valid (10002 ground steps)\n");
  ASSERT_EQ(run("expand-witness " + bench("ex1.smt2") + " " + w + " " + x).status, 0);
  EXPECT_EQ(run("check-witness " + bench("ex1.smt2") + " " + x).out, "valid (10002 ground steps)\n");
  std::string text = adcl::read_file(w);
  text.replace(text.find("(h1 5000)"), 9, "(h1 4999)");
  std::ofstream(path("bad.txt")) << text;
  auto bad = run("check-witness " + bench("ex1.smt2") + " " + path("bad.txt"));
  EXPECT_EQ(bad.status, 1);
  EXPECT_EQ(bad.out.rfind("invalid: ", 0), 0u);
}

TEST_F(Cli, InstrumentAndLog) {
  auto out = path("inst.smt2"), log = path("log.jsonl");
  ASSERT_EQ(run("instrument " + bench("ex1.smt2") + " " + out).status, 0);
  EXPECT_EQ(run("solve --log " + log + " " + out).out, "unsat\n");
  EXPECT_NE(adcl::read_file(log).find("\"rule\":\"R\""), std::string::npos);
}

TEST_F(Cli, Errors) {
  std::ofstream(path("broken.smt2")) << "(set-logic HORN)(assert";
  EXPECT_EQ(run("solve " + path("broken.smt2")).status, 2);
  EXPECT_NE(run("solve /nonexistent.smt2").status, 0);
  EXPECT_NE(run("frobnicate").status, 0);
  EXPECT_NE(run("solve --smt nothing " + bench("ex1.smt2")).status, 0);
}

TEST_F(Cli, EnvironmentOverrides) {
  auto r = run("solve " + bench("ex1_sat.smt2"));
  std::string cmd = "ADCL_NO_SAT=1 " + std::string(ADCL_CLI) + " solve " + bench("ex1_sat.smt2") + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  ASSERT_TRUE(p);
  char buf[64] = {};
  std::size_t n = fread(buf, 1, sizeof buf - 1, p);
  pclose(p);
  EXPECT_EQ(std::string(buf, n), "unknown\n");
  EXPECT_EQ(r.out, "sat\n");
}
