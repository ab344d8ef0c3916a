#include <gtest/gtest.h>

#include "adcl/driver.hpp"

using namespace adcl;

namespace {

std::string bench(const std::string& name) { return read_file(std::string(ADCL_BENCH_DIR) + "/" + name); }

struct Ex1 {
  std::string text = bench("ex1.smt2");
  Problem problem = parse_problem_or_throw(text);
  std::string witness;

  Ex1() {
    EngineConfig cfg;
    cfg.restarts = false;
    auto v = Engine(problem, cfg).run();
    witness = write_witness(*v.witness, problem);
  }

  // replaces the first occurrence of `from` after the line starting with `line`
  std::string edit(const std::string& line, const std::string& from, const std::string& to) const {
    std::string w = witness;
    auto at = w.find("\n" + line);
    EXPECT_NE(at, std::string::npos);
    auto pos = w.find(from, at);
    EXPECT_NE(pos, std::string::npos);
    return w.replace(pos, from.size(), to);
  }
};

const Ex1& ex1() {
  static Ex1 e;
  return e;
}

}  // namespace

TEST(Witness, RoundTrip) {
  const auto& e = ex1();
  Witness w = read_witness(e.witness, e.problem);
  EXPECT_EQ(write_witness(w, e.problem), e.witness);
  EXPECT_EQ(w.chain.size(), 4u);
  EXPECT_TRUE(w.def("L0").learned);
}

TEST(Witness, Ex1IsValid) {
  auto rep = check_witness_text(ex1().text, ex1().witness);
  EXPECT_TRUE(rep.ok) << rep.reason;
  EXPECT_EQ(rep.ground_steps, 10002u);
}

TEST(Witness, ExpansionIsGroundAndValid) {
  const auto& e = ex1();
  std::string expanded = expand_witness_text(e.text, e.witness);
  Witness w = read_witness(expanded, e.problem);
  ASSERT_TRUE(w.expanded);
  EXPECT_EQ(w.expanded->size(), 10002u);
  // every ground step is an input clause
  for (const auto& g : *w.expanded) EXPECT_LT(g.clause, 3u);
  auto rep = check_witness(w, e.problem);
  EXPECT_TRUE(rep.ok) << rep.reason;
  EXPECT_EQ(rep.ground_steps, 10002u);
}

TEST(Witness, WrongFactValueIsRejected) {
  auto rep = check_witness_text(ex1().text, ex1().edit("model 0", "(h1 5000)", "(h1 4999)"));
  EXPECT_FALSE(rep.ok);
}

TEST(Witness, ZeroCounterIsRejected) {
  auto rep = check_witness_text(ex1().text, ex1().edit("model 1", "(n 5000)", "(n 0)"));
  EXPECT_FALSE(rep.ok);
}

TEST(Witness, BrokenChainIsRejected) {
  auto rep = check_witness_text(ex1().text, ex1().edit("chain", "L0 L1", "L1 L0"));
  EXPECT_FALSE(rep.ok);
  auto rep2 = check_witness_text(ex1().text, ex1().edit("model 3", "(a1 10000)", "(a1 9999)"));
  EXPECT_FALSE(rep2.ok);
}

TEST(Witness, WrongLearnedClauseIsRejected) {
  // claims two steps per counter increment
  auto rep = check_witness_text(ex1().text, ex1().edit("learned L1", "(= (+ y2 n) y2_1)", "(= (+ y2 n n) y2_1)"));
  EXPECT_FALSE(rep.ok);
}

TEST(Witness, Malformed) {
  const auto& e = ex1();
  auto kind = [&](const std::string& text) {
    try {
      read_witness(text, e.problem);
    } catch (const Error& err) {
      return err.kind();
    }
    return ErrorKind::Cancelled;
  };
  EXPECT_EQ(kind("not a witness\n"), ErrorKind::MalformedWitness);
  EXPECT_EQ(kind(e.edit("variant V0", "of 0", "of 77")), ErrorKind::MalformedWitness);
  EXPECT_EQ(kind(e.edit("chain", "V3", "V9")), ErrorKind::MalformedWitness);
  std::string truncated = e.witness.substr(0, e.witness.find("end"));
  EXPECT_EQ(kind(truncated), ErrorKind::MalformedWitness);
}
