#include <gtest/gtest.h>

#include "adcl/driver.hpp"
#include "adcl/smt.hpp"
#include "adcl/smtlib.hpp"

using namespace adcl;

namespace {

std::string bench(const std::string& name) { return read_file(std::string(ADCL_BENCH_DIR) + "/" + name); }

ErrorKind first_error(const std::string& text) {
  auto r = parse_problem(text);
  EXPECT_FALSE(r.ok());
  return r.ok() ? ErrorKind::Cancelled : r.diagnostics.front().kind;
}

const char* kHeader = "(set-logic HORN)\n(declare-fun P (Int) Bool)\n";

}  // namespace

TEST(Sexpr, Spans) {
  auto es = parse_sexprs("(a\n  (b 12) :k \"s\" |q r|)");
  ASSERT_EQ(es.size(), 1u);
  const auto& l = es[0].list;
  ASSERT_EQ(l.size(), 5u);
  EXPECT_EQ(l[1].span.line, 2u);
  EXPECT_EQ(l[1].span.col, 3u);
  EXPECT_EQ(l[1].list[1].kind, Sexpr::Kind::Numeral);
  EXPECT_EQ(l[2].kind, Sexpr::Kind::Keyword);
  EXPECT_EQ(l[3].kind, Sexpr::Kind::String);
  EXPECT_EQ(l[4].atom, "q r");
}

TEST(Sexpr, UnbalancedIsSyntaxError) {
  try {
    parse_sexprs("(a (b)\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SyntaxError);
    EXPECT_NE(std::string(e.what()).find("1:1"), std::string::npos);
  }
  EXPECT_THROW(parse_sexprs("a)"), Error);
}

TEST(Parse, Ex1Shape) {
  Problem p = parse_problem_or_throw(bench("ex1.smt2"));
  ASSERT_EQ(p.predicates.size(), 1u);
  ASSERT_EQ(p.clauses.size(), 3u);
  EXPECT_EQ(p.clauses[0].kind(), ClauseKind::Fact);
  EXPECT_EQ(p.clauses[1].kind(), ClauseKind::Rule);
  EXPECT_TRUE(p.clauses[1].is_recursive());
  EXPECT_EQ(p.clauses[2].kind(), ClauseKind::Query);
  // the head of the rule carries x1+1 through a fresh argument variable
  EXPECT_EQ(p.clauses[1].head()->args.size(), 2u);
}

TEST(Parse, RoundTripPreservesClauses) {
  Problem p = parse_problem_or_throw(bench("ex1.smt2"));
  Problem q = parse_problem_or_throw(print_problem(p));
  ASSERT_EQ(p.clauses.size(), q.clauses.size());
  for (std::size_t i = 0; i < p.clauses.size(); ++i) {
    EXPECT_EQ(p.clauses[i].kind(), q.clauses[i].kind());
    EXPECT_EQ(literals_of(p.clauses[i].cond()).size(), literals_of(q.clauses[i].cond()).size());
  }
}

TEST(Parse, LetIteAndMacros) {
  std::string text = std::string(kHeader) +
                     "(define-fun lim () Int 10)\n"
                     "(assert (P 0))\n"
                     "(assert (forall ((x Int) (y Int)) (=> (and (P x) (let ((z (+ x 1))) (= y (ite (< z lim) z 0)))) (P y))))\n"
                     "(assert (forall ((x Int)) (=> (and (P x) (> x lim)) false)))\n"
                     "(check-sat)\n";
  auto r = parse_problem(text);
  ASSERT_TRUE(r.ok()) << r.diagnostics.front().str();
  EXPECT_EQ(r.problem.clauses.size(), 3u);
}

TEST(Parse, Diagnostics) {
  EXPECT_EQ(first_error(bench("div.smt2")), ErrorKind::UnsupportedFeature);
  EXPECT_EQ(first_error(std::string(kHeader) + "(declare-fun Q (Int) Bool)\n"
                                               "(assert (forall ((x Int) (y Int)) (=> (and (P x) (Q y)) false)))\n"),
            ErrorKind::UnsupportedFeature);
  EXPECT_EQ(first_error(std::string(kHeader) + "(assert (forall ((x Int)) (=> (and (P x) (> (* x x) 3)) false)))\n"),
            ErrorKind::UnsupportedFeature);
  EXPECT_EQ(first_error(std::string(kHeader) + "(assert (forall ((x Int)) (=> (and (P x) (> w 3)) false)))\n"),
            ErrorKind::SyntaxError);
  EXPECT_EQ(first_error(std::string(kHeader) + "(assert (forall ((x Int)) (=> (and (P x) (+ x 3)) false)))\n"),
            ErrorKind::SortMismatch);
  EXPECT_EQ(first_error(std::string(kHeader) + "(assert (P 1.5))\n"), ErrorKind::UnsupportedFeature);
}

TEST(Parse, DiagnosticCarriesPosition) {
  auto r = parse_problem(std::string(kHeader) + "(assert (P (div 4 2)))\n");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.diagnostics.front().span.line, 3u);
  EXPECT_NE(r.diagnostics.front().str().find("3:"), std::string::npos);
}

TEST(Parse, FormulaInScope) {
  Var x = Var::fresh("x", Sort::Int);
  Formula f = parse_formula("(and (>= x 0) (< x 3))", {{"x", x}});
  for (long v = -2; v <= 4; ++v) {
    Model m;
    m.set(x, Int(v));
    EXPECT_EQ(eval(f, m), v >= 0 && v < 3);
  }
}

TEST(Print, QuotesNonSimpleSymbols) {
  EXPECT_EQ(quote_symbol("abc"), "abc");
  EXPECT_EQ(quote_symbol("a b"), "|a b|");
  EXPECT_EQ(quote_symbol("x!cnt"), "x!cnt");
}

TEST(Instrument, AddsCounterArgument) {
  Problem p = parse_problem_or_throw(bench("ex1.smt2"));
  Problem q = instrument_counter(p);
  ASSERT_EQ(q.predicates.size(), 1u);
  EXPECT_EQ(q.predicates[0]->arg_sorts.size(), 3u);
  Problem r = parse_problem_or_throw(instrument_text(bench("ex1.smt2")));
  EXPECT_EQ(r.predicates[0]->arg_sorts.size(), 3u);
}
