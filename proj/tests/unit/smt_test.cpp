#include <gtest/gtest.h>

#include <filesystem>

#include "adcl/smt.hpp"
#include "oracles.hpp"

using namespace adcl;

namespace {

std::vector<Var> int_vars(int n) {
  std::vector<Var> v;
  for (int i = 0; i < n; ++i) v.push_back(Var::fresh("v" + std::to_string(i), Sort::Int));
  return v;
}

bool z3_available() { return std::filesystem::exists("/usr/local/bin/z3") || std::filesystem::exists("/usr/bin/z3"); }

}  // namespace

TEST(Builtin, AgreesWithBoxSearch) {
  std::mt19937_64 rng(3);
  auto ints = int_vars(3);
  std::vector<Var> bools{Var::fresh("b", Sort::Bool)};
  std::vector<Var> all = ints;
  all.push_back(bools[0]);
  for (int i = 0; i < 150; ++i) {
    Formula f = Formula::conj(oracle::random_formula(rng, ints, bools, 3), oracle::box_constraint(ints, -4, 4));
    auto r = check_sat(f, i);
    auto box = oracle::box_search(f, all, -4, 4);
    ASSERT_NE(r.status, SmtStatus::Unknown);
    ASSERT_EQ(r.status == SmtStatus::Sat, box.has_value());
    if (r.status == SmtStatus::Sat) ASSERT_TRUE(oracle::holds(f, complete_model(r.model, {f})));
  }
}

TEST(Builtin, UnboundedInstances) {
  auto v = int_vars(2);
  Term x = Term::var(v[0]), y = Term::var(v[1]);
  // 2x = 2y + 1 has no integer solution
  EXPECT_EQ(check_sat(Formula::cmp(x.scaled(Int(2)), Rel::Eq, y.scaled(Int(2)) + Term(1L))).status, SmtStatus::Unsat);
  // 3x - 3y in (0, 3) is empty over the integers
  Formula f = Formula::conj(Formula::cmp(x.scaled(Int(3)) - y.scaled(Int(3)), Rel::Gt, Term(0L)),
                            Formula::cmp(x.scaled(Int(3)) - y.scaled(Int(3)), Rel::Lt, Term(3L)));
  EXPECT_EQ(check_sat(f).status, SmtStatus::Unsat);
  Formula big = Formula::cmp(x, Rel::Ge, Term(Int("100000000000000000000")));
  auto r = check_sat(big);
  ASSERT_EQ(r.status, SmtStatus::Sat);
  EXPECT_GE(r.model.int_value(v[0]), Int("100000000000000000000"));
}

TEST(Builtin, NonlinearIsUnknown) {
  auto v = int_vars(2);
  Formula f = Formula::cmp(Term::var(v[0]) * Term::var(v[1]), Rel::Eq, Term(7L));
  EXPECT_EQ(check_sat(f).status, SmtStatus::Unknown);
}

TEST(Builtin, DisequalitiesAndBooleans) {
  auto v = int_vars(1);
  Var b = Var::fresh("b", Sort::Bool);
  Term x = Term::var(v[0]);
  Formula f = Formula::conj(std::vector<Formula>{
      Formula::cmp(x, Rel::Ge, Term(0L)), Formula::cmp(x, Rel::Le, Term(1L)), Formula::cmp(x, Rel::Neq, Term(0L)),
      Formula::disj(Formula::lit(Literal::boolean(b, false)), Formula::cmp(x, Rel::Neq, Term(1L)))});
  auto r = check_sat(f);
  ASSERT_EQ(r.status, SmtStatus::Sat);
  EXPECT_EQ(r.model.int_value(v[0]), Int(1));
  EXPECT_FALSE(r.model.bool_value(b));
}

TEST(Stack, PushPopAndModelReuse) {
  auto v = int_vars(1);
  Term x = Term::var(v[0]);
  SolverStack s;
  s.push(Formula::cmp(x, Rel::Ge, Term(3L)));
  EXPECT_EQ(s.check().status, SmtStatus::Sat);
  EXPECT_EQ(s.check_with(Formula::cmp(x, Rel::Lt, Term(3L))).status, SmtStatus::Unsat);
  EXPECT_EQ(s.depth(), 1u);
  s.push(Formula::cmp(x, Rel::Le, Term(2L)));
  EXPECT_EQ(s.check().status, SmtStatus::Unsat);
  s.pop();
  auto r = s.check();
  ASSERT_EQ(r.status, SmtStatus::Sat);
  EXPECT_GE(r.model.int_value(v[0]), Int(3));
  std::size_t before = s.reused();
  s.check();
  EXPECT_GT(s.reused(), before);
}

TEST(External, BrokenCommandIsUnknown) {
  auto b = make_external_backend("/nonexistent/solver -in", 2.0);
  auto v = int_vars(1);
  auto r = b->check({Formula::cmp(Term::var(v[0]), Rel::Ge, Term(0L))});
  EXPECT_EQ(r.status, SmtStatus::Unknown);
}

TEST(External, AgreesWithBuiltin) {
  if (!z3_available()) GTEST_SKIP() << "z3 not installed";
  auto b = make_external_backend("z3 -in", 10.0);
  std::mt19937_64 rng(5);
  auto ints = int_vars(3);
  std::vector<Var> bools{Var::fresh("b", Sort::Bool)};
  for (int i = 0; i < 40; ++i) {
    Formula f = oracle::random_formula(rng, ints, bools, 3);
    auto ext = b->check({f});
    auto in = check_sat(f);
    ASSERT_EQ(ext.status, in.status);
    if (ext.status == SmtStatus::Sat) ASSERT_TRUE(oracle::holds(f, complete_model(ext.model, {f})));
  }
}
