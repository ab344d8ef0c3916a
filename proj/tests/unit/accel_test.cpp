#include <gtest/gtest.h>

#include "adcl/accel.hpp"
#include "oracles.hpp"

using namespace adcl;

namespace {

struct Loop {
  PredicatePtr pred;
  std::vector<Var> x, y;

  explicit Loop(std::size_t n) {
    auto p = std::make_shared<Predicate>();
    p->id = 0;
    p->name = "Q";
    p->arg_sorts.assign(n, Sort::Int);
    pred = p;
    for (std::size_t i = 0; i < n; ++i) {
      x.push_back(Var::fresh("x" + std::to_string(i), Sort::Int));
      y.push_back(Var::fresh("y" + std::to_string(i), Sort::Int));
    }
  }
  Term X(std::size_t i) const { return Term::var(x[i]); }
  Term Y(std::size_t i) const { return Term::var(y[i]); }
  Clause clause(std::vector<Formula> cond) const {
    return Clause(fresh_clause_id(), PredApp{pred, x}, Formula::conj(std::move(cond)), PredApp{pred, y});
  }
};

ErrorKind refusal(const Clause& c) {
  try {
    accelerate(c);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Cancelled;
}

}  // namespace

TEST(Eliminate, DefinedVariablesGo) {
  Var a = Var::fresh("a", Sort::Int), b = Var::fresh("b", Sort::Int), c = Var::fresh("c", Sort::Int);
  std::vector<Literal> lits{Literal::relation(Term::var(b), Rel::Eq, Term::var(a) + Term(1L)),
                            Literal::relation(Term::var(c), Rel::Eq, Term::var(b).scaled(Int(2))),
                            Literal::relation(Term::var(c), Rel::Le, Term(10L))};
  auto e = eliminate_defined(lits, {a});
  EXPECT_FALSE(e.inconsistent);
  EXPECT_TRUE(e.int_defs.count(b));
  EXPECT_TRUE(e.int_defs.count(c));
  ASSERT_EQ(e.rest.size(), 1u);
  // 2(a+1) <= 10
  Model m;
  m.set(a, Int(4));
  EXPECT_TRUE(e.rest[0].eval(m));
  m.set(a, Int(5));
  EXPECT_FALSE(e.rest[0].eval(m));
}

TEST(Eliminate, DetectsContradiction) {
  Var a = Var::fresh("a", Sort::Int);
  auto e = eliminate_defined({Literal::relation(Term::var(a), Rel::Eq, Term(1L)),
                              Literal::relation(Term::var(a), Rel::Eq, Term(2L))},
                             {});
  EXPECT_TRUE(e.inconsistent);
}

TEST(ClosedForm, Kinds) {
  Loop l(3);
  // y0 = x0 + 2, y1 = x1, y2 = 7
  Clause c = l.clause({Formula::cmp(l.Y(0), Rel::Eq, l.X(0) + Term(2L)), Formula::cmp(l.Y(1), Rel::Eq, l.X(1)),
                       Formula::cmp(l.Y(2), Rel::Eq, Term(7L)), Formula::cmp(l.X(0), Rel::Lt, Term(100L))});
  auto u = extract_update(c);
  auto cf = closed_form(u);
  ASSERT_EQ(cf.size(), 3u);
  EXPECT_EQ(cf[0].kind, ClosedForm::Kind::Affine);
  EXPECT_EQ(cf[1].kind, ClosedForm::Kind::Invariant);
  EXPECT_EQ(cf[2].kind, ClosedForm::Kind::EventuallyConstant);
  Var n = Var::fresh("n", Sort::Int);
  EXPECT_EQ(std::get<Term>(closed_form_at(u, cf, 0, Term::var(n))), l.X(0) + Term::var(n).scaled(Int(2)));
}

TEST(Accelerate, CountdownLoop) {
  Loop l(1);
  // x > 0 /\ y = x - 1
  Clause c = l.clause({Formula::cmp(l.X(0), Rel::Gt, Term(0L)), Formula::cmp(l.Y(0), Rel::Eq, l.X(0) - Term(1L))});
  auto ac = accelerate(c);
  EXPECT_TRUE(ac.exact);
  const Var& x = ac.clause.body()->args[0];
  const Var& y = ac.clause.head()->args[0];
  for (long x0 = -1; x0 <= 5; ++x0)
    for (long n = 0; n <= 7; ++n) {
      Model m;
      m.set(x, Int(x0));
      m.set(ac.counter, Int(n));
      m.set(y, Int(x0 - n));
      // n steps are possible iff n >= 1 and the last guard x0-(n-1) > 0 holds
      EXPECT_EQ(oracle::holds(ac.clause.cond(), m), n >= 1 && x0 - n + 1 > 0) << x0 << " " << n;
    }
  for (std::size_t k = 1; k <= 4; ++k) EXPECT_EQ(check_unrolling(ac.clause, ac.counter, c, k), std::optional<bool>(true));
}

TEST(Accelerate, MatchesUnrollingOnRandomLoops) {
  std::mt19937_64 rng(99);
  int checked = 0;
  for (int i = 0; i < 200 && checked < 30; ++i) {
    auto spec = oracle::random_loop(rng, static_cast<std::uint64_t>(i) + 1);
    AcceleratedClause ac;
    try {
      ac = accelerate(spec.clause);
    } catch (const Error&) {
      continue;
    }
    ++checked;
    for (std::size_t k = 1; k <= 3; ++k) {
      auto r = check_unrolling(ac.clause, ac.counter, spec.clause, k);
      if (r) EXPECT_TRUE(*r) << "loop " << i << " n=" << k;
    }
  }
  EXPECT_GT(checked, 10);
}

TEST(Accelerate, Refusals) {
  Loop l(2);
  // y0 unconstrained
  EXPECT_EQ(refusal(l.clause({Formula::cmp(l.Y(1), Rel::Eq, l.X(1))})), ErrorKind::NotDeterministic);
  // y0 = 2 x0 has no supported closed form
  EXPECT_EQ(refusal(l.clause({Formula::cmp(l.Y(0), Rel::Eq, l.X(0).scaled(Int(2))),
                              Formula::cmp(l.Y(1), Rel::Eq, l.X(1))})),
            ErrorKind::NoClosedForm);
  Clause fact(fresh_clause_id(), std::nullopt, Formula::top(), PredApp{l.pred, l.y});
  EXPECT_EQ(refusal(fact), ErrorKind::NotAccelerable);
  EXPECT_EQ(refusal(l.clause({Formula::disj(Formula::cmp(l.Y(0), Rel::Eq, l.X(0)), Formula::cmp(l.Y(1), Rel::Eq, l.X(1)))})),
            ErrorKind::NotAccelerable);
}

TEST(Accelerate, SuffixOfTwoClauses) {
  Loop l(1);
  Clause up = l.clause({Formula::cmp(l.Y(0), Rel::Eq, l.X(0) + Term(3L))});
  Clause down = l.clause({Formula::cmp(l.Y(0), Rel::Eq, l.X(0) - Term(1L)), Formula::cmp(l.X(0), Rel::Lt, Term(50L))});
  auto ac = accelerate_suffix({up, down});
  Clause loop = resolve(up, down);
  for (std::size_t k = 1; k <= 3; ++k) EXPECT_EQ(check_unrolling(ac.clause, ac.counter, loop, k), std::optional<bool>(true));
}
