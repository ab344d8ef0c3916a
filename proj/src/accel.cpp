#include "adcl/accel.hpp"

#include <algorithm>

#include "adcl/smt.hpp"

namespace adcl {

namespace {

bool subset_of(const VarSet& a, const VarSet& b) {
  return std::all_of(a.begin(), a.end(), [&](const Var& v) { return b.count(v) > 0; });
}

VarSet vars_of(const Literal& l) {
  VarSet out;
  l.collect_vars(out);
  return out;
}

VarSet vars_of(const Term& t) {
  VarSet out;
  t.collect_vars(out);
  return out;
}

}  // namespace

Elimination eliminate_defined(const std::vector<Literal>& lits, const VarSet& keep) {
  Elimination e;
  for (auto& l : lits) {
    if (l.is_const()) {
      if (!l.value()) e.inconsistent = true;
      continue;
    }
    e.rest.push_back(l);
  }
  auto substitute = [&](const Substitution& s) {
    std::vector<Literal> next;
    for (auto& l : e.rest) {
      Formula f = apply_subst(l, s);
      if (f.is_true()) continue;
      if (f.is_false()) {
        e.inconsistent = true;
        continue;
      }
      next.push_back(f.literal());
    }
    e.rest = std::move(next);
    for (auto& [v, t] : e.int_defs) t = apply_subst(t, s);
  };
  bool changed = true;
  while (changed && !e.inconsistent) {
    changed = false;
    for (std::size_t i = 0; i < e.rest.size() && !changed; ++i) {
      Literal l = e.rest[i];
      if (l.kind() == Literal::Kind::BoolVar && !keep.count(l.var())) {
        e.rest.erase(e.rest.begin() + static_cast<long>(i));
        e.bool_defs[l.var()] = l.positive();
        Substitution s;
        s.set(l.var(), l.positive() ? Formula::top() : Formula::bottom());
        substitute(s);
        changed = true;
      } else if (l.kind() == Literal::Kind::Cmp && l.op() == Literal::Op::Eq) {
        for (auto& [mono, c] : l.term().monomials()) {
          if (mono.size() != 1 || keep.count(mono[0]) || (c != 1 && c != -1) || l.term().nonlinear_in(mono[0]))
            continue;
          Var v = mono[0];
          // c*v + r = 0  =>  v = -c*r
          Term r = l.term() - Term::var(v).scaled(c);
          Term def = r.scaled(-c);
          e.rest.erase(e.rest.begin() + static_cast<long>(i));
          Substitution s;
          s.set(v, def);
          substitute(s);
          e.int_defs[v] = def;
          changed = true;
          break;
        }
      }
    }
  }
  return e;
}

DeterministicUpdate extract_update(const Clause& c) {
  if (!c.is_recursive()) throw Error(ErrorKind::NotAccelerable, "clause is not recursive");
  if (!c.is_conjunctive()) throw Error(ErrorKind::NotAccelerable, "clause is not conjunctive");
  auto lits = literals_of(c.cond());
  for (auto& l : lits)
    if (!l.is_linear()) throw Error(ErrorKind::NotAccelerable, "non-linear condition");
  DeterministicUpdate u;
  u.body = c.body()->args;
  u.head = c.head()->args;
  VarSet keep(u.body.begin(), u.body.end());
  auto e = eliminate_defined(lits, keep);
  if (e.inconsistent) throw Error(ErrorKind::NotAccelerable, "condition is unsatisfiable");
  for (auto& y : u.head) {
    if (y.sort() == Sort::Int) {
      auto it = e.int_defs.find(y);
      if (it == e.int_defs.end() || !subset_of(vars_of(it->second), keep))
        throw Error(ErrorKind::NotDeterministic, "no defining equality for " + y.name());
      u.update.emplace_back(it->second);
    } else {
      auto it = e.bool_defs.find(y);
      if (it == e.bool_defs.end()) throw Error(ErrorKind::NotDeterministic, "no defining literal for " + y.name());
      u.update.emplace_back(it->second ? Formula::top() : Formula::bottom());
    }
  }
  for (auto& l : e.rest)
    if (!subset_of(vars_of(l), keep)) throw Error(ErrorKind::NotDeterministic, "guard mentions non-body variables");
  u.guard = std::move(e.rest);
  return u;
}

const char* closed_form_kind_name(ClosedForm::Kind k) {
  switch (k) {
    case ClosedForm::Kind::Invariant: return "invariant";
    case ClosedForm::Kind::Affine: return "affine";
    case ClosedForm::Kind::EventuallyConstant: return "eventually-constant";
  }
  return "?";
}

std::vector<ClosedForm> closed_form(const DeterministicUpdate& u) {
  VarSet inv;
  for (std::size_t k = 0; k < u.body.size(); ++k) {
    const Var& x = u.body[k];
    if (auto* t = std::get_if<Term>(&u.update[k])) {
      if (*t == Term::var(x)) inv.insert(x);
    } else if (std::get<Formula>(u.update[k]) == Formula::lit(Literal::boolean(x))) {
      inv.insert(x);
    }
  }
  std::vector<ClosedForm> out;
  for (std::size_t k = 0; k < u.body.size(); ++k) {
    const Var& x = u.body[k];
    ClosedForm cf;
    if (inv.count(x)) {
      cf.kind = ClosedForm::Kind::Invariant;
      if (x.sort() == Sort::Int)
        cf.value = Term(0);
      else
        cf.value = Formula::top();
      out.push_back(cf);
      continue;
    }
    if (auto* t = std::get_if<Term>(&u.update[k])) {
      Term d = *t - Term::var(x);
      if (d.coeff(x) == 0 && !d.nonlinear_in(x) && subset_of(vars_of(d), inv)) {
        cf.kind = ClosedForm::Kind::Affine;
        cf.value = d;
        cf.nonlinear = !d.is_constant();
      } else if (t->coeff(x) == 0 && !t->nonlinear_in(x) && subset_of(vars_of(*t), inv)) {
        cf.kind = ClosedForm::Kind::EventuallyConstant;
        cf.value = *t;
      } else {
        throw Error(ErrorKind::NoClosedForm, "no closed form for " + x.name());
      }
    } else {
      const Formula& f = std::get<Formula>(u.update[k]);
      bool ok = f.is_true() || f.is_false();
      if (!ok && f.kind() == Formula::Kind::Lit && f.literal().kind() == Literal::Kind::BoolVar &&
          f.literal().positive() && inv.count(f.literal().var()))
        ok = true;
      if (!ok) throw Error(ErrorKind::NoClosedForm, "no closed form for " + x.name());
      cf.kind = ClosedForm::Kind::EventuallyConstant;
      cf.value = f;
    }
    out.push_back(cf);
  }
  return out;
}

RawArg closed_form_at(const DeterministicUpdate& u, const std::vector<ClosedForm>& cf, std::size_t k,
                      const Term& steps) {
  const Var& x = u.body[k];
  switch (cf[k].kind) {
    case ClosedForm::Kind::Invariant:
      if (x.sort() == Sort::Int) return Term::var(x);
      return Formula::lit(Literal::boolean(x));
    case ClosedForm::Kind::Affine: return Term::var(x) + steps * std::get<Term>(cf[k].value);
    case ClosedForm::Kind::EventuallyConstant: return cf[k].value;
  }
  return Term(0);
}

AcceleratedClause accelerate(const Clause& c, const AccelOptions& opts) {
  auto u = extract_update(c);
  auto cf = closed_form(u);
  AcceleratedClause out;
  for (auto& f : cf) out.nonlinear = out.nonlinear || f.nonlinear;
  if (out.nonlinear && !opts.allow_nonlinear)
    throw Error(ErrorKind::NotAccelerable, "closed form is non-linear and no external solver is configured");

  Var n = Var::fresh("n", Sort::Int);
  Term tn = Term::var(n);
  std::vector<Literal> lits{Literal::relation(tn, Rel::Gt, Term(0))};

  Substitution last, step;
  VarSet invariant, eventually_constant;
  for (std::size_t k = 0; k < u.body.size(); ++k) {
    const Var& x = u.body[k];
    if (cf[k].kind == ClosedForm::Kind::Invariant) invariant.insert(x);
    if (cf[k].kind == ClosedForm::Kind::EventuallyConstant) eventually_constant.insert(x);
    if (x.sort() == Sort::Int) {
      step.set(x, std::get<Term>(u.update[k]));
      if (cf[k].kind != ClosedForm::Kind::EventuallyConstant)
        last.set(x, std::get<Term>(closed_form_at(u, cf, k, tn - Term(1))));
    } else {
      step.set(x, std::get<Formula>(u.update[k]));
    }
  }

  Formula guard = conj_of(u.guard);
  for (auto& g : u.guard) {
    VarSet vs = vars_of(g);
    if (subset_of(vs, invariant)) {
      lits.push_back(g);
      continue;
    }
    bool touches_ec = std::any_of(vs.begin(), vs.end(), [&](const Var& v) { return eventually_constant.count(v) > 0; });
    if (touches_ec || g.kind() == Literal::Kind::BoolVar || g.op() == Literal::Op::Neq) {
      // must survive one more step whenever the whole guard holds
      auto r = check_sat(Formula::conj(guard, negate(apply_subst(g, step))), opts.seed);
      if (r.status != SmtStatus::Unsat)
        throw Error(ErrorKind::NotAccelerable, "guard literal is not step-invariant");
      lits.push_back(g);
      continue;
    }
    Formula gl = apply_subst(g, last);
    if (gl.kind() != Formula::Kind::Lit || gl.literal().kind() != Literal::Kind::Cmp) {
      lits.push_back(g);
      if (gl.is_false()) lits.push_back(Literal::constant(false));
      continue;
    }
    const Literal& l = gl.literal();
    Int slope = l.term().coeff(n);
    bool linear_in_n = !l.term().nonlinear_in(n);
    if (linear_in_n && slope == 0) {
      lits.push_back(g);
    } else if (linear_in_n && g.op() != Literal::Op::Eq) {
      // t(N-1) <= 0 implies t(0) <= 0 when t grows with N, and vice versa
      lits.push_back(slope > 0 ? l : g);
    } else {
      lits.push_back(g);
      lits.push_back(l);
    }
  }

  std::vector<Var> head;
  for (std::size_t k = 0; k < u.head.size(); ++k) {
    Var y = Var::fresh_like(u.head[k]);
    head.push_back(y);
    RawArg val = (cf[k].kind == ClosedForm::Kind::EventuallyConstant) ? cf[k].value : closed_form_at(u, cf, k, tn);
    out.head_terms.push_back(val);
    if (y.sort() == Sort::Int) {
      lits.push_back(Literal::relation(Term::var(y), Rel::Eq, std::get<Term>(val)));
      continue;
    }
    const Formula& f = std::get<Formula>(val);
    if (f.is_true() || f.is_false()) {
      lits.push_back(Literal::boolean(y, f.is_true()));
      continue;
    }
    // an invariant boolean is expressible conjunctively only if the guard fixes it
    const Var& b = f.literal().var();
    auto it = std::find_if(u.guard.begin(), u.guard.end(), [&](const Literal& g) {
      return g.kind() == Literal::Kind::BoolVar && g.var() == b;
    });
    if (it == u.guard.end()) throw Error(ErrorKind::NotAccelerable, "boolean argument " + b.name() + " is not fixed");
    lits.push_back(Literal::boolean(y, it->positive()));
  }

  out.counter = n;
  out.clause = Clause(fresh_clause_id(), c.body(), conj_of(lits), PredApp{c.head()->pred, head}, Origin{true});
  return out;
}

AcceleratedClause accelerate_suffix(const std::vector<Clause>& suffix, const AccelOptions& opts) {
  auto r = resolve_seq(suffix);
  if (r.clause.cond().is_false() || !r.clause.is_recursive())
    throw Error(ErrorKind::NotAccelerable, "suffix is not recursive");
  return accelerate(r.clause, opts);
}

std::optional<bool> check_unrolling(const Clause& learned, const Var& counter, const Clause& loop, std::size_t n,
                                    std::uint64_t seed) {
  if (n == 0 || !learned.body() || !learned.head() || !loop.body() || !loop.head()) return false;
  std::vector<Clause> seq(n, loop);
  auto r = resolve_seq(seq);
  const Clause& u = r.clause;
  if (!u.body() || !u.head() || u.body()->args.size() != learned.body()->args.size() ||
      u.head()->args.size() != learned.head()->args.size())
    return false;
  Substitution align;
  for (std::size_t i = 0; i < u.body()->args.size(); ++i) align.rename(u.body()->args[i], learned.body()->args[i]);
  for (std::size_t i = 0; i < u.head()->args.size(); ++i) align.rename(u.head()->args[i], learned.head()->args[i]);
  VarSet keep(learned.body()->args.begin(), learned.body()->args.end());
  keep.insert(learned.head()->args.begin(), learned.head()->args.end());

  auto reduce = [&](const Formula& f) -> std::optional<Formula> {
    if (!f.is_conjunctive()) return std::nullopt;
    auto e = eliminate_defined(literals_of(f), keep);
    if (e.inconsistent) return Formula::bottom();
    for (auto& l : e.rest)
      if (!subset_of(vars_of(l), keep)) return std::nullopt;
    return conj_of(e.rest);
  };
  auto unrolled = reduce(apply_subst(u.cond(), align));
  Substitution at_n;
  at_n.set(counter, Term(static_cast<long>(n)));
  auto accel = reduce(apply_subst(learned.cond(), at_n));
  if (!unrolled || !accel) return std::nullopt;
  for (auto& q : {Formula::conj(*accel, negate(*unrolled)), Formula::conj(*unrolled, negate(*accel))}) {
    auto res = check_sat(q, seed);
    if (res.status == SmtStatus::Sat) return false;
    if (res.status == SmtStatus::Unknown) return std::nullopt;
  }
  return true;
}

}  // namespace adcl
