#include "adcl/chc.hpp"

#include <atomic>
#include <stdexcept>

namespace adcl {

namespace {
std::atomic<std::uint64_t> g_next_clause{std::uint64_t{1} << 40};

void check_app(const PredApp& a) {
  if (a.args.size() != a.pred->arg_sorts.size())
    throw std::invalid_argument("arity mismatch for predicate " + a.pred->name);
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (a.args[i].sort() != a.pred->arg_sorts[i])
      throw Error(ErrorKind::SortMismatch, "argument " + std::to_string(i) + " of " + a.pred->name + " has wrong sort");
}
}  // namespace

const char* clause_kind_name(ClauseKind k) {
  switch (k) {
    case ClauseKind::Fact: return "fact";
    case ClauseKind::Rule: return "rule";
    case ClauseKind::Query: return "query";
    case ClauseKind::ConditionalEmpty: return "conditional-empty";
  }
  return "?";
}

std::uint64_t fresh_clause_id() { return g_next_clause.fetch_add(1); }

Clause::Clause(std::uint64_t id, std::optional<PredApp> body, Formula cond, std::optional<PredApp> head, Origin origin,
               std::optional<std::uint64_t> parent)
    : id_(id), body_(std::move(body)), cond_(std::move(cond)), head_(std::move(head)), origin_(origin), parent_(parent) {
  VarSet seen;
  for (auto* app : {body_ ? &*body_ : nullptr, head_ ? &*head_ : nullptr}) {
    if (!app) continue;
    check_app(*app);
    for (auto& v : app->args)
      if (!seen.insert(v).second) throw std::invalid_argument("predicate arguments must be distinct variables");
  }
}

ClauseKind Clause::kind() const {
  if (body_) return head_ ? ClauseKind::Rule : ClauseKind::Query;
  return head_ ? ClauseKind::Fact : ClauseKind::ConditionalEmpty;
}

bool Clause::is_recursive() const { return body_ && head_ && body_->pred->id == head_->pred->id; }

VarSet Clause::all_vars() const {
  VarSet out = vars_of(cond_);
  if (body_) out.insert(body_->args.begin(), body_->args.end());
  if (head_) out.insert(head_->args.begin(), head_->args.end());
  return out;
}

VarSet Clause::extra_vars() const {
  VarSet out = vars_of(cond_);
  if (body_)
    for (auto& v : body_->args) out.erase(v);
  if (head_)
    for (auto& v : head_->args) out.erase(v);
  return out;
}

Clause Clause::with_cond(Formula cond) const { return Clause(fresh_clause_id(), body_, std::move(cond), head_, origin_, id_); }

Clause Clause::with_id(std::uint64_t id) const { return Clause(id, body_, cond_, head_, origin_, parent_); }

namespace {
Substitution subst_of(const Clause& c, const Renaming& r) {
  Substitution s;
  for (auto& v : c.all_vars()) {
    auto it = r.find(v.id());
    if (it != r.end()) s.rename(v, it->second);
  }
  return s;
}

PredApp rename_app(const PredApp& a, const Renaming& r) {
  PredApp out{a.pred, {}};
  out.args.reserve(a.args.size());
  for (auto& v : a.args) {
    auto it = r.find(v.id());
    out.args.push_back(it == r.end() ? v : it->second);
  }
  return out;
}
}  // namespace

Clause rename_clause(const Clause& c, const Renaming& r) {
  std::optional<PredApp> body, head;
  if (c.body()) body = rename_app(*c.body(), r);
  if (c.head()) head = rename_app(*c.head(), r);
  return Clause(c.id(), body, apply_subst(c.cond(), subst_of(c, r)), head, c.origin(), c.parent());
}

Renaming fresh_renaming(const Clause& c) {
  Renaming r;
  for (auto& v : c.all_vars()) r.emplace(v.id(), Var::fresh_like(v));
  return r;
}

bool resolvable(const Clause& first, const Clause& second) {
  return first.head() && second.body() && first.head()->pred->id == second.body()->pred->id;
}

Renaming resolution_renaming(const Clause& first, const Clause& second) {
  Renaming r;
  if (!resolvable(first, second)) return r;
  auto& bargs = second.body()->args;
  auto& hargs = first.head()->args;
  for (std::size_t i = 0; i < bargs.size(); ++i) r.emplace(bargs[i].id(), hargs[i]);
  for (auto& v : second.all_vars())
    if (!r.count(v.id())) r.emplace(v.id(), Var::fresh_like(v));
  return r;
}

Clause bottom_clause() { return Clause(fresh_clause_id(), std::nullopt, Formula::bottom(), std::nullopt); }

Clause resolve_with(const Clause& first, const Clause& second, const Renaming& theta) {
  if (!resolvable(first, second)) return bottom_clause();
  auto cond = Formula::conj(first.cond(), apply_subst(second.cond(), subst_of(second, theta)));
  std::optional<PredApp> head;
  if (second.head()) head = rename_app(*second.head(), theta);
  return Clause(fresh_clause_id(), first.body(), std::move(cond), std::move(head));
}

Clause resolve(const Clause& first, const Clause& second) {
  return resolve_with(first, second, resolution_renaming(first, second));
}

Resolvent resolve_seq(const std::vector<Clause>& seq) {
  if (seq.empty()) throw std::invalid_argument("resolve_seq needs at least one clause");
  Resolvent res;
  Renaming id;
  for (auto& v : seq.front().all_vars()) id.emplace(v.id(), v);
  res.clause = seq.front();
  res.renamings.push_back(std::move(id));
  for (std::size_t i = 1; i < seq.size(); ++i) {
    if (!resolvable(res.clause, seq[i])) {
      res.clause = bottom_clause();
      res.step_count = i;
      return res;
    }
    auto theta = resolution_renaming(res.clause, seq[i]);
    res.clause = resolve_with(res.clause, seq[i], theta);
    res.renamings.push_back(std::move(theta));
  }
  res.step_count = seq.size();
  return res;
}

Problem instrument_counter(const Problem& p) {
  const std::string suffix = kCounterSuffix;
  for (auto& pr : p.predicates)
    if (pr->name.size() >= suffix.size() && pr->name.compare(pr->name.size() - suffix.size(), suffix.size(), suffix) == 0)
      throw Error(ErrorKind::ReservedNameClash, "predicate " + pr->name + " already carries the counter suffix");
  Problem out;
  out.nonlinear_arith = p.nonlinear_arith;
  std::unordered_map<std::uint32_t, PredicatePtr> map;
  for (auto& pr : p.predicates) {
    auto np = std::make_shared<Predicate>(*pr);
    np->name += suffix;
    np->arg_sorts.push_back(Sort::Int);
    map.emplace(pr->id, np);
    out.predicates.push_back(np);
  }
  for (auto& c : p.clauses) {
    std::optional<PredApp> body, head;
    std::vector<Formula> cond{c.cond()};
    Var cin, cout;
    if (c.body()) {
      cin = Var::fresh("c!in", Sort::Int);
      body = PredApp{map.at(c.body()->pred->id), c.body()->args};
      body->args.push_back(cin);
    }
    if (c.head()) {
      cout = Var::fresh("c!out", Sort::Int);
      head = PredApp{map.at(c.head()->pred->id), c.head()->args};
      head->args.push_back(cout);
      cond.push_back(Formula::cmp(Term::var(cout), Rel::Eq, c.body() ? Term::var(cin) + Term(1) : Term(1)));
    }
    out.clauses.emplace_back(c.id(), body, Formula::conj(std::move(cond)), head, c.origin(), c.parent());
  }
  return out;
}

namespace {
class NameGen {
 public:
  explicit NameGen(const RawClause& raw) {
    VarSet vs = vars_of(raw.cond);
    auto add_arg = [&](const RawArg& a) {
      if (auto* t = std::get_if<Term>(&a))
        t->collect_vars(vs);
      else
        for (auto& v : vars_of(std::get<Formula>(a))) vs.insert(v);
    };
    for (auto& app : raw.body)
      for (auto& a : app.args) add_arg(a);
    if (raw.head)
      for (auto& a : raw.head->args) add_arg(a);
    for (auto& v : vs) used_.insert(v.name());
  }
  std::string next(const std::string& base) {
    for (int i = 0;; ++i) {
      auto n = base + std::to_string(i);
      if (used_.insert(n).second) return n;
    }
  }

 private:
  std::set<std::string> used_;
};
}  // namespace

Clause normalize(const RawClause& raw, std::uint64_t id) {
  if (raw.body.size() > 1) throw Error(ErrorKind::NonLinearClause, "clause has more than one body atom");
  NameGen names(raw);
  VarSet used;
  std::vector<Formula> cond{raw.cond};
  auto norm_app = [&](const RawApp& app, const std::string& base) {
    PredApp out{app.pred, {}};
    if (app.args.size() != app.pred->arg_sorts.size())
      throw Error(ErrorKind::SortMismatch, "wrong number of arguments for " + app.pred->name);
    for (std::size_t i = 0; i < app.args.size(); ++i) {
      auto sort = app.pred->arg_sorts[i];
      if (sort == Sort::Int) {
        auto* t = std::get_if<Term>(&app.args[i]);
        if (!t) throw Error(ErrorKind::SortMismatch, "boolean argument where integer expected in " + app.pred->name);
        if (t->monomials().size() == 1 && t->monomials().begin()->first.size() == 1 &&
            t->monomials().begin()->second == 1) {
          auto v = t->monomials().begin()->first.front();
          if (used.insert(v).second) {
            out.args.push_back(v);
            continue;
          }
        }
        auto v = Var::fresh(names.next(base), Sort::Int);
        used.insert(v);
        cond.push_back(Formula::cmp(Term::var(v), Rel::Eq, *t));
        out.args.push_back(v);
      } else {
        auto* f = std::get_if<Formula>(&app.args[i]);
        if (!f) throw Error(ErrorKind::SortMismatch, "integer argument where boolean expected in " + app.pred->name);
        if (f->kind() == Formula::Kind::Lit && f->literal().kind() == Literal::Kind::BoolVar && f->literal().positive() &&
            used.insert(f->literal().var()).second) {
          out.args.push_back(f->literal().var());
          continue;
        }
        auto v = Var::fresh(names.next(base), Sort::Bool);
        used.insert(v);
        auto b = Formula::lit(Literal::boolean(v));
        auto nb = Formula::lit(Literal::boolean(v, false));
        cond.push_back(Formula::disj(Formula::conj(b, *f), Formula::conj(nb, negate(*f))));
        out.args.push_back(v);
      }
    }
    return out;
  };
  std::optional<PredApp> body, head;
  if (!raw.body.empty()) body = norm_app(raw.body.front(), "a");
  if (raw.head) head = norm_app(*raw.head, "h");
  return Clause(id, body, Formula::conj(std::move(cond)), head);
}

}  // namespace adcl
