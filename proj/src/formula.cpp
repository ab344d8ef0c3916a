#include "adcl/formula.hpp"

#include <algorithm>
#include <atomic>

namespace adcl {

namespace {
std::atomic<std::uint64_t> g_next_var{1};

std::string base_name(const std::string& n) {
  auto pos = n.rfind('!');
  if (pos == std::string::npos || pos + 1 == n.size()) return n;
  for (std::size_t i = pos + 1; i < n.size(); ++i)
    if (n[i] < '0' || n[i] > '9') return n;
  return n.substr(0, pos);
}
}  // namespace

const char* sort_name(Sort s) { return s == Sort::Int ? "Int" : "Bool"; }

Var Var::fresh(std::string name, Sort sort) {
  auto id = g_next_var.fetch_add(1);
  return Var(std::make_shared<const Data>(Data{id, std::move(name), sort}));
}

Var Var::fresh_like(const Var& v) {
  auto id = g_next_var.fetch_add(1);
  auto name = base_name(v.name()) + "!" + std::to_string(id);
  return Var(std::make_shared<const Data>(Data{id, std::move(name), v.sort()}));
}

std::string value_to_string(const Value& v) {
  if (auto* i = std::get_if<Int>(&v)) return i->get_str();
  return std::get<bool>(v) ? "true" : "false";
}

void Model::set(const Var& v, Value val) {
  if ((v.sort() == Sort::Int) != std::holds_alternative<Int>(val))
    throw Error(ErrorKind::SortMismatch, "value sort does not match variable " + v.name());
  vals_.insert_or_assign(v.id(), std::make_pair(v, std::move(val)));
}

const Value* Model::find(const Var& v) const {
  auto it = vals_.find(v.id());
  return it == vals_.end() ? nullptr : &it->second.second;
}

const Value& Model::at(const Var& v) const {
  auto* p = find(v);
  if (!p) throw Error(ErrorKind::UnboundVariable, "unbound variable " + v.name());
  return *p;
}

Int Model::int_value(const Var& v) const { return std::get<Int>(at(v)); }
bool Model::bool_value(const Var& v) const { return std::get<bool>(at(v)); }

bool MonomialLess::operator()(const Monomial& a, const Monomial& b) const {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                      [](const Var& x, const Var& y) { return x.id() < y.id(); });
}

Term::Term(long v) {
  if (v != 0) m_.emplace(Monomial{}, Int(v));
}

Term::Term(const Int& v) {
  if (v != 0) m_.emplace(Monomial{}, v);
}

Term Term::var(const Var& v) {
  if (v.sort() != Sort::Int) throw Error(ErrorKind::SortMismatch, "boolean variable " + v.name() + " used as integer");
  Term t;
  t.m_.emplace(Monomial{v}, Int(1));
  return t;
}

void Term::add(const Monomial& mono, const Int& c) {
  if (c == 0) return;
  auto [it, inserted] = m_.try_emplace(mono, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) m_.erase(it);
  }
}

bool Term::is_constant() const { return m_.empty() || (m_.size() == 1 && m_.begin()->first.empty()); }

Int Term::constant() const {
  auto it = m_.find(Monomial{});
  return it == m_.end() ? Int(0) : it->second;
}

bool Term::is_linear() const {
  for (auto& [mono, c] : m_)
    if (mono.size() > 1) return false;
  return true;
}

Int Term::coeff(const Var& v) const {
  auto it = m_.find(Monomial{v});
  return it == m_.end() ? Int(0) : it->second;
}

bool Term::nonlinear_in(const Var& v) const {
  for (auto& [mono, c] : m_)
    if (mono.size() > 1 && std::find(mono.begin(), mono.end(), v) != mono.end()) return true;
  return false;
}

void Term::collect_vars(VarSet& out) const {
  for (auto& [mono, c] : m_)
    for (auto& v : mono) out.insert(v);
}

Term Term::operator+(const Term& o) const {
  Term r = *this;
  for (auto& [mono, c] : o.m_) r.add(mono, c);
  return r;
}

Term Term::operator-(const Term& o) const {
  Term r = *this;
  for (auto& [mono, c] : o.m_) r.add(mono, -c);
  return r;
}

Term Term::operator-() const { return scaled(Int(-1)); }

Term Term::operator*(const Term& o) const {
  Term r;
  for (auto& [ma, ca] : m_)
    for (auto& [mb, cb] : o.m_) {
      Monomial mono;
      mono.reserve(ma.size() + mb.size());
      std::merge(ma.begin(), ma.end(), mb.begin(), mb.end(), std::back_inserter(mono),
                 [](const Var& x, const Var& y) { return x.id() < y.id(); });
      r.add(mono, ca * cb);
    }
  return r;
}

Term Term::scaled(const Int& k) const {
  Term r;
  if (k == 0) return r;
  for (auto& [mono, c] : m_) r.m_.emplace_hint(r.m_.end(), mono, c * k);
  return r;
}

Int Term::eval(const Model& m) const {
  Int r = 0;
  for (auto& [mono, c] : m_) {
    Int p = c;
    for (auto& v : mono) p *= m.int_value(v);
    r += p;
  }
  return r;
}

int compare(const Term& a, const Term& b) {
  auto ia = a.m_.begin(), ib = b.m_.begin();
  MonomialLess less;
  for (; ia != a.m_.end() && ib != b.m_.end(); ++ia, ++ib) {
    if (less(ia->first, ib->first)) return -1;
    if (less(ib->first, ia->first)) return 1;
    int c = cmp(ia->second, ib->second);
    if (c != 0) return c < 0 ? -1 : 1;
  }
  if (ia != a.m_.end()) return 1;
  if (ib != b.m_.end()) return -1;
  return 0;
}

Literal Literal::relation(const Term& lhs, Rel rel, const Term& rhs) {
  Term t = lhs - rhs;
  switch (rel) {
    case Rel::Eq: return normalized(std::move(t), Op::Eq);
    case Rel::Neq: return normalized(std::move(t), Op::Neq);
    case Rel::Lt: return normalized(std::move(t), Op::Lt);
    case Rel::Le: return normalized(std::move(t), Op::Le);
    case Rel::Gt: return normalized(-t, Op::Lt);
    case Rel::Ge: return normalized(-t, Op::Le);
  }
  return constant(false);
}

Literal Literal::normalized(Term t, Op op) {
  if (t.is_constant()) {
    Int c = t.constant();
    switch (op) {
      case Op::Eq: return constant(c == 0);
      case Op::Neq: return constant(c != 0);
      case Op::Le: return constant(c <= 0);
      case Op::Lt: return constant(c < 0);
    }
  }
  if (op == Op::Eq || op == Op::Neq) {
    for (auto& [mono, c] : t.monomials()) {
      if (mono.empty()) continue;
      if (c < 0) t = -t;
      break;
    }
  }
  Literal l;
  l.kind_ = Kind::Cmp;
  l.op_ = op;
  l.term_ = std::move(t);
  return l;
}

Literal Literal::boolean(const Var& v, bool positive) {
  if (v.sort() != Sort::Bool) throw Error(ErrorKind::SortMismatch, "integer variable " + v.name() + " used as boolean");
  Literal l;
  l.kind_ = Kind::BoolVar;
  l.var_ = v;
  l.flag_ = positive;
  return l;
}

Literal Literal::constant(bool value) {
  Literal l;
  l.kind_ = Kind::Const;
  l.flag_ = value;
  return l;
}

Literal Literal::negated() const {
  switch (kind_) {
    case Kind::Const: return constant(!flag_);
    case Kind::BoolVar: return boolean(var_, !flag_);
    case Kind::Cmp: break;
  }
  switch (op_) {
    case Op::Eq: return normalized(term_, Op::Neq);
    case Op::Neq: return normalized(term_, Op::Eq);
    case Op::Le: return normalized(-term_, Op::Lt);
    case Op::Lt: return normalized(-term_, Op::Le);
  }
  return *this;
}

bool Literal::eval(const Model& m) const {
  switch (kind_) {
    case Kind::Const: return flag_;
    case Kind::BoolVar: return m.bool_value(var_) == flag_;
    case Kind::Cmp: break;
  }
  int s = sgn(term_.eval(m));
  switch (op_) {
    case Op::Eq: return s == 0;
    case Op::Neq: return s != 0;
    case Op::Le: return s <= 0;
    case Op::Lt: return s < 0;
  }
  return false;
}

void Literal::collect_vars(VarSet& out) const {
  if (kind_ == Kind::BoolVar) out.insert(var_);
  if (kind_ == Kind::Cmp) term_.collect_vars(out);
}

bool Literal::is_linear() const { return kind_ != Kind::Cmp || term_.is_linear(); }

int compare(const Literal& a, const Literal& b) {
  if (a.kind_ != b.kind_) return a.kind_ < b.kind_ ? -1 : 1;
  switch (a.kind_) {
    case Literal::Kind::Const: return a.flag_ == b.flag_ ? 0 : (a.flag_ ? 1 : -1);
    case Literal::Kind::BoolVar:
      if (a.var_ != b.var_) return a.var_.id() < b.var_.id() ? -1 : 1;
      return a.flag_ == b.flag_ ? 0 : (a.flag_ ? 1 : -1);
    case Literal::Kind::Cmp:
      if (a.op_ != b.op_) return a.op_ < b.op_ ? -1 : 1;
      return compare(a.term_, b.term_);
  }
  return 0;
}

Formula::Formula() : Formula(top()) {}

Formula Formula::lit(const Literal& l) {
  return Formula(std::make_shared<const Node>(Node{Kind::Lit, l, {}}));
}

Formula Formula::top() {
  static const Formula t(std::make_shared<const Node>(Node{Kind::Lit, Literal::constant(true), {}}));
  return t;
}

Formula Formula::bottom() {
  static const Formula f(std::make_shared<const Node>(Node{Kind::Lit, Literal::constant(false), {}}));
  return f;
}

bool Formula::is_true() const { return kind() == Kind::Lit && literal().is_const() && literal().value(); }
bool Formula::is_false() const { return kind() == Kind::Lit && literal().is_const() && !literal().value(); }

bool Formula::is_conjunctive() const {
  if (kind() == Kind::Lit) return true;
  if (kind() == Kind::Or) return false;
  for (auto& k : children())
    if (k.kind() != Kind::Lit) return false;
  return true;
}

bool Formula::is_linear() const {
  if (kind() == Kind::Lit) return literal().is_linear();
  for (auto& k : children())
    if (!k.is_linear()) return false;
  return true;
}

Formula Formula::conj(std::vector<Formula> fs) {
  std::vector<Formula> flat;
  std::set<Literal> seen;
  for (auto& f : fs) {
    if (f.is_true()) continue;
    if (f.is_false()) return bottom();
    if (f.kind() == Kind::And) {
      for (auto& k : f.children())
        if (k.kind() != Kind::Lit || seen.insert(k.literal()).second) flat.push_back(k);
    } else if (f.kind() != Kind::Lit || seen.insert(f.literal()).second) {
      flat.push_back(f);
    }
  }
  for (auto& l : seen)
    if (seen.count(l.negated())) return bottom();
  if (flat.empty()) return top();
  if (flat.size() == 1) return flat.front();
  return Formula(std::make_shared<const Node>(Node{Kind::And, Literal::constant(true), std::move(flat)}));
}

Formula Formula::disj(std::vector<Formula> fs) {
  std::vector<Formula> flat;
  std::set<Literal> seen;
  for (auto& f : fs) {
    if (f.is_false()) continue;
    if (f.is_true()) return top();
    if (f.kind() == Kind::Or) {
      for (auto& k : f.children())
        if (k.kind() != Kind::Lit || seen.insert(k.literal()).second) flat.push_back(k);
    } else if (f.kind() != Kind::Lit || seen.insert(f.literal()).second) {
      flat.push_back(f);
    }
  }
  for (auto& l : seen)
    if (seen.count(l.negated())) return top();
  if (flat.empty()) return bottom();
  if (flat.size() == 1) return flat.front();
  return Formula(std::make_shared<const Node>(Node{Kind::Or, Literal::constant(true), std::move(flat)}));
}

int compare(const Formula& a, const Formula& b) {
  if (a.n_ == b.n_) return 0;
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  if (a.kind() == Formula::Kind::Lit) return compare(a.literal(), b.literal());
  auto& ka = a.children();
  auto& kb = b.children();
  for (std::size_t i = 0; i < ka.size() && i < kb.size(); ++i)
    if (int c = compare(ka[i], kb[i])) return c;
  if (ka.size() != kb.size()) return ka.size() < kb.size() ? -1 : 1;
  return 0;
}

Formula negate(const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Lit: return Formula::lit(f.literal().negated());
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<Formula> ks;
      ks.reserve(f.children().size());
      for (auto& k : f.children()) ks.push_back(negate(k));
      return f.kind() == Formula::Kind::And ? Formula::disj(std::move(ks)) : Formula::conj(std::move(ks));
    }
  }
  return f;
}

bool eval(const Formula& f, const Model& m) {
  switch (f.kind()) {
    case Formula::Kind::Lit: return f.literal().eval(m);
    case Formula::Kind::And:
      for (auto& k : f.children())
        if (!eval(k, m)) return false;
      return true;
    case Formula::Kind::Or:
      for (auto& k : f.children())
        if (eval(k, m)) return true;
      return false;
  }
  return false;
}

namespace {
void collect_lits(const Formula& f, std::vector<Literal>& out) {
  if (f.kind() == Formula::Kind::Lit) {
    out.push_back(f.literal());
    return;
  }
  for (auto& k : f.children()) collect_lits(k, out);
}
}  // namespace

VarSet vars_of(const Formula& f) {
  VarSet out;
  for (auto& l : literals_of(f)) l.collect_vars(out);
  return out;
}

std::vector<Literal> literals_of(const Formula& f) {
  std::vector<Literal> out;
  collect_lits(f, out);
  return out;
}

Formula conj_of(const std::vector<Literal>& lits) {
  std::vector<Formula> fs;
  fs.reserve(lits.size());
  for (auto& l : lits) fs.push_back(Formula::lit(l));
  return Formula::conj(std::move(fs));
}

void Substitution::set(const Var& v, const Term& t) {
  if (v.sort() != Sort::Int) throw Error(ErrorKind::SortMismatch, "integer term substituted for boolean " + v.name());
  ints_.insert_or_assign(v.id(), t);
}

void Substitution::set(const Var& v, const Formula& f) {
  if (v.sort() != Sort::Bool) throw Error(ErrorKind::SortMismatch, "formula substituted for integer " + v.name());
  bools_.insert_or_assign(v.id(), f);
}

void Substitution::rename(const Var& from, const Var& to) {
  if (from.sort() != to.sort())
    throw Error(ErrorKind::SortMismatch, "renaming " + from.name() + " to " + to.name() + " changes sort");
  if (from.sort() == Sort::Int)
    set(from, Term::var(to));
  else
    set(from, Formula::lit(Literal::boolean(to)));
}

const Term* Substitution::term_for(const Var& v) const {
  auto it = ints_.find(v.id());
  return it == ints_.end() ? nullptr : &it->second;
}

const Formula* Substitution::formula_for(const Var& v) const {
  auto it = bools_.find(v.id());
  return it == bools_.end() ? nullptr : &it->second;
}

Term apply_subst(const Term& t, const Substitution& s) {
  Term r;
  for (auto& [mono, c] : t.monomials()) {
    Term p(c);
    for (auto& v : mono) {
      auto* st = s.term_for(v);
      p = p * (st ? *st : Term::var(v));
    }
    r = r + p;
  }
  return r;
}

Formula apply_subst(const Literal& l, const Substitution& s) {
  switch (l.kind()) {
    case Literal::Kind::Const: return Formula::lit(l);
    case Literal::Kind::BoolVar: {
      auto* f = s.formula_for(l.var());
      if (!f) return Formula::lit(l);
      return l.positive() ? *f : negate(*f);
    }
    case Literal::Kind::Cmp: break;
  }
  Term t = apply_subst(l.term(), s);
  switch (l.op()) {
    case Literal::Op::Eq: return Formula::cmp(t, Rel::Eq, 0);
    case Literal::Op::Neq: return Formula::cmp(t, Rel::Neq, 0);
    case Literal::Op::Le: return Formula::cmp(t, Rel::Le, 0);
    case Literal::Op::Lt: return Formula::cmp(t, Rel::Lt, 0);
  }
  return Formula::lit(l);
}

Formula apply_subst(const Formula& f, const Substitution& s) {
  if (s.empty()) return f;
  switch (f.kind()) {
    case Formula::Kind::Lit: return apply_subst(f.literal(), s);
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      std::vector<Formula> ks;
      ks.reserve(f.children().size());
      for (auto& k : f.children()) ks.push_back(apply_subst(k, s));
      return f.kind() == Formula::Kind::And ? Formula::conj(std::move(ks)) : Formula::disj(std::move(ks));
    }
  }
  return f;
}

RawFormula RawFormula::of(const Literal& l) {
  RawFormula r;
  r.kind = Kind::Atom;
  r.atom = l;
  return r;
}

RawFormula RawFormula::of(const Formula& f) {
  if (f.kind() == Formula::Kind::Lit) return of(f.literal());
  std::vector<RawFormula> ks;
  for (auto& k : f.children()) ks.push_back(of(k));
  return make(f.kind() == Formula::Kind::And ? Kind::And : Kind::Or, std::move(ks));
}

RawFormula RawFormula::make(Kind k, std::vector<RawFormula> kids) {
  RawFormula r;
  r.kind = k;
  r.kids = std::move(kids);
  return r;
}

namespace {
Formula nnf(const RawFormula& r, bool pos) {
  using K = RawFormula::Kind;
  auto all = [&](bool p) {
    std::vector<Formula> out;
    for (auto& k : r.kids) out.push_back(nnf(k, p));
    return out;
  };
  switch (r.kind) {
    case K::Atom: return Formula::lit(pos ? r.atom : r.atom.negated());
    case K::Not: return nnf(r.kids.at(0), !pos);
    case K::And: return pos ? Formula::conj(all(true)) : Formula::disj(all(false));
    case K::Or: return pos ? Formula::disj(all(true)) : Formula::conj(all(false));
    case K::Implies: {
      // right-associative chain: a => b => c
      if (r.kids.empty()) return pos ? Formula::top() : Formula::bottom();
      std::vector<Formula> ps;
      for (std::size_t i = 0; i + 1 < r.kids.size(); ++i) ps.push_back(nnf(r.kids[i], !pos));
      ps.push_back(nnf(r.kids.back(), pos));
      if (pos) return Formula::disj(std::move(ps));
      return Formula::conj(std::move(ps));
    }
    case K::Iff: {
      auto& a = r.kids.at(0);
      auto& b = r.kids.at(1);
      auto pa = nnf(a, true), na = nnf(a, false), pb = nnf(b, true), nb = nnf(b, false);
      if (pos) return Formula::disj(Formula::conj(pa, pb), Formula::conj(na, nb));
      return Formula::disj(Formula::conj(pa, nb), Formula::conj(na, pb));
    }
    case K::Ite: {
      auto pc = nnf(r.kids.at(0), true), nc = nnf(r.kids.at(0), false);
      return Formula::disj(Formula::conj(pc, nnf(r.kids.at(1), pos)), Formula::conj(nc, nnf(r.kids.at(2), pos)));
    }
  }
  return Formula::top();
}

void sip_collect(const Formula& f, const Model& m, std::vector<Literal>& out, std::set<Literal>& seen) {
  if (f.kind() == Formula::Kind::Lit) {
    if (!f.literal().is_const() && f.literal().eval(m) && seen.insert(f.literal()).second) out.push_back(f.literal());
    return;
  }
  for (auto& k : f.children()) sip_collect(k, m, out, seen);
}
}  // namespace

Formula to_nnf(const RawFormula& r) { return nnf(r, true); }

std::vector<Literal> sip_literals(const Formula& psi, const Model& sigma) {
  if (!eval(psi, sigma)) throw Error(ErrorKind::ModelDoesNotSatisfy, "model does not satisfy condition");
  std::vector<Literal> out;
  std::set<Literal> seen;
  sip_collect(psi, sigma, out, seen);
  return out;
}

Formula sip_of_model(const Formula& psi, const Model& sigma) { return conj_of(sip_literals(psi, sigma)); }

Int floor_div(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

Int ceil_div(const Int& a, const Int& b) {
  Int q;
  mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::UnsupportedOperator: return "UnsupportedOperator";
    case ErrorKind::UnboundVariable: return "UnboundVariable";
    case ErrorKind::ModelDoesNotSatisfy: return "ModelDoesNotSatisfy";
    case ErrorKind::SortMismatch: return "SortMismatch";
    case ErrorKind::NonLinearClause: return "NonLinearClause";
    case ErrorKind::ReservedNameClash: return "ReservedNameClash";
    case ErrorKind::UnsupportedFeature: return "UnsupportedFeature";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::NotDeterministic: return "NotDeterministic";
    case ErrorKind::NoClosedForm: return "NoClosedForm";
    case ErrorKind::NotAccelerable: return "NotAccelerable";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::UnknownId: return "UnknownId";
    case ErrorKind::NotExpandable: return "NotExpandable";
    case ErrorKind::MalformedWitness: return "MalformedWitness";
    case ErrorKind::BackendCrash: return "BackendCrash";
    case ErrorKind::Cancelled: return "Cancelled";
  }
  return "Error";
}

}  // namespace adcl
