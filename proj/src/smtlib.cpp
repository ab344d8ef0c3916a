#include "adcl/smtlib.hpp"

#include <cctype>
#include <sstream>

namespace adcl {

std::string_view Sexpr::head() const {
  if (kind != Kind::List || list.empty() || list.front().kind != Kind::Symbol) return {};
  return list.front().atom;
}

std::string Diagnostic::str() const {
  return std::to_string(span.line) + ":" + std::to_string(span.col) + ": " + error_kind_name(kind) + ": " + message;
}

namespace {

[[noreturn]] void fail(ErrorKind k, const SourceSpan& sp, const std::string& msg) {
  throw Error(k, std::to_string(sp.line) + ":" + std::to_string(sp.col) + ": " + msg);
}

class Lexer {
 public:
  explicit Lexer(std::string_view t) : t_(t) {}

  std::vector<Sexpr> run() {
    std::vector<Sexpr> top;
    std::vector<Sexpr> stack;
    while (true) {
      skip();
      if (i_ >= t_.size()) break;
      SourceSpan sp{line_, col_};
      char c = t_[i_];
      if (c == '(') {
        adv();
        Sexpr s;
        s.kind = Sexpr::Kind::List;
        s.span = sp;
        stack.push_back(std::move(s));
        continue;
      }
      if (c == ')') {
        adv();
        if (stack.empty()) fail(ErrorKind::SyntaxError, sp, "unbalanced ')'");
        Sexpr s = std::move(stack.back());
        stack.pop_back();
        emit(std::move(s), stack, top);
        continue;
      }
      emit(atom(sp), stack, top);
    }
    if (!stack.empty()) fail(ErrorKind::SyntaxError, stack.back().span, "unclosed '('");
    return top;
  }

 private:
  static void emit(Sexpr s, std::vector<Sexpr>& stack, std::vector<Sexpr>& top) {
    if (stack.empty())
      top.push_back(std::move(s));
    else
      stack.back().list.push_back(std::move(s));
  }

  void adv() {
    if (t_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void skip() {
    while (i_ < t_.size()) {
      char c = t_[i_];
      if (c == ';') {
        while (i_ < t_.size() && t_[i_] != '\n') adv();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        adv();
      } else {
        break;
      }
    }
  }

  Sexpr atom(const SourceSpan& sp) {
    Sexpr s;
    s.span = sp;
    char c = t_[i_];
    if (c == '|') {
      adv();
      while (i_ < t_.size() && t_[i_] != '|') {
        s.atom += t_[i_];
        adv();
      }
      if (i_ >= t_.size()) fail(ErrorKind::SyntaxError, sp, "unterminated quoted symbol");
      adv();
      s.kind = Sexpr::Kind::Symbol;
      return s;
    }
    if (c == '"') {
      adv();
      while (true) {
        if (i_ >= t_.size()) fail(ErrorKind::SyntaxError, sp, "unterminated string");
        if (t_[i_] == '"') {
          adv();
          if (i_ < t_.size() && t_[i_] == '"') {
            s.atom += '"';
            adv();
            continue;
          }
          break;
        }
        s.atom += t_[i_];
        adv();
      }
      s.kind = Sexpr::Kind::String;
      return s;
    }
    while (i_ < t_.size()) {
      char d = t_[i_];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';' || d == '"' || d == '|') break;
      s.atom += d;
      adv();
    }
    if (s.atom[0] == ':') {
      s.kind = Sexpr::Kind::Keyword;
    } else if (std::isdigit(static_cast<unsigned char>(s.atom[0]))) {
      bool dot = false;
      for (char d : s.atom) {
        if (d == '.' && !dot) {
          dot = true;
        } else if (!std::isdigit(static_cast<unsigned char>(d))) {
          fail(ErrorKind::SyntaxError, sp, "malformed numeral '" + s.atom + "'");
        }
      }
      s.kind = dot ? Sexpr::Kind::Decimal : Sexpr::Kind::Numeral;
    } else {
      s.kind = Sexpr::Kind::Symbol;
    }
    return s;
  }

  std::string_view t_;
  std::size_t i_ = 0, line_ = 1, col_ = 1;
};

RawFormula raw_true() { return RawFormula::of(Literal::constant(true)); }

bool trivially_true(const RawFormula& r) {
  if (r.kind == RawFormula::Kind::Atom) return r.atom.is_const() && r.atom.value();
  if (r.kind == RawFormula::Kind::And) {
    for (auto& k : r.kids)
      if (!trivially_true(k)) return false;
    return true;
  }
  return false;
}

RawFormula rand2(RawFormula a, RawFormula b) {
  if (trivially_true(a)) return b;
  if (trivially_true(b)) return a;
  return RawFormula::make(RawFormula::Kind::And, {std::move(a), std::move(b)});
}

// Integer expression with ite lifted out: mutually exclusive guarded cases.
struct GTerm {
  std::vector<std::pair<RawFormula, Term>> cases;
  static GTerm of(const Term& t) { return GTerm{{{raw_true(), t}}}; }
  bool simple() const { return cases.size() == 1 && trivially_true(cases[0].first); }
};

struct BElab {
  RawFormula f = raw_true();
  std::vector<RawApp> apps;
  // definitions of auxiliary argument variables
  std::vector<RawFormula> defs;
  bool exists = false;

  bool pure() const { return apps.empty() && !exists; }
};

using Elab = std::variant<GTerm, BElab>;

GTerm combine(const GTerm& a, const GTerm& b, const std::function<Term(const Term&, const Term&)>& fn) {
  GTerm r;
  for (auto& [ga, ta] : a.cases)
    for (auto& [gb, tb] : b.cases) r.cases.emplace_back(rand2(ga, gb), fn(ta, tb));
  return r;
}

class Elaborator {
 public:
  ParseResult run(std::string_view text) {
    ParseResult res;
    try {
      auto cmds = parse_sexprs(text);
      for (auto& c : cmds) {
        if (command(c, res)) break;
      }
      res.problem.predicates = preds_list_;
    } catch (const Error& e) {
      std::string msg = e.what();
      SourceSpan sp;
      // recover the position prefix written by fail()
      auto c1 = msg.find(':');
      auto c2 = c1 == std::string::npos ? c1 : msg.find(':', c1 + 1);
      if (c2 != std::string::npos) {
        try {
          sp.line = std::stoul(msg.substr(0, c1));
          sp.col = std::stoul(msg.substr(c1 + 1, c2 - c1 - 1));
          msg = msg.substr(c2 + 2);
        } catch (...) {
        }
      }
      res.diagnostics.push_back(Diagnostic{e.kind(), msg, sp});
      res.problem = Problem{};
    }
    return res;
  }

  Formula formula(const Sexpr& s, const std::map<std::string, Var>& scope) {
    frames_.emplace_back();
    for (auto& [n, v] : scope) frames_.back().emplace(n, v);
    auto e = elab(s);
    frames_.pop_back();
    auto* b = std::get_if<BElab>(&e);
    if (!b || !b->pure()) fail(ErrorKind::SortMismatch, s.span, "expected a quantifier-free boolean formula");
    return to_nnf(b->f);
  }

 private:
  using Binding = std::variant<Var, GTerm, BElab>;

  struct Macro {
    std::vector<std::pair<std::string, Sort>> params;
    Sexpr body;
  };

  Sort sort_of(const Sexpr& s) {
    if (s.is_symbol("Int")) return Sort::Int;
    if (s.is_symbol("Bool")) return Sort::Bool;
    std::string name = s.kind == Sexpr::Kind::List ? "(" + std::string(s.head()) + " ...)" : s.atom;
    fail(ErrorKind::UnsupportedFeature, s.span, "unsupported sort " + name);
  }

  // returns true when parsing should stop
  bool command(const Sexpr& c, ParseResult& res) {
    if (!c.is_list() || c.head().empty()) fail(ErrorKind::SyntaxError, c.span, "expected a command");
    auto h = c.head();
    if (h == "set-logic") {
      if (c.list.size() != 2) fail(ErrorKind::SyntaxError, c.span, "set-logic expects one argument");
      res.logic = c.list[1].atom;
      return false;
    }
    if (h == "set-info" || h == "set-option" || h == "get-info" || h == "get-model" || h == "get-proof" ||
        h == "push" || h == "pop")
      return false;
    if (h == "check-sat" || h == "exit") return true;
    if (h == "declare-fun") {
      if (c.list.size() != 4 || !c.list[2].is_list()) fail(ErrorKind::SyntaxError, c.span, "malformed declare-fun");
      declare(c.list[1], c.list[2].list, c.list[3]);
      return false;
    }
    if (h == "declare-const") {
      if (c.list.size() != 3) fail(ErrorKind::SyntaxError, c.span, "malformed declare-const");
      declare(c.list[1], {}, c.list[2]);
      return false;
    }
    if (h == "define-fun") {
      if (c.list.size() != 5 || !c.list[2].is_list()) fail(ErrorKind::SyntaxError, c.span, "malformed define-fun");
      Macro m;
      for (auto& p : c.list[2].list) {
        if (!p.is_list() || p.list.size() != 2) fail(ErrorKind::SyntaxError, p.span, "malformed parameter");
        m.params.emplace_back(p.list[0].atom, sort_of(p.list[1]));
      }
      sort_of(c.list[3]);
      m.body = c.list[4];
      macros_[c.list[1].atom] = std::move(m);
      return false;
    }
    if (h == "assert") {
      if (c.list.size() != 2) fail(ErrorKind::SyntaxError, c.span, "assert expects one argument");
      assertion(c.list[1], res.problem);
      return false;
    }
    fail(ErrorKind::UnsupportedFeature, c.span, "unsupported command " + std::string(h));
  }

  void declare(const Sexpr& name, const std::vector<Sexpr>& args, const Sexpr& result) {
    if (name.kind != Sexpr::Kind::Symbol) fail(ErrorKind::SyntaxError, name.span, "expected a symbol");
    if (preds_.count(name.atom) || int_consts_.count(name.atom))
      fail(ErrorKind::SyntaxError, name.span, "redeclaration of " + name.atom);
    auto rs = sort_of(result);
    if (rs == Sort::Int) {
      if (!args.empty()) fail(ErrorKind::UnsupportedFeature, name.span, "uninterpreted function " + name.atom);
      int_consts_.insert(name.atom);
      return;
    }
    auto p = std::make_shared<Predicate>();
    p->id = static_cast<std::uint32_t>(preds_list_.size());
    p->name = name.atom;
    for (auto& a : args) p->arg_sorts.push_back(sort_of(a));
    preds_.emplace(p->name, p);
    preds_list_.push_back(p);
  }

  Var bind_var(const std::string& name, Sort s) {
    std::string n = name;
    for (int k = 1; !used_names_.insert(n).second; ++k) n = name + "!" + std::to_string(k);
    return Var::fresh(n, s);
  }

  void bind_list(const Sexpr& binders) {
    if (!binders.is_list()) fail(ErrorKind::SyntaxError, binders.span, "expected a binder list");
    for (auto& b : binders.list) {
      if (!b.is_list() || b.list.size() != 2 || b.list[0].kind != Sexpr::Kind::Symbol)
        fail(ErrorKind::SyntaxError, b.span, "malformed binder");
      frames_.back().insert_or_assign(b.list[0].atom, bind_var(b.list[0].atom, sort_of(b.list[1])));
    }
  }

  void assertion(const Sexpr& top, Problem& prob) {
    frames_.clear();
    frames_.emplace_back();
    used_names_.clear();
    const_vars_.clear();
    aux_ = 0;
    const Sexpr* t = &top;
    while (t->head() == "forall") {
      if (t->list.size() != 3) fail(ErrorKind::SyntaxError, t->span, "malformed forall");
      bind_list(t->list[1]);
      t = &t->list[2];
    }
    std::vector<const Sexpr*> body;
    const Sexpr* head = nullptr;
    bool no_head = false;
    if (t->head() == "=>") {
      while (t->head() == "=>") {
        if (t->list.size() < 3) fail(ErrorKind::SyntaxError, t->span, "malformed implication");
        for (std::size_t i = 1; i + 1 < t->list.size(); ++i) body.push_back(&t->list[i]);
        t = &t->list.back();
        while (t->head() == "forall") {
          bind_list(t->list[1]);
          t = &t->list[2];
        }
      }
      head = t;
    } else if (t->head() == "not") {
      if (t->list.size() != 2) fail(ErrorKind::SyntaxError, t->span, "malformed negation");
      const Sexpr* inner = &t->list[1];
      while (inner->head() == "exists") {
        bind_list(inner->list[1]);
        inner = &inner->list[2];
      }
      body.push_back(inner);
      no_head = true;
    } else {
      head = t;
    }
    if (head && head->is_symbol("false")) no_head = true;

    BElab b;
    for (auto* s : body) {
      auto e = elab(*s);
      auto* be = std::get_if<BElab>(&e);
      if (!be) fail(ErrorKind::SortMismatch, s->span, "clause body must be boolean");
      merge_conj(b, std::move(*be));
    }
    RawClause raw;
    std::vector<RawFormula> cond{b.f};
    for (auto& d : b.defs) cond.push_back(d);
    raw.body = std::move(b.apps);
    if (!no_head) {
      auto e = elab(*head);
      auto* he = std::get_if<BElab>(&e);
      if (!he) fail(ErrorKind::SortMismatch, head->span, "clause head must be boolean");
      if (he->exists) fail(ErrorKind::UnsupportedFeature, head->span, "existential quantifier in clause head");
      for (auto& d : he->defs) cond.push_back(d);
      if (he->apps.size() == 1 && trivially_true(he->f)) {
        raw.head = he->apps.front();
      } else if (he->apps.empty()) {
        cond.push_back(RawFormula::make(RawFormula::Kind::Not, {he->f}));
      } else {
        fail(ErrorKind::UnsupportedFeature, head->span, "clause head is not a single predicate application");
      }
    }
    if (raw.body.size() > 1) fail(ErrorKind::UnsupportedFeature, top.span, "non-linear clause (more than one body atom)");
    raw.cond = to_nnf(RawFormula::make(RawFormula::Kind::And, std::move(cond)));
    prob.clauses.push_back(normalize(raw, prob.clauses.size()));
  }

  static void merge_conj(BElab& into, BElab from) {
    into.f = rand2(std::move(into.f), std::move(from.f));
    for (auto& a : from.apps) into.apps.push_back(std::move(a));
    for (auto& d : from.defs) into.defs.push_back(std::move(d));
    into.exists = into.exists || from.exists;
  }

  const Binding* lookup(const std::string& n) const {
    for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
      auto f = it->find(n);
      if (f != it->end()) return &f->second;
    }
    return nullptr;
  }

  GTerm as_int(const Sexpr& s) {
    auto e = elab(s);
    if (auto* g = std::get_if<GTerm>(&e)) return std::move(*g);
    fail(ErrorKind::SortMismatch, s.span, "expected an integer expression");
  }

  RawFormula as_pure_bool(const Sexpr& s) {
    auto e = elab(s);
    auto* b = std::get_if<BElab>(&e);
    if (!b) fail(ErrorKind::SortMismatch, s.span, "expected a boolean expression");
    if (!b->pure())
      fail(ErrorKind::UnsupportedFeature, s.span, "predicate application or quantifier in unsupported position");
    if (b->defs.empty()) return std::move(b->f);
    std::vector<RawFormula> ks{std::move(b->f)};
    for (auto& d : b->defs) ks.push_back(std::move(d));
    return RawFormula::make(RawFormula::Kind::And, std::move(ks));
  }

  static BElab pure(RawFormula f) {
    BElab b;
    b.f = std::move(f);
    return b;
  }

  BElab compare_chain(const Sexpr& s, Rel rel) {
    if (s.list.size() < 3) fail(ErrorKind::SyntaxError, s.span, "comparison needs two arguments");
    std::vector<GTerm> args;
    for (std::size_t i = 1; i < s.list.size(); ++i) args.push_back(as_int(s.list[i]));
    std::vector<RawFormula> conj;
    for (std::size_t i = 0; i + 1 < args.size(); ++i) conj.push_back(compare(args[i], rel, args[i + 1]));
    return pure(RawFormula::make(RawFormula::Kind::And, std::move(conj)));
  }

  static RawFormula compare(const GTerm& a, Rel rel, const GTerm& b) {
    std::vector<RawFormula> alts;
    for (auto& [ga, ta] : a.cases)
      for (auto& [gb, tb] : b.cases) alts.push_back(rand2(rand2(ga, gb), RawFormula::of(Literal::relation(ta, rel, tb))));
    if (alts.size() == 1) return std::move(alts.front());
    return RawFormula::make(RawFormula::Kind::Or, std::move(alts));
  }

  Elab elab(const Sexpr& s) {
    switch (s.kind) {
      case Sexpr::Kind::Numeral: return GTerm::of(Term(Int(s.atom)));
      case Sexpr::Kind::Decimal: fail(ErrorKind::UnsupportedFeature, s.span, "real arithmetic");
      case Sexpr::Kind::String:
      case Sexpr::Kind::Keyword: fail(ErrorKind::SyntaxError, s.span, "unexpected token " + s.atom);
      case Sexpr::Kind::Symbol: return symbol(s);
      case Sexpr::Kind::List: break;
    }
    if (s.list.empty()) fail(ErrorKind::SyntaxError, s.span, "empty application");
    if (s.list.front().is_list()) {
      if (s.list.front().head() == "_") fail(ErrorKind::UnsupportedFeature, s.span, "indexed identifiers");
      fail(ErrorKind::SyntaxError, s.span, "malformed application");
    }
    const std::string& op = s.list.front().atom;
    auto n = s.list.size() - 1;
    auto arg = [&](std::size_t i) -> const Sexpr& { return s.list[i + 1]; };

    if (op == "let") {
      if (n != 2 || !arg(0).is_list()) fail(ErrorKind::SyntaxError, s.span, "malformed let");
      std::map<std::string, Binding> frame;
      for (auto& b : arg(0).list) {
        if (!b.is_list() || b.list.size() != 2) fail(ErrorKind::SyntaxError, b.span, "malformed let binding");
        auto e = elab(b.list[1]);
        if (auto* g = std::get_if<GTerm>(&e))
          frame.insert_or_assign(b.list[0].atom, std::move(*g));
        else
          frame.insert_or_assign(b.list[0].atom, std::move(std::get<BElab>(e)));
      }
      frames_.push_back(std::move(frame));
      auto r = elab(arg(1));
      frames_.pop_back();
      return r;
    }
    if (op == "exists") {
      if (n != 2) fail(ErrorKind::SyntaxError, s.span, "malformed exists");
      frames_.emplace_back();
      bind_list(arg(0));
      auto e = elab(arg(1));
      frames_.pop_back();
      auto* b = std::get_if<BElab>(&e);
      if (!b) fail(ErrorKind::SortMismatch, s.span, "expected a boolean expression");
      b->exists = true;
      return e;
    }
    if (op == "forall") fail(ErrorKind::UnsupportedFeature, s.span, "nested universal quantifier");
    if (op == "and") {
      BElab b;
      for (std::size_t i = 0; i < n; ++i) {
        auto e = elab(arg(i));
        auto* be = std::get_if<BElab>(&e);
        if (!be) fail(ErrorKind::SortMismatch, arg(i).span, "expected a boolean expression");
        merge_conj(b, std::move(*be));
      }
      return b;
    }
    if (op == "or" || op == "xor" || op == "=>") {
      std::vector<RawFormula> ks;
      for (std::size_t i = 0; i < n; ++i) ks.push_back(as_pure_bool(arg(i)));
      if (op == "or") return pure(RawFormula::make(RawFormula::Kind::Or, std::move(ks)));
      if (op == "=>") return pure(RawFormula::make(RawFormula::Kind::Implies, std::move(ks)));
      if (ks.empty()) return pure(RawFormula::of(Literal::constant(false)));
      RawFormula acc = std::move(ks[0]);
      for (std::size_t i = 1; i < ks.size(); ++i)
        acc = RawFormula::make(RawFormula::Kind::Not, {RawFormula::make(RawFormula::Kind::Iff, {acc, ks[i]})});
      return pure(std::move(acc));
    }
    if (op == "not") {
      if (n != 1) fail(ErrorKind::SyntaxError, s.span, "not expects one argument");
      return pure(RawFormula::make(RawFormula::Kind::Not, {as_pure_bool(arg(0))}));
    }
    if (op == "ite") {
      if (n != 3) fail(ErrorKind::SyntaxError, s.span, "ite expects three arguments");
      auto c = as_pure_bool(arg(0));
      auto t = elab(arg(1));
      auto e = elab(arg(2));
      if (t.index() != e.index()) fail(ErrorKind::SortMismatch, s.span, "ite branches have different sorts");
      if (auto* gt = std::get_if<GTerm>(&t)) {
        auto& ge = std::get<GTerm>(e);
        GTerm r;
        auto nc = RawFormula::make(RawFormula::Kind::Not, {c});
        for (auto& [g, term] : gt->cases) r.cases.emplace_back(rand2(c, g), term);
        for (auto& [g, term] : ge.cases) r.cases.emplace_back(rand2(nc, g), term);
        return r;
      }
      auto& bt = std::get<BElab>(t);
      auto& be = std::get<BElab>(e);
      if (!bt.pure() || !be.pure())
        fail(ErrorKind::UnsupportedFeature, s.span, "predicate application or quantifier in unsupported position");
      return pure(RawFormula::make(RawFormula::Kind::Ite, {c, bt.f, be.f}));
    }
    if (op == "=" || op == "distinct") {
      if (n < 2) fail(ErrorKind::SyntaxError, s.span, op + " needs two arguments");
      std::vector<Elab> args;
      for (std::size_t i = 0; i < n; ++i) args.push_back(elab(arg(i)));
      for (auto& a : args)
        if (a.index() != args[0].index()) fail(ErrorKind::SortMismatch, s.span, "arguments of " + op + " differ in sort");
      std::vector<RawFormula> conj;
      auto rel = [&](std::size_t i, std::size_t j) {
        if (auto* gi = std::get_if<GTerm>(&args[i]))
          return compare(*gi, op == "=" ? Rel::Eq : Rel::Neq, std::get<GTerm>(args[j]));
        auto& bi = std::get<BElab>(args[i]);
        auto& bj = std::get<BElab>(args[j]);
        if (!bi.pure() || !bj.pure())
          fail(ErrorKind::UnsupportedFeature, s.span, "predicate application or quantifier in unsupported position");
        auto iff = RawFormula::make(RawFormula::Kind::Iff, {bi.f, bj.f});
        return op == "=" ? iff : RawFormula::make(RawFormula::Kind::Not, {iff});
      };
      if (op == "=") {
        for (std::size_t i = 0; i + 1 < n; ++i) conj.push_back(rel(i, i + 1));
      } else {
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = i + 1; j < n; ++j) conj.push_back(rel(i, j));
      }
      return pure(RawFormula::make(RawFormula::Kind::And, std::move(conj)));
    }
    if (op == "<") return compare_chain(s, Rel::Lt);
    if (op == "<=") return compare_chain(s, Rel::Le);
    if (op == ">") return compare_chain(s, Rel::Gt);
    if (op == ">=") return compare_chain(s, Rel::Ge);
    if (op == "+" || op == "-" || op == "*") {
      if (n == 0) fail(ErrorKind::SyntaxError, s.span, op + " needs arguments");
      GTerm acc = as_int(arg(0));
      if (op == "-" && n == 1) {
        for (auto& c : acc.cases) c.second = -c.second;
        return acc;
      }
      for (std::size_t i = 1; i < n; ++i) {
        auto next = as_int(arg(i));
        if (op == "+") {
          acc = combine(acc, next, [](const Term& a, const Term& b) { return a + b; });
        } else if (op == "-") {
          acc = combine(acc, next, [](const Term& a, const Term& b) { return a - b; });
        } else {
          acc = combine(acc, next, [&](const Term& a, const Term& b) {
            if (!a.is_constant() && !b.is_constant())
              fail(ErrorKind::UnsupportedFeature, s.span, "non-linear multiplication");
            return a * b;
          });
        }
      }
      return acc;
    }
    if (op == "div" || op == "mod" || op == "abs" || op == "/" || op == "to_real" || op == "to_int" ||
        op == "is_int" || op == "select" || op == "store")
      fail(ErrorKind::UnsupportedFeature, s.span, "operator " + op + " is not supported");
    if (auto it = preds_.find(op); it != preds_.end()) return app(s, it->second);
    if (auto it = macros_.find(op); it != macros_.end()) return expand(s, it->second);
    fail(ErrorKind::SyntaxError, s.span, "unknown function symbol " + op);
  }

  Elab symbol(const Sexpr& s) {
    if (s.atom == "true") return pure(RawFormula::of(Literal::constant(true)));
    if (s.atom == "false") return pure(RawFormula::of(Literal::constant(false)));
    if (auto* b = lookup(s.atom)) {
      if (auto* v = std::get_if<Var>(b)) {
        if (v->sort() == Sort::Int) return GTerm::of(Term::var(*v));
        return pure(RawFormula::of(Literal::boolean(*v)));
      }
      if (auto* g = std::get_if<GTerm>(b)) return *g;
      return std::get<BElab>(*b);
    }
    if (int_consts_.count(s.atom)) {
      auto it = const_vars_.find(s.atom);
      if (it == const_vars_.end()) it = const_vars_.emplace(s.atom, bind_var(s.atom, Sort::Int)).first;
      return GTerm::of(Term::var(it->second));
    }
    if (auto it = preds_.find(s.atom); it != preds_.end()) {
      if (!it->second->arg_sorts.empty()) fail(ErrorKind::SyntaxError, s.span, "predicate " + s.atom + " needs arguments");
      BElab b;
      b.apps.push_back(RawApp{it->second, {}});
      return b;
    }
    if (auto it = macros_.find(s.atom); it != macros_.end() && it->second.params.empty()) {
      Sexpr call;
      call.kind = Sexpr::Kind::List;
      call.span = s.span;
      call.list.push_back(s);
      return expand(call, it->second);
    }
    fail(ErrorKind::SyntaxError, s.span, "unknown symbol " + s.atom);
  }

  Elab expand(const Sexpr& s, const Macro& m) {
    if (s.list.size() - 1 != m.params.size()) fail(ErrorKind::SyntaxError, s.span, "wrong number of macro arguments");
    std::map<std::string, Binding> frame;
    for (std::size_t i = 0; i < m.params.size(); ++i) {
      auto e = elab(s.list[i + 1]);
      if ((m.params[i].second == Sort::Int) != std::holds_alternative<GTerm>(e))
        fail(ErrorKind::SortMismatch, s.list[i + 1].span, "macro argument has wrong sort");
      if (auto* g = std::get_if<GTerm>(&e))
        frame.emplace(m.params[i].first, std::move(*g));
      else
        frame.emplace(m.params[i].first, std::move(std::get<BElab>(e)));
    }
    auto saved = std::move(frames_);
    frames_.clear();
    frames_.push_back(std::move(frame));
    auto r = elab(m.body);
    frames_ = std::move(saved);
    return r;
  }

  Elab app(const Sexpr& s, const PredicatePtr& p) {
    if (s.list.size() - 1 != p->arg_sorts.size())
      fail(ErrorKind::SyntaxError, s.span, "wrong number of arguments for " + p->name);
    BElab b;
    RawApp a{p, {}};
    for (std::size_t i = 0; i < p->arg_sorts.size(); ++i) {
      auto& as = s.list[i + 1];
      if (p->arg_sorts[i] == Sort::Int) {
        auto g = as_int(as);
        if (g.simple()) {
          a.args.emplace_back(g.cases[0].second);
          continue;
        }
        auto v = bind_var("ite!" + std::to_string(aux_++), Sort::Int);
        std::vector<RawFormula> alts;
        for (auto& [guard, t] : g.cases)
          alts.push_back(rand2(guard, RawFormula::of(Literal::relation(Term::var(v), Rel::Eq, t))));
        b.defs.push_back(RawFormula::make(RawFormula::Kind::Or, std::move(alts)));
        a.args.emplace_back(Term::var(v));
      } else {
        a.args.emplace_back(to_nnf(as_pure_bool(as)));
      }
    }
    b.apps.push_back(std::move(a));
    return b;
  }

  std::map<std::string, PredicatePtr> preds_;
  std::vector<PredicatePtr> preds_list_;
  std::set<std::string> int_consts_;
  std::map<std::string, Macro> macros_;
  std::vector<std::map<std::string, Binding>> frames_;
  std::set<std::string> used_names_;
  std::map<std::string, Var> const_vars_;
  int aux_ = 0;
};

bool simple_symbol_char(char c) {
  if (std::isalnum(static_cast<unsigned char>(c))) return true;
  static const std::string extra = "~!@$%^&*_-+=<>.?/";
  return extra.find(c) != std::string::npos;
}

std::string default_name(const Var& v) { return quote_symbol(v.name()); }

void print_int(std::ostringstream& o, const Int& c) {
  if (c < 0)
    o << "(- " << Int(-c).get_str() << ")";
  else
    o << c.get_str();
}

void print_monomial(std::ostringstream& o, const Monomial& m, const Int& c, const NameFn& name) {
  if (m.empty()) {
    print_int(o, c);
    return;
  }
  std::vector<std::string> factors;
  if (c != 1) {
    std::ostringstream t;
    print_int(t, c);
    factors.push_back(t.str());
  }
  for (auto& v : m) factors.push_back(name(v));
  if (factors.size() == 1) {
    o << factors[0];
    return;
  }
  o << "(*";
  for (auto& f : factors) o << ' ' << f;
  o << ')';
}

void print_term_to(std::ostringstream& o, const Term& t, const NameFn& name) {
  auto& ms = t.monomials();
  if (ms.empty()) {
    o << '0';
    return;
  }
  if (ms.size() == 1) {
    print_monomial(o, ms.begin()->first, ms.begin()->second, name);
    return;
  }
  o << "(+";
  // constant last reads more naturally
  for (auto& [m, c] : ms)
    if (!m.empty()) {
      o << ' ';
      print_monomial(o, m, c, name);
    }
  if (!ms.begin()->first.empty()) {
    o << ')';
    return;
  }
  o << ' ';
  print_int(o, ms.begin()->second);
  o << ')';
}

}  // namespace

std::vector<Sexpr> parse_sexprs(std::string_view text) { return Lexer(text).run(); }

ParseResult parse_problem(std::string_view text) { return Elaborator().run(text); }

Problem parse_problem_or_throw(std::string_view text) {
  auto r = parse_problem(text);
  if (!r.ok()) throw Error(r.diagnostics.front().kind, r.diagnostics.front().str());
  return std::move(r.problem);
}

Formula parse_formula(std::string_view text, const std::map<std::string, Var>& scope) {
  auto sx = parse_sexprs(text);
  if (sx.size() != 1) throw Error(ErrorKind::SyntaxError, "expected exactly one formula");
  return Elaborator().formula(sx.front(), scope);
}

std::string quote_symbol(const std::string& name) {
  bool simple = !name.empty() && !std::isdigit(static_cast<unsigned char>(name[0]));
  for (char c : name)
    if (!simple_symbol_char(c)) simple = false;
  static const std::set<std::string> reserved = {"let", "forall", "exists", "true", "false", "and", "or", "not",
                                                 "ite", "assert", "par", "_", "!", "as"};
  if (simple && !reserved.count(name)) return name;
  return "|" + name + "|";
}

std::string print_term(const Term& t, const NameFn& name) {
  std::ostringstream o;
  print_term_to(o, t, name ? name : NameFn(default_name));
  return o.str();
}

std::string print_literal(const Literal& l, const NameFn& nm) {
  NameFn name = nm ? nm : NameFn(default_name);
  switch (l.kind()) {
    case Literal::Kind::Const: return l.value() ? "true" : "false";
    case Literal::Kind::BoolVar: return l.positive() ? name(l.var()) : "(not " + name(l.var()) + ")";
    case Literal::Kind::Cmp: break;
  }
  Term t = l.term();
  bool flip = false;
  for (auto& [m, c] : t.monomials()) {
    if (m.empty()) continue;
    flip = c < 0;
    break;
  }
  if (flip) t = -t;
  Term lhs, rhs;
  for (auto& [m, c] : t.monomials()) {
    Term part = Term(c);
    for (auto& v : m) part = part * Term::var(v);
    if (!m.empty() && c > 0)
      lhs = lhs + part;
    else
      rhs = rhs - part;
  }
  std::string op;
  switch (l.op()) {
    case Literal::Op::Eq: op = "="; break;
    case Literal::Op::Neq: op = "="; break;
    case Literal::Op::Le: op = flip ? ">=" : "<="; break;
    case Literal::Op::Lt: op = flip ? ">" : "<"; break;
  }
  std::string s = "(" + op + " " + print_term(lhs, name) + " " + print_term(rhs, name) + ")";
  if (l.op() == Literal::Op::Neq) s = "(not " + s + ")";
  return s;
}

std::string print_formula(const Formula& f, const NameFn& name) {
  if (f.kind() == Formula::Kind::Lit) return print_literal(f.literal(), name);
  std::string s = f.kind() == Formula::Kind::And ? "(and" : "(or";
  for (auto& k : f.children()) s += " " + print_formula(k, name);
  return s + ")";
}

namespace {
NameFn clause_names(const Clause& c) {
  auto names = std::make_shared<std::unordered_map<std::uint64_t, std::string>>();
  std::set<std::string> used;
  for (auto& v : c.all_vars()) {
    std::string n = v.name();
    if (!used.insert(n).second) {
      n = v.name() + "!" + std::to_string(v.id());
      used.insert(n);
    }
    names->emplace(v.id(), quote_symbol(n));
  }
  return [names](const Var& v) {
    auto it = names->find(v.id());
    return it == names->end() ? quote_symbol(v.name()) : it->second;
  };
}

std::string print_app(const PredApp& a, const NameFn& name) {
  if (a.args.empty()) return quote_symbol(a.pred->name);
  std::string s = "(" + quote_symbol(a.pred->name);
  for (auto& v : a.args) s += " " + name(v);
  return s + ")";
}

std::string print_clause_with(const Clause& c, const NameFn& name) {
  std::vector<std::string> body;
  if (c.body()) body.push_back(print_app(*c.body(), name));
  if (!c.cond().is_true()) body.push_back(print_formula(c.cond(), name));
  std::string b = body.empty() ? "true" : body.size() == 1 ? body[0] : "(and " + body[0] + " " + body[1] + ")";
  std::string h = c.head() ? print_app(*c.head(), name) : "false";
  std::string imp = "(=> " + b + " " + h + ")";
  auto vars = c.all_vars();
  if (vars.empty()) return imp;
  std::string q = "(forall (";
  bool first = true;
  for (auto& v : vars) {
    q += (first ? "(" : " (") + name(v) + " " + sort_name(v.sort()) + ")";
    first = false;
  }
  return q + ") " + imp + ")";
}
}  // namespace

std::string print_clause(const Clause& c) { return print_clause_with(c, clause_names(c)); }

std::string print_problem(const Problem& p) {
  std::ostringstream o;
  o << "(set-logic HORN)\n";
  for (auto& pr : p.predicates) {
    o << "(declare-fun " << quote_symbol(pr->name) << " (";
    for (std::size_t i = 0; i < pr->arg_sorts.size(); ++i) o << (i ? " " : "") << sort_name(pr->arg_sorts[i]);
    o << ") Bool)\n";
  }
  for (auto& c : p.clauses) o << "(assert " << print_clause(c) << ")\n";
  o << "(check-sat)\n";
  return o.str();
}

}  // namespace adcl
