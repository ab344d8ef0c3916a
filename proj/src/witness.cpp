#include "adcl/witness.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>

#include "adcl/accel.hpp"
#include "adcl/smt.hpp"
#include "adcl/smtlib.hpp"

namespace adcl {

namespace {

constexpr std::size_t kMaxGroundSteps = 5'000'000;
constexpr std::size_t kMaxUnrollCheck = 64;

[[noreturn]] void malformed(const std::string& msg) { throw Error(ErrorKind::MalformedWitness, msg); }

std::string base_name(const std::string& n) {
  std::string s = n;
  auto bang = s.rfind('!');
  if (bang != std::string::npos && bang + 1 < s.size() &&
      std::all_of(s.begin() + static_cast<long>(bang) + 1, s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    s.erase(bang);
  for (auto& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') c = '_';
  if (s.empty() || std::isdigit(static_cast<unsigned char>(s[0]))) s = "v" + s;
  static const std::set<std::string> reserved = {"let", "forall", "exists", "true", "false", "and", "or",
                                                 "not", "ite", "assert", "par", "as", "distinct"};
  if (reserved.count(s)) s += "_";
  return s;
}

std::string sexpr_text(const Sexpr& e) {
  switch (e.kind) {
    case Sexpr::Kind::Symbol: return quote_symbol(e.atom);
    case Sexpr::Kind::String: return "\"" + e.atom + "\"";
    case Sexpr::Kind::List: {
      std::string s = "(";
      for (std::size_t i = 0; i < e.list.size(); ++i) s += (i ? " " : "") + sexpr_text(e.list[i]);
      return s + ")";
    }
    default: return e.atom;
  }
}

using NameMap = std::unordered_map<std::uint64_t, std::string>;

NameMap invert(const std::map<std::string, Var>& scope) {
  NameMap out;
  for (auto& [n, v] : scope) out.emplace(v.id(), n);
  return out;
}

NameFn name_fn(const NameMap& names) {
  return [&names](const Var& v) {
    auto it = names.find(v.id());
    if (it == names.end()) throw std::logic_error("variable without witness name: " + v.name());
    return quote_symbol(it->second);
  };
}

std::string print_value(const Value& v) {
  if (auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
  const Int& i = std::get<Int>(v);
  return i < 0 ? "(- " + Int(-i).get_str() + ")" : i.get_str();
}

Value parse_value(const Sexpr& e, Sort sort) {
  if (sort == Sort::Bool) {
    if (e.is_symbol("true")) return true;
    if (e.is_symbol("false")) return false;
  } else {
    if (e.kind == Sexpr::Kind::Numeral) return Int(e.atom);
    if (e.is_list() && e.list.size() == 2 && e.list[0].is_symbol("-") && e.list[1].kind == Sexpr::Kind::Numeral)
      return Int(-Int(e.list[1].atom));
  }
  malformed("bad value " + sexpr_text(e));
}

std::string print_model(const Model& m, const Clause& c, const NameMap& names) {
  std::map<std::string, std::string> sorted;
  for (auto& v : c.all_vars())
    if (auto* val = m.find(v)) sorted.emplace(names.at(v.id()), print_value(*val));
  std::string s = "(";
  for (auto& [n, val] : sorted) s += (s.size() > 1 ? " (" : "(") + quote_symbol(n) + " " + val + ")";
  return s + ")";
}

Model parse_model(const Sexpr& e, const std::map<std::string, Var>& scope) {
  if (!e.is_list()) malformed("model must be a list");
  Model m;
  for (auto& b : e.list) {
    if (!b.is_list() || b.list.size() != 2 || b.list[0].kind != Sexpr::Kind::Symbol) malformed("bad model binding");
    auto it = scope.find(b.list[0].atom);
    if (it == scope.end()) malformed("unknown variable " + b.list[0].atom);
    m.set(it->second, parse_value(b.list[1], it->second.sort()));
  }
  return m;
}

const Clause& input_clause(const Problem& p, std::uint64_t id) {
  for (auto& c : p.clauses)
    if (c.id() == id) return c;
  malformed("no input clause with id " + std::to_string(id));
}

Model complete_for(const Model& m, const Clause& c) {
  Model out;
  for (auto& v : c.all_vars()) {
    if (auto* val = m.find(v))
      out.set(v, *val);
    else if (v.sort() == Sort::Int)
      out.set(v, Int(0));
    else
      out.set(v, false);
  }
  return out;
}

bool same_values(const Model& a, const std::vector<Var>& va, const Model& b, const std::vector<Var>& vb) {
  if (va.size() != vb.size()) return false;
  for (std::size_t i = 0; i < va.size(); ++i)
    if (a.at(va[i]) != b.at(vb[i])) return false;
  return true;
}

std::string describe(const Clause& c) { return clause_kind_name(c.kind()); }

}  // namespace

const WitnessClause& Witness::def(const std::string& name) const {
  for (auto& d : defs)
    if (d.name == name) return d;
  malformed("undefined clause " + name);
}

std::map<std::string, Var> canonical_scope(const Clause& c) {
  std::vector<Var> order;
  std::set<Var> seen;
  auto add = [&](const Var& v) {
    if (seen.insert(v).second) order.push_back(v);
  };
  if (c.body())
    for (auto& v : c.body()->args) add(v);
  if (c.head())
    for (auto& v : c.head()->args) add(v);
  for (auto& v : c.all_vars()) add(v);
  std::map<std::string, Var> out;
  for (auto& v : order) {
    std::string b = base_name(v.name());
    std::string n = b;
    for (int k = 1; out.count(n); ++k) n = b + "_" + std::to_string(k);
    out.emplace(n, v);
  }
  return out;
}

std::string write_witness(const Witness& w, const Problem& p) {
  std::ostringstream o;
  o << "adcl-witness v1\n";
  std::map<std::string, NameMap> names;
  for (auto& d : w.defs) {
    auto& nm = names[d.name] = invert(d.scope);
    auto fn = name_fn(nm);
    if (!d.learned) {
      (void)input_clause(p, d.original);
      o << "variant " << d.name << " of " << d.original << " sip (";
      auto lits = literals_of(d.clause.cond());
      for (std::size_t i = 0; i < lits.size(); ++i) o << (i ? " " : "") << print_literal(lits[i], fn);
      o << ")\n";
      continue;
    }
    o << "learned " << d.name << " from (";
    for (std::size_t i = 0; i < d.source.size(); ++i) o << (i ? " " : "") << d.source[i];
    o << ") counter " << fn(*d.counter);
    auto app = [&](const PredApp& a) {
      std::string s = "(" + quote_symbol(a.pred->name);
      for (auto& v : a.args) s += " " + fn(v);
      return s + ")";
    };
    o << " body " << app(*d.clause.body()) << " head " << app(*d.clause.head()) << " cond (";
    auto lits = literals_of(d.clause.cond());
    for (std::size_t i = 0; i < lits.size(); ++i) o << (i ? " " : "") << print_literal(lits[i], fn);
    o << ")\n";
  }
  o << "chain";
  for (auto& n : w.chain) o << " " << n;
  o << "\n";
  for (std::size_t i = 0; i < w.models.size(); ++i) {
    auto& d = w.def(w.chain[i]);
    o << "model " << i << " " << print_model(w.models[i], d.clause, names[d.name]) << "\n";
  }
  if (w.expanded) {
    o << "expanded " << w.expanded->size() << "\n";
    std::unordered_map<std::uint64_t, NameMap> in_names;
    for (auto& g : *w.expanded) {
      auto& c = input_clause(p, g.clause);
      auto it = in_names.find(g.clause);
      if (it == in_names.end()) it = in_names.emplace(g.clause, invert(canonical_scope(c))).first;
      o << "ground " << g.clause << " " << print_model(g.model, c, it->second) << "\n";
    }
  }
  o << "end\n";
  return o.str();
}

Witness read_witness(std::string_view text, const Problem& p) {
  Witness w;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = false, done = false;
  std::unordered_map<std::uint64_t, std::map<std::string, Var>> in_scopes;
  auto scope_of_input = [&](std::uint64_t id) -> const std::map<std::string, Var>& {
    auto it = in_scopes.find(id);
    if (it == in_scopes.end()) it = in_scopes.emplace(id, canonical_scope(input_clause(p, id))).first;
    return it->second;
  };
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (!header) {
      if (line != "adcl-witness v1") malformed("missing header");
      header = true;
      continue;
    }
    if (done) malformed("content after end");
    std::vector<Sexpr> xs;
    try {
      xs = parse_sexprs(line);
    } catch (const Error& e) {
      malformed("line " + std::to_string(lineno) + ": " + e.what());
    }
    if (xs.empty() || xs[0].kind != Sexpr::Kind::Symbol) malformed("line " + std::to_string(lineno) + ": no keyword");
    const std::string& kw = xs[0].atom;
    auto number = [&](const Sexpr& e) -> std::uint64_t {
      if (e.kind != Sexpr::Kind::Numeral) malformed("line " + std::to_string(lineno) + ": expected a number");
      return std::stoull(e.atom);
    };
    try {
      if (kw == "variant") {
        if (xs.size() != 6 || !xs[2].is_symbol("of") || !xs[4].is_symbol("sip") || !xs[5].is_list())
          malformed("bad variant line");
        WitnessClause d;
        d.name = xs[1].atom;
        d.original = number(xs[3]);
        const Clause& orig = input_clause(p, d.original);
        d.scope = scope_of_input(d.original);
        auto occurring = literals_of(orig.cond());
        std::vector<Literal> lits;
        for (auto& e : xs[5].list) {
          Formula f = parse_formula(sexpr_text(e), d.scope);
          if (f.kind() != Formula::Kind::Lit) malformed("sip entry is not a literal: " + sexpr_text(e));
          if (std::find(occurring.begin(), occurring.end(), f.literal()) == occurring.end())
            malformed("literal " + sexpr_text(e) + " does not occur in clause " + std::to_string(d.original));
          lits.push_back(f.literal());
        }
        d.clause = orig.with_cond(conj_of(lits));
        w.defs.push_back(std::move(d));
      } else if (kw == "learned") {
        if (xs.size() != 12 || !xs[2].is_symbol("from") || !xs[3].is_list() || !xs[4].is_symbol("counter") ||
            !xs[6].is_symbol("body") || !xs[8].is_symbol("head") || !xs[10].is_symbol("cond") || !xs[11].is_list())
          malformed("bad learned line");
        WitnessClause d;
        d.name = xs[1].atom;
        d.learned = true;
        for (auto& s : xs[3].list) {
          (void)w.def(s.atom);
          d.source.push_back(s.atom);
        }
        auto app = [&](const Sexpr& e) {
          if (!e.is_list() || e.list.empty()) malformed("bad predicate application");
          PredicatePtr pred;
          for (auto& pr : p.predicates)
            if (pr->name == e.list[0].atom) pred = pr;
          if (!pred) malformed("unknown predicate " + e.list[0].atom);
          if (e.list.size() != pred->arg_sorts.size() + 1) malformed("wrong arity for " + pred->name);
          PredApp a{pred, {}};
          for (std::size_t i = 1; i < e.list.size(); ++i) {
            const std::string& n = e.list[i].atom;
            if (d.scope.count(n)) malformed("argument " + n + " used twice");
            Var v = Var::fresh(n, pred->arg_sorts[i - 1]);
            d.scope.emplace(n, v);
            a.args.push_back(v);
          }
          return a;
        };
        auto body = app(xs[7]);
        auto head = app(xs[9]);
        if (d.scope.count(xs[5].atom)) malformed("counter clashes with an argument");
        Var n = Var::fresh(xs[5].atom, Sort::Int);
        d.scope.emplace(xs[5].atom, n);
        d.counter = n;
        std::vector<Formula> cond;
        for (auto& e : xs[11].list) cond.push_back(parse_formula(sexpr_text(e), d.scope));
        d.clause = Clause(fresh_clause_id(), body, Formula::conj(cond), head, Origin{true});
        w.defs.push_back(std::move(d));
      } else if (kw == "chain") {
        for (std::size_t i = 1; i < xs.size(); ++i) {
          (void)w.def(xs[i].atom);
          w.chain.push_back(xs[i].atom);
        }
      } else if (kw == "model") {
        if (xs.size() != 3) malformed("bad model line");
        auto idx = number(xs[1]);
        if (idx != w.models.size() || idx >= w.chain.size()) malformed("model lines out of order");
        w.models.push_back(parse_model(xs[2], w.def(w.chain[idx]).scope));
      } else if (kw == "expanded") {
        if (xs.size() != 2) malformed("bad expanded line");
        w.expanded.emplace();
        w.expanded->reserve(number(xs[1]));
      } else if (kw == "ground") {
        if (!w.expanded || xs.size() != 3) malformed("ground step outside the expanded section");
        GroundStep g;
        g.clause = number(xs[1]);
        g.model = parse_model(xs[2], scope_of_input(g.clause));
        w.expanded->push_back(std::move(g));
      } else if (kw == "end") {
        done = true;
      } else {
        malformed("unknown keyword " + kw);
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::MalformedWitness) throw;
      malformed("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!header) malformed("missing header");
  if (!done) malformed("missing end marker");
  if (w.models.size() != w.chain.size()) malformed("one model per chain element expected");
  return w;
}

namespace {

struct Loop {
  Resolvent res;
  DeterministicUpdate update;
  Elimination elim;
};

class Expander {
 public:
  Expander(const Witness& w, const Problem& p, std::uint64_t seed) : w_(w), p_(p), seed_(seed) {}

  void expand(const WitnessClause& d, const Model& m, std::vector<GroundStep>& out) {
    if (!d.learned) {
      out.push_back({d.original, complete_for(m, input_clause(p_, d.original))});
      if (out.size() > kMaxGroundSteps) throw Error(ErrorKind::NotExpandable, "expansion too large");
      return;
    }
    const Loop& loop = loop_of(d);
    Model mm = complete_for(m, d.clause);
    Int n = mm.int_value(*d.counter);
    if (n <= 0) throw Error(ErrorKind::NotExpandable, "counter of " + d.name + " is not positive");
    const auto& body = d.clause.body()->args;
    const auto& head = d.clause.head()->args;
    const Clause& lc = loop.res.clause;
    std::vector<Value> cur;
    for (auto& v : body) cur.push_back(mm.at(v));
    for (Int i = 0; i < n; ++i) {
      Model lm;
      for (std::size_t k = 0; k < cur.size(); ++k) lm.set(lc.body()->args[k], cur[k]);
      std::vector<Value> next;
      for (std::size_t k = 0; k < cur.size(); ++k) {
        if (auto* t = std::get_if<Term>(&loop.update.update[k]))
          next.emplace_back(t->eval(lm));
        else
          next.emplace_back(eval(std::get<Formula>(loop.update.update[k]), lm));
      }
      for (std::size_t k = 0; k < next.size(); ++k) lm.set(lc.head()->args[k], next[k]);
      fill_extras(loop, lm);
      for (std::size_t j = 0; j < d.source.size(); ++j) {
        const WitnessClause& member = w_.def(d.source[j]);
        Model mj;
        for (auto& v : member.clause.all_vars()) {
          auto it = loop.res.renamings[j].find(v.id());
          if (it == loop.res.renamings[j].end()) continue;
          if (auto* val = lm.find(it->second)) mj.set(v, *val);
        }
        expand(member, mj, out);
      }
      cur = std::move(next);
    }
    for (std::size_t k = 0; k < head.size(); ++k)
      if (cur[k] != mm.at(head[k]))
        throw Error(ErrorKind::NotExpandable, "iterating the source of " + d.name + " does not reach its head");
  }

  const Loop& loop_of(const WitnessClause& d) {
    auto it = loops_.find(d.name);
    if (it != loops_.end()) return it->second;
    std::vector<Clause> seq;
    for (auto& s : d.source) seq.push_back(w_.def(s).clause);
    Loop l;
    l.res = resolve_seq(seq);
    if (!l.res.clause.is_recursive()) throw Error(ErrorKind::NotExpandable, "source of " + d.name + " is not recursive");
    try {
      l.update = extract_update(l.res.clause);
    } catch (const Error& e) {
      throw Error(ErrorKind::NotExpandable, "source of " + d.name + ": " + e.what());
    }
    VarSet keep(l.res.clause.body()->args.begin(), l.res.clause.body()->args.end());
    keep.insert(l.res.clause.head()->args.begin(), l.res.clause.head()->args.end());
    l.elim = eliminate_defined(literals_of(l.res.clause.cond()), keep);
    return loops_.emplace(d.name, std::move(l)).first->second;
  }

 private:
  void fill_extras(const Loop& loop, Model& lm) {
    VarSet rest;
    for (auto& l : loop.elim.rest) l.collect_vars(rest);
    bool closed = std::all_of(rest.begin(), rest.end(), [&](const Var& v) { return lm.contains(v); });
    if (closed) {
      for (auto& [v, t] : loop.elim.int_defs) lm.set(v, t.eval(lm));
      for (auto& [v, b] : loop.elim.bool_defs) lm.set(v, b);
      return;
    }
    // intermediate values not determined syntactically
    std::vector<Formula> fs{loop.res.clause.cond()};
    for (auto& [id, val] : lm.entries()) {
      if (auto* i = std::get_if<Int>(&val.second))
        fs.push_back(Formula::cmp(Term::var(val.first), Rel::Eq, Term(*i)));
      else
        fs.push_back(Formula::lit(Literal::boolean(val.first, std::get<bool>(val.second))));
    }
    auto r = check_sat(Formula::conj(fs), seed_);
    if (r.status != SmtStatus::Sat) throw Error(ErrorKind::NotExpandable, "no intermediate values for a loop iteration");
    for (auto& [id, val] : r.model.entries())
      if (!lm.contains(val.first)) lm.set(val.first, val.second);
  }

  const Witness& w_;
  const Problem& p_;
  std::uint64_t seed_;
  std::map<std::string, Loop> loops_;
};

std::string check_ground(const std::vector<GroundStep>& steps, const Problem& p) {
  if (steps.empty()) return "empty expanded derivation";
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const Clause& c = input_clause(p, steps[k].clause);
    Model m = complete_for(steps[k].model, c);
    if (k == 0 && c.body()) return "expanded derivation does not start with a fact";
    if (k + 1 == steps.size() && c.head()) return "expanded derivation does not end in a query";
    if (k > 0 && !c.body()) return "fact in the middle of the expanded derivation";
    if (!eval(c.cond(), m)) return "ground step " + std::to_string(k) + " violates the condition of clause " + std::to_string(c.id());
    if (k + 1 < steps.size()) {
      const Clause& nc = input_clause(p, steps[k + 1].clause);
      if (!c.head() || !nc.body() || c.head()->pred->id != nc.body()->pred->id)
        return "ground steps " + std::to_string(k) + " and " + std::to_string(k + 1) + " do not chain";
      if (!same_values(m, c.head()->args, complete_for(steps[k + 1].model, nc), nc.body()->args))
        return "ground steps " + std::to_string(k) + " and " + std::to_string(k + 1) + " disagree on arguments";
    }
  }
  return "";
}

}  // namespace

Witness expand_witness(const Witness& w, const Problem& p, std::uint64_t seed) {
  Witness out = w;
  Expander ex(w, p, seed);
  std::vector<GroundStep> steps;
  for (std::size_t i = 0; i < w.chain.size(); ++i) ex.expand(w.def(w.chain[i]), w.models.at(i), steps);
  out.expanded = std::move(steps);
  return out;
}

CheckReport check_witness(const Witness& w, const Problem& p, std::uint64_t seed) {
  CheckReport rep;
  auto fail = [&](std::string why) {
    rep.ok = false;
    rep.reason = std::move(why);
    return rep;
  };
  try {
    if (w.chain.empty()) return fail("empty chain");
    if (w.models.size() != w.chain.size()) return fail("one model per chain element expected");
    std::vector<Model> ms;
    for (std::size_t i = 0; i < w.chain.size(); ++i) {
      const Clause& c = w.def(w.chain[i]).clause;
      ms.push_back(complete_for(w.models[i], c));
      if (i == 0 && c.body()) return fail("chain does not start with a fact");
      if (i + 1 == w.chain.size() && c.head()) return fail("chain does not end with a query");
      if (i > 0 && !c.body()) return fail("clause without body inside the chain");
      if (!eval(c.cond(), ms[i]))
        return fail("model " + std::to_string(i) + " violates the condition of " + w.chain[i] + " (" + describe(c) + ")");
      if (i > 0) {
        const Clause& prev = w.def(w.chain[i - 1]).clause;
        if (!prev.head() || prev.head()->pred->id != c.body()->pred->id)
          return fail("chain elements " + std::to_string(i - 1) + " and " + std::to_string(i) + " do not resolve");
        if (!same_values(ms[i - 1], prev.head()->args, ms[i], c.body()->args))
          return fail("models " + std::to_string(i - 1) + " and " + std::to_string(i) + " disagree on arguments");
      }
    }
    // learned clauses against their source words
    std::map<std::string, std::set<Int>> used;
    for (std::size_t i = 0; i < w.chain.size(); ++i) {
      auto& d = w.def(w.chain[i]);
      if (d.learned) used[d.name].insert(ms[i].int_value(*d.counter));
    }
    for (auto& d : w.defs) {
      if (!d.learned) continue;
      std::vector<Clause> seq;
      for (auto& s : d.source) seq.push_back(w.def(s).clause);
      Clause loop = resolve_seq(seq).clause;
      std::set<std::size_t> ns{1, 2, 3};
      for (auto& v : used[d.name]) {
        if (v <= 0) return fail("counter of " + d.name + " is not positive");
        if (v <= kMaxUnrollCheck) ns.insert(v.get_ui());
      }
      for (auto n : ns) {
        auto ok = check_unrolling(d.clause, *d.counter, loop, n, seed);
        if (ok && !*ok) return fail(d.name + " differs from " + std::to_string(n) + " iterations of its source");
      }
    }
    std::vector<GroundStep> ground;
    if (w.expanded) {
      ground = *w.expanded;
    } else {
      ground = *expand_witness(w, p, seed).expanded;
    }
    if (auto why = check_ground(ground, p); !why.empty()) return fail(why);
    if (w.expanded) {
      // the recorded expansion must be the one the chain induces
      auto again = *expand_witness(w, p, seed).expanded;
      if (again.size() != ground.size()) return fail("expanded derivation has the wrong length");
    }
    rep.ground_steps = ground.size();
  } catch (const Error& e) {
    return fail(std::string(error_kind_name(e.kind())) + ": " + e.what());
  }
  rep.ok = true;
  return rep;
}

}  // namespace adcl
