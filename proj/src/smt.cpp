#include "adcl/smt.hpp"

#include <functional>
#include <map>
#include <stdexcept>

#include "lia.hpp"
#include "sat.hpp"

namespace adcl {

const char* smt_status_name(SmtStatus s) {
  switch (s) {
    case SmtStatus::Sat: return "sat";
    case SmtStatus::Unsat: return "unsat";
    case SmtStatus::Unknown: return "unknown";
  }
  return "?";
}

Model complete_model(const Model& m, const std::vector<Formula>& fs) {
  Model out = m;
  for (auto& f : fs)
    for (auto& v : vars_of(f))
      if (!out.contains(v)) {
        if (v.sort() == Sort::Int)
          out.set(v, Int(0));
        else
          out.set(v, false);
      }
  return out;
}

namespace {

class LazySmt {
 public:
  LazySmt(const Formula& f, std::uint64_t seed, const std::atomic<bool>* cancel)
      : f_(f), sat_(seed), seed_(seed), cancel_(cancel) {}

  SmtResult run(const std::vector<Formula>& fs) {
    if (f_.kind() == Formula::Kind::And) {
      for (auto& k : f_.children()) sat_.add_clause({encode(k)});
    } else {
      sat_.add_clause({encode(f_)});
    }
    while (true) {
      if (!sat_.solve(cancel_)) return {SmtStatus::Unsat, {}, ""};
      std::vector<Literal> imp;
      implicant(f_, imp);
      std::vector<Literal> theory;
      for (auto& l : imp)
        if (l.kind() == Literal::Kind::Cmp) theory.push_back(l);
      Model m;
      if (theory_check(theory, &m)) {
        for (auto& [key, idx] : atoms_)
          if (key.kind() == Literal::Kind::BoolVar) m.set(key.var(), sat_.value(idx));
        m = complete_model(m, fs);
        for (auto& f : fs)
          if (!eval(f, m)) throw std::logic_error("built-in solver produced a model that fails validation");
        return {SmtStatus::Sat, std::move(m), ""};
      }
      auto core = minimize(theory);
      std::vector<int> block;
      for (auto& l : core) block.push_back(lit_for(l) ^ 1);
      sat_.add_clause(std::move(block));
    }
  }

 private:
  int lit_for(const Literal& l) {
    Literal key = l;
    bool neg = false;
    switch (l.kind()) {
      case Literal::Kind::Const: throw std::logic_error("constant literal inside formula");
      case Literal::Kind::BoolVar:
        key = Literal::boolean(l.var(), true);
        neg = !l.positive();
        break;
      case Literal::Kind::Cmp:
        if (l.op() == Literal::Op::Neq || l.op() == Literal::Op::Lt) {
          key = l.negated();
          neg = true;
        }
        break;
    }
    auto it = atoms_.find(key);
    if (it == atoms_.end()) it = atoms_.emplace(key, sat_.new_var(!neg)).first;
    return sat::mk_lit(it->second, neg);
  }

  int encode(const Formula& f) {
    if (f.kind() == Formula::Kind::Lit) return lit_for(f.literal());
    std::vector<int> kids;
    for (auto& k : f.children()) kids.push_back(encode(k));
    int n = sat::mk_lit(sat_.new_var(true));
    if (f.kind() == Formula::Kind::And) {
      for (int k : kids) sat_.add_clause({n ^ 1, k});
    } else {
      kids.push_back(n ^ 1);
      sat_.add_clause(std::move(kids));
    }
    return n;
  }

  bool value(const Formula& f) {
    switch (f.kind()) {
      case Formula::Kind::Lit: {
        int l = lit_for(f.literal());
        return sat_.value(sat::lit_var(l)) != sat::lit_neg(l);
      }
      case Formula::Kind::And:
        for (auto& k : f.children())
          if (!value(k)) return false;
        return true;
      case Formula::Kind::Or:
        for (auto& k : f.children())
          if (value(k)) return true;
        return false;
    }
    return false;
  }

  void implicant(const Formula& f, std::vector<Literal>& out) {
    switch (f.kind()) {
      case Formula::Kind::Lit: out.push_back(f.literal()); return;
      case Formula::Kind::And:
        for (auto& k : f.children()) implicant(k, out);
        return;
      case Formula::Kind::Or:
        for (auto& k : f.children())
          if (value(k)) {
            implicant(k, out);
            return;
          }
        throw std::logic_error("propositional model does not satisfy a disjunction");
    }
  }

  bool theory_check(const std::vector<Literal>& lits, Model* out) {
    std::map<std::uint64_t, std::uint32_t> index;
    std::vector<Var> vars;
    lia::System sys;
    auto row = [&](const Term& t, const Int& scale, const Int& add) {
      std::vector<std::pair<std::uint32_t, Int>> cs;
      for (auto& [mono, c] : t.monomials()) {
        if (mono.empty()) continue;
        auto [it, ins] = index.emplace(mono[0].id(), static_cast<std::uint32_t>(vars.size()));
        if (ins) vars.push_back(mono[0]);
        cs.emplace_back(it->second, c * scale);
      }
      return lia::make_row(std::move(cs), t.constant() * scale + add);
    };
    for (auto& l : lits) {
      switch (l.op()) {
        case Literal::Op::Eq: sys.eqs.push_back(row(l.term(), 1, 0)); break;
        case Literal::Op::Neq: sys.neqs.push_back(row(l.term(), 1, 0)); break;
        case Literal::Op::Le: sys.geqs.push_back(row(l.term(), -1, 0)); break;
        case Literal::Op::Lt: sys.geqs.push_back(row(l.term(), -1, -1)); break;
      }
    }
    sys.num_vars = static_cast<std::uint32_t>(vars.size());
    auto sol = lia::solve(sys, lia::Options{seed_, cancel_});
    if (!sol) return false;
    if (out)
      for (std::size_t i = 0; i < vars.size(); ++i) out->set(vars[i], (*sol)[i]);
    return true;
  }

  std::vector<Literal> minimize(std::vector<Literal> lits) {
    if (lits.size() > 40) return lits;
    for (std::size_t i = lits.size(); i-- > 0;) {
      auto trial = lits;
      trial.erase(trial.begin() + static_cast<long>(i));
      if (!theory_check(trial, nullptr)) lits = std::move(trial);
    }
    return lits;
  }

  Formula f_;
  sat::Solver sat_;
  std::uint64_t seed_;
  const std::atomic<bool>* cancel_;
  std::map<Literal, int> atoms_;
};

}  // namespace

SmtResult BuiltinBackend::check(const std::vector<Formula>& fs) {
  Formula f = Formula::conj(fs);
  if (f.is_false()) return {SmtStatus::Unsat, {}, ""};
  if (!f.is_linear()) return {SmtStatus::Unknown, {}, "non-linear arithmetic"};
  if (f.is_true()) return {SmtStatus::Sat, complete_model({}, fs), ""};
  try {
    return LazySmt(f, seed_, cancel_).run(fs);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Cancelled) return {SmtStatus::Unknown, {}, "cancelled"};
    throw;
  }
}

SolverStack::SolverStack(std::uint64_t seed) : builtin_(seed) {}

void SolverStack::set_cancel(const std::atomic<bool>* c) {
  builtin_.set_cancel(c);
  if (external_) external_->set_cancel(c);
}

void SolverStack::set_seed(std::uint64_t seed) {
  builtin_.set_seed(seed);
  if (external_) external_->set_seed(seed);
}

void SolverStack::pop(std::size_t n) {
  if (n > frames_.size()) throw std::logic_error("pop below the bottom of the solver stack");
  frames_.resize(frames_.size() - n);
}

SmtResult SolverStack::check_formulas(const std::vector<Formula>& fs) {
  ++checks_;
  {
    // only the variables of fs are carried over
    Model m;
    for (auto& f : fs)
      for (auto& v : vars_of(f)) {
        if (m.contains(v)) continue;
        if (auto* p = last_model_.find(v))
          m.set(v, *p);
        else if (v.sort() == Sort::Int)
          m.set(v, Int(0));
        else
          m.set(v, false);
      }
    bool ok = true;
    for (auto& f : fs)
      if (!eval(f, m)) {
        ok = false;
        break;
      }
    if (ok) {
      ++reused_;
      last_model_ = m;
      return {SmtStatus::Sat, std::move(m), ""};
    }
  }
  bool linear = true;
  for (auto& f : fs)
    if (!f.is_linear()) linear = false;
  SmtResult r;
  if (linear)
    r = builtin_.check(fs);
  else if (external_)
    r = external_->check(fs);
  else
    r = {SmtStatus::Unknown, {}, "non-linear arithmetic without an external solver"};
  if (r.status == SmtStatus::Sat) last_model_ = r.model;
  return r;
}

SmtResult SolverStack::check() { return check_formulas(frames_); }

SmtResult SolverStack::check_with(const Formula& extra) {
  auto fs = frames_;
  fs.push_back(extra);
  return check_formulas(fs);
}

SmtResult check_sat(const Formula& f, std::uint64_t seed) { return BuiltinBackend(seed).check({f}); }

}  // namespace adcl
