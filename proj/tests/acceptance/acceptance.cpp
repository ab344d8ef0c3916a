#include <algorithm>
#include <chrono>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "adcl/accel.hpp"
#include "adcl/driver.hpp"
#include "oracles.hpp"

using namespace adcl;

namespace {

// time limits in seconds
constexpr double kEx1Limit = 1.0;
constexpr double kInstrumentedLimit = 2.0;
constexpr double kSatLimit = 1.0;
constexpr double kUnrollLimit = 60.0;

constexpr int kLiaInstances = 500;
constexpr int kLiaBox = 8;
constexpr int kAutomataConfigs = 200;
constexpr std::size_t kWordLength = 6;
constexpr int kFuzzProblems = 300;
constexpr int kFuzzBox = 3;
constexpr int kLoops = 100;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string bench(const std::string& name) { return read_file(std::string(ADCL_BENCH_DIR) + "/" + name); }

std::string letters(const std::vector<char>& t) { return std::string(t.begin(), t.end()); }

// witnesses collected from every unsat answer
struct Certified {
  std::string problem;
  std::string witness;
  std::string origin;
};
std::vector<Certified> unsat_witnesses;

Outcome ex1_unsat() {
  Problem p = parse_problem_or_throw(bench("ex1.smt2"));
  EngineConfig cfg;
  cfg.restarts = false;
  Engine e(p, cfg);
  auto t0 = std::chrono::steady_clock::now();
  auto v = e.run();
  double dt = seconds_since(t0);
  std::ostringstream d;
  d << answer_name(v.answer) << " in " << dt << "s, log " << letters(e.transitions());
  if (v.answer != Answer::Unsat) return {false, d.str()};
  d << ", chain of " << v.witness->chain.size();
  unsat_witnesses.push_back({bench("ex1.smt2"), write_witness(*v.witness, p), "ex1"});
  return {dt < kEx1Limit && v.witness->chain.size() == 4 && letters(e.transitions()) == "ISSASASR", d.str()};
}

Outcome instrumented_counter() {
  std::string text = instrument_text(bench("ex1.smt2"));
  Problem p = parse_problem_or_throw(text);
  EngineConfig cfg;
  auto t0 = std::chrono::steady_clock::now();
  auto out = solve_text(text, cfg);
  double dt = seconds_since(t0);
  std::ostringstream d;
  d << answer_name(out.answer) << " in " << dt << "s";
  if (out.answer != Answer::Unsat) return {false, d.str()};
  unsat_witnesses.push_back({text, out.witness, "instrumented ex1"});
  Witness w = read_witness(out.witness, p);
  const auto& last = w.def(w.chain.back());
  const Var& c = last.clause.body()->args.back();
  Int counter = w.models.back().int_value(c);
  d << ", counter at the query " << counter.get_str();
  return {dt < kInstrumentedLimit && counter == 10001, d.str()};
}

Outcome sat_variant() {
  Problem p = parse_problem_or_throw(bench("ex1_sat.smt2"));
  EngineConfig cfg;
  cfg.restarts = false;
  Engine e(p, cfg);
  auto t0 = std::chrono::steady_clock::now();
  auto v = e.run();
  double dt = seconds_since(t0);
  auto t = letters(e.transitions());
  auto backtracks = std::count(t.begin(), t.end(), 'B');
  std::ostringstream d;
  d << answer_name(v.answer) << " in " << dt << "s, log " << t << ", " << e.approximation_count()
    << " approximation events";
  return {v.answer == Answer::Sat && dt < kSatLimit && e.approximation_count() == 0 && backtracks == 3 &&
              t == "ISSASABBBP",
          d.str()};
}

bool equivalent(const Formula& a, const Formula& b) {
  return check_sat(Formula::conj(a, negate(b))).status == SmtStatus::Unsat &&
         check_sat(Formula::conj(b, negate(a))).status == SmtStatus::Unsat;
}

Clause rule_variant(const Clause& rule, long x1, long x2, long y2, long h0) {
  const auto& b = rule.body()->args;
  const auto& h = rule.head()->args;
  Model m;
  m.set(b[0], Int(x1));
  m.set(b[1], Int(x2));
  m.set(h[1], Int(y2));
  m.set(h[0], Int(h0));
  return rule.with_cond(conj_of(sip_literals(rule.cond(), m)));
}

Outcome golden_accelerations() {
  Problem p = parse_problem_or_throw(bench("ex1.smt2"));
  const Clause& rule = p.clauses.at(1);
  std::ostringstream d;
  bool ok = true;
  for (int k = 1; k <= 2; ++k) {
    Clause v = k == 1 ? rule_variant(rule, 0, 5000, 5000, 1) : rule_variant(rule, 5000, 5000, 5001, 5001);
    auto ac = accelerate(v);
    Term x1 = Term::var(ac.clause.body()->args[0]), x2 = Term::var(ac.clause.body()->args[1]);
    Term n = Term::var(ac.counter);
    Term y1 = Term::var(ac.clause.head()->args[0]), y2 = Term::var(ac.clause.head()->args[1]);
    Term want2 = k == 1 ? x2 : x2 + n;
    bool heads = std::get<Term>(ac.head_terms[0]) == x1 + n && std::get<Term>(ac.head_terms[1]) == want2;
    Formula guard = k == 1 ? Formula::cmp(x1 + n, Rel::Le, Term(5000L)) : Formula::cmp(x1, Rel::Ge, Term(5000L));
    Formula golden = Formula::conj(std::vector<Formula>{Formula::cmp(n, Rel::Gt, Term(0L)), guard,
                                                        Formula::cmp(y1, Rel::Eq, x1 + n), Formula::cmp(y2, Rel::Eq, want2)});
    bool cond = equivalent(ac.clause.cond(), golden);
    // Inv(0,5000) reaches Inv(5000,5000) in 5000 steps and no further; Inv(5000,5000) reaches Inv(10000,10000)
    Model m;
    long start = k == 1 ? 0 : 5000;
    m.set(ac.clause.body()->args[0], Int(start));
    m.set(ac.clause.body()->args[1], Int(5000));
    m.set(ac.counter, Int(5000));
    m.set(ac.clause.head()->args[0], Int(start + 5000));
    m.set(ac.clause.head()->args[1], Int(k == 1 ? 5000 : 10000));
    bool inst = oracle::holds(ac.clause.cond(), m);
    m.set(ac.counter, Int(5001));
    m.set(ac.clause.head()->args[0], Int(start + 5001));
    m.set(ac.clause.head()->args[1], Int(k == 1 ? 5000 : 10001));
    bool beyond = oracle::holds(ac.clause.cond(), m);
    bool inst_ok = inst && (k == 2 || !beyond);
    d << "phi+" << k << ": head " << (heads ? "ok" : "WRONG") << ", cond " << (cond ? "ok" : "WRONG") << ", instances "
      << (inst_ok ? "ok" : "WRONG") << "; ";
    ok = ok && heads && cond && inst_ok;
  }
  return {ok, d.str()};
}

Outcome unrolling_equivalence() {
  std::mt19937_64 rng(20240601);
  auto t0 = std::chrono::steady_clock::now();
  int checked = 0, refused = 0, attempts = 0, bad = 0;
  std::string first_bad;
  while (checked < kLoops && attempts < 20 * kLoops) {
    ++attempts;
    auto spec = oracle::random_loop(rng, static_cast<std::uint64_t>(attempts));
    AcceleratedClause ac;
    try {
      ac = accelerate(spec.clause);
    } catch (const Error&) {
      ++refused;
      continue;
    }
    ++checked;
    const auto& body = ac.clause.body()->args;
    const auto& head = ac.clause.head()->args;
    std::size_t m = body.size();
    std::vector<Int> x(m, Int(-3));
    bool more = true;
    while (more) {
      for (int n = 1; n <= 3; ++n) {
        std::vector<Int> cur = x;
        bool guards = true;
        for (int i = 0; i < n; ++i) {
          Model gm;
          for (std::size_t k = 0; k < m; ++k) gm.set(spec.body[k], cur[k]);
          if (!oracle::holds(spec.guard, gm)) guards = false;
          std::vector<Int> next;
          for (auto& f : spec.update) next.push_back(f(cur));
          cur = std::move(next);
        }
        Model lm;
        for (std::size_t k = 0; k < m; ++k) {
          lm.set(body[k], x[k]);
          lm.set(head[k], cur[k]);
        }
        lm.set(ac.counter, Int(n));
        bool got = oracle::holds(ac.clause.cond(), lm);
        lm.set(head[0], cur[0] + 1);
        bool off = oracle::holds(ac.clause.cond(), lm);
        if (got != guards || off) {
          if (!bad++) first_bad = print_clause(spec.clause) + " at n=" + std::to_string(n);
        }
      }
      more = false;
      for (std::size_t k = 0; k < m; ++k) {
        if (x[k] < 3) {
          ++x[k];
          more = true;
          break;
        }
        x[k] = -3;
      }
    }
  }
  double dt = seconds_since(t0);
  std::ostringstream d;
  d << checked << " accelerated (" << refused << " refused), " << bad << " mismatches, " << dt << "s";
  if (bad) d << "; first: " << first_bad;
  return {checked == kLoops && bad == 0 && dt < kUnrollLimit, d.str()};
}

Outcome step_smt_example() {
  Problem p = parse_problem_or_throw(bench("ex1.smt2"));
  EngineConfig cfg;
  cfg.restarts = false;
  Engine e(p, cfg);
  for (int i = 0; i < 3; ++i) e.advance();
  if (letters(e.transitions()) != "ISS") return {false, "unexpected prefix " + letters(e.transitions())};
  Clause psi1 = e.trace_clause(1).clause;
  e.advance();
  if (letters(e.transitions()) != "ISSA") return {false, "unexpected prefix " + letters(e.transitions())};
  const Clause& rule = p.clauses.at(1);
  auto q = e.build_step_smt(rule, {psi1});
  const Clause& lam = e.trace_clause(1).clause;
  auto extras = lam.extra_vars();
  if (extras.size() != 1) return {false, "learned clause has unexpected extra variables"};
  Term X1 = Term::var(lam.body()->args[0]), X2 = Term::var(lam.body()->args[1]);
  Term X1p = Term::var(lam.head()->args[0]), X2p = Term::var(lam.head()->args[1]);
  Term N = Term::var(*extras.begin());
  Term Y2 = Term::var(q.theta.at(rule.head()->args[1].id()));
  Formula target = Formula::conj(std::vector<Formula>{
      Formula::cmp(X1, Rel::Eq, Term(0L)), Formula::cmp(X2, Rel::Eq, Term(5000L)), Formula::cmp(N, Rel::Eq, Term(5000L)),
      Formula::cmp(X1p, Rel::Eq, Term(5000L)), Formula::cmp(X2p, Rel::Eq, Term(5000L)),
      Formula::cmp(Y2, Rel::Eq, Term(5001L))});
  auto sat = check_sat(q.formula);
  bool implies = check_sat(Formula::conj(q.formula, negate(target))).status == SmtStatus::Unsat;
  bool consistent = check_sat(Formula::conj(q.formula, target)).status == SmtStatus::Sat;
  std::ostringstream d;
  d << "query " << smt_status_name(sat.status) << ", forces target " << implies;
  if (sat.status != SmtStatus::Sat || !implies || !consistent) return {false, d.str()};
  Model m;
  for (auto& v : rule.all_vars()) m.set(v, sat.model.at(q.theta.at(v.id())));
  auto got = sip_literals(rule.cond(), m);
  std::map<std::string, Var> scope;
  for (auto& v : rule.all_vars()) scope.emplace(v.name(), v);
  std::vector<Literal> want;
  for (auto* s : {"(>= x1 5000)", "(= x2 (- y2 1))", "(= x1 (- h0 1))"}) want.push_back(parse_formula(s, scope).literal());
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  d << ", implicant has " << got.size() << " literals";
  return {got == want, d.str()};
}

Outcome lia_differential() {
  std::mt19937_64 rng(7);
  int disagree = 0, bad_models = 0, unknown = 0, sat = 0;
  for (int i = 0; i < kLiaInstances; ++i) {
    std::vector<Var> ints, bools;
    int ni = std::uniform_int_distribution<int>(1, 3)(rng);
    int nb = std::uniform_int_distribution<int>(0, 1)(rng);
    for (int k = 0; k < ni; ++k) ints.push_back(Var::fresh("i" + std::to_string(k), Sort::Int));
    for (int k = 0; k < nb; ++k) bools.push_back(Var::fresh("b" + std::to_string(k), Sort::Bool));
    Formula f = Formula::conj(oracle::random_formula(rng, ints, bools, 2), oracle::box_constraint(ints, -kLiaBox, kLiaBox));
    std::vector<Var> all = ints;
    all.insert(all.end(), bools.begin(), bools.end());
    auto expect = oracle::box_search(f, all, -kLiaBox, kLiaBox);
    auto r = check_sat(f, static_cast<std::uint64_t>(i));
    if (r.status == SmtStatus::Unknown) {
      ++unknown;
      continue;
    }
    if ((r.status == SmtStatus::Sat) != expect.has_value()) ++disagree;
    if (r.status == SmtStatus::Sat) {
      ++sat;
      if (!oracle::holds(f, r.model)) ++bad_models;
    }
  }
  std::ostringstream d;
  d << kLiaInstances << " instances (" << sat << " sat), " << disagree << " disagreements, " << bad_models
    << " bad models, " << unknown << " unknown";
  return {disagree == 0 && bad_models == 0 && unknown == 0, d.str()};
}

Outcome automata_enumeration() {
  std::mt19937_64 rng(11);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  int mismatches = 0, checks = 0;
  std::string first;
  for (int cfg = 0; cfg < kAutomataConfigs; ++cfg) {
    LangMap lm;
    oracle::WordOracle orc;
    std::vector<std::uint64_t> alphabet, ids;
    int na = pick(1, 3);
    for (int i = 0; i < na; ++i) {
      std::uint64_t id = static_cast<std::uint64_t>(i);
      lm.register_original(id);
      orc.add_original(id);
      alphabet.push_back(id);
      ids.push_back(id);
    }
    int nl = pick(1, 3);
    std::vector<std::uint64_t> learned;
    for (int i = 0; i < nl; ++i) {
      std::vector<std::uint64_t> word;
      int len = pick(1, 3);
      for (int k = 0; k < len; ++k) word.push_back(ids[static_cast<std::size_t>(pick(0, static_cast<int>(ids.size()) - 1))]);
      std::uint64_t id = 100 + static_cast<std::uint64_t>(i);
      lm.register_learned(id, word);
      orc.add_learned(id, word);
      ids.push_back(id);
      learned.push_back(id);
    }
    auto words = oracle::all_words(alphabet, kWordLength);
    auto note = [&](const std::string& what) {
      if (!mismatches++) first = "config " + std::to_string(cfg) + ": " + what;
    };
    std::vector<Symbol> sym;
    for (auto id : ids) {
      for (auto& w : words) {
        std::vector<Symbol> s;
        for (auto a : w) s.push_back(lm.symbol_of(a));
        ++checks;
        if (lm.language(id).accepts(s) != orc.member(id, w)) note("membership of clause " + std::to_string(id));
      }
    }
    std::map<Symbol, std::uint64_t> id_of;
    for (auto a : alphabet) id_of[lm.symbol_of(a)] = a;
    // inclusion: no counterexample up to the length bound when included,
    // otherwise the returned counterexample must be one
    auto check_inclusion = [&](const Nfa& a, const std::function<bool(const std::vector<std::uint64_t>&)>& in_a,
                               std::uint64_t b, const std::string& what) {
      ++checks;
      auto cex = inclusion_counterexample(a, lm.language(b));
      if (!cex) {
        for (auto& w : words)
          if (in_a(w) && !orc.member(b, w)) return note(what + ": missed counterexample"), true;
        return true;
      }
      std::vector<std::uint64_t> w;
      for (auto s : *cex) w.push_back(id_of.at(s));
      if (!in_a(w) || orc.member(b, w)) note(what + ": bogus counterexample");
      return false;
    };
    for (int q = 0; q < 4; ++q) {
      std::vector<std::uint64_t> word;
      int len = pick(1, 3);
      for (int k = 0; k < len; ++k) word.push_back(ids[static_cast<std::size_t>(pick(0, static_cast<int>(ids.size()) - 1))]);
      std::string ws;
      for (auto a : word) ws += " " + std::to_string(a);
      bool redundant = false, covered = false;
      for (auto b : learned) {
        if (check_inclusion(Nfa::plus(lm.word_language(word)), [&](auto& w) { return orc.member_plus(word, w); }, b,
                            "plus of" + ws))
          redundant = true;
        if (word.size() == 1 && word[0] == b) continue;
        if (check_inclusion(lm.word_language(word), [&](auto& w) { return orc.member_word(word, w); }, b, "word" + ws))
          covered = true;
      }
      ++checks;
      if (lm.accel_redundant(word) != redundant) note("accel_redundant of" + ws);
      if (lm.covering(word).has_value() != covered) note("covering of" + ws);
      if (lm.covered_check(word) != (covered && !(word.size() == 1 && lm.is_learned(word[0])))) note("covered_check of" + ws);
    }
  }
  std::ostringstream d;
  d << kAutomataConfigs << " configurations, " << checks << " checks, " << mismatches << " mismatches";
  if (mismatches) d << "; first: " << first;
  return {mismatches == 0, d.str()};
}

Outcome soundness_fuzz() {
  std::mt19937_64 rng(3);
  int unsound = 0, unknown = 0, missed_short = 0, sat = 0, unsat = 0;
  std::string first;
  for (int i = 0; i < kFuzzProblems; ++i) {
    Problem p = oracle::random_problem(rng, -kFuzzBox, kFuzzBox);
    auto truth = oracle::bfs(p, -kFuzzBox, kFuzzBox);
    EngineConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(i);
    cfg.timeout_s = 2;
    Engine e(p, cfg);
    auto v = e.run();
    if (v.answer == Answer::Unknown) {
      ++unknown;
    } else if ((v.answer == Answer::Unsat) != truth.refutable) {
      if (!unsound++) first = "problem " + std::to_string(i) + ":\n" + print_problem(p);
    } else if (v.answer == Answer::Unsat) {
      ++unsat;
      unsat_witnesses.push_back({print_problem(p), write_witness(*v.witness, p), "fuzz " + std::to_string(i)});
    } else {
      ++sat;
    }
    if (truth.refutable && truth.depth <= 6 && v.answer != Answer::Unsat) ++missed_short;
  }
  std::ostringstream d;
  d << kFuzzProblems << " problems: " << unsat << " unsat, " << sat << " sat, " << unknown << " unknown, " << unsound
    << " unsound, " << missed_short << " short refutations missed";
  if (unsound) d << "; first " << first;
  return {unsound == 0 && missed_short == 0, d.str()};
}

Outcome luby_thresholds() {
  const std::uint64_t expect[] = {10, 10, 20, 10, 10, 20, 40, 10};
  std::ostringstream d;
  bool ok = true;
  for (std::uint64_t i = 1; i <= 8; ++i) {
    auto got = restart_threshold(10, i);
    d << got << (i < 8 ? "," : "");
    ok = ok && got == expect[i - 1] && got == 10 * oracle::luby_by_doubling(i);
  }
  for (std::uint64_t i = 1; i <= 200; ++i) ok = ok && luby(i) == oracle::luby_by_doubling(i);
  return {ok, d.str()};
}

Outcome witnesses_check() {
  int failed = 0;
  std::size_t ex1_ground = 0, ex1_expanded = 0;
  std::string first;
  for (auto& c : unsat_witnesses) {
    auto rep = check_witness_text(c.problem, c.witness);
    if (!rep.ok && !failed++) first = c.origin + ": " + rep.reason;
    if (c.origin == "ex1") {
      ex1_ground = rep.ground_steps;
      auto expanded = expand_witness_text(c.problem, c.witness);
      auto rep2 = check_witness_text(c.problem, expanded);
      if (!rep2.ok && !failed++) first = "expanded ex1: " + rep2.reason;
      ex1_expanded = rep2.ground_steps;
    }
  }
  std::ostringstream d;
  d << unsat_witnesses.size() << " witnesses, " << failed << " rejected, ex1 expands to " << ex1_ground
    << " ground clauses (" << (ex1_ground ? ex1_ground - 1 : 0) << " resolution steps)";
  if (failed) d << "; first: " << first;
  return {failed == 0 && !unsat_witnesses.empty() && ex1_ground == 10002 && ex1_expanded == 10002, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  // optional arguments select criteria by number
  std::set<std::size_t> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoul(argv[i]));
  std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"ex1 unsat with the expected derivation", ex1_unsat},
      {"instrumented ex1 counter", instrumented_counter},
      {"sat variant with three backtracks", sat_variant},
      {"golden accelerated clauses", golden_accelerations},
      {"unrolling equivalence of random loops", unrolling_equivalence},
      {"step query with a blocked implicant", step_smt_example},
      {"LIA differential against box enumeration", lia_differential},
      {"automata against word enumeration", automata_enumeration},
      {"soundness fuzz against BFS", soundness_fuzz},
      {"Luby restart thresholds", luby_thresholds},
      {"unsat witnesses pass the checker", witnesses_check},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (!only.empty() && !only.count(i + 1)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": " << o.detail
              << std::endl;
    if (!o.pass) ++failed;
  }
  return failed ? 1 : 0;
}
