#include "adcl/engine.hpp"

#include <algorithm>
#include <condition_variable>
#include <mutex>
#include <random>
#include <thread>

#include "json.hpp"

#include "adcl/accel.hpp"

namespace adcl {

std::uint64_t luby(std::uint64_t i) {
  if (i == 0) throw std::invalid_argument("luby is 1-indexed");
  for (;;) {
    std::uint64_t k = 1;
    while ((std::uint64_t{1} << k) - 1 < i) ++k;
    if ((std::uint64_t{1} << k) - 1 == i) return std::uint64_t{1} << (k - 1);
    i -= (std::uint64_t{1} << (k - 1)) - 1;
  }
}

const char* answer_name(Answer a) {
  switch (a) {
    case Answer::Sat: return "sat";
    case Answer::Unsat: return "unsat";
    case Answer::Unknown: return "unknown";
  }
  return "?";
}

namespace {

Formula rename(const Formula& f, const Renaming& r) {
  Substitution s;
  for (auto& v : vars_of(f)) {
    auto it = r.find(v.id());
    if (it != r.end()) s.rename(v, it->second);
  }
  return apply_subst(f, s);
}

std::vector<Var> rename(const std::vector<Var>& vs, const Renaming& r) {
  std::vector<Var> out;
  for (auto& v : vs) {
    auto it = r.find(v.id());
    out.push_back(it == r.end() ? v : it->second);
  }
  return out;
}

Model project(const Clause& c, const Renaming& theta, const Model& m) {
  Model out;
  for (auto& v : c.all_vars()) {
    auto it = theta.find(v.id());
    const Var& t = it == theta.end() ? v : it->second;
    if (auto* val = m.find(t)) out.set(v, *val);
  }
  return out;
}

}  // namespace

Engine::Engine(const Problem& p, EngineConfig cfg) : cfg_(std::move(cfg)), solver_(cfg_.seed), seed_(cfg_.seed), depth_bound_(cfg_.depth_bound) {
  if (cfg_.restart_scale == 0) throw std::invalid_argument("restart scale must be positive");
  for (auto& c : p.clauses) {
    originals_.emplace(c.id(), c);
    order_.push_back(store_.size());
    store_.push_back({c, c.id(), c.id(), false});
  }
  if (!cfg_.smt_cmd.empty()) solver_.set_external(make_external_backend(cfg_.smt_cmd, cfg_.smt_timeout_s));
  solver_.set_cancel(&cancel_);
  blocking_.emplace_back();
}

std::size_t Engine::approximation_count() const {
  std::size_t n = 0;
  for (auto& [k, v] : approx_since_restart_) n += v;
  return n;
}

std::vector<Clause> Engine::learned() const {
  std::vector<Clause> out;
  for (auto& tc : store_)
    if (tc.learned) out.push_back(tc.clause);
  return out;
}

Formula Engine::trace_condition() const {
  std::vector<Formula> fs;
  for (auto& e : trace_) fs.push_back(e.frame);
  return Formula::conj(fs);
}

void Engine::approximation(const std::string& why) {
  ++approx_[why];
  ++approx_since_restart_[why];
}

void Engine::log(char rule, std::optional<std::uint64_t> clause, const char* solver) {
  transitions_.push_back(rule);
  if (!cfg_.log) return;
  nlohmann::json j;
  j["rule"] = std::string(1, rule);
  j["clause"] = clause ? nlohmann::json(*clause) : nlohmann::json(nullptr);
  j["depth"] = trace_.size();
  j["solver"] = solver;
  *cfg_.log << j.dump() << '\n';
}

bool Engine::interrupted() {
  if (cfg_.cancel && cfg_.cancel->load()) cancel_ = true;
  if (cfg_.timeout_s > 0 && std::chrono::steady_clock::now() >= deadline_) cancel_ = true;
  return cancel_.load();
}

void Engine::finish(Answer a, std::string reason) { verdict_ = Verdict{a, std::move(reason), std::nullopt}; }

Renaming Engine::step_renaming(const Clause& cand) const {
  Renaming theta;
  if (cand.body()) {
    auto& head = trace_.back().head;
    for (std::size_t i = 0; i < head.size(); ++i) theta.emplace(cand.body()->args[i].id(), head[i]);
  }
  for (auto& v : cand.all_vars()) theta.emplace(v.id(), Var::fresh_like(v));
  return theta;
}

Formula Engine::step_extra(const Clause& cand, const Renaming& theta, const std::vector<TraceClause>& blocked,
                           bool exclude_covered) {
  std::vector<Formula> fs{rename(cand.cond(), theta)};
  for (auto& pi : blocked)
    if (!pi.learned && pi.source == cand.id()) fs.push_back(negate(rename(pi.clause.cond(), theta)));
  if (exclude_covered) {
    auto it = symbols_of_.find(cand.id());
    if (it != symbols_of_.end())
      for (auto key : it->second) {
        auto by = lang_.covering({key});
        if (!by) continue;
        const TraceClause* sym = nullptr;
        for (auto& [k, tc] : symbols_)
          if (tc.key == key) sym = &tc;
        const TraceClause* lam = nullptr;
        for (auto& tc : store_)
          if (tc.learned && tc.key == *by) lam = &tc;
        if (!sym || !lam) continue;
        auto strict = strictly_covers(*lam, *sym);
        if (strict && *strict) fs.push_back(negate(rename(sym->clause.cond(), theta)));
      }
  }
  return Formula::conj(fs);
}

StepQuery Engine::build_step_smt(const Clause& cand, const std::vector<Clause>& blocked) {
  std::vector<TraceClause> bs;
  for (auto& b : blocked) bs.push_back({b, b.parent().value_or(b.id()), b.id(), b.origin().learned});
  StepQuery q;
  q.theta = step_renaming(cand);
  auto fs = solver_.frames();
  fs.push_back(step_extra(cand, q.theta, bs, false));
  q.formula = Formula::conj(fs);
  return q;
}

StepQuery Engine::build_step_smt(const Clause& cand) {
  StepQuery q;
  q.theta = step_renaming(cand);
  auto fs = solver_.frames();
  fs.push_back(step_extra(cand, q.theta, blocking_.back(), true));
  q.formula = Formula::conj(fs);
  return q;
}

const TraceClause& Engine::variant(const Clause& orig, std::vector<Literal> sip) {
  std::sort(sip.begin(), sip.end());
  sip.erase(std::unique(sip.begin(), sip.end()), sip.end());
  auto key = std::make_pair(orig.id(), sip);
  auto it = symbols_.find(key);
  if (it != symbols_.end()) return it->second;
  Clause v = orig.with_cond(conj_of(sip));
  lang_.register_original(v.id());
  symbols_of_[orig.id()].push_back(v.id());
  return symbols_.emplace(key, TraceClause{v, orig.id(), v.id(), false}).first->second;
}

std::optional<bool> Engine::strictly_covers(const TraceClause& lam, const TraceClause& pi) {
  auto ck = std::make_pair(pi.key, lam.key);
  if (auto it = strict_cache_.find(ck); it != strict_cache_.end()) return it->second;
  std::optional<bool> res;
  const Clause& l = lam.clause;
  const Clause& c = pi.clause;
  if (l.body() && c.body() && l.head() && c.head()) {
    VarSet keep(c.body()->args.begin(), c.body()->args.end());
    keep.insert(c.head()->args.begin(), c.head()->args.end());
    auto el = eliminate_defined(literals_of(c.cond()), keep);
    bool closed = !el.inconsistent;
    for (auto& lit : el.rest) {
      VarSet vs;
      lit.collect_vars(vs);
      for (auto& v : vs)
        if (!keep.count(v)) closed = false;
    }
    // argument lists may repeat variables: align through equalities
    Substitution s;
    std::vector<Formula> align;
    std::map<std::uint64_t, Var> seen;
    auto bind = [&](const Var& from, const Var& to) {
      auto [it, fresh] = seen.emplace(from.id(), to);
      if (fresh) {
        s.rename(from, to);
      } else if (to.sort() == Sort::Int) {
        align.push_back(Formula::cmp(Term::var(it->second), Rel::Eq, Term::var(to)));
      } else {
        align.push_back(Formula::disj(Formula::conj(Formula::lit(Literal::boolean(it->second)), Formula::lit(Literal::boolean(to))),
                                      Formula::conj(Formula::lit(Literal::boolean(it->second, false)),
                                                    Formula::lit(Literal::boolean(to, false)))));
      }
    };
    if (closed) {
      for (std::size_t i = 0; i < c.body()->args.size(); ++i) bind(c.body()->args[i], l.body()->args[i]);
      for (std::size_t i = 0; i < c.head()->args.size(); ++i) bind(c.head()->args[i], l.head()->args[i]);
      std::vector<Formula> rest;
      if (!el.inconsistent)
        for (auto& lit : el.rest) rest.push_back(apply_subst(lit, s));
      align.push_back(Formula::conj(rest));
      Formula pi_args = Formula::conj(align);
      auto r = check_sat(Formula::conj(l.cond(), negate(pi_args)), seed_);
      ++stats_.smt_checks;
      if (r.status == SmtStatus::Sat) res = true;
      if (r.status == SmtStatus::Unsat) res = false;
    }
  }
  strict_cache_.emplace(ck, res);
  return res;
}

void Engine::bt() {
  Entry e = std::move(trace_.back());
  trace_.pop_back();
  blocking_.pop_back();
  solver_.pop();
  blocking_.back().push_back(e.tc);
}

bool Engine::try_covered() {
  std::size_t k = trace_.size();
  std::size_t lo = k;
  while (lo > 0 && trace_[lo - 1].version == store_version_) --lo;
  for (std::size_t j = k; j-- > lo;) {
    std::vector<std::uint64_t> word;
    for (std::size_t i = j; i < k; ++i) word.push_back(trace_[i].tc.key);
    if (!lang_.covered_check(word)) continue;
    if (word.size() == 1) {
      auto by = lang_.covering(word);
      const TraceClause* lam = nullptr;
      for (auto& tc : store_)
        if (tc.learned && tc.key == *by) lam = &tc;
      auto strict = strictly_covers(*lam, trace_[j].tc);
      if (strict && !*strict) continue;
      if (!strict) approximation("heuristic-strict-redundancy");
    }
    auto id = trace_.back().tc.key;
    bt();
    ++stats_.covered;
    log('C', id, "none");
    return true;
  }
  return false;
}

bool Engine::try_accelerate() {
  std::size_t k = trace_.size();
  if (k == 0) return false;
  const auto& last = trace_.back();
  if (!last.tc.clause.head()) return false;
  for (std::size_t j = k; j-- > 0;) {
    if (interrupted()) throw Error(ErrorKind::Cancelled, "interrupted");
    const auto& first = trace_[j];
    if (!first.tc.clause.body() || first.tc.clause.body()->pred->id != last.tc.clause.head()->pred->id) continue;
    std::vector<std::uint64_t> word;
    std::vector<TraceClause> sources;
    std::vector<Formula> conds;
    for (std::size_t i = j; i < k; ++i) {
      word.push_back(trace_[i].tc.key);
      sources.push_back(trace_[i].tc);
      conds.push_back(trace_[i].frame);
    }
    if (lang_.accel_redundant(word)) {
      ++stats_.redundant;
      continue;
    }
    PredApp body{first.tc.clause.body()->pred, rename(first.tc.clause.body()->args, first.theta)};
    PredApp head{last.tc.clause.head()->pred, last.head};
    Clause loop(fresh_clause_id(), body, Formula::conj(conds), head, Origin{true});
    AcceleratedClause ac;
    try {
      ac = accelerate(loop, AccelOptions{solver_.has_external(), seed_});
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Cancelled) throw;
      ++stats_.refusals;
      continue;
    }
    std::vector<Formula> fs(solver_.frames().begin(), solver_.frames().begin() + static_cast<long>(j));
    fs.push_back(ac.clause.cond());
    ++stats_.smt_checks;
    auto r = solver_.check_formulas(fs);
    if (r.status == SmtStatus::Unsat) return false;
    if (r.status == SmtStatus::Unknown) {
      if (!interrupted()) approximation("solver-unknown");
      return false;
    }
    model_ = r.model;
    trace_.resize(j);
    blocking_.resize(j + 1);
    solver_.pop(k - j);
    TraceClause tc{ac.clause, ac.clause.id(), ac.clause.id(), true};
    Renaming id;
    for (auto& v : ac.clause.all_vars()) id.emplace(v.id(), v);
    trace_.push_back(Entry{tc, id, ac.clause.cond(), ac.clause.head()->args, store_version_ + 1});
    solver_.push(ac.clause.cond());
    blocking_.push_back({tc});
    order_.push_back(store_.size());
    store_.push_back(tc);
    learned_info_.emplace(tc.key, LearnedInfo{sources, ac.counter});
    lang_.register_learned(tc.key, word);
    ++store_version_;
    ++learned_since_restart_;
    ++stats_.accelerations;
    log('A', tc.key, "sat");
    return true;
  }
  return false;
}

bool Engine::try_step() {
  std::optional<std::uint32_t> want;
  if (!trace_.empty()) want = trace_.back().tc.clause.head()->pred->id;
  const auto& top = blocking_.back();
  for (auto idx : order_) {
    const TraceClause& cand = store_[idx];
    const Clause& c = cand.clause;
    if (want ? !c.body() || c.body()->pred->id != *want : c.body().has_value()) continue;
    if (cand.learned &&
        std::any_of(top.begin(), top.end(), [&](const TraceClause& b) { return b.learned && b.key == cand.key; }))
      continue;
    Renaming theta = step_renaming(c);
    Formula extra = cand.learned ? rename(c.cond(), theta) : step_extra(c, theta, top, true);
    ++stats_.smt_checks;
    auto r = solver_.check_with(extra);
    if (r.status == SmtStatus::Unsat) continue;
    if (r.status == SmtStatus::Unknown) {
      if (interrupted()) return false;
      approximation("solver-unknown");
      continue;
    }
    model_ = r.model;
    TraceClause tc = cand;
    if (!cand.learned) tc = variant(c, sip_literals(c.cond(), project(c, theta, r.model)));
    Formula frame = rename(tc.clause.cond(), theta);
    std::vector<Var> head = c.head() ? rename(c.head()->args, theta) : std::vector<Var>{};
    trace_.push_back(Entry{tc, std::move(theta), frame, std::move(head), store_version_});
    solver_.push(frame);
    blocking_.emplace_back();
    ++stats_.steps;
    log('S', tc.key, "sat");
    return true;
  }
  return false;
}

void Engine::restart() {
  trace_.clear();
  blocking_.assign(1, {});
  solver_.clear();
  seed_ = std::mt19937_64(seed_ + 0x9e3779b97f4a7c15ULL)();
  solver_.set_seed(seed_);
  std::mt19937_64 rng(seed_);
  for (std::size_t i = order_.size(); i > 1; --i) std::swap(order_[i - 1], order_[rng() % i]);
  learned_since_restart_ = 0;
  approx_since_restart_.clear();
  ++restart_index_;
  ++stats_.restarts;
  log('X', std::nullopt, "none");
}

void Engine::refute() {
  Witness w;
  std::map<std::uint64_t, std::string> names;
  std::size_t nv = 0, nl = 0;
  std::function<std::string(const TraceClause&)> define = [&](const TraceClause& tc) -> std::string {
    if (auto it = names.find(tc.key); it != names.end()) return it->second;
    WitnessClause d;
    d.clause = tc.clause;
    if (tc.learned) {
      auto& info = learned_info_.at(tc.key);
      for (auto& s : info.sources) d.source.push_back(define(s));
      d.name = "L" + std::to_string(nl++);
      d.learned = true;
      d.counter = info.counter;
      d.scope = canonical_scope(tc.clause);
    } else {
      d.name = "V" + std::to_string(nv++);
      d.original = tc.source;
      d.scope = canonical_scope(originals_.at(tc.source));
    }
    names.emplace(tc.key, d.name);
    w.defs.push_back(d);
    return d.name;
  };
  for (auto& e : trace_) {
    w.chain.push_back(define(e.tc));
    w.models.push_back(project(e.tc.clause, e.theta, model_));
  }
  verdict_ = Verdict{Answer::Unsat, "", std::move(w)};
}

std::optional<char> Engine::advance() {
  if (verdict_) return std::nullopt;
  if (!started_) {
    started_ = true;
    deadline_ = std::chrono::steady_clock::now() + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                        std::chrono::duration<double>(cfg_.timeout_s));
    log('I', std::nullopt, "none");
    return 'I';
  }
  if (interrupted()) {
    finish(Answer::Unknown, cfg_.cancel && cfg_.cancel->load() ? "Cancelled" : "Timeout");
    return std::nullopt;
  }
  if (cfg_.max_transitions && transitions_.size() >= cfg_.max_transitions) {
    finish(Answer::Unknown, "TransitionLimit");
    return std::nullopt;
  }
  if (cfg_.restarts && learned_since_restart_ >= restart_threshold(cfg_.restart_scale, restart_index_)) {
    restart();
    return transitions_.back();
  }
  if (!trace_.empty() && !trace_.back().tc.clause.head()) {
    log('R', trace_.back().tc.key, "sat");
    refute();
    return 'R';
  }
  try {
    if (try_covered() || try_accelerate()) return transitions_.back();
    if (depth_bound_ && trace_.size() >= depth_bound_) {
      approximation("depth-bound");
      ++stats_.depth_cuts;
      ++learned_since_restart_;
      auto id = trace_.back().tc.key;
      bt();
      ++stats_.backtracks;
      log('B', id, "none");
      return 'B';
    }
    if (try_step()) return transitions_.back();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Cancelled) throw;
  }
  if (interrupted()) {
    finish(Answer::Unknown, cfg_.cancel && cfg_.cancel->load() ? "Cancelled" : "Timeout");
    return std::nullopt;
  }
  if (trace_.empty()) {
    if (approx_since_restart_.size() == 1 && approx_since_restart_.count("depth-bound")) {
      depth_bound_ *= 2;
      restart();
      return 'X';
    }
    log('P', std::nullopt, "unsat");
    if (approximation_count() == 0 && cfg_.claim_sat)
      finish(Answer::Sat, "");
    else
      finish(Answer::Unknown, approximation_count() ? "ProveReachedWithApproximations" : "SatClaimDisabled");
    return 'P';
  }
  auto id = trace_.back().tc.key;
  bt();
  ++stats_.backtracks;
  log('B', id, "unsat");
  return 'B';
}

Verdict Engine::run() {
  std::mutex mu;
  std::condition_variable cv;
  bool stop = false;
  std::thread watchdog;
  if (cfg_.timeout_s > 0 || cfg_.cancel) {
    auto limit = std::chrono::steady_clock::now() + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                        std::chrono::duration<double>(cfg_.timeout_s));
    watchdog = std::thread([&, limit] {
      std::unique_lock lk(mu);
      while (!stop) {
        if (cfg_.timeout_s > 0 && std::chrono::steady_clock::now() >= limit) cancel_ = true;
        if (cfg_.cancel && cfg_.cancel->load()) cancel_ = true;
        cv.wait_for(lk, std::chrono::milliseconds(10));
      }
    });
  }
  try {
    while (!verdict_) advance();
  } catch (...) {
    {
      std::lock_guard lk(mu);
      stop = true;
    }
    cv.notify_all();
    if (watchdog.joinable()) watchdog.join();
    throw;
  }
  {
    std::lock_guard lk(mu);
    stop = true;
  }
  cv.notify_all();
  if (watchdog.joinable()) watchdog.join();
  return *verdict_;
}

}  // namespace adcl
