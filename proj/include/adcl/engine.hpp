#pragma once

#include <atomic>
#include <chrono>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "adcl/automata.hpp"
#include "adcl/chc.hpp"
#include "adcl/smt.hpp"
#include "adcl/witness.hpp"

namespace adcl {

// 1, 1, 2, 1, 1, 2, 4, 1, ... (1-indexed)
std::uint64_t luby(std::uint64_t i);
// learned clauses between restart i-1 and restart i
inline std::uint64_t restart_threshold(std::uint64_t u, std::uint64_t i) { return u * luby(i); }

struct EngineConfig {
  double timeout_s = 0;  // 0: no limit
  std::uint64_t seed = 0;
  std::uint64_t restart_scale = 10;
  bool restarts = true;
  bool claim_sat = true;
  // empty: built-in backend only
  std::string smt_cmd;
  double smt_timeout_s = 10;
  std::size_t max_transitions = 0;  // 0: no limit
  // initial bound on the trace length, doubled whenever it cut a search
  // that would otherwise have ended in Prove; 0: unbounded
  std::size_t depth_bound = 16;
  std::ostream* log = nullptr;
  const std::atomic<bool>* cancel = nullptr;
};

enum class Answer { Sat, Unsat, Unknown };
const char* answer_name(Answer a);

struct Verdict {
  Answer answer = Answer::Unknown;
  // Unknown: ProveReachedWithApproximations, Timeout, Cancelled, TransitionLimit, SolverFailure
  std::string reason;
  std::optional<Witness> witness;
};

struct EngineStats {
  std::size_t steps = 0, accelerations = 0, covered = 0, backtracks = 0, restarts = 0;
  std::size_t refusals = 0, redundant = 0, smt_checks = 0, depth_cuts = 0;
};

// Clause as it appears in the trace or a blocking set: a sip variant of an
// input clause or a learned clause.
struct TraceClause {
  Clause clause;
  // input clause id, or the learned clause's own id
  std::uint64_t source = 0;
  // language key: variant clause id or learned clause id
  std::uint64_t key = 0;
  bool learned = false;
};

struct StepQuery {
  Formula formula;
  Renaming theta;
};

class Engine {
 public:
  explicit Engine(const Problem& p, EngineConfig cfg = {});

  Verdict run();
  // performs one transition and returns its letter (I S A C B R P, X for a
  // restart); nullopt once a verdict exists
  std::optional<char> advance();
  const std::optional<Verdict>& verdict() const { return verdict_; }

  const std::vector<char>& transitions() const { return transitions_; }
  const EngineStats& stats() const { return stats_; }
  // all events of the run
  const std::map<std::string, std::size_t>& approximations() const { return approx_; }
  // events since the last restart; sat needs zero
  std::size_t approximation_count() const;
  std::size_t depth_bound() const { return depth_bound_; }

  std::size_t trace_size() const { return trace_.size(); }
  const TraceClause& trace_clause(std::size_t i) const { return trace_.at(i).tc; }
  const std::vector<TraceClause>& blocked(std::size_t i) const { return blocking_.at(i); }
  std::size_t blocking_size() const { return blocking_.size(); }
  std::vector<Clause> learned() const;
  const LangMap& langmap() const { return lang_; }
  const Model& model() const { return model_; }
  Formula trace_condition() const;

  // Step query for `cand` against the current trace, with `blocked` as the
  // top blocking set and no exclusion of covered variants.
  StepQuery build_step_smt(const Clause& cand, const std::vector<Clause>& blocked);
  StepQuery build_step_smt(const Clause& cand);

 private:
  struct Entry {
    TraceClause tc;
    Renaming theta;
    Formula frame;
    std::vector<Var> head;
    std::uint64_t version = 0;
  };
  struct LearnedInfo {
    std::vector<TraceClause> sources;
    Var counter;
  };

  bool try_covered();
  bool try_accelerate();
  bool try_step();
  void bt();
  void restart();
  void refute();
  void finish(Answer a, std::string reason);

  Renaming step_renaming(const Clause& cand) const;
  Formula step_extra(const Clause& cand, const Renaming& theta, const std::vector<TraceClause>& blocked,
                     bool exclude_covered);
  const TraceClause& variant(const Clause& orig, std::vector<Literal> sip);
  std::optional<bool> strictly_covers(const TraceClause& learned, const TraceClause& pi);
  void approximation(const std::string& why);
  void log(char rule, std::optional<std::uint64_t> clause, const char* solver);
  bool interrupted();

  EngineConfig cfg_;
  std::map<std::uint64_t, Clause> originals_;
  std::vector<TraceClause> store_;
  std::vector<std::size_t> order_;
  std::map<std::uint64_t, LearnedInfo> learned_info_;
  std::map<std::pair<std::uint64_t, std::vector<Literal>>, TraceClause> symbols_;
  std::map<std::uint64_t, std::vector<std::uint64_t>> symbols_of_;
  std::map<std::pair<std::uint64_t, std::uint64_t>, std::optional<bool>> strict_cache_;
  LangMap lang_;

  std::vector<Entry> trace_;
  std::vector<std::vector<TraceClause>> blocking_;
  SolverStack solver_;
  Model model_;
  std::uint64_t store_version_ = 0;

  std::uint64_t seed_;
  std::uint64_t restart_index_ = 1;
  // learned clauses plus depth cuts
  std::size_t learned_since_restart_ = 0;

  std::vector<char> transitions_;
  EngineStats stats_;
  std::map<std::string, std::size_t> approx_;
  std::map<std::string, std::size_t> approx_since_restart_;
  std::size_t depth_bound_;
  std::optional<Verdict> verdict_;
  bool started_ = false;

  std::atomic<bool> cancel_{false};
  std::chrono::steady_clock::time_point deadline_;
};

}  // namespace adcl
