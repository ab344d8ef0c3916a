#pragma once

#include <atomic>
#include <cstdint>
#include <vector>

namespace adcl::sat {

// Literals are 2 * var + (negated ? 1 : 0).
inline int mk_lit(int var, bool negated = false) { return 2 * var + (negated ? 1 : 0); }
inline int lit_var(int lit) { return lit >> 1; }
inline bool lit_neg(int lit) { return lit & 1; }

// Small CDCL solver: two watched literals, first-UIP learning, activity-based
// decisions, phase saving. Clauses may be added between calls to solve().
class Solver {
 public:
  explicit Solver(std::uint64_t seed = 0) : seed_(seed) {}

  int new_var(bool preferred_phase = true);
  int num_vars() const { return static_cast<int>(assign_.size()); }
  void add_clause(std::vector<int> lits);
  // false: unsatisfiable; throws Error(Cancelled) when the flag is raised
  bool solve(const std::atomic<bool>* cancel = nullptr);
  bool value(int var) const { return assign_[var] == 1; }

 private:
  int lit_value(int lit) const {
    int a = assign_[lit_var(lit)];
    if (a < 0) return -1;
    return lit_neg(lit) ? 1 - a : a;
  }
  void enqueue(int lit, int reason);
  int propagate();
  void analyze(int confl, std::vector<int>& learnt, int& bt_level);
  void backtrack(int level);
  int pick_branch();
  void attach(int ci);
  void bump(int var);

  std::uint64_t seed_;
  bool unsat_ = false;
  std::vector<std::vector<int>> clauses_;
  std::vector<std::vector<int>> watches_;
  std::vector<int> assign_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<bool> phase_;
  std::vector<double> activity_;
  std::vector<std::uint64_t> tiebreak_;
  std::vector<int> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;
  double inc_ = 1.0;
};

}  // namespace adcl::sat
