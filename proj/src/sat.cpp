#include "sat.hpp"

#include <algorithm>

#include "adcl/error.hpp"

namespace adcl::sat {

namespace {
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

int Solver::new_var(bool preferred_phase) {
  int v = num_vars();
  assign_.push_back(-1);
  level_.push_back(0);
  reason_.push_back(-1);
  std::uint64_t h = seed_ ? mix(seed_ ^ mix(static_cast<std::uint64_t>(v) + 7)) : 0;
  phase_.push_back(seed_ && (h & 1) ? !preferred_phase : preferred_phase);
  activity_.push_back(0.0);
  // without a seed, earlier variables are decided first
  tiebreak_.push_back(seed_ ? h >> 1 : static_cast<std::uint64_t>(v));
  watches_.emplace_back();
  watches_.emplace_back();
  return v;
}

void Solver::enqueue(int lit, int reason) {
  int v = lit_var(lit);
  assign_[v] = lit_neg(lit) ? 0 : 1;
  level_[v] = static_cast<int>(trail_lim_.size());
  reason_[v] = reason;
  trail_.push_back(lit);
}

void Solver::attach(int ci) {
  auto& c = clauses_[ci];
  watches_[c[0]].push_back(ci);
  watches_[c[1]].push_back(ci);
}

void Solver::add_clause(std::vector<int> lits) {
  if (unsat_) return;
  backtrack(0);
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  std::vector<int> keep;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (i + 1 < lits.size() && lits[i + 1] == (lits[i] ^ 1)) return;  // tautology
    int val = lit_value(lits[i]);
    if (val == 1) return;
    if (val == 0) continue;
    keep.push_back(lits[i]);
  }
  if (keep.empty()) {
    unsat_ = true;
    return;
  }
  if (keep.size() == 1) {
    enqueue(keep[0], -1);
    if (propagate() >= 0) unsat_ = true;
    return;
  }
  clauses_.push_back(std::move(keep));
  attach(static_cast<int>(clauses_.size() - 1));
}

int Solver::propagate() {
  while (qhead_ < trail_.size()) {
    int p = trail_[qhead_++];
    int false_lit = p ^ 1;
    auto& ws = watches_[false_lit];
    std::size_t i = 0, j = 0;
    int confl = -1;
    while (i < ws.size()) {
      int ci = ws[i++];
      auto& c = clauses_[ci];
      if (c[0] == false_lit) std::swap(c[0], c[1]);
      if (lit_value(c[0]) == 1) {
        ws[j++] = ci;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.size(); ++k)
        if (lit_value(c[k]) != 0) {
          std::swap(c[1], c[k]);
          watches_[c[1]].push_back(ci);
          moved = true;
          break;
        }
      if (moved) continue;
      ws[j++] = ci;
      if (lit_value(c[0]) == 0) {
        confl = ci;
        while (i < ws.size()) ws[j++] = ws[i++];
      } else {
        enqueue(c[0], ci);
      }
    }
    ws.resize(j);
    if (confl >= 0) return confl;
  }
  return -1;
}

void Solver::bump(int var) {
  activity_[var] += inc_;
  if (activity_[var] > 1e100) {
    for (auto& a : activity_) a *= 1e-100;
    inc_ *= 1e-100;
  }
}

void Solver::analyze(int confl, std::vector<int>& learnt, int& bt_level) {
  std::vector<char> seen(assign_.size(), 0);
  int counter = 0;
  int p = -1;
  std::size_t idx = trail_.size();
  learnt.assign(1, 0);
  int cur = static_cast<int>(trail_lim_.size());
  do {
    auto& c = clauses_[confl];
    for (std::size_t k = (p == -1 ? 0 : 1); k < c.size(); ++k) {
      int q = c[k];
      int v = lit_var(q);
      if (seen[v] || level_[v] == 0) continue;
      seen[v] = 1;
      bump(v);
      if (level_[v] >= cur)
        ++counter;
      else
        learnt.push_back(q);
    }
    while (!seen[lit_var(trail_[--idx])]) {
    }
    p = trail_[idx];
    confl = reason_[lit_var(p)];
    seen[lit_var(p)] = 0;
    --counter;
    if (confl >= 0 && counter > 0) {
      // the reason clause lists p first
      auto& rc = clauses_[confl];
      auto it = std::find(rc.begin(), rc.end(), p);
      std::swap(*it, rc[0]);
    }
  } while (counter > 0);
  learnt[0] = p ^ 1;
  bt_level = 0;
  std::size_t max_i = 1;
  for (std::size_t k = 1; k < learnt.size(); ++k)
    if (level_[lit_var(learnt[k])] > bt_level) {
      bt_level = level_[lit_var(learnt[k])];
      max_i = k;
    }
  if (learnt.size() > 1) std::swap(learnt[1], learnt[max_i]);
  inc_ *= 1.05;
}

void Solver::backtrack(int level) {
  if (static_cast<int>(trail_lim_.size()) <= level) return;
  for (std::size_t i = trail_.size(); i > static_cast<std::size_t>(trail_lim_[level]); --i) {
    int v = lit_var(trail_[i - 1]);
    phase_[v] = assign_[v] == 1;
    assign_[v] = -1;
    reason_[v] = -1;
  }
  trail_.resize(trail_lim_[level]);
  trail_lim_.resize(level);
  qhead_ = trail_.size();
}

int Solver::pick_branch() {
  int best = -1;
  for (int v = 0; v < num_vars(); ++v) {
    if (assign_[v] >= 0) continue;
    if (best < 0 || activity_[v] > activity_[best] ||
        (activity_[v] == activity_[best] && tiebreak_[v] < tiebreak_[best]))
      best = v;
  }
  return best;
}

bool Solver::solve(const std::atomic<bool>* cancel) {
  if (unsat_) return false;
  backtrack(0);
  if (propagate() >= 0) {
    unsat_ = true;
    return false;
  }
  std::size_t steps = 0;
  while (true) {
    if (cancel && (++steps & 255) == 0 && cancel->load(std::memory_order_relaxed))
      throw Error(ErrorKind::Cancelled, "cancelled");
    int confl = propagate();
    if (confl >= 0) {
      if (trail_lim_.empty()) {
        unsat_ = true;
        return false;
      }
      std::vector<int> learnt;
      int bt = 0;
      analyze(confl, learnt, bt);
      backtrack(bt);
      if (learnt.size() == 1) {
        enqueue(learnt[0], -1);
      } else {
        clauses_.push_back(learnt);
        int ci = static_cast<int>(clauses_.size() - 1);
        attach(ci);
        enqueue(learnt[0], ci);
      }
      continue;
    }
    int v = pick_branch();
    if (v < 0) return true;
    trail_lim_.push_back(static_cast<int>(trail_.size()));
    enqueue(mk_lit(v, !phase_[v]), -1);
  }
}

}  // namespace adcl::sat
