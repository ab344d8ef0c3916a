#pragma once

// Test-only reference implementations. Nothing here calls the solver,
// the accelerator or the automata code.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "adcl/chc.hpp"

namespace oracle {

using adcl::Formula;
using adcl::Int;
using adcl::Model;
using adcl::Var;

Int value_of(const adcl::Term& t, const Model& m);
bool holds(const adcl::Literal& l, const Model& m);
bool holds(const Formula& f, const Model& m);

// exhaustive search over [lo, hi] for the Int variables and both values for
// the Bool variables
std::optional<Model> box_search(const Formula& f, const std::vector<Var>& vars, int lo, int hi);

// Ground reachability of a query over states whose Int arguments lie in
// [lo, hi]; every clause variable ranges over the same box.
struct Reachability {
  bool refutable = false;
  // length of a shortest ground refutation (in clauses)
  std::size_t depth = 0;
};
Reachability bfs(const adcl::Problem& p, int lo, int hi);

// Languages over input clause ids: original ids stand for themselves,
// learned ids for (source word)^+.
class WordOracle {
 public:
  void add_original(std::uint64_t id) { originals_.insert(id); }
  void add_learned(std::uint64_t id, std::vector<std::uint64_t> word) { learned_[id] = std::move(word); }
  bool member(std::uint64_t id, const std::vector<std::uint64_t>& w) const;
  bool member_word(const std::vector<std::uint64_t>& lang_word, const std::vector<std::uint64_t>& w) const;
  bool member_plus(const std::vector<std::uint64_t>& lang_word, const std::vector<std::uint64_t>& w) const;

 private:
  bool seq(const std::vector<std::uint64_t>& parts, std::size_t pi, const std::vector<std::uint64_t>& w,
           std::size_t from, std::size_t to) const;
  bool in(std::uint64_t id, const std::vector<std::uint64_t>& w, std::size_t from, std::size_t to) const;
  bool plus(const std::vector<std::uint64_t>& parts, const std::vector<std::uint64_t>& w, std::size_t from,
            std::size_t to) const;

  std::set<std::uint64_t> originals_;
  std::map<std::uint64_t, std::vector<std::uint64_t>> learned_;
};

// all words over `alphabet` of length 1..max_len
std::vector<std::vector<std::uint64_t>> all_words(const std::vector<std::uint64_t>& alphabet, std::size_t max_len);

// the n-th Luby number by building the sequence
std::uint64_t luby_by_doubling(std::size_t n);

// Random linear formula over vars; coefficients and constants are small.
Formula random_formula(std::mt19937_64& rng, const std::vector<Var>& ints, const std::vector<Var>& bools,
                       int depth);
adcl::Literal random_linear_literal(std::mt19937_64& rng, const std::vector<Var>& ints, int max_coeff,
                                    int max_const);

Formula box_constraint(const std::vector<Var>& ints, int lo, int hi);

// Random recursive clause with a deterministic update whose iteration the
// oracle can simulate.
struct LoopSpec {
  adcl::Clause clause;
  std::vector<Var> body, head;
  // update[i] maps the body values to the new value of body[i]
  std::vector<std::function<Int(const std::vector<Int>&)>> update;
  Formula guard;
};
LoopSpec random_loop(std::mt19937_64& rng, std::uint64_t id);

// Random small CHC problem; every clause bounds its variables to [lo, hi].
adcl::Problem random_problem(std::mt19937_64& rng, int lo, int hi);

}  // namespace oracle
