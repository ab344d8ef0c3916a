#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "adcl/formula.hpp"

namespace adcl {

struct Predicate {
  std::uint32_t id = 0;
  std::string name;
  std::vector<Sort> arg_sorts;
};
using PredicatePtr = std::shared_ptr<const Predicate>;

struct PredApp {
  PredicatePtr pred;
  std::vector<Var> args;
};

enum class ClauseKind { Fact, Rule, Query, ConditionalEmpty };

const char* clause_kind_name(ClauseKind k);

struct Origin {
  bool learned = false;
};

class Clause {
 public:
  Clause() = default;
  Clause(std::uint64_t id, std::optional<PredApp> body, Formula cond, std::optional<PredApp> head,
         Origin origin = {}, std::optional<std::uint64_t> parent = std::nullopt);

  std::uint64_t id() const { return id_; }
  const std::optional<PredApp>& body() const { return body_; }
  const Formula& cond() const { return cond_; }
  const std::optional<PredApp>& head() const { return head_; }
  const Origin& origin() const { return origin_; }
  std::optional<std::uint64_t> parent() const { return parent_; }

  ClauseKind kind() const;
  bool is_recursive() const;
  bool is_conjunctive() const { return cond_.is_conjunctive(); }
  // variables of cond that are neither body nor head arguments
  VarSet extra_vars() const;
  VarSet all_vars() const;

  // fresh id, parent = this clause's id
  Clause with_cond(Formula cond) const;
  Clause with_id(std::uint64_t id) const;

 private:
  std::uint64_t id_ = 0;
  std::optional<PredApp> body_;
  Formula cond_;
  std::optional<PredApp> head_;
  Origin origin_;
  std::optional<std::uint64_t> parent_;
};

// Ids for derived clauses live far above the ids of input clauses.
std::uint64_t fresh_clause_id();

struct Problem {
  std::vector<PredicatePtr> predicates;
  std::vector<Clause> clauses;
  bool nonlinear_arith = false;
};

using Renaming = std::unordered_map<std::uint64_t, Var>;

Clause rename_clause(const Clause& c, const Renaming& r);
// fresh copies of all variables of c
Renaming fresh_renaming(const Clause& c);

// Renaming applied to the second clause of a resolution step: body
// arguments go to the head arguments of `first`, everything else fresh.
Renaming resolution_renaming(const Clause& first, const Clause& second);
Clause resolve_with(const Clause& first, const Clause& second, const Renaming& theta);
Clause resolve(const Clause& first, const Clause& second);
bool resolvable(const Clause& first, const Clause& second);

struct Resolvent {
  Clause clause;
  std::size_t step_count = 0;
  // for each input clause, the renaming into the resolvent's variables
  std::vector<Renaming> renamings;
};
Resolvent resolve_seq(const std::vector<Clause>& seq);

// Conditional empty clause with a false condition, the result of resolving
// non-matching clauses.
Clause bottom_clause();

inline constexpr const char* kCounterSuffix = "!cnt";

Problem instrument_counter(const Problem& p);

// Raw clause as produced by a front end: predicate arguments may be
// arbitrary terms (boolean arguments are formulas).
using RawArg = std::variant<Term, Formula>;
struct RawApp {
  PredicatePtr pred;
  std::vector<RawArg> args;
};
struct RawClause {
  std::vector<RawApp> body;
  Formula cond;
  std::optional<RawApp> head;
};

Clause normalize(const RawClause& raw, std::uint64_t id);

}  // namespace adcl
