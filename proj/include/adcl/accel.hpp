#pragma once

#include <map>
#include <optional>
#include <vector>

#include "adcl/chc.hpp"

namespace adcl {

// Result of eliminating variables that are defined by equalities with a unit
// coefficient (or by boolean unit literals).
struct Elimination {
  std::vector<Literal> rest;
  std::map<Var, Term> int_defs;
  std::map<Var, bool> bool_defs;
  // the literals contradict each other
  bool inconsistent = false;
};

// Eliminates as many variables outside `keep` as possible.
Elimination eliminate_defined(const std::vector<Literal>& lits, const VarSet& keep);

struct DeterministicUpdate {
  std::vector<Var> body;
  std::vector<Var> head;
  // update[i] is the new value of body[i]: a Term for Int, a Formula for Bool
  std::vector<RawArg> update;
  std::vector<Literal> guard;
};

DeterministicUpdate extract_update(const Clause& c);

struct ClosedForm {
  enum class Kind { Invariant, Affine, EventuallyConstant };
  Kind kind = Kind::Invariant;
  // Affine: increment per step; EventuallyConstant: value from step 1 on
  RawArg value;
  bool nonlinear = false;
};

const char* closed_form_kind_name(ClosedForm::Kind k);

std::vector<ClosedForm> closed_form(const DeterministicUpdate& u);

// Value of body[k] after `steps` applications. EventuallyConstant needs
// steps >= 1.
RawArg closed_form_at(const DeterministicUpdate& u, const std::vector<ClosedForm>& cf, std::size_t k,
                      const Term& steps);

struct AccelOptions {
  bool allow_nonlinear = false;
  std::uint64_t seed = 0;
};

struct AcceleratedClause {
  Clause clause;
  Var counter;
  // head arguments in closed form, over the body arguments and the counter
  std::vector<RawArg> head_terms;
  bool exact = true;
  bool nonlinear = false;
};

AcceleratedClause accelerate(const Clause& c, const AccelOptions& opts = {});
AcceleratedClause accelerate_suffix(const std::vector<Clause>& suffix, const AccelOptions& opts = {});

// Compares the accelerated clause at counter value n with the n-fold
// resolvent of `loop`. nullopt when intermediate variables cannot be
// eliminated syntactically.
std::optional<bool> check_unrolling(const Clause& learned, const Var& counter, const Clause& loop, std::size_t n,
                                    std::uint64_t seed = 0);

}  // namespace adcl
