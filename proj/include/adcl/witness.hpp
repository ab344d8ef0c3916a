#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adcl/chc.hpp"

namespace adcl {

// A clause used in a refutation: a sip variant of an input clause or a
// learned clause with its source word.
struct WitnessClause {
  std::string name;
  bool learned = false;
  // variants: id of the input clause
  std::uint64_t original = 0;
  Clause clause;
  // learned clauses
  std::optional<Var> counter;
  std::vector<std::string> source;
  // printed name of every variable of `clause`
  std::map<std::string, Var> scope;
};

struct GroundStep {
  std::uint64_t clause = 0;
  Model model;
};

struct Witness {
  // definitions precede their uses
  std::vector<WitnessClause> defs;
  std::vector<std::string> chain;
  // one model per chain element, over that clause's variables
  std::vector<Model> models;
  std::optional<std::vector<GroundStep>> expanded;

  const WitnessClause& def(const std::string& name) const;
};

// Stable printable names for the variables of c (body arguments, head
// arguments, then the rest).
std::map<std::string, Var> canonical_scope(const Clause& c);

std::string write_witness(const Witness& w, const Problem& p);
Witness read_witness(std::string_view text, const Problem& p);

struct CheckReport {
  bool ok = false;
  std::string reason;
  std::size_t ground_steps = 0;
};

// Expands learned steps into ground steps over input clauses.
Witness expand_witness(const Witness& w, const Problem& p, std::uint64_t seed = 0);
CheckReport check_witness(const Witness& w, const Problem& p, std::uint64_t seed = 0);

}  // namespace adcl
