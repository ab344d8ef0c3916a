#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "adcl/engine.hpp"
#include "adcl/smtlib.hpp"

namespace adcl {

struct SolveOutcome {
  Answer answer = Answer::Unknown;
  std::string reason;
  // witness text, unsat only
  std::string witness;
  std::size_t ground_steps = 0;
  std::vector<char> transitions;
  EngineStats stats;
  std::map<std::string, std::size_t> approximations;
};

// Unsupported input yields Unknown; syntax and sort errors throw. An unsat
// answer is only returned with a witness that passed check_witness.
SolveOutcome solve_text(std::string_view text, const EngineConfig& cfg = {});

std::string instrument_text(std::string_view text);

CheckReport check_witness_text(std::string_view problem, std::string_view witness, std::uint64_t seed = 0);
std::string expand_witness_text(std::string_view problem, std::string_view witness, std::uint64_t seed = 0);

std::string read_file(const std::string& path);

}  // namespace adcl
