#include "adcl/driver.hpp"

#include <fstream>
#include <sstream>

namespace adcl {

namespace {

Problem parse_strict(std::string_view text) {
  auto r = parse_problem(text);
  if (!r.ok()) throw Error(r.diagnostics.front().kind, r.diagnostics.front().str());
  return std::move(r.problem);
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SolveOutcome solve_text(std::string_view text, const EngineConfig& cfg) {
  SolveOutcome out;
  auto parsed = parse_problem(text);
  for (auto& d : parsed.diagnostics)
    if (d.kind != ErrorKind::UnsupportedFeature) throw Error(d.kind, d.str());
  if (!parsed.ok()) {
    out.reason = parsed.diagnostics.front().str();
    return out;
  }
  const Problem& p = parsed.problem;
  Engine engine(p, cfg);
  Verdict v = engine.run();
  out.answer = v.answer;
  out.reason = v.reason;
  out.transitions = engine.transitions();
  out.stats = engine.stats();
  out.approximations = engine.approximations();
  if (v.answer == Answer::Unsat) {
    std::string text_w = write_witness(*v.witness, p);
    auto rep = check_witness(read_witness(text_w, p), p, cfg.seed);
    if (!rep.ok) {
      out.answer = Answer::Unknown;
      out.reason = "WitnessCheckFailed: " + rep.reason;
      return out;
    }
    out.witness = std::move(text_w);
    out.ground_steps = rep.ground_steps;
  }
  return out;
}

std::string instrument_text(std::string_view text) { return print_problem(instrument_counter(parse_strict(text))); }

CheckReport check_witness_text(std::string_view problem, std::string_view witness, std::uint64_t seed) {
  Problem p = parse_strict(problem);
  Witness w;
  try {
    w = read_witness(witness, p);
  } catch (const Error& e) {
    return CheckReport{false, std::string(error_kind_name(e.kind())) + ": " + e.what(), 0};
  }
  return check_witness(w, p, seed);
}

std::string expand_witness_text(std::string_view problem, std::string_view witness, std::uint64_t seed) {
  Problem p = parse_strict(problem);
  return write_witness(expand_witness(read_witness(witness, p), p, seed), p);
}

}  // namespace adcl
