#pragma once

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "adcl/chc.hpp"

namespace adcl {

struct SourceSpan {
  std::size_t line = 1;
  std::size_t col = 1;
};

struct Sexpr {
  enum class Kind : std::uint8_t { Symbol, Numeral, Decimal, Keyword, String, List };
  Kind kind = Kind::List;
  std::string atom;
  std::vector<Sexpr> list;
  SourceSpan span;

  bool is_symbol(std::string_view s) const { return kind == Kind::Symbol && atom == s; }
  bool is_list() const { return kind == Kind::List; }
  // head symbol of a non-empty list, empty otherwise
  std::string_view head() const;
};

// Throws Error(SyntaxError) with "line:col" in the message.
std::vector<Sexpr> parse_sexprs(std::string_view text);

struct Diagnostic {
  ErrorKind kind;
  std::string message;
  SourceSpan span;

  std::string str() const;
};

struct ParseResult {
  Problem problem;
  std::string logic;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return diagnostics.empty(); }
};

ParseResult parse_problem(std::string_view text);
// Throws the first diagnostic as an Error.
Problem parse_problem_or_throw(std::string_view text);

// Parses a quantifier-free formula over the given variables.
Formula parse_formula(std::string_view text, const std::map<std::string, Var>& scope);

using NameFn = std::function<std::string(const Var&)>;

std::string quote_symbol(const std::string& name);
std::string print_term(const Term& t, const NameFn& name = {});
std::string print_literal(const Literal& l, const NameFn& name = {});
std::string print_formula(const Formula& f, const NameFn& name = {});
std::string print_problem(const Problem& p);
std::string print_clause(const Clause& c);

}  // namespace adcl
