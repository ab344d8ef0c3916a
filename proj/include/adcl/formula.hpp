#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "adcl/error.hpp"

namespace adcl {

using Int = mpz_class;

enum class Sort : std::uint8_t { Int, Bool };

const char* sort_name(Sort s);

class Var {
 public:
  Var() = default;

  static Var fresh(std::string name, Sort sort);
  // new id, same sort, name derived from v's base name
  static Var fresh_like(const Var& v);

  std::uint64_t id() const { return d_->id; }
  const std::string& name() const { return d_->name; }
  Sort sort() const { return d_->sort; }
  bool valid() const { return d_ != nullptr; }

  friend bool operator==(const Var& a, const Var& b) { return a.id() == b.id(); }
  friend auto operator<=>(const Var& a, const Var& b) { return a.id() <=> b.id(); }

 private:
  struct Data {
    std::uint64_t id;
    std::string name;
    Sort sort;
  };
  explicit Var(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
  std::shared_ptr<const Data> d_;
};

struct VarHash {
  std::size_t operator()(const Var& v) const noexcept { return std::hash<std::uint64_t>{}(v.id()); }
};

using VarSet = std::set<Var>;

using Value = std::variant<Int, bool>;

std::string value_to_string(const Value& v);

class Model {
 public:
  void set(const Var& v, Value val);
  const Value* find(const Var& v) const;
  bool contains(const Var& v) const { return find(v) != nullptr; }
  const Value& at(const Var& v) const;
  Int int_value(const Var& v) const;
  bool bool_value(const Var& v) const;
  std::size_t size() const { return vals_.size(); }
  bool empty() const { return vals_.empty(); }
  const std::map<std::uint64_t, std::pair<Var, Value>>& entries() const { return vals_; }

 private:
  std::map<std::uint64_t, std::pair<Var, Value>> vals_;
};

// Monomials are multisets of variables, kept sorted by id. The empty
// monomial is the constant part.
using Monomial = std::vector<Var>;

struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

class Term {
 public:
  using Map = std::map<Monomial, Int, MonomialLess>;

  Term() = default;
  Term(long v);
  explicit Term(const Int& v);
  static Term var(const Var& v);

  const Map& monomials() const { return m_; }
  bool is_zero() const { return m_.empty(); }
  bool is_constant() const;
  Int constant() const;
  bool is_linear() const;
  Int coeff(const Var& v) const;
  // v occurs in some monomial of degree > 1
  bool nonlinear_in(const Var& v) const;
  void collect_vars(VarSet& out) const;

  Term operator+(const Term& o) const;
  Term operator-(const Term& o) const;
  Term operator-() const;
  Term operator*(const Term& o) const;
  Term scaled(const Int& k) const;

  Int eval(const Model& m) const;

  friend int compare(const Term& a, const Term& b);
  friend bool operator==(const Term& a, const Term& b) { return compare(a, b) == 0; }
  friend bool operator<(const Term& a, const Term& b) { return compare(a, b) < 0; }

 private:
  void add(const Monomial& mono, const Int& c);
  Map m_;
};

enum class Rel : std::uint8_t { Eq, Neq, Lt, Le, Gt, Ge };

class Literal {
 public:
  enum class Kind : std::uint8_t { Const, BoolVar, Cmp };
  // comparisons are kept as `term op 0`
  enum class Op : std::uint8_t { Eq, Neq, Le, Lt };

  static Literal relation(const Term& lhs, Rel rel, const Term& rhs);
  static Literal boolean(const Var& v, bool positive = true);
  static Literal constant(bool value);

  Kind kind() const { return kind_; }
  Op op() const { return op_; }
  const Term& term() const { return term_; }
  const Var& var() const { return var_; }
  bool positive() const { return flag_; }
  bool value() const { return flag_; }
  bool is_const() const { return kind_ == Kind::Const; }

  Literal negated() const;
  bool eval(const Model& m) const;
  void collect_vars(VarSet& out) const;
  bool is_linear() const;

  friend int compare(const Literal& a, const Literal& b);
  friend bool operator==(const Literal& a, const Literal& b) { return compare(a, b) == 0; }
  friend bool operator<(const Literal& a, const Literal& b) { return compare(a, b) < 0; }

 private:
  static Literal normalized(Term t, Op op);

  Kind kind_ = Kind::Const;
  Op op_ = Op::Eq;
  Term term_;
  Var var_;
  bool flag_ = true;
};

class Formula {
 public:
  enum class Kind : std::uint8_t { Lit, And, Or };

  Formula();
  static Formula lit(const Literal& l);
  static Formula top();
  static Formula bottom();
  static Formula conj(std::vector<Formula> fs);
  static Formula disj(std::vector<Formula> fs);
  static Formula conj(const Formula& a, const Formula& b) { return conj(std::vector<Formula>{a, b}); }
  static Formula disj(const Formula& a, const Formula& b) { return disj(std::vector<Formula>{a, b}); }
  static Formula cmp(const Term& lhs, Rel rel, const Term& rhs) { return lit(Literal::relation(lhs, rel, rhs)); }

  Kind kind() const { return n_->kind; }
  const Literal& literal() const { return n_->lit; }
  const std::vector<Formula>& children() const { return n_->kids; }
  bool is_true() const;
  bool is_false() const;
  // conjunction of literals (or a single literal)
  bool is_conjunctive() const;
  bool is_linear() const;

  friend int compare(const Formula& a, const Formula& b);
  friend bool operator==(const Formula& a, const Formula& b) { return compare(a, b) == 0; }

 private:
  struct Node {
    Kind kind;
    Literal lit;
    std::vector<Formula> kids;
  };
  explicit Formula(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  std::shared_ptr<const Node> n_;
};

Formula negate(const Formula& f);
bool eval(const Formula& f, const Model& m);
VarSet vars_of(const Formula& f);
// literal occurrences in left-to-right order, duplicates included
std::vector<Literal> literals_of(const Formula& f);
Formula conj_of(const std::vector<Literal>& lits);

class Substitution {
 public:
  void set(const Var& v, const Term& t);
  void set(const Var& v, const Formula& f);
  void rename(const Var& from, const Var& to);
  const Term* term_for(const Var& v) const;
  const Formula* formula_for(const Var& v) const;
  bool empty() const { return ints_.empty() && bools_.empty(); }

 private:
  std::unordered_map<std::uint64_t, Term> ints_;
  std::unordered_map<std::uint64_t, Formula> bools_;
};

Term apply_subst(const Term& t, const Substitution& s);
Formula apply_subst(const Literal& l, const Substitution& s);
Formula apply_subst(const Formula& f, const Substitution& s);

// Unnormalized boolean structure as produced by a front end.
struct RawFormula {
  enum class Kind : std::uint8_t { Atom, Not, And, Or, Implies, Iff, Ite };
  Kind kind = Kind::Atom;
  Literal atom = Literal::constant(true);
  std::vector<RawFormula> kids;

  static RawFormula of(const Literal& l);
  static RawFormula of(const Formula& f);
  static RawFormula make(Kind k, std::vector<RawFormula> kids);
};

Formula to_nnf(const RawFormula& r);

// Conjunction of the literal occurrences of psi that sigma satisfies.
Formula sip_of_model(const Formula& psi, const Model& sigma);
std::vector<Literal> sip_literals(const Formula& psi, const Model& sigma);

Int floor_div(const Int& a, const Int& b);
Int ceil_div(const Int& a, const Int& b);

}  // namespace adcl
