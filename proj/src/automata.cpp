#include "adcl/automata.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

#include "adcl/error.hpp"

namespace adcl {

std::uint32_t Nfa::add_state(bool accepting) {
  trans_.emplace_back();
  acc_.push_back(accepting);
  return static_cast<std::uint32_t>(trans_.size() - 1);
}

Nfa Nfa::symbol(Symbol s) {
  Nfa n;
  auto a = n.add_state(false);
  auto b = n.add_state(true);
  n.init_ = {a};
  n.trans_[a].emplace_back(s, b);
  return n;
}

bool Nfa::accepts_empty() const {
  return std::any_of(init_.begin(), init_.end(), [&](std::uint32_t q) { return acc_[q]; });
}

Nfa Nfa::concat(const Nfa& a, const Nfa& b) {
  Nfa n = a;
  auto off = static_cast<std::uint32_t>(a.num_states());
  bool b_eps = b.accepts_empty();
  if (!b_eps) n.acc_.assign(n.acc_.size(), false);
  for (std::size_t q = 0; q < b.num_states(); ++q) n.add_state(b.acc_[q]);
  for (std::size_t q = 0; q < b.num_states(); ++q)
    for (auto [s, t] : b.trans_[q]) n.trans_[q + off].emplace_back(s, t + off);
  // entering b wherever a could accept
  for (std::size_t q = 0; q < a.num_states(); ++q)
    for (auto [s, t] : a.trans_[q])
      if (a.acc_[t])
        for (auto i : b.init_) n.trans_[q].emplace_back(s, i + off);
  if (a.accepts_empty())
    for (auto i : b.init_) n.init_.push_back(i + off);
  return n;
}

Nfa Nfa::plus(const Nfa& a) {
  Nfa n = a;
  for (std::size_t q = 0; q < a.num_states(); ++q)
    for (auto [s, t] : a.trans_[q])
      if (a.acc_[t])
        for (auto i : a.init_) n.trans_[q].emplace_back(s, i);
  return n;
}

bool Nfa::accepts(const std::vector<Symbol>& w) const {
  std::set<std::uint32_t> cur(init_.begin(), init_.end());
  for (Symbol s : w) {
    std::set<std::uint32_t> next;
    for (auto q : cur)
      for (auto [x, t] : trans_[q])
        if (x == s) next.insert(t);
    cur = std::move(next);
  }
  return std::any_of(cur.begin(), cur.end(), [&](std::uint32_t q) { return acc_[q]; });
}

std::string Nfa::to_dot(const std::string& name, const std::function<std::string(Symbol)>& label) const {
  std::ostringstream os;
  os << "digraph \"" << name << "\" {\n  rankdir=LR;\n";
  for (std::size_t q = 0; q < num_states(); ++q)
    os << "  q" << q << " [shape=" << (acc_[q] ? "doublecircle" : "circle") << "];\n";
  for (auto i : init_) os << "  start" << i << " [shape=point];\n  start" << i << " -> q" << i << ";\n";
  for (std::size_t q = 0; q < num_states(); ++q)
    for (auto [s, t] : trans_[q])
      os << "  q" << q << " -> q" << t << " [label=\"" << (label ? label(s) : std::to_string(s)) << "\"];\n";
  os << "}\n";
  return os.str();
}

std::optional<std::vector<Symbol>> inclusion_counterexample(const Nfa& a, const Nfa& b) {
  using Subset = std::vector<std::uint32_t>;
  using Node = std::pair<std::uint32_t, Subset>;
  auto accepting = [&](const Subset& s) {
    return std::any_of(s.begin(), s.end(), [&](std::uint32_t q) { return b.accepting(q); });
  };
  Subset start(b.initial().begin(), b.initial().end());
  std::sort(start.begin(), start.end());
  start.erase(std::unique(start.begin(), start.end()), start.end());
  std::map<Node, std::pair<Node, Symbol>> parent;
  std::set<Node> seen;
  std::deque<Node> work;
  for (auto q : a.initial())
    if (seen.emplace(q, start).second) work.emplace_back(q, start);
  while (!work.empty()) {
    Node cur = work.front();
    work.pop_front();
    if (a.accepting(cur.first) && !accepting(cur.second)) {
      std::vector<Symbol> w;
      for (Node n = cur; parent.count(n); n = parent.at(n).first) w.push_back(parent.at(n).second);
      std::reverse(w.begin(), w.end());
      return w;
    }
    for (auto [sym, t] : a.out(cur.first)) {
      Subset next;
      for (auto p : cur.second)
        for (auto [x, r] : b.out(p))
          if (x == sym) next.push_back(r);
      std::sort(next.begin(), next.end());
      next.erase(std::unique(next.begin(), next.end()), next.end());
      Node n{t, std::move(next)};
      if (seen.insert(n).second) {
        parent.emplace(n, std::make_pair(cur, sym));
        work.push_back(std::move(n));
      }
    }
  }
  return std::nullopt;
}

bool included(const Nfa& a, const Nfa& b) { return !inclusion_counterexample(a, b).has_value(); }

void LangMap::check_known(std::uint64_t id) const {
  if (!langs_.count(id)) throw Error(ErrorKind::UnknownId, "no language registered for clause " + std::to_string(id));
}

void LangMap::register_original(std::uint64_t id) {
  if (langs_.count(id)) throw Error(ErrorKind::DuplicateId, "clause " + std::to_string(id) + " already registered");
  Entry e;
  e.sym = next_symbol_++;
  e.nfa = Nfa::symbol(e.sym);
  langs_.emplace(id, std::move(e));
}

void LangMap::register_learned(std::uint64_t id, const std::vector<std::uint64_t>& suffix) {
  if (langs_.count(id)) throw Error(ErrorKind::DuplicateId, "clause " + std::to_string(id) + " already registered");
  if (suffix.empty()) throw Error(ErrorKind::UnknownId, "learned clause without source word");
  Entry e;
  e.nfa = Nfa::plus(word_language(suffix));
  e.learned = true;
  e.source = suffix;
  langs_.emplace(id, std::move(e));
  learned_.push_back(id);
}

bool LangMap::is_learned(std::uint64_t id) const {
  check_known(id);
  return langs_.at(id).learned;
}

const Nfa& LangMap::language(std::uint64_t id) const {
  check_known(id);
  return langs_.at(id).nfa;
}

const std::vector<std::uint64_t>& LangMap::source(std::uint64_t id) const {
  check_known(id);
  return langs_.at(id).source;
}

Symbol LangMap::symbol_of(std::uint64_t id) const {
  check_known(id);
  return langs_.at(id).sym;
}

Nfa LangMap::word_language(const std::vector<std::uint64_t>& word) const {
  if (word.empty()) throw Error(ErrorKind::UnknownId, "empty word");
  Nfa n = language(word[0]);
  for (std::size_t i = 1; i < word.size(); ++i) n = Nfa::concat(n, language(word[i]));
  return n;
}

bool LangMap::accel_redundant(const std::vector<std::uint64_t>& word) const {
  Nfa w = Nfa::plus(word_language(word));
  return std::any_of(learned_.begin(), learned_.end(), [&](std::uint64_t id) { return included(w, langs_.at(id).nfa); });
}

std::optional<std::uint64_t> LangMap::covering(const std::vector<std::uint64_t>& word) const {
  Nfa w = word_language(word);
  for (auto id : learned_) {
    if (word.size() == 1 && word[0] == id) continue;
    if (included(w, langs_.at(id).nfa)) return id;
  }
  return std::nullopt;
}

bool LangMap::covered_check(const std::vector<std::uint64_t>& word) const {
  if (word.size() == 1 && is_learned(word[0])) return false;
  return covering(word).has_value();
}

void LangMap::clear() {
  langs_.clear();
  learned_.clear();
  next_symbol_ = 0;
}

std::string LangMap::to_dot() const {
  std::map<Symbol, std::uint64_t> names;
  for (auto& [id, e] : langs_)
    if (!e.learned) names[e.sym] = id;
  auto label = [&](Symbol s) { return "c" + std::to_string(names[s]); };
  std::string out;
  for (auto id : learned_) out += langs_.at(id).nfa.to_dot("L" + std::to_string(id), label);
  return out;
}

}  // namespace adcl
