#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace adcl {

using Symbol = std::uint32_t;

// Epsilon-free NFA with possibly several initial states.
class Nfa {
 public:
  static Nfa symbol(Symbol s);
  static Nfa concat(const Nfa& a, const Nfa& b);
  static Nfa plus(const Nfa& a);

  std::size_t num_states() const { return trans_.size(); }
  const std::vector<std::uint32_t>& initial() const { return init_; }
  bool accepting(std::uint32_t q) const { return acc_[q]; }
  const std::vector<std::pair<Symbol, std::uint32_t>>& out(std::uint32_t q) const { return trans_[q]; }
  bool accepts_empty() const;
  bool accepts(const std::vector<Symbol>& w) const;

  std::string to_dot(const std::string& name, const std::function<std::string(Symbol)>& label = {}) const;

 private:
  std::uint32_t add_state(bool accepting);

  std::vector<std::vector<std::pair<Symbol, std::uint32_t>>> trans_;
  std::vector<bool> acc_;
  std::vector<std::uint32_t> init_;
};

// L(a) is a subset of L(b); b is determinized on the fly.
bool included(const Nfa& a, const Nfa& b);
// shortest word of L(a) outside L(b)
std::optional<std::vector<Symbol>> inclusion_counterexample(const Nfa& a, const Nfa& b);

// Regular language per clause: singletons for sip variants of original
// clauses, Kleene plus of the source word for learned clauses.
class LangMap {
 public:
  void register_original(std::uint64_t id);
  void register_learned(std::uint64_t id, const std::vector<std::uint64_t>& suffix);

  bool contains(std::uint64_t id) const { return langs_.count(id) > 0; }
  bool is_learned(std::uint64_t id) const;
  const Nfa& language(std::uint64_t id) const;
  const std::vector<std::uint64_t>& source(std::uint64_t id) const;
  Symbol symbol_of(std::uint64_t id) const;
  std::size_t num_learned() const { return learned_.size(); }

  Nfa word_language(const std::vector<std::uint64_t>& word) const;
  // some learned clause includes L(word)^+
  bool accel_redundant(const std::vector<std::uint64_t>& word) const;
  // learned clause (other than word[0] for singletons) whose language includes L(word)
  std::optional<std::uint64_t> covering(const std::vector<std::uint64_t>& word) const;
  // singleton words qualify only for original clauses
  bool covered_check(const std::vector<std::uint64_t>& word) const;

  void clear();
  std::string to_dot() const;

 private:
  void check_known(std::uint64_t id) const;

  struct Entry {
    Nfa nfa;
    bool learned = false;
    std::vector<std::uint64_t> source;
    Symbol sym = 0;
  };
  std::map<std::uint64_t, Entry> langs_;
  std::vector<std::uint64_t> learned_;
  Symbol next_symbol_ = 0;
};

}  // namespace adcl
