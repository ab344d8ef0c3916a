#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <vector>

#include "adcl/formula.hpp"

namespace adcl {

enum class SmtStatus { Sat, Unsat, Unknown };

const char* smt_status_name(SmtStatus s);

struct SmtResult {
  SmtStatus status = SmtStatus::Unknown;
  // binds every variable of the checked formulas when status is Sat
  Model model;
  std::string reason;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual SmtResult check(const std::vector<Formula>& fs) = 0;
  virtual void set_seed(std::uint64_t) {}
  virtual void set_cancel(const std::atomic<bool>*) {}
};

// Complete for linear integer arithmetic with booleans; answers Unknown on
// non-linear input.
class BuiltinBackend : public Backend {
 public:
  explicit BuiltinBackend(std::uint64_t seed = 0) : seed_(seed) {}
  SmtResult check(const std::vector<Formula>& fs) override;
  void set_seed(std::uint64_t s) override { seed_ = s; }
  void set_cancel(const std::atomic<bool>* c) override { cancel_ = c; }

 private:
  std::uint64_t seed_;
  const std::atomic<bool>* cancel_ = nullptr;
};

// Talks SMT-LIB 2 to a solver process over pipes. Crashes, timeouts and
// garbled answers all surface as Unknown.
class ExternalBackend : public Backend {
 public:
  ExternalBackend(std::string cmd, double timeout_s = 10.0);
  ~ExternalBackend() override;
  SmtResult check(const std::vector<Formula>& fs) override;
  void set_cancel(const std::atomic<bool>* c) override { cancel_ = c; }

 private:
  bool start();
  void stop();
  bool send(const std::string& s);
  // reads one complete s-expression or bare token; false on EOF/timeout
  bool read_sexpr(std::string& out, double deadline);

  std::string cmd_;
  double timeout_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buf_;
  const std::atomic<bool>* cancel_ = nullptr;
};

std::unique_ptr<Backend> make_external_backend(const std::string& cmd, double timeout_s = 10.0);

// Assertion frames with push/pop. Keeps the last model and reuses it when it
// still satisfies every frame (after defaulting fresh variables to 0/false).
class SolverStack {
 public:
  explicit SolverStack(std::uint64_t seed = 0);

  void set_external(std::unique_ptr<Backend> ext) { external_ = std::move(ext); }
  bool has_external() const { return external_ != nullptr; }
  void set_cancel(const std::atomic<bool>* c);
  void set_seed(std::uint64_t seed);

  void push(const Formula& f) { frames_.push_back(f); }
  void pop(std::size_t n = 1);
  void clear() { frames_.clear(); }
  std::size_t depth() const { return frames_.size(); }
  const std::vector<Formula>& frames() const { return frames_; }

  SmtResult check();
  // check with one extra temporary frame
  SmtResult check_with(const Formula& extra);
  SmtResult check_formulas(const std::vector<Formula>& fs);
  const Model& model() const { return last_model_; }

  std::size_t checks() const { return checks_; }
  std::size_t reused() const { return reused_; }

 private:
  BuiltinBackend builtin_;
  std::unique_ptr<Backend> external_;
  std::vector<Formula> frames_;
  Model last_model_;
  std::size_t checks_ = 0, reused_ = 0;
};

// One-shot check with the built-in backend.
SmtResult check_sat(const Formula& f, std::uint64_t seed = 0);
// assignment extended by defaults (0 / false) for unbound variables of fs
Model complete_model(const Model& m, const std::vector<Formula>& fs);

}  // namespace adcl
