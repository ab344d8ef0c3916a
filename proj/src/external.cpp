#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <sstream>

#include "adcl/smt.hpp"
#include "adcl/smtlib.hpp"

namespace adcl {

namespace {

double now_s() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

std::string smt_name(const Var& v) { return "v" + std::to_string(v.id()); }

std::optional<Value> parse_value(const Sexpr& e, Sort sort) {
  if (sort == Sort::Bool) {
    if (e.is_symbol("true")) return Value(true);
    if (e.is_symbol("false")) return Value(false);
    return std::nullopt;
  }
  if (e.kind == Sexpr::Kind::Numeral) return Value(Int(e.atom));
  if (e.is_list() && e.list.size() == 2 && e.list[0].is_symbol("-") && e.list[1].kind == Sexpr::Kind::Numeral)
    return Value(Int(-Int(e.list[1].atom)));
  return std::nullopt;
}

}  // namespace

ExternalBackend::ExternalBackend(std::string cmd, double timeout_s) : cmd_(std::move(cmd)), timeout_(timeout_s) {}

ExternalBackend::~ExternalBackend() { stop(); }

bool ExternalBackend::start() {
  if (pid_ > 0) return true;
  signal(SIGPIPE, SIG_IGN);
  int in[2], out[2];
  if (pipe(in) != 0) return false;
  if (pipe(out) != 0) {
    close(in[0]);
    close(in[1]);
    return false;
  }
  pid_t pid = fork();
  if (pid < 0) {
    close(in[0]), close(in[1]), close(out[0]), close(out[1]);
    return false;
  }
  if (pid == 0) {
    dup2(in[0], 0);
    dup2(out[1], 1);
    int devnull = open("/dev/null", O_WRONLY);
    if (devnull >= 0) dup2(devnull, 2);
    close(in[0]), close(in[1]), close(out[0]), close(out[1]);
    execl("/bin/sh", "sh", "-c", cmd_.c_str(), static_cast<char*>(nullptr));
    _exit(127);
  }
  close(in[0]);
  close(out[1]);
  pid_ = pid;
  to_child_ = in[1];
  from_child_ = out[0];
  buf_.clear();
  return true;
}

void ExternalBackend::stop() {
  if (to_child_ >= 0) close(to_child_);
  if (from_child_ >= 0) close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ > 0) {
    kill(pid_, SIGKILL);
    waitpid(pid_, nullptr, 0);
  }
  pid_ = -1;
  buf_.clear();
}

bool ExternalBackend::send(const std::string& s) {
  std::size_t off = 0;
  while (off < s.size()) {
    ssize_t n = write(to_child_, s.data() + off, s.size() - off);
    if (n <= 0) return false;
    off += static_cast<std::size_t>(n);
  }
  return true;
}

bool ExternalBackend::read_sexpr(std::string& out, double deadline) {
  while (true) {
    // look for one complete expression at the front of buf_
    std::size_t i = 0;
    while (i < buf_.size() && std::isspace(static_cast<unsigned char>(buf_[i]))) ++i;
    if (i < buf_.size()) {
      int depth = 0;
      bool in_str = false;
      for (std::size_t j = i; j < buf_.size(); ++j) {
        char c = buf_[j];
        if (in_str) {
          if (c == '"') in_str = false;
          continue;
        }
        if (c == '"') {
          in_str = true;
        } else if (c == '(') {
          ++depth;
        } else if (c == ')') {
          if (--depth == 0) {
            out = buf_.substr(i, j + 1 - i);
            buf_.erase(0, j + 1);
            return true;
          }
        } else if (depth == 0 && std::isspace(static_cast<unsigned char>(c))) {
          out = buf_.substr(i, j - i);
          buf_.erase(0, j);
          return true;
        }
      }
    }
    double left = deadline - now_s();
    if (left <= 0) return false;
    if (cancel_ && cancel_->load()) return false;
    pollfd p{from_child_, POLLIN, 0};
    int wait_ms = static_cast<int>(std::min(left, 0.1) * 1000) + 1;
    int r = poll(&p, 1, wait_ms);
    if (r < 0) return false;
    if (r == 0) continue;
    char tmp[4096];
    ssize_t n = read(from_child_, tmp, sizeof tmp);
    if (n <= 0) return false;
    buf_.append(tmp, static_cast<std::size_t>(n));
  }
}

SmtResult ExternalBackend::check(const std::vector<Formula>& fs) {
  if (!start()) return {SmtStatus::Unknown, {}, "cannot start external solver"};
  VarSet vars;
  bool linear = true;
  for (auto& f : fs) {
    for (auto& v : vars_of(f)) vars.insert(v);
    if (!f.is_linear()) linear = false;
  }
  std::ostringstream q;
  q << "(reset)\n(set-option :produce-models true)\n(set-logic " << (linear ? "QF_LIA" : "QF_NIA") << ")\n(push 1)\n";
  for (auto& v : vars) q << "(declare-fun " << smt_name(v) << " () " << sort_name(v.sort()) << ")\n";
  for (auto& f : fs) q << "(assert " << print_formula(f, smt_name) << ")\n";
  q << "(check-sat)\n";
  double deadline = now_s() + timeout_;
  std::string answer;
  if (!send(q.str()) || !read_sexpr(answer, deadline)) {
    stop();
    return {SmtStatus::Unknown, {}, "external solver timed out or crashed"};
  }
  if (answer == "unsat") {
    send("(pop 1)\n");
    return {SmtStatus::Unsat, {}, ""};
  }
  if (answer != "sat") {
    stop();
    return {SmtStatus::Unknown, {}, "external solver answered " + answer};
  }
  std::string text;
  if (!send("(get-model)\n") || !read_sexpr(text, deadline)) {
    stop();
    return {SmtStatus::Unknown, {}, "no model from external solver"};
  }
  send("(pop 1)\n");
  std::map<std::string, Var> by_name;
  for (auto& v : vars) by_name.emplace(smt_name(v), v);
  Model m;
  try {
    auto es = parse_sexprs(text);
    if (es.size() != 1 || !es[0].is_list()) throw Error(ErrorKind::MalformedWitness, "bad model");
    for (auto& d : es[0].list) {
      if (d.head() != "define-fun" || d.list.size() != 5) continue;
      auto it = by_name.find(d.list[1].atom);
      if (it == by_name.end()) continue;
      auto val = parse_value(d.list[4], it->second.sort());
      if (val) m.set(it->second, *val);
    }
  } catch (const Error&) {
    return {SmtStatus::Unknown, {}, "unparsable model from external solver"};
  }
  m = complete_model(m, fs);
  for (auto& f : fs)
    if (!eval(f, m)) return {SmtStatus::Unknown, {}, "external model fails validation"};
  return {SmtStatus::Sat, std::move(m), ""};
}

std::unique_ptr<Backend> make_external_backend(const std::string& cmd, double timeout_s) {
  return std::make_unique<ExternalBackend>(cmd, timeout_s);
}

}  // namespace adcl
