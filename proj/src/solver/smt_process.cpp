#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>

#include "dse/solver/solver.hpp"

namespace dse::solver {

namespace {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '(' || c == ')') {
      out.emplace_back(1, c);
      ++i;
    } else if (c == '|') {
      size_t j = text.find('|', i + 1);
      if (j == std::string::npos) j = text.size();
      out.push_back(text.substr(i + 1, j - i - 1));
      i = j + 1;
    } else {
      size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
             text[j] != '(' && text[j] != ')') {
        ++j;
      }
      out.push_back(text.substr(i, j - i));
      i = j;
    }
  }
  return out;
}

// Skips one token or balanced group starting at `i`; returns the index after it.
size_t skip(const std::vector<std::string>& t, size_t i) {
  if (i >= t.size()) return i;
  if (t[i] != "(") return i + 1;
  int depth = 0;
  for (; i < t.size(); ++i) {
    if (t[i] == "(") ++depth;
    if (t[i] == ")" && --depth == 0) return i + 1;
  }
  return i;
}

std::optional<std::int32_t> bv_value(const std::vector<std::string>& t, size_t i) {
  if (i >= t.size()) return std::nullopt;
  std::uint64_t v = 0;
  const std::string& a = t[i];
  if (a.rfind("#x", 0) == 0) {
    v = std::stoull(a.substr(2), nullptr, 16);
  } else if (a.rfind("#b", 0) == 0) {
    v = std::stoull(a.substr(2), nullptr, 2);
  } else if (a == "(" && i + 2 < t.size() && t[i + 1] == "_" && t[i + 2].rfind("bv", 0) == 0) {
    v = std::stoull(t[i + 2].substr(2));
  } else {
    return std::nullopt;
  }
  return static_cast<std::int32_t>(static_cast<std::uint32_t>(v));
}

}  // namespace

std::vector<std::pair<std::string, std::int32_t>> parse_smt_model(const std::string& text) {
  std::vector<std::pair<std::string, std::int32_t>> out;
  auto t = tokenize(text);
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] != "define-fun" || i + 1 >= t.size()) continue;
    std::string name = t[i + 1];
    size_t j = skip(t, i + 2);  // parameter list
    j = skip(t, j);             // sort
    if (auto v = bv_value(t, j)) out.emplace_back(name, *v);
  }
  return out;
}

std::string smtlib_query(const std::vector<sym::Expr>& conjuncts, int domain_bits) {
  std::ostringstream os;
  auto names = sym::symbol_names(conjuncts);
  for (const auto& [id, name] : names) {
    std::string s = sym::smtlib_symbol(name);
    os << "(declare-const " << s << " (_ BitVec 32))\n";
    if (domain_bits < 32) {
      os << "(assert (bvsge " << s << " " << sym::to_smtlib(sym::constant(static_cast<std::int32_t>(domain_min(domain_bits))))
         << "))\n";
      os << "(assert (bvsle " << s << " " << sym::to_smtlib(sym::constant(static_cast<std::int32_t>(domain_max(domain_bits))))
         << "))\n";
    }
  }
  for (const auto& c : conjuncts) os << "(assert " << sym::to_smtlib(sym::to_bool(c)) << ")\n";
  os << "(check-sat)\n";
  return os.str();
}

SmtProcessSolver::SmtProcessSolver(std::string command, int domain_bits,
                                   std::chrono::milliseconds timeout)
    : Solver(domain_bits), command_(std::move(command)), timeout_(timeout) {
  start();
}

SmtProcessSolver::~SmtProcessSolver() { stop(); }

bool SmtProcessSolver::start() {
  ::signal(SIGPIPE, SIG_IGN);
  int in[2], out[2];
  if (::pipe(in) != 0) return false;
  if (::pipe(out) != 0) {
    ::close(in[0]);
    ::close(in[1]);
    return false;
  }
  pid_t pid = ::fork();
  if (pid < 0) return false;
  if (pid == 0) {
    ::dup2(in[0], STDIN_FILENO);
    ::dup2(out[1], STDOUT_FILENO);
    ::close(in[0]);
    ::close(in[1]);
    ::close(out[0]);
    ::close(out[1]);
    ::execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in[0]);
  ::close(out[1]);
  pid_ = pid;
  to_child_ = in[1];
  from_child_ = out[0];
  buffer_.clear();
  return send("(set-option :print-success false)\n(set-option :produce-models true)\n"
              "(set-logic QF_BV)\n");
}

void SmtProcessSolver::stop() {
  if (pid_ <= 0) return;
  send("(exit)\n");
  ::close(to_child_);
  ::close(from_child_);
  ::kill(pid_, SIGKILL);
  ::waitpid(pid_, nullptr, 0);
  pid_ = -1;
  to_child_ = from_child_ = -1;
}

bool SmtProcessSolver::send(const std::string& text) {
  size_t done = 0;
  while (done < text.size()) {
    ssize_t n = ::write(to_child_, text.data() + done, text.size() - done);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    done += static_cast<size_t>(n);
  }
  return true;
}

namespace {

// 1 = data appended, 0 = deadline passed, -1 = pipe closed or failed.
int fill(int fd, std::string& buffer, std::chrono::steady_clock::time_point deadline) {
  auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - std::chrono::steady_clock::now());
  if (left.count() <= 0) return 0;
  pollfd p{fd, POLLIN, 0};
  int r = ::poll(&p, 1, static_cast<int>(left.count()));
  if (r == 0) return 0;
  if (r < 0) return -1;
  char chunk[4096];
  ssize_t n = ::read(fd, chunk, sizeof chunk);
  if (n <= 0) return -1;
  buffer.append(chunk, static_cast<size_t>(n));
  return 1;
}

}  // namespace

int SmtProcessSolver::read_line(std::string& out) {
  auto deadline = std::chrono::steady_clock::now() + timeout_ * 2;
  for (;;) {
    size_t nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      out = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      while (!out.empty() && (out.back() == '\r' || out.back() == ' ')) out.pop_back();
      if (out.empty()) continue;
      return 1;
    }
    if (int r = fill(from_child_, buffer_, deadline); r != 1) return r;
  }
}

int SmtProcessSolver::read_sexpr(std::string& out) {
  auto deadline = std::chrono::steady_clock::now() + timeout_ * 2;
  for (;;) {
    int depth = 0;
    bool started = false;
    bool quoted = false;
    for (size_t i = 0; i < buffer_.size(); ++i) {
      char c = buffer_[i];
      if (c == '|') quoted = !quoted;
      if (quoted) continue;
      if (c == '(') {
        ++depth;
        started = true;
      } else if (c == ')') {
        --depth;
        if (started && depth == 0) {
          out = buffer_.substr(0, i + 1);
          buffer_.erase(0, i + 1);
          return 1;
        }
      }
    }
    if (int r = fill(from_child_, buffer_, deadline); r != 1) return r;
  }
}

Verdict SmtProcessSolver::check(const std::vector<sym::Expr>& conjuncts, const sym::Model*) {
  auto fail = [&](const std::string& reason) {
    stop();
    Verdict v = Unknown{reason};
    record(v, 1);
    return v;
  };
  for (const auto& c : conjuncts) {
    if (c->is_const() && c->value == 0) {
      Verdict v = Unsat{};
      record(v, 1);
      return v;
    }
  }
  if (pid_ <= 0 && !start()) return fail("external-process-failure");
  if (!send("(push 1)\n" + smtlib_query(conjuncts, domain_bits_))) {
    return fail("external-process-failure");
  }
  std::string answer;
  if (int r = read_line(answer); r != 1) {
    return fail(r == 0 ? "timeout" : "external-process-failure");
  }
  Verdict v = Unknown{"external-process-failure"};
  if (answer == "unsat") {
    v = Unsat{};
  } else if (answer == "unknown") {
    v = Unknown{"timeout"};
  } else if (answer == "sat") {
    if (!send("(get-model)\n")) return fail("external-process-failure");
    std::string text;
    if (int r = read_sexpr(text); r != 1) {
      return fail(r == 0 ? "timeout" : "external-process-failure");
    }
    std::map<std::string, int> ids;
    for (const auto& [id, name] : sym::symbol_names(conjuncts)) ids[name] = id;
    sym::Model m;
    for (const auto& [id, _] : sym::symbol_names(conjuncts)) m[id] = 0;
    for (const auto& [name, value] : parse_smt_model(text)) {
      auto it = ids.find(name);
      if (it != ids.end()) m[it->second] = value;
    }
    if (sym::holds(conjuncts, m)) v = Sat{std::move(m)};
  } else {
    return fail("external-process-failure");
  }
  if (!send("(pop 1)\n")) stop();
  record(v, 1);
  return v;
}

std::unique_ptr<Solver> make_solver(Backend backend, int domain_bits, const std::string& command) {
  if (backend == Backend::Builtin) {
    BuiltinOptions o;
    o.domain_bits = domain_bits;
    return std::make_unique<BuiltinSolver>(o);
  }
  std::string cmd = command;
  if (cmd.empty()) {
    const char* env = std::getenv("DSE_SOLVER_CMD");
    cmd = env && *env ? env : "z3 -in -smt2";
  }
  return std::make_unique<SmtProcessSolver>(cmd, domain_bits);
}

Verdict check_sat(const std::vector<sym::Expr>& conjuncts, Backend backend, int domain_bits) {
  return make_solver(backend, domain_bits)->check(conjuncts);
}

}  // namespace dse::solver
