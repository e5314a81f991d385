#include "muval/smt.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <set>

#include "muval/sexpr.hpp"

namespace muval {

namespace {

struct Crash {};
struct Deadline {};

}  // namespace

class SmtSolver::Process {
 public:
  Process(const SmtOptions& opts) {
    int in_pipe[2], out_pipe[2];
    if (pipe2(in_pipe, O_CLOEXEC) != 0 || pipe2(out_pipe, O_CLOEXEC) != 0) {
      throw SmtBackendError(std::string("pipe: ") + std::strerror(errno));
    }
    std::vector<std::string> argv_store;
    argv_store.push_back(opts.path);
    for (const auto& a : opts.args) argv_store.push_back(a);
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());
    argv.push_back(nullptr);
    pid_ = fork();
    if (pid_ < 0) throw SmtBackendError(std::string("fork: ") + std::strerror(errno));
    if (pid_ == 0) {
      dup2(in_pipe[0], STDIN_FILENO);
      dup2(out_pipe[1], STDOUT_FILENO);
      int devnull = open("/dev/null", O_WRONLY);
      if (devnull >= 0) dup2(devnull, STDERR_FILENO);
      execvp(argv[0], argv.data());
      _exit(127);
    }
    close(in_pipe[0]);
    close(out_pipe[1]);
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
  }

  ~Process() {
    if (to_child_ >= 0) close(to_child_);
    if (from_child_ >= 0) close(from_child_);
    if (pid_ > 0) {
      kill(pid_, SIGKILL);
      waitpid(pid_, nullptr, 0);
    }
  }

  void send(const std::string& text) {
    std::size_t off = 0;
    while (off < text.size()) {
      ssize_t n = write(to_child_, text.data() + off, text.size() - off);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Crash{};
      }
      off += static_cast<std::size_t>(n);
    }
  }

  SExpr read(std::chrono::steady_clock::time_point deadline, const std::stop_token& stop) {
    while (true) {
      if (auto e = reader_.pop()) return *e;
      if (stop.stop_requested()) throw Cancelled();
      if (std::chrono::steady_clock::now() > deadline) throw Deadline{};
      pollfd pfd{from_child_, POLLIN, 0};
      int r = poll(&pfd, 1, 50);
      if (r < 0) {
        if (errno == EINTR) continue;
        throw Crash{};
      }
      if (r == 0) continue;
      char buf[65536];
      ssize_t n = ::read(from_child_, buf, sizeof buf);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) throw Crash{};
      reader_.feed(std::string_view(buf, static_cast<std::size_t>(n)));
    }
  }

 private:
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  SExprReader reader_;
};

void require_linear(const Expr& e) {
  if (e->op == Op::Mul && e->kids[0]->op != Op::IntLit && e->kids[1]->op != Op::IntLit) {
    throw Error("nonlinear term at solver boundary: " + to_muclp(e));
  }
  for (const auto& k : e->kids) require_linear(k);
}

SmtSolver::SmtSolver(SmtOptions opts, std::stop_token stop) : opts_(std::move(opts)), stop_(std::move(stop)) {
  signal(SIGPIPE, SIG_IGN);
}

SmtSolver::~SmtSolver() = default;

namespace {

std::string sort_name(Sort s) { return s == Sort::Int ? "Int" : "Bool"; }

void collect_calls(const Expr& e, std::set<Symbol>& out) {
  if (e->op == Op::Call) out.insert(e->name);
  for (const auto& k : e->kids) collect_calls(k, out);
}

std::string preamble(const SmtOptions& o, bool want_core, bool uses_uf) {
  std::string s = "(reset)\n(set-option :produce-models true)\n";
  if (want_core) s += "(set-option :produce-unsat-cores true)\n";
  s += "(set-option :random-seed " + std::to_string(o.seed) + ")\n";
  s += "(set-option :timeout " + std::to_string(o.timeout_ms) + ")\n";
  s += uses_uf ? "(set-logic QF_UFLIA)\n" : "(set-logic QF_LIA)\n";
  return s;
}

std::string declarations(const std::vector<Signature>& uf, const std::vector<Expr>& exprs) {
  std::set<Symbol> used;
  std::map<Symbol, Sort> consts;
  for (const auto& e : exprs) {
    require_linear(e);
    collect_calls(e, used);
    for (const auto& v : free_vars(e)) {
      auto [it, inserted] = consts.emplace(v.name, v.sort);
      if (!inserted && it->second != v.sort) throw SortError("constant " + v.name.str() + " used at two sorts");
    }
  }
  std::string s;
  for (const auto& [name, sort] : consts) {
    s += "(declare-const " + smt2_symbol(name) + " " + sort_name(sort) + ")\n";
  }
  for (Symbol name : used) {
    auto it = std::find_if(uf.begin(), uf.end(), [&](const Signature& g) { return g.name == name; });
    if (it == uf.end()) throw Error("undeclared symbol " + name.str() + " in solver query");
    s += "(declare-fun " + smt2_symbol(name) + " (";
    for (std::size_t i = 0; i < it->args.size(); ++i) s += (i ? " " : "") + sort_name(it->args[i]);
    s += ") " + sort_name(it->ret) + ")\n";
  }
  return s;
}

}  // namespace

SatResult SmtSolver::check_sat(const std::vector<Signature>& uf, const std::vector<NamedAssertion>& as,
                               const std::vector<Expr>& value_terms, bool want_core) {
  std::vector<Expr> all;
  for (const auto& a : as) all.push_back(a.formula);
  for (const auto& t : value_terms) all.push_back(t);
  std::set<Symbol> used;
  for (const auto& e : all) collect_calls(e, used);
  std::string script = preamble(opts_, want_core, !used.empty()) + declarations(uf, all);
  for (const auto& a : as) {
    if (a.name.empty() || !want_core) {
      script += "(assert " + to_smt2(a.formula) + ")\n";
    } else {
      script += "(assert (! " + to_smt2(a.formula) + " :named " + a.name + "))\n";
    }
  }
  SatResult r = run(script, value_terms, want_core);
  if (opts_.verify_cores && r.status == SmtStatus::Unsat && want_core) {
    std::set<std::string> core(r.core.begin(), r.core.end());
    std::vector<NamedAssertion> sub;
    for (const auto& a : as) {
      if (a.name.empty() || core.count(a.name)) sub.push_back(a);
    }
    SatResult again = check_sat(uf, sub, {}, false);
    if (again.status == SmtStatus::Sat) throw SmtBackendError("unsat core is satisfiable");
  }
  return r;
}

ValidityResult SmtSolver::check_validity(const std::vector<Param>& prefix, const Expr& matrix) {
  std::vector<Expr> terms;
  for (const auto& p : prefix) terms.push_back(var(p));
  SatResult r = check_sat({}, {NamedAssertion{"", not_(matrix)}}, terms, false);
  ValidityResult out;
  if (r.status == SmtStatus::Unsat) {
    out.validity = Validity::Valid;
  } else if (r.status == SmtStatus::Sat) {
    out.validity = Validity::Invalid;
    for (std::size_t i = 0; i < prefix.size(); ++i) out.countermodel[prefix[i].name] = r.values[i];
  }
  return out;
}

SatResult SmtSolver::run(const std::string& script, const std::vector<Expr>& value_terms, bool want_core) {
  const auto start = std::chrono::steady_clock::now();
  ++queries_;
  SatResult r;
  for (int attempt = 0;; ++attempt) {
    try {
      if (!proc_) proc_ = std::make_unique<Process>(opts_);
      r = run_once(script, value_terms, want_core);
      break;
    } catch (const Crash&) {
      proc_.reset();
      if (attempt >= 1) throw SmtBackendError("solver process died: " + opts_.path);
    } catch (const Deadline&) {
      proc_.reset();
      r = SatResult{};
      break;
    } catch (const SmtBackendError&) {
      proc_.reset();
      throw;
    } catch (const Cancelled&) {
      proc_.reset();
      throw;
    }
  }
  spent_ += std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  return r;
}

SatResult SmtSolver::run_once(const std::string& script, const std::vector<Expr>& value_terms, bool want_core) {
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(opts_.timeout_ms) +
                        std::chrono::seconds(2);
  proc_->send(script + "(check-sat)\n");
  auto next = [&]() {
    while (true) {
      SExpr e = proc_->read(deadline, stop_);
      if (e.is_atom("success") || e.is_atom("unsupported")) continue;
      if (e.is_list && !e.list.empty() && e.list[0].is_atom("error")) {
        throw SmtBackendError("solver error: " + e.str());
      }
      return e;
    }
  };
  SExpr status = next();
  SatResult r;
  if (status.is_atom("sat")) {
    r.status = SmtStatus::Sat;
  } else if (status.is_atom("unsat")) {
    r.status = SmtStatus::Unsat;
  } else if (status.is_atom("unknown")) {
    return r;
  } else {
    throw SmtBackendError("unexpected solver output: " + status.str());
  }
  if (r.status == SmtStatus::Sat && !value_terms.empty()) {
    std::string q = "(get-value (";
    for (std::size_t i = 0; i < value_terms.size(); ++i) q += (i ? " " : "") + to_smt2(value_terms[i]);
    proc_->send(q + "))\n");
    SExpr vals = next();
    if (!vals.is_list || vals.list.size() != value_terms.size()) {
      throw SmtBackendError("malformed get-value response: " + vals.str());
    }
    for (const auto& pair : vals.list) {
      if (!pair.is_list || pair.list.size() != 2) throw SmtBackendError("malformed get-value entry");
      const SExpr& v = pair.list[1];
      if (v.is_atom("true")) {
        r.values.push_back(1);
      } else if (v.is_atom("false")) {
        r.values.push_back(0);
      } else if (auto n = sexpr_int(v)) {
        r.values.push_back(*n);
      } else {
        throw SmtBackendError("unsupported value " + v.str());
      }
    }
  }
  if (r.status == SmtStatus::Unsat && want_core) {
    proc_->send("(get-unsat-core)\n");
    SExpr core = next();
    if (!core.is_list) throw SmtBackendError("malformed unsat core: " + core.str());
    for (const auto& n : core.list) {
      if (n.is_list) throw SmtBackendError("malformed unsat core entry");
      r.core.push_back(n.atom);
    }
  }
  return r;
}

}  // namespace muval
