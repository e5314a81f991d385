#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <stop_token>
#include <string>
#include <vector>

#include "muval/program.hpp"

namespace muval {

/// The backend produced output that could not be interpreted, or died twice.
class SmtBackendError : public Error {
 public:
  using Error::Error;
};

class Cancelled : public Error {
 public:
  Cancelled() : Error("cancelled") {}
};

struct SmtOptions {
  std::string path = "z3";
  std::vector<std::string> args = {"-in"};
  unsigned timeout_ms = 20000;
  unsigned seed = 0;
  /// Re-check every unsat core on its own (debug mode).
  bool verify_cores = false;
};

enum class SmtStatus { Sat, Unsat, Unknown };

struct NamedAssertion {
  std::string name;  ///< Empty for unnamed assertions.
  Expr formula;
};

struct SatResult {
  SmtStatus status = SmtStatus::Unknown;
  std::vector<std::int64_t> values;  ///< One per requested term when Sat.
  std::vector<std::string> core;     ///< Assertion names when Unsat.
};

enum class Validity { Valid, Invalid, Unknown };

struct ValidityResult {
  Validity validity = Validity::Unknown;
  std::map<Symbol, std::int64_t> countermodel;
};

/// Persistent solver child process speaking SMT-LIB2 over pipes. Each query is
/// preceded by (reset); a crashed process is restarted once per query.
/// Only linear integer arithmetic is ever sent.
class SmtSolver {
 public:
  explicit SmtSolver(SmtOptions opts, std::stop_token stop = {});
  ~SmtSolver();
  SmtSolver(const SmtSolver&) = delete;
  SmtSolver& operator=(const SmtSolver&) = delete;

  /// Free term variables become constants; calls must be declared in `uf`.
  SatResult check_sat(const std::vector<Signature>& uf, const std::vector<NamedAssertion>& assertions,
                      const std::vector<Expr>& value_terms = {}, bool want_core = false);

  /// Validity of the universal closure of `matrix`; the countermodel binds `prefix`.
  ValidityResult check_validity(const std::vector<Param>& prefix, const Expr& matrix);

  std::size_t queries() const { return queries_; }
  std::chrono::milliseconds time_spent() const { return spent_; }

 private:
  class Process;
  SmtOptions opts_;
  std::stop_token stop_;
  std::unique_ptr<Process> proc_;
  std::size_t queries_ = 0;
  std::chrono::milliseconds spent_{0};

  SatResult run(const std::string& script, const std::vector<Expr>& value_terms, bool want_core);
  SatResult run_once(const std::string& script, const std::vector<Expr>& value_terms, bool want_core);
};

/// Throws Error when a product of two non-constant terms occurs.
void require_linear(const Expr& e);

}  // namespace muval
