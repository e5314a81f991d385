#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "muval/cegis.hpp"
#include "muval/pfwcsp.hpp"
#include "muval/program.hpp"

namespace muval {

struct RunConfig {
  std::chrono::milliseconds timeout{300000};
  std::size_t max_iterations = 200;
  std::string smt_solver = "z3";
  unsigned hypothesis_timeout_ms = 20000;
  bool dual = true;
  bool suppress_arguments = true;
  int resolution_depth = 2;
  TemplateConfig templates;
  /// When set, primal and dual run one after the other with this SMT seed.
  std::optional<unsigned> seed;
  std::ostream* log = nullptr;

  SolveConfig solve_config() const;
};

/// Applies `key=value` lines (# comments) over `cfg`. Unknown keys throw.
void apply_config(RunConfig& cfg, std::string_view text);

enum class Outcome { Valid, Invalid, Unknown, Timeout, Conflict };
const char* to_string(Outcome o);
/// 0 valid/sat, 1 invalid/unsat, 2 unknown/timeout, 4 conflict.
int exit_code(Outcome o);

struct SideReport {
  std::string side;  ///< "primal" or "dual".
  PfwCsp csp;
  Verdict verdict;
};

struct FinalReport {
  Outcome outcome = Outcome::Unknown;
  /// The concluding side; for Unknown, every side that ran.
  std::vector<SideReport> sides;
  std::string diagnostic;
};

/// Reductions of the program (and of its dual) solved concurrently unless a
/// seed is set. Sat or Unsat on either side decides the program.
FinalReport muval_solve(const Program& p, const RunConfig& cfg);
FinalReport pcsat_solve(const PfwCsp& csp, const RunConfig& cfg);

/// Verdict line, certificate and statistics.
void print_report(std::ostream& out, const FinalReport& r, bool csp_words);

}  // namespace muval
