#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <ostream>
#include <set>
#include <stop_token>
#include <string>
#include <vector>

#include "muval/pfwcsp.hpp"
#include "muval/smt.hpp"
#include "muval/templates.hpp"

namespace muval {

/// Ground example instances plus derived unit facts. Instances are unique
/// up to their printed form after folding.
struct ExampleStore {
  std::vector<Clause> instances;
  std::set<std::string> keys;
  std::set<Expr, ExprLess> positives;
  std::set<Expr, ExprLess> negatives;

  /// False when an identical instance is already stored.
  bool add(Clause ground);
  bool contains(const Clause& ground) const;
};

enum class ExampleStatus { Sat, Unsat, Unknown };

struct ExampleCheck {
  ExampleStatus status = ExampleStatus::Unknown;
  std::vector<Expr> learnt;  ///< Cycle-blocking clauses, in learning order.
};

/// Satisfiability of ground instances with predicates and functions read as
/// uninterpreted symbols and WF variables required to be cycle-free on the
/// asserted edges. Models with cycles are blocked one clause per cycle.
ExampleCheck check_examples_unsat(const std::vector<Clause>& instances, const PfwCsp& sigs, SmtSolver& smt,
                                  std::size_t max_rounds = 1000);

using ValueTuple = std::vector<std::int64_t>;
/// Every elementary cycle once, each starting at its least tuple; order is
/// deterministic.
std::vector<std::vector<ValueTuple>> enumerate_simple_cycles(
    const std::vector<std::pair<ValueTuple, ValueTuple>>& edges);

/// Number of cycles (at most `limit`) in the graph the relation induces on
/// `samples` random tuples with components in [-range, range].
std::size_t count_wf_cycles(const Lambda& wf, std::size_t samples, std::uint64_t seed, std::int64_t range = 20,
                            std::size_t limit = 1);

struct SynthResult {
  std::optional<CandidateSolution> candidate;
  ParamVector params;
  std::size_t bumps = 0;
  std::string reason;  ///< Why no candidate was produced.
};

/// Searches the template space of `params`, bumping on unsat cores, for a
/// candidate satisfying every instance (checked by ground evaluation).
SynthResult synthesize(const std::vector<Clause>& instances, const PfwCsp& csp, ParamVector params,
                       const TemplateConfig& cfg, SmtSolver& smt, std::chrono::steady_clock::time_point deadline,
                       std::size_t max_bumps = 64);

struct Failure {
  std::size_t clause;
  std::map<Symbol, std::int64_t> theta;
};

struct Validation {
  bool valid = false;
  bool unknown = false;  ///< Some clause could not be decided.
  std::vector<Failure> failures;
};

/// One validity query per clause; one countermodel per failed clause.
Validation validate(const PfwCsp& csp, const CandidateSolution& s, SmtSolver& smt);

/// Unit propagation over the stored instances, then resolution of original
/// clauses against the unit facts, `depth` rounds. Only fully ground
/// resolvents are kept.
ExampleStore resolution_closure(const ExampleStore& store, const PfwCsp& csp, int depth);

struct SolveConfig {
  std::size_t max_iterations = 200;
  std::chrono::milliseconds timeout{300000};
  int resolution_depth = 2;
  TemplateConfig templates;
  SmtOptions smt;
  std::ostream* log = nullptr;  ///< JSON object per line and iteration.
  std::string log_tag;          ///< Written into every record when set.
  std::stop_token stop;
};

enum class VerdictKind { Sat, Unsat, Unknown };
const char* to_string(VerdictKind k);

struct Verdict {
  VerdictKind kind = VerdictKind::Unknown;
  CandidateSolution solution;      ///< When Sat.
  std::vector<Clause> examples;    ///< When Unsat: an unsatisfiable instance set.
  std::string reason;              ///< When Unknown.
  std::size_t iterations = 0;
  std::size_t smt_queries = 0;
  std::chrono::milliseconds elapsed{0};
};

Verdict solve(const PfwCsp& csp, const SolveConfig& cfg = {});

}  // namespace muval
