#pragma once

#include <map>
#include <vector>

#include "muval/pfwcsp.hpp"
#include "muval/program.hpp"

namespace muval {

/// Function variable introduced for an existential binder.
struct SkolemInfo {
  Symbol function;
  Symbol variable;          ///< Name of the eliminated binder.
  Symbol site;              ///< Equation head, or empty for the query.
  std::vector<Param> args;  ///< Universals in scope, in binding order.
  Sort ret = Sort::Int;
};

struct WfInfo {
  Symbol wf;
  Symbol predicate;  ///< The inductive predicate whose recursion it bounds.
};

struct ReductionTrace {
  Program normalized;
  Program after_elim_ex;
  Program after_elim_mu;
  std::vector<SkolemInfo> skolems;
  std::vector<WfInfo> wf_vars;  ///< In elimination order.
  /// Final parameter list per predicate. The original parameters are always
  /// the trailing ones; elimination of mu-predicates prepends to the rest.
  std::map<Symbol, std::vector<Param>> params;
};

struct ReductionOptions {
  /// Suffix equations that cannot reach the eliminated predicate keep their
  /// parameter lists, and flags that are true at every call are dropped.
  /// Equi-satisfiable with the plain reduction.
  bool suppress_unused_arguments = false;
};

struct Reduction {
  PfwCsp csp;
  ReductionTrace trace;
};

/// Skolemises every existential of an NNF program (positive occurrences only
/// remain after normalisation). Records one SkolemInfo per binder.
Program elim_ex(const Program& p, ReductionTrace& trace, NameSupply& names);

/// Replaces every mu-equation by a nu-equation guarded by a fresh WF variable,
/// right-most first. Input must be existential-free.
Program elim_mu(const Program& p, ReductionTrace& trace, NameSupply& names, const ReductionOptions& opts = {});

/// Clauses of a nu-only existential-free program: the query and one
/// implication X(x) => body per equation.
PfwCsp elim_nu(const Program& p);

/// normalize, elim_ex, elim_mu, elim_nu.
Reduction reduce(const Program& p, const ReductionOptions& opts = {});

/// Names of every symbol occurring in the program.
NameSupply names_of(const Program& p);

}  // namespace muval
