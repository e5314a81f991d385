#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "muval/eval.hpp"
#include "muval/program.hpp"

namespace muval {

/// phi \/ pos_1 \/ ... \/ not neg_1 \/ ... universally closed over `vars`.
/// `phi` is quantifier-free and mentions no predicate variable; `pos` and
/// `neg` hold predicate-call nodes.
struct Clause {
  std::vector<Param> vars;
  Expr phi;
  std::vector<Expr> pos;
  std::vector<Expr> neg;
  int source = -1;  ///< Index of the originating assertion, if any.

  bool is_ground() const { return vars.empty(); }
};

/// Builds a clause from a literal list; predicate literals are separated from
/// the constraint. Variables are restricted to those occurring.
Clause make_clause(const std::vector<Expr>& literals, const std::vector<Param>& prefix);
/// Disjunction of all literals, without the universal closure.
Expr clause_matrix(const Clause& c);
std::vector<Clause> clauses_of(const Expr& nnf_formula, int source = -1);

/// Predicate variables include well-founded ones; `wf` marks the latter.
/// A WF predicate over tuples of sorts s has signature s ++ s.
struct PfwCsp {
  std::vector<Signature> preds;
  std::set<Symbol> wf;
  std::vector<Signature> funs;
  std::vector<Clause> clauses;

  const Signature* pred(Symbol name) const;
  const Signature* fun(Symbol name) const;
  bool is_wf(Symbol name) const { return wf.count(name) != 0; }
};

enum class ClauseClass { CHC, CoCHC, LinearCHC, General };
const char* to_string(ClauseClass c);

ClauseClass classify(const Clause& c);
ClauseClass classify(const PfwCsp& p);

class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

/// Renames every X to dual_name(X) and swaps literal polarity. Requires a
/// coCHC or linear set without WF or function variables.
PfwCsp negate_cochc_to_chc(const PfwCsp& p);

/// Lambda per predicate and function variable.
using CandidateSolution = std::map<Symbol, Lambda>;

/// Quantifier-free matrix of the clause with the solution substituted.
Expr apply_solution(const Clause& c, const CandidateSolution& s);
/// Universally closed formulas, one per clause.
std::vector<Expr> apply_solution(const PfwCsp& p, const CandidateSolution& s);

/// Ground instance (vars substituted by values, constants folded).
Clause instantiate(const Clause& c, const std::map<Symbol, std::int64_t>& theta);

/// Direct evaluation of a ground clause under a solution.
bool holds(const Clause& ground, const CandidateSolution& s);

/// Evaluation context resolving calls through a candidate solution.
class SolutionContext final : public EvalContext {
 public:
  explicit SolutionContext(const CandidateSolution& s) : s_(s) {}
  std::int64_t call(const Node& c, const std::vector<std::int64_t>& args) override;

 private:
  const CandidateSolution& s_;
};

/// Equality up to renaming of clause variables and literal order.
bool alpha_equivalent(const Clause& a, const Clause& b);
/// Multiset equality of clause lists up to alpha_equivalent.
bool alpha_equivalent(const std::vector<Clause>& a, const std::vector<Clause>& b);

/// SMT-LIB2 surface format. `declare-fun` with Bool codomain declares a
/// predicate variable; `declare-wf W (s ++ s)` a well-founded one;
/// `declare-fun` with Int codomain or `declare-fnvar` a function variable.
PfwCsp parse_pcsp(std::string_view text);
std::string to_pcsp(const PfwCsp& p);
std::string to_string(const Clause& c);
/// `(define-fun ...)` per variable of `p` in declaration order.
std::string solution_to_smt2(const PfwCsp& p, const CandidateSolution& s);
/// Inverse of solution_to_smt2; bodies may nest ite.
CandidateSolution parse_solution(std::string_view text, const PfwCsp& p);

/// Sanity of a constraint set: literal targets declared, sorts consistent,
/// constraint free of predicate variables.
void check_pcsp(const PfwCsp& p);

}  // namespace muval
