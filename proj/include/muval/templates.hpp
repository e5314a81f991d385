#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "muval/pfwcsp.hpp"
#include "muval/smt.hpp"

namespace muval {

enum class Family { Ordinary, Function, WellFounded };
const char* to_string(Family f);

/// Component names per family, in record order:
///   ordinary (nd, nc, ac, ad); function (nd, nc, dc, dd, ec, ed);
///   well-founded (nl, np, nc, rc, rd, dc, dd).
const std::vector<std::string>& component_names(Family f);
/// Structural components are counts; the rest are coefficient bounds.
bool is_structural(Family f, std::size_t component);

struct Params {
  Family family = Family::Ordinary;
  std::vector<std::int64_t> values;
  unsigned level = 0;  ///< Number of bumps applied so far.

  std::int64_t get(std::string_view component) const;
  std::int64_t& at(std::string_view component);
};

/// Pointwise order is defined only between vectors over the same variables.
struct ParamVector {
  std::map<Symbol, Params> vars;
  bool operator<=(const ParamVector& o) const;
};

struct TemplateConfig {
  std::vector<std::int64_t> ordinary = {1, 1, 1, 1};
  std::vector<std::int64_t> function = {1, 1, 1, 1, 1, 1};
  std::vector<std::int64_t> well_founded = {1, 1, 1, 1, 1, 1, 1};
  unsigned fairness = 3;
  /// Predicate templates get one copy per valuation of their Bool parameters.
  unsigned bool_split_cap = 6;
};

Family family_of(const PfwCsp& p, Symbol var);
ParamVector initial_params(const PfwCsp& p, const TemplateConfig& cfg = {});

/// Skeleton with unknown coefficients occurring as free Int variables.
struct TemplateInstance {
  Symbol target;
  Family family = Family::Ordinary;
  Lambda skeleton;
  std::vector<Symbol> unknowns;                 ///< Coefficients only.
  std::map<Symbol, std::int64_t> bounds;        ///< |c| <= bound implied by `shape`.
  Expr shape;                                   ///< Over unknowns and auxiliaries.
  std::set<Symbol> multipliers;                 ///< Unknowns that multiply a variable.
};

TemplateInstance build_pred_template(Symbol x, const std::vector<Sort>& args, const Params& p,
                                     unsigned bool_split_cap = 6);
TemplateInstance build_fun_template(Symbol f, const std::vector<Sort>& args, const Params& p);
/// Throws Error on odd arity.
TemplateInstance build_wf_template(Symbol x, const std::vector<Sort>& args, const Params& p);

using TemplateSet = std::map<Symbol, TemplateInstance>;
TemplateSet build_templates(const PfwCsp& csp, const ParamVector& p, const TemplateConfig& cfg = {});

/// Replaces every call by its template. Products of a coefficient with a
/// non-constant term (function templates under predicate arguments) become
/// ite chains over the coefficient's bounded range.
Expr apply_templates(const Expr& e, const TemplateSet& ts);

struct Hypothesis {
  /// "e<i>" per example, "f<k>" per auxiliary naming a function call's value,
  /// "c<k>" per shape.
  std::vector<NamedAssertion> assertions;
  std::map<std::string, Symbol> shape_owner;  ///< Owner of each "f" and "c" assertion.
  std::vector<Symbol> unknowns;
};

/// Models, projected on the unknowns, are exactly the coefficient assignments
/// within the shape constraints whose candidates satisfy every (ground)
/// example.
Hypothesis hypothesis_constraint(const std::vector<Clause>& examples, const TemplateSet& ts);

using CoeffAssignment = std::map<Symbol, std::int64_t>;
/// Unknowns absent from `theta` are taken as zero.
CandidateSolution extract_candidate(const TemplateSet& ts, const CoeffAssignment& theta);

/// Variables named by an unsat core: those occurring in cored examples and
/// the owners of cored shape constraints. `bounded` holds the latter.
struct CoreBlame {
  std::set<Symbol> vars;
  std::set<Symbol> bounded;
};
CoreBlame implicated(const std::vector<std::string>& core, const std::vector<Clause>& examples,
                     const Hypothesis& h);

/// Bumps every implicated variable once (all when none), then catches up any
/// variable lagging more than `fairness` levels behind the most bumped one.
/// A variable whose shape constraint is blamed doubles its bounds, and every
/// third such bump also increments the next structural component
/// round-robin. Otherwise only the structural component is incremented.
ParamVector bump_params(const ParamVector& p, const CoreBlame& blame, unsigned fairness = 3);
/// Every variable in `vars` is treated as bound-blamed.
ParamVector bump_params(const ParamVector& p, const std::set<Symbol>& vars, unsigned fairness = 3);

/// Copy with every multiplier confined to [-1, 1], or nullopt when that
/// changes nothing. The synthesis tries it first so that small solutions
/// are preferred and the linearized products stay short.
std::optional<TemplateSet> unit_multipliers(const TemplateSet& ts);

}  // namespace muval
