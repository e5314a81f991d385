#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "muval/expr.hpp"

namespace muval {

enum class Fixpoint : std::uint8_t { Mu, Nu };

struct Equation {
  Symbol head;
  std::vector<Param> params;
  Fixpoint kind = Fixpoint::Mu;
  Expr body;
};

/// Sort signature of a predicate (ret = Bool) or function variable.
struct Signature {
  Symbol name;
  std::vector<Sort> args;
  Sort ret = Sort::Bool;
};

/// Ordered equation system with a closed query. Earlier equations are outer.
/// `functions` and `free_preds` list variables not defined by any equation;
/// parsed programs have neither, reduction stages introduce them.
struct Program {
  Expr query;
  std::vector<Equation> equations;
  std::vector<Signature> functions;
  std::vector<Signature> free_preds;

  const Equation* find(Symbol head) const;
  std::optional<std::size_t> index_of(Symbol head) const;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& msg);
  std::size_t line;
  std::size_t column;
};

class WellFormednessError : public Error {
 public:
  using Error::Error;
};

/// A defined predicate occurs under an odd number of negations.
class PositivityViolation : public WellFormednessError {
 public:
  PositivityViolation(Symbol pred, std::string path);
  Symbol pred;
  std::string path;
};

/// Parses `.muclp` text. Bound variables are renamed apart from every
/// parameter, head and other binder of the program.
Program parse_muclp(std::string_view text);
/// Parses a standalone formula whose free variables are `scope`.
Expr parse_formula(std::string_view text, const std::vector<Param>& scope);

std::string to_muclp(const Program& p);

/// Renames binders so that no two binders, parameters or heads share a name.
Program alpha_normalize(const Program& p);

/// Equality up to renaming of parameters and bound variables.
bool alpha_equivalent(const Program& a, const Program& b);

/// Structural checks: arities, sorts, closed query, parameters cover bodies,
/// positivity of defined predicates in bodies and query.
void check_wellformed(const Program& p);

/// Program with NNF bodies and a positive query. Negatively occurring query
/// predicates are redirected to appended dual equations.
Program normalize(const Program& p);

/// Name of the complement predicate of `x`; an involution.
Symbol dual_name(Symbol x);

/// Complement program: kinds flipped, bodies negated, X renamed to dual_name(X),
/// query negated. Output is in NNF.
Program demorgan_dual(const Program& p);

/// Negation normal form: negations only on atoms. Implication already desugared.
Expr nnf(const Expr& e);

/// True iff some call to a symbol in `preds` occurs under an odd number of
/// negations or inside a term position (ite condition, argument, Bool equality).
bool has_negative_occurrence(const Expr& e, const std::vector<Symbol>& preds);

class ResidualExistential : public Error {
 public:
  using Error::Error;
};

/// Universal prefix and CNF matrix (clauses as literal lists).
struct PrenexCnf {
  std::vector<Param> prefix;
  std::vector<std::vector<Expr>> clauses;
};

/// Input must be in NNF. Throws ResidualExistential on any existential.
/// Clauses containing `true` or complementary literals are dropped and
/// `false` literals removed.
PrenexCnf prenex_cnf(const Expr& nnf_formula);

}  // namespace muval
