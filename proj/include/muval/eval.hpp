#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "muval/program.hpp"

namespace muval {

class Timeout : public Error {
 public:
  Timeout() : Error("time budget exhausted") {}
};

/// Bool values are represented as 0/1.
using Env = std::vector<std::pair<Symbol, std::int64_t>>;

/// Supplies interpretations of calls and quantifier ranges to `evaluate`.
class EvalContext {
 public:
  virtual ~EvalContext() = default;
  virtual std::int64_t call(const Node& call, const std::vector<std::int64_t>& args) = 0;
  /// Inclusive range of Int quantifiers. Throws by default (ground evaluation).
  virtual std::pair<std::int64_t, std::int64_t> int_range();
};

/// Evaluates `e` under `env`. Arithmetic is exact (overflow throws).
std::int64_t evaluate(const Expr& e, Env& env, EvalContext& ctx);

/// Evaluates a quantifier-free, call-free expression.
std::int64_t evaluate_ground(const Expr& e, const Env& env = {});

/// Finite interpretation of free function and predicate variables.
struct FiniteInterpretation {
  std::map<Symbol, std::map<std::vector<std::int64_t>, std::int64_t>> functions;
  std::map<Symbol, std::set<std::vector<std::int64_t>>> predicates;
};

enum class BoundedVerdict { Valid, Invalid, OutOfDomain };

const char* to_string(BoundedVerdict v);

/// Decides the program over Int restricted to [-bound, bound]. Quantifiers range
/// over that interval. Predicate applications outside it are resolved once with
/// false and once with true; if the verdicts differ the result is OutOfDomain.
/// A function application without a table entry also yields OutOfDomain.
BoundedVerdict bounded_evaluate(
    const Program& p, std::int64_t bound,
    std::optional<std::chrono::steady_clock::time_point> deadline = std::nullopt,
    const FiniteInterpretation* interp = nullptr);

/// Truth table of every defined predicate at the fixpoint (test helper).
/// Entry i of a table enumerates parameter tuples in lexicographic order of
/// their values, Int components ranging over [-bound, bound], Bool over {0, 1}.
std::map<Symbol, std::vector<bool>> bounded_tables(const Program& p, std::int64_t bound,
                                                   bool boundary_value);

}  // namespace muval
