#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace muval {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SortError : public Error {
 public:
  using Error::Error;
};

/// Interned identifier. Equality is pointer equality; ordering is lexicographic.
class Symbol {
 public:
  Symbol() = default;
  explicit Symbol(std::string_view text);

  const std::string& str() const;
  bool empty() const { return text_ == nullptr; }

  friend bool operator==(Symbol a, Symbol b) { return a.text_ == b.text_; }
  friend std::strong_ordering operator<=>(Symbol a, Symbol b);

  std::size_t hash() const { return std::hash<const void*>{}(text_); }

 private:
  const std::string* text_ = nullptr;
};

enum class Sort : std::uint8_t { Int, Bool };

std::string_view to_string(Sort s);

struct Param {
  Symbol name;
  Sort sort = Sort::Int;
  friend bool operator==(const Param&, const Param&) = default;
};

enum class Op : std::uint8_t {
  IntLit, BoolLit, Var, Call,
  Add, Sub, Mul, Neg, Ite,
  Eq, Neq, Le, Lt, Ge, Gt,
  Not, And, Or,
  Forall, Exists,
};

enum class CallKind : std::uint8_t { Pred, Fun };

class Node;
using Expr = std::shared_ptr<const Node>;

/// Immutable expression node. Formulas are Bool-sorted expressions.
/// Quantifiers bind exactly one variable (`name`, `bound_sort`) over kids[0].
class Node {
 public:
  Op op;
  Sort sort;
  CallKind call_kind = CallKind::Pred;
  Sort bound_sort = Sort::Int;
  std::int64_t value = 0;
  Symbol name;
  std::vector<Expr> kids;
  std::size_t hash = 0;

  Node(Op op, Sort sort, std::int64_t value, Symbol name, std::vector<Expr> kids,
       CallKind kind = CallKind::Pred, Sort bound = Sort::Int);

  bool is_true() const { return op == Op::BoolLit && value != 0; }
  bool is_false() const { return op == Op::BoolLit && value == 0; }
  bool is_pred_call() const { return op == Op::Call && call_kind == CallKind::Pred; }
  bool is_quantifier() const { return op == Op::Forall || op == Op::Exists; }
  bool is_comparison() const { return op >= Op::Eq && op <= Op::Gt; }
};

// Builders. They check sorts but do not simplify beyond trivial n-ary cases.
Expr int_lit(std::int64_t v);
Expr bool_lit(bool b);
Expr mk_true();
Expr mk_false();
Expr var(Symbol name, Sort sort);
Expr var(const Param& p);
Expr pred_call(Symbol name, std::vector<Expr> args);
Expr fun_call(Symbol name, Sort ret, std::vector<Expr> args);
Expr add(Expr a, Expr b);
Expr sub(Expr a, Expr b);
Expr mul(Expr a, Expr b);
Expr neg(Expr a);
Expr ite(Expr c, Expr t, Expr e);
Expr cmp(Op op, Expr a, Expr b);
Expr eq(Expr a, Expr b);
Expr not_(Expr a);
Expr and_(std::vector<Expr> kids);
Expr or_(std::vector<Expr> kids);
Expr and_(Expr a, Expr b);
Expr or_(Expr a, Expr b);
Expr implies(Expr a, Expr b);
Expr forall(const Param& p, Expr body);
Expr exists(const Param& p, Expr body);
Expr forall(const std::vector<Param>& ps, Expr body);
Expr exists(const std::vector<Param>& ps, Expr body);
/// Same node shape as `e` with new children.
Expr with_kids(const Expr& e, std::vector<Expr> kids);

int compare(const Expr& a, const Expr& b);
bool equal(const Expr& a, const Expr& b);

struct ExprHash {
  std::size_t operator()(const Expr& e) const { return e->hash; }
};
struct ExprEq {
  bool operator()(const Expr& a, const Expr& b) const { return equal(a, b); }
};
struct ExprLess {
  bool operator()(const Expr& a, const Expr& b) const { return compare(a, b) < 0; }
};

/// Surface syntax of `.muclp` files. Re-parses to an equal expression.
std::string to_muclp(const Expr& e);
/// SMT-LIB2 term syntax.
std::string to_smt2(const Expr& e);
std::string smt2_symbol(Symbol s);

/// Free term variables in order of first occurrence.
std::vector<Param> free_vars(const Expr& e);
/// Called predicate/function symbols (no duplicates, first-occurrence order).
std::vector<Symbol> called_symbols(const Expr& e, CallKind kind);
void collect_names(const Expr& e, std::set<std::string>& out);
bool has_quantifier(const Expr& e);

/// λ-abstraction used for substitutions and candidate solutions.
struct Lambda {
  std::vector<Param> params;
  Expr body;
};

/// Capture-avoiding term-variable substitution.
Expr subst_vars(const Expr& e, const std::map<Symbol, Expr>& m);
/// Replaces every call to a symbol in `m` by the beta-reduced lambda body.
/// Replacement bodies are not re-substituted (simultaneous substitution).
Expr subst_calls(const Expr& e, const std::map<Symbol, Lambda>& m);
Expr apply_lambda(const Lambda& l, const std::vector<Expr>& args);

/// Constant folding, linear normalisation of Int terms, Boolean flattening.
Expr simplify(const Expr& e);

/// Equality up to renaming of bound variables.
bool alpha_equivalent(const Expr& a, const Expr& b);

/// Generates names disjoint from a set of reserved names.
class NameSupply {
 public:
  NameSupply() = default;
  explicit NameSupply(std::set<std::string> used) : used_(std::move(used)) {}
  void reserve(std::string_view name) { used_.insert(std::string(name)); }
  void reserve(const Expr& e) { collect_names(e, used_); }
  bool is_used(std::string_view name) const { return used_.count(std::string(name)) != 0; }
  /// `base` itself when unused, otherwise `base!k` for the least free k.
  Symbol fresh(std::string_view base);

 private:
  std::set<std::string> used_;
};

}  // namespace muval

template <>
struct std::hash<muval::Symbol> {
  std::size_t operator()(muval::Symbol s) const { return s.hash(); }
};
