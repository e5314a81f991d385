#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "muval/program.hpp"

namespace muval {

struct SExpr {
  std::string atom;  ///< Symbol, numeral or string literal when `is_list` is false.
  bool is_list = false;
  std::vector<SExpr> list;

  bool is_atom(std::string_view s) const { return !is_list && atom == s; }
  std::string str() const;
};

/// Incremental reader: feed text, pop complete top-level expressions.
class SExprReader {
 public:
  void feed(std::string_view text);
  std::optional<SExpr> pop();
  bool has_partial() const;

 private:
  std::string buf_;
  std::size_t pos_ = 0;
};

std::vector<SExpr> parse_sexprs(std::string_view text);

/// Name resolution for converting SMT-LIB terms into expressions.
struct SmtScope {
  std::vector<Param> vars;
  std::vector<Signature> preds;
  std::vector<Signature> funs;
};

Expr sexpr_to_expr(const SExpr& s, SmtScope& scope);
Sort sexpr_to_sort(const SExpr& s);

/// Parses an SMT-LIB integer value: numeral or (- numeral).
std::optional<std::int64_t> sexpr_int(const SExpr& s);

}  // namespace muval
