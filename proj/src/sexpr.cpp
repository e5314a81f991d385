#include "muval/sexpr.hpp"

#include <algorithm>
#include <cctype>

namespace muval {

std::string SExpr::str() const {
  if (!is_list) return atom;
  std::string out = "(";
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i) out += ' ';
    out += list[i].str();
  }
  return out + ")";
}

void SExprReader::feed(std::string_view text) { buf_.append(text); }

bool SExprReader::has_partial() const {
  // Whitespace and newline-terminated comments are not partial input.
  for (std::size_t i = pos_; i < buf_.size(); ++i) {
    if (buf_[i] == ';') {
      i = buf_.find('\n', i);
      if (i == std::string::npos) return true;
    } else if (!std::isspace(static_cast<unsigned char>(buf_[i]))) {
      return true;
    }
  }
  return false;
}

namespace {

// Returns the end offset of the expression starting at `i`, or npos if incomplete.
// Fills `out` when complete.
std::size_t read_one(const std::string& b, std::size_t i, SExpr& out) {
  const std::size_t n = b.size();
  while (i < n) {
    if (std::isspace(static_cast<unsigned char>(b[i]))) {
      ++i;
    } else if (b[i] == ';') {
      while (i < n && b[i] != '\n') ++i;
      if (i == n) return std::string::npos;
    } else {
      break;
    }
  }
  if (i >= n) return std::string::npos;
  if (b[i] == '(') {
    out = SExpr{};
    out.is_list = true;
    ++i;
    while (true) {
      while (i < n && std::isspace(static_cast<unsigned char>(b[i]))) ++i;
      if (i < n && b[i] == ';') {
        while (i < n && b[i] != '\n') ++i;
        continue;
      }
      if (i >= n) return std::string::npos;
      if (b[i] == ')') return i + 1;
      SExpr kid;
      std::size_t j = read_one(b, i, kid);
      if (j == std::string::npos) return j;
      out.list.push_back(std::move(kid));
      i = j;
    }
  }
  if (b[i] == ')') throw Error("unbalanced ')' in s-expression");
  out = SExpr{};
  if (b[i] == '|') {
    std::size_t j = b.find('|', i + 1);
    if (j == std::string::npos) return j;
    out.atom = b.substr(i + 1, j - i - 1);
    return j + 1;
  }
  if (b[i] == '"') {
    std::size_t j = i + 1;
    while (true) {
      if (j >= n) return std::string::npos;
      if (b[j] == '"') {
        if (j + 1 < n && b[j + 1] == '"') {
          j += 2;
          continue;
        }
        if (j + 1 >= n) return std::string::npos;
        break;
      }
      ++j;
    }
    out.atom = b.substr(i, j + 1 - i);
    return j + 1;
  }
  std::size_t j = i;
  while (j < n && !std::isspace(static_cast<unsigned char>(b[j])) && b[j] != '(' && b[j] != ')' &&
         b[j] != ';') {
    ++j;
  }
  // An atom touching the end of the buffer may continue in the next chunk.
  if (j == n) return std::string::npos;
  out.atom = b.substr(i, j - i);
  return j;
}

}  // namespace

std::optional<SExpr> SExprReader::pop() {
  SExpr out;
  std::size_t end = read_one(buf_, pos_, out);
  if (end == std::string::npos) return std::nullopt;
  pos_ = end;
  if (pos_ > 4096) {
    buf_.erase(0, pos_);
    pos_ = 0;
  }
  return out;
}

std::vector<SExpr> parse_sexprs(std::string_view text) {
  SExprReader r;
  r.feed(text);
  r.feed("\n");
  std::vector<SExpr> out;
  while (auto e = r.pop()) out.push_back(std::move(*e));
  if (r.has_partial()) throw Error("incomplete s-expression");
  return out;
}

std::optional<std::int64_t> sexpr_int(const SExpr& s) {
  auto numeral = [](const std::string& a) -> std::optional<std::int64_t> {
    if (a.empty() || !std::all_of(a.begin(), a.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      return std::nullopt;
    }
    try {
      return std::stoll(a);
    } catch (const std::exception&) {
      return std::nullopt;
    }
  };
  if (!s.is_list) return numeral(s.atom);
  if (s.list.size() == 2 && s.list[0].is_atom("-") && !s.list[1].is_list) {
    auto v = numeral(s.list[1].atom);
    if (v) return -*v;
  }
  return std::nullopt;
}

Sort sexpr_to_sort(const SExpr& s) {
  if (s.is_atom("Int")) return Sort::Int;
  if (s.is_atom("Bool")) return Sort::Bool;
  throw SortError("unsupported sort " + s.str());
}

namespace {

Expr fold(const std::vector<Expr>& xs, Expr (*f)(Expr, Expr)) {
  Expr acc = xs.at(0);
  for (std::size_t i = 1; i < xs.size(); ++i) acc = f(acc, xs[i]);
  return acc;
}

Expr chain(Op op, const std::vector<Expr>& xs) {
  if (xs.size() < 2) throw Error("comparison needs two operands");
  std::vector<Expr> parts;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) parts.push_back(cmp(op, xs[i], xs[i + 1]));
  return and_(std::move(parts));
}

}  // namespace

Expr sexpr_to_expr(const SExpr& s, SmtScope& scope) {
  if (!s.is_list) {
    if (auto v = sexpr_int(s)) return int_lit(*v);
    if (s.atom == "true") return mk_true();
    if (s.atom == "false") return mk_false();
    Symbol name(s.atom);
    for (auto it = scope.vars.rbegin(); it != scope.vars.rend(); ++it) {
      if (it->name == name) return var(*it);
    }
    for (const auto& p : scope.preds) {
      if (p.name == name && p.args.empty()) return pred_call(name, {});
    }
    for (const auto& f : scope.funs) {
      if (f.name == name && f.args.empty()) return fun_call(name, f.ret, {});
    }
    throw Error("unknown symbol " + s.atom);
  }
  if (s.list.empty()) throw Error("empty application");
  if (auto v = sexpr_int(s)) return int_lit(*v);
  const SExpr& head = s.list[0];
  if (head.is_list) throw Error("unsupported application " + s.str());
  const std::string& f = head.atom;
  if (f == "forall" || f == "exists") {
    if (s.list.size() != 3 || !s.list[1].is_list) throw Error("malformed quantifier " + s.str());
    std::vector<Param> ps;
    for (const auto& b : s.list[1].list) {
      if (!b.is_list || b.list.size() != 2 || b.list[0].is_list) throw Error("malformed binder");
      ps.push_back(Param{Symbol(b.list[0].atom), sexpr_to_sort(b.list[1])});
    }
    const std::size_t saved = scope.vars.size();
    scope.vars.insert(scope.vars.end(), ps.begin(), ps.end());
    Expr body = sexpr_to_expr(s.list[2], scope);
    scope.vars.resize(saved);
    return f == "forall" ? forall(ps, body) : exists(ps, body);
  }
  std::vector<Expr> args;
  for (std::size_t i = 1; i < s.list.size(); ++i) args.push_back(sexpr_to_expr(s.list[i], scope));
  if (f == "+") return fold(args, add);
  if (f == "-") return args.size() == 1 ? neg(args[0]) : fold(args, sub);
  if (f == "*") return fold(args, mul);
  if (f == "ite" && args.size() == 3) return ite(args[0], args[1], args[2]);
  if (f == "=") return chain(Op::Eq, args);
  if (f == "distinct" && args.size() == 2) return cmp(Op::Neq, args[0], args[1]);
  if (f == "<=") return chain(Op::Le, args);
  if (f == "<") return chain(Op::Lt, args);
  if (f == ">=") return chain(Op::Ge, args);
  if (f == ">") return chain(Op::Gt, args);
  if (f == "not" && args.size() == 1) return not_(args[0]);
  if (f == "and") return and_(std::move(args));
  if (f == "or") return or_(std::move(args));
  if (f == "=>" && args.size() == 2) return implies(args[0], args[1]);
  Symbol name(f);
  for (const auto& p : scope.preds) {
    if (p.name == name) {
      if (p.args.size() != args.size()) throw SortError("arity mismatch for " + f);
      return pred_call(name, std::move(args));
    }
  }
  for (const auto& fn : scope.funs) {
    if (fn.name == name) {
      if (fn.args.size() != args.size()) throw SortError("arity mismatch for " + f);
      return fun_call(name, fn.ret, std::move(args));
    }
  }
  throw Error("unknown function symbol " + f);
}

}  // namespace muval
