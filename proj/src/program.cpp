#include "muval/program.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <unordered_set>

namespace muval {

const Equation* Program::find(Symbol head) const {
  for (const auto& e : equations) {
    if (e.head == head) return &e;
  }
  return nullptr;
}

std::optional<std::size_t> Program::index_of(Symbol head) const {
  for (std::size_t i = 0; i < equations.size(); ++i) {
    if (equations[i].head == head) return i;
  }
  return std::nullopt;
}

ParseError::ParseError(std::size_t l, std::size_t c, const std::string& msg)
    : Error(std::to_string(l) + ":" + std::to_string(c) + ": " + msg), line(l), column(c) {}

PositivityViolation::PositivityViolation(Symbol p, std::string pth)
    : WellFormednessError("predicate " + p.str() + " occurs negatively at " + pth),
      pred(p),
      path(std::move(pth)) {}

// ---------------------------------------------------------------- lexer

namespace {

enum class Tok {
  End, Int, Ident, LParen, RParen, Comma, Semi, Colon, Dot, Plus, Minus, Star,
  Eq, Neq, Le, Lt, Ge, Gt, And, Or, Implies, FixMu, FixNu,
  KwQuery, KwForall, KwExists, KwNot, KwTrue, KwFalse, KwIte, KwInt, KwBool,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t value = 0;
  std::size_t line = 1;
  std::size_t col = 1;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '!';
}

std::vector<Token> lex(std::string_view src) {
  static const std::map<std::string, Tok, std::less<>> keywords = {
      {"query", Tok::KwQuery}, {"forall", Tok::KwForall}, {"exists", Tok::KwExists},
      {"not", Tok::KwNot},     {"true", Tok::KwTrue},     {"false", Tok::KwFalse},
      {"ite", Tok::KwIte},     {"int", Tok::KwInt},       {"bool", Tok::KwBool},
  };
  std::vector<Token> out;
  std::size_t i = 0, line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    auto rest = src.substr(i);
    auto starts = [&](std::string_view s) { return rest.substr(0, s.size()) == s; };
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::Int;
      t.text = std::string(src.substr(i, j - i));
      try {
        t.value = std::stoll(t.text);
      } catch (const std::exception&) {
        throw ParseError(line, col, "integer literal out of range: " + t.text);
      }
      advance(j - i);
    } else if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      t.text = std::string(src.substr(i, j - i));
      auto kw = keywords.find(t.text);
      t.kind = kw == keywords.end() ? Tok::Ident : kw->second;
      advance(j - i);
    } else if ((starts("=mu") || starts("=nu")) &&
               (rest.size() == 3 || !ident_char(rest[3]))) {
      t.kind = rest[1] == 'm' ? Tok::FixMu : Tok::FixNu;
      t.text = std::string(rest.substr(0, 3));
      advance(3);
    } else {
      static const std::pair<std::string_view, Tok> puncts[] = {
          {"/\\", Tok::And}, {"\\/", Tok::Or}, {"=>", Tok::Implies}, {"!=", Tok::Neq},
          {"<=", Tok::Le},   {">=", Tok::Ge},  {"<", Tok::Lt},       {">", Tok::Gt},
          {"=", Tok::Eq},    {"(", Tok::LParen}, {")", Tok::RParen}, {",", Tok::Comma},
          {";", Tok::Semi},  {":", Tok::Colon}, {".", Tok::Dot},     {"+", Tok::Plus},
          {"-", Tok::Minus}, {"*", Tok::Star},
      };
      bool matched = false;
      for (const auto& [text, kind] : puncts) {
        if (starts(text)) {
          t.kind = kind;
          t.text = std::string(text);
          advance(text.size());
          matched = true;
          break;
        }
      }
      if (!matched) throw ParseError(line, col, std::string("unexpected character '") + c + "'");
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

// ---------------------------------------------------------------- parser

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program program() {
    Program p;
    expect(Tok::KwQuery, "'query'");
    p.query = expr();
    expect(Tok::Semi, "';'");
    while (peek().kind != Tok::End) p.equations.push_back(equation());
    return p;
  }

  Expr standalone(const std::vector<Param>& scope) {
    scope_ = scope;
    Expr e = expr();
    if (peek().kind != Tok::End) fail(peek(), "unexpected trailing input");
    return e;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Param> scope_;

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void fail(const Token& t, const std::string& msg) const {
    throw ParseError(t.line, t.col, msg + (t.kind == Tok::End ? " at end of input" : " near '" + t.text + "'"));
  }
  const Token& expect(Tok k, const char* what) {
    if (peek().kind != k) fail(peek(), std::string("expected ") + what);
    return next();
  }

  template <class F>
  Expr located(const Token& t, F&& build) {
    try {
      return build();
    } catch (const SortError& e) {
      throw SortError(std::to_string(t.line) + ":" + std::to_string(t.col) + ": " + e.what());
    }
  }

  std::vector<Param> params(Tok terminator) {
    std::vector<Param> ps;
    if (peek().kind == terminator) return ps;
    do {
      const Token& name = expect(Tok::Ident, "parameter name");
      expect(Tok::Colon, "':'");
      Sort s;
      if (accept(Tok::KwInt)) {
        s = Sort::Int;
      } else if (accept(Tok::KwBool)) {
        s = Sort::Bool;
      } else {
        fail(peek(), "expected 'int' or 'bool'");
      }
      ps.push_back(Param{Symbol(name.text), s});
    } while (accept(Tok::Comma));
    return ps;
  }

  Equation equation() {
    Equation eq;
    const Token& head = expect(Tok::Ident, "equation head");
    eq.head = Symbol(head.text);
    if (accept(Tok::LParen)) {
      eq.params = params(Tok::RParen);
      expect(Tok::RParen, "')'");
    }
    if (accept(Tok::FixMu)) {
      eq.kind = Fixpoint::Mu;
    } else if (accept(Tok::FixNu)) {
      eq.kind = Fixpoint::Nu;
    } else {
      fail(peek(), "expected '=mu' or '=nu'");
    }
    scope_ = eq.params;
    const Token& at = peek();
    eq.body = expr();
    if (eq.body->sort != Sort::Bool) fail(at, "equation body must be a formula");
    scope_.clear();
    expect(Tok::Semi, "';'");
    return eq;
  }

  Expr expr() { return implication(); }

  Expr implication() {
    Expr lhs = disjunction();
    const Token& t = peek();
    if (accept(Tok::Implies)) {
      Expr rhs = implication();
      return located(t, [&] { return implies(lhs, rhs); });
    }
    return lhs;
  }

  Expr disjunction() {
    std::vector<Expr> kids{conjunction()};
    const Token& t = peek();
    while (accept(Tok::Or)) kids.push_back(conjunction());
    return located(t, [&] { return or_(std::move(kids)); });
  }

  Expr conjunction() {
    std::vector<Expr> kids{unary()};
    const Token& t = peek();
    while (accept(Tok::And)) kids.push_back(unary());
    return located(t, [&] { return and_(std::move(kids)); });
  }

  Expr unary() {
    const Token& t = peek();
    if (accept(Tok::KwNot)) {
      Expr k = unary();
      return located(t, [&] { return not_(k); });
    }
    if (t.kind == Tok::KwForall || t.kind == Tok::KwExists) return quantifier();
    return comparison();
  }

  Expr quantifier() {
    const Token& t = next();
    const bool is_forall = t.kind == Tok::KwForall;
    std::vector<Param> ps = params(Tok::Dot);
    if (ps.empty()) fail(peek(), "quantifier without variables");
    expect(Tok::Dot, "'.'");
    const std::size_t saved = scope_.size();
    scope_.insert(scope_.end(), ps.begin(), ps.end());
    Expr body = expr();
    scope_.resize(saved);
    return located(t, [&] { return is_forall ? forall(ps, body) : exists(ps, body); });
  }

  Expr comparison() {
    Expr lhs = additive();
    const Token& t = peek();
    Op op;
    switch (t.kind) {
      case Tok::Eq: op = Op::Eq; break;
      case Tok::Neq: op = Op::Neq; break;
      case Tok::Le: op = Op::Le; break;
      case Tok::Lt: op = Op::Lt; break;
      case Tok::Ge: op = Op::Ge; break;
      case Tok::Gt: op = Op::Gt; break;
      default: return lhs;
    }
    next();
    Expr rhs = additive();
    return located(t, [&] { return cmp(op, lhs, rhs); });
  }

  Expr additive() {
    Expr acc = multiplicative();
    while (true) {
      const Token& t = peek();
      if (accept(Tok::Plus)) {
        Expr r = multiplicative();
        acc = located(t, [&] { return add(acc, r); });
      } else if (accept(Tok::Minus)) {
        Expr r = multiplicative();
        acc = located(t, [&] { return sub(acc, r); });
      } else {
        return acc;
      }
    }
  }

  Expr multiplicative() {
    Expr acc = prefix();
    while (true) {
      const Token& t = peek();
      if (!accept(Tok::Star)) return acc;
      Expr r = prefix();
      if (acc->op != Op::IntLit && r->op != Op::IntLit) fail(t, "nonlinear multiplication");
      acc = located(t, [&] { return mul(acc, r); });
    }
  }

  Expr prefix() {
    const Token& t = peek();
    if (accept(Tok::Minus)) {
      if (peek().kind == Tok::Int) {
        const Token& lit = next();
        return int_lit(-lit.value);
      }
      Expr k = prefix();
      return located(t, [&] { return neg(k); });
    }
    return primary();
  }

  Expr primary() {
    const Token& t = next();
    switch (t.kind) {
      case Tok::Int: return int_lit(t.value);
      case Tok::KwTrue: return mk_true();
      case Tok::KwFalse: return mk_false();
      case Tok::KwIte: {
        expect(Tok::LParen, "'('");
        Expr c = expr();
        expect(Tok::Comma, "','");
        Expr a = expr();
        expect(Tok::Comma, "','");
        Expr b = expr();
        expect(Tok::RParen, "')'");
        return located(t, [&] { return ite(c, a, b); });
      }
      case Tok::LParen: {
        Expr e = expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::KwForall:
      case Tok::KwExists:
        --pos_;
        return quantifier();
      case Tok::Ident: {
        Symbol name(t.text);
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
          if (it->name == name) {
            if (peek().kind == Tok::LParen) fail(peek(), "variable applied to arguments");
            return var(*it);
          }
        }
        std::vector<Expr> args;
        if (accept(Tok::LParen)) {
          if (!accept(Tok::RParen)) {
            do {
              args.push_back(expr());
            } while (accept(Tok::Comma));
            expect(Tok::RParen, "')'");
          }
        }
        return pred_call(name, std::move(args));
      }
      default:
        --pos_;
        fail(t, "expected an expression");
    }
  }
};

// ---------------------------------------------------------------- renaming

Expr rename_binders(const Expr& e, NameSupply& ns, std::map<Symbol, Symbol>& renaming) {
  switch (e->op) {
    case Op::Var: {
      auto it = renaming.find(e->name);
      return it == renaming.end() ? e : var(it->second, e->sort);
    }
    case Op::Forall:
    case Op::Exists: {
      Symbol fresh = ns.fresh(e->name.str());
      auto saved = renaming.find(e->name);
      std::optional<Symbol> prev;
      if (saved != renaming.end()) prev = saved->second;
      renaming[e->name] = fresh;
      Expr body = rename_binders(e->kids[0], ns, renaming);
      if (prev) {
        renaming[e->name] = *prev;
      } else {
        renaming.erase(e->name);
      }
      Param p{fresh, e->bound_sort};
      return e->op == Op::Forall ? forall(p, body) : exists(p, body);
    }
    default: {
      if (e->kids.empty()) return e;
      std::vector<Expr> kids;
      kids.reserve(e->kids.size());
      for (const auto& k : e->kids) kids.push_back(rename_binders(k, ns, renaming));
      return with_kids(e, std::move(kids));
    }
  }
}

}  // namespace

Program alpha_normalize(const Program& p) {
  NameSupply ns;
  for (const auto& eq : p.equations) {
    ns.reserve(eq.head.str());
    for (const auto& prm : eq.params) ns.reserve(prm.name.str());
  }
  for (const auto& f : p.functions) ns.reserve(f.name.str());
  for (const auto& f : p.free_preds) ns.reserve(f.name.str());
  Program out = p;
  std::map<Symbol, Symbol> renaming;
  out.query = rename_binders(p.query, ns, renaming);
  for (auto& eq : out.equations) eq.body = rename_binders(eq.body, ns, renaming);
  return out;
}

Program parse_muclp(std::string_view text) {
  Parser parser(lex(text));
  Program p = parser.program();
  return alpha_normalize(p);
}

Expr parse_formula(std::string_view text, const std::vector<Param>& scope) {
  Parser parser(lex(text));
  return parser.standalone(scope);
}

std::string to_muclp(const Program& p) {
  std::string out;
  for (const auto& f : p.functions) {
    out += "// function " + f.name.str() + "(";
    for (std::size_t i = 0; i < f.args.size(); ++i) {
      out += (i ? ", " : "") + std::string(to_string(f.args[i]));
    }
    out += ") : " + std::string(to_string(f.ret)) + "\n";
  }
  for (const auto& f : p.free_preds) {
    out += "// predicate " + f.name.str() + "(";
    for (std::size_t i = 0; i < f.args.size(); ++i) {
      out += (i ? ", " : "") + std::string(to_string(f.args[i]));
    }
    out += ")\n";
  }
  out += "query " + to_muclp(p.query) + ";\n";
  for (const auto& eq : p.equations) {
    out += eq.head.str() + "(";
    for (std::size_t i = 0; i < eq.params.size(); ++i) {
      if (i) out += ", ";
      out += eq.params[i].name.str() + ": " + std::string(to_string(eq.params[i].sort));
    }
    out += eq.kind == Fixpoint::Mu ? ") =mu " : ") =nu ";
    out += to_muclp(eq.body) + ";\n";
  }
  return out;
}

bool alpha_equivalent(const Program& a, const Program& b) {
  if (a.equations.size() != b.equations.size()) return false;
  if (!alpha_equivalent(a.query, b.query)) return false;
  for (std::size_t i = 0; i < a.equations.size(); ++i) {
    const auto& x = a.equations[i];
    const auto& y = b.equations[i];
    if (x.head != y.head || x.kind != y.kind || x.params.size() != y.params.size()) return false;
    for (std::size_t k = 0; k < x.params.size(); ++k) {
      if (x.params[k].sort != y.params[k].sort) return false;
    }
    if (!alpha_equivalent(forall(x.params, x.body), forall(y.params, y.body))) return false;
  }
  return true;
}

// ---------------------------------------------------------------- well-formedness

namespace {

bool mentions(const Expr& e, const std::set<Symbol>& preds) {
  if (e->is_pred_call() && preds.count(e->name)) return true;
  return std::any_of(e->kids.begin(), e->kids.end(),
                     [&](const Expr& k) { return mentions(k, preds); });
}

Symbol first_mentioned(const Expr& e, const std::set<Symbol>& preds) {
  if (e->is_pred_call() && preds.count(e->name)) return e->name;
  for (const auto& k : e->kids) {
    Symbol s = first_mentioned(k, preds);
    if (!s.empty()) return s;
  }
  return {};
}

const char* op_name(Op op) {
  switch (op) {
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Not: return "not";
    case Op::Forall: return "forall";
    case Op::Exists: return "exists";
    case Op::Call: return "call";
    case Op::Ite: return "ite";
    default: return "cmp";
  }
}

// Throws on the first offending occurrence.
void check_polarity(const Expr& e, const std::set<Symbol>& preds, bool positive,
                    std::vector<std::string>& path) {
  switch (e->op) {
    case Op::Call:
      if (e->call_kind == CallKind::Pred && preds.count(e->name) && !positive) {
        std::string p;
        for (const auto& s : path) p += (p.empty() ? "" : "/") + s;
        throw PositivityViolation(e->name, p.empty() ? "top" : p);
      }
      for (std::size_t i = 0; i < e->kids.size(); ++i) {
        if (mentions(e->kids[i], preds)) {
          path.push_back(e->name.str() + "[" + std::to_string(i) + "]");
          std::string p;
          for (const auto& s : path) p += (p.empty() ? "" : "/") + s;
          throw PositivityViolation(first_mentioned(e->kids[i], preds), p);
        }
      }
      return;
    case Op::Not:
      path.push_back("not");
      check_polarity(e->kids[0], preds, !positive, path);
      path.pop_back();
      return;
    case Op::And:
    case Op::Or:
    case Op::Forall:
    case Op::Exists:
      for (std::size_t i = 0; i < e->kids.size(); ++i) {
        path.push_back(std::string(op_name(e->op)) + "[" + std::to_string(i) + "]");
        check_polarity(e->kids[i], preds, positive, path);
        path.pop_back();
      }
      return;
    case Op::Ite:
      if (e->sort == Sort::Bool) {
        path.push_back("ite[0]");
        if (mentions(e->kids[0], preds)) {
          std::string p;
          for (const auto& s : path) p += (p.empty() ? "" : "/") + s;
          throw PositivityViolation(first_mentioned(e->kids[0], preds), p);
        }
        path.pop_back();
        for (std::size_t i = 1; i < 3; ++i) {
          path.push_back("ite[" + std::to_string(i) + "]");
          check_polarity(e->kids[i], preds, positive, path);
          path.pop_back();
        }
        return;
      }
      [[fallthrough]];
    default:
      if (mentions(e, preds)) {
        path.push_back(op_name(e->op));
        std::string p;
        for (const auto& s : path) p += (p.empty() ? "" : "/") + s;
        throw PositivityViolation(first_mentioned(e, preds), p);
      }
      return;
  }
}

void check_calls(const Expr& e, const Program& p, const std::string& where) {
  if (e->op == Op::Call) {
    const std::vector<Sort>* sorts = nullptr;
    std::vector<Sort> tmp;
    if (e->call_kind == CallKind::Pred) {
      if (const Equation* eq = p.find(e->name)) {
        for (const auto& prm : eq->params) tmp.push_back(prm.sort);
        sorts = &tmp;
      } else {
        for (const auto& f : p.free_preds) {
          if (f.name == e->name) sorts = &f.args;
        }
      }
    } else {
      for (const auto& f : p.functions) {
        if (f.name == e->name) {
          sorts = &f.args;
          if (f.ret != e->sort) throw SortError("function " + f.name.str() + " used at wrong sort in " + where);
        }
      }
    }
    if (!sorts) {
      throw WellFormednessError("undefined " +
                                std::string(e->kids.empty() ? "variable or predicate " : "predicate ") +
                                e->name.str() + " in " + where);
    }
    if (sorts->size() != e->kids.size()) {
      throw SortError("arity mismatch for " + e->name.str() + " in " + where);
    }
    for (std::size_t i = 0; i < sorts->size(); ++i) {
      if ((*sorts)[i] != e->kids[i]->sort) {
        throw SortError("argument " + std::to_string(i + 1) + " of " + e->name.str() +
                        " has wrong sort in " + where);
      }
    }
  }
  for (const auto& k : e->kids) check_calls(k, p, where);
}

}  // namespace

bool has_negative_occurrence(const Expr& e, const std::vector<Symbol>& preds) {
  std::set<Symbol> s(preds.begin(), preds.end());
  std::vector<std::string> path;
  try {
    check_polarity(e, s, true, path);
  } catch (const PositivityViolation&) {
    return true;
  }
  return false;
}

void check_wellformed(const Program& p) {
  std::set<Symbol> heads;
  for (const auto& eq : p.equations) {
    if (!heads.insert(eq.head).second) {
      throw WellFormednessError("duplicate equation for " + eq.head.str());
    }
    std::set<Symbol> names;
    for (const auto& prm : eq.params) {
      if (!names.insert(prm.name).second) {
        throw WellFormednessError("duplicate parameter " + prm.name.str() + " of " + eq.head.str());
      }
    }
  }
  if (!p.query || p.query->sort != Sort::Bool) throw SortError("query must be a formula");
  if (auto fv = free_vars(p.query); !fv.empty()) {
    throw WellFormednessError("query is not closed: free variable " + fv.front().name.str());
  }
  check_calls(p.query, p, "query");
  for (const auto& eq : p.equations) {
    const std::string where = "body of " + eq.head.str();
    if (eq.body->sort != Sort::Bool) throw SortError(where + " is not a formula");
    for (const auto& v : free_vars(eq.body)) {
      auto it = std::find_if(eq.params.begin(), eq.params.end(),
                             [&](const Param& q) { return q.name == v.name; });
      if (it == eq.params.end()) {
        throw WellFormednessError("unbound variable " + v.name.str() + " in " + where);
      }
      if (it->sort != v.sort) throw SortError("variable " + v.name.str() + " used at wrong sort in " + where);
    }
    check_calls(eq.body, p, where);
    std::vector<std::string> path{eq.head.str()};
    check_polarity(eq.body, heads, true, path);
  }
}

// ---------------------------------------------------------------- NNF and duals

namespace {

Op negated_cmp(Op op) {
  switch (op) {
    case Op::Eq: return Op::Neq;
    case Op::Neq: return Op::Eq;
    case Op::Le: return Op::Gt;
    case Op::Lt: return Op::Ge;
    case Op::Ge: return Op::Lt;
    default: return Op::Le;
  }
}

Expr nnf_rec(const Expr& e, bool positive) {
  switch (e->op) {
    case Op::BoolLit: return positive ? e : bool_lit(e->value == 0);
    case Op::Not: return nnf_rec(e->kids[0], !positive);
    case Op::And:
    case Op::Or: {
      std::vector<Expr> kids;
      kids.reserve(e->kids.size());
      for (const auto& k : e->kids) kids.push_back(nnf_rec(k, positive));
      const bool conj = (e->op == Op::And) == positive;
      return conj ? and_(std::move(kids)) : or_(std::move(kids));
    }
    case Op::Forall:
    case Op::Exists: {
      Param p{e->name, e->bound_sort};
      Expr body = nnf_rec(e->kids[0], positive);
      const bool univ = (e->op == Op::Forall) == positive;
      return univ ? forall(p, body) : exists(p, body);
    }
    case Op::Ite:
      if (e->sort == Sort::Bool) {
        const Expr& c = e->kids[0];
        return nnf_rec(or_(and_(c, e->kids[1]), and_(not_(c), e->kids[2])), positive);
      }
      return e;
    default:
      if (positive) return e;
      if (e->is_comparison()) return cmp(negated_cmp(e->op), e->kids[0], e->kids[1]);
      return not_(e);
  }
}

Expr redirect_negated(const Expr& e, const std::set<Symbol>& heads) {
  if (e->op == Op::Not && e->kids[0]->is_pred_call() && heads.count(e->kids[0]->name)) {
    return pred_call(dual_name(e->kids[0]->name), e->kids[0]->kids);
  }
  if (e->kids.empty() || e->op == Op::Call) return e;
  std::vector<Expr> kids;
  for (const auto& k : e->kids) kids.push_back(redirect_negated(k, heads));
  return with_kids(e, std::move(kids));
}

}  // namespace

Expr nnf(const Expr& e) { return nnf_rec(e, true); }

Symbol dual_name(Symbol x) {
  const std::string& s = x.str();
  if (s.rfind("not_", 0) == 0 && s.size() > 4) return Symbol(s.substr(4));
  return Symbol("not_" + s);
}

Program demorgan_dual(const Program& p) {
  std::map<Symbol, Lambda> sigma;
  for (const auto& eq : p.equations) {
    std::vector<Expr> args;
    for (const auto& prm : eq.params) args.push_back(var(prm));
    sigma[eq.head] = Lambda{eq.params, not_(pred_call(dual_name(eq.head), args))};
  }
  Program d;
  d.functions = p.functions;
  d.free_preds = p.free_preds;
  d.query = nnf(not_(subst_calls(p.query, sigma)));
  for (const auto& eq : p.equations) {
    Equation n;
    n.head = dual_name(eq.head);
    n.params = eq.params;
    n.kind = eq.kind == Fixpoint::Mu ? Fixpoint::Nu : Fixpoint::Mu;
    n.body = nnf(not_(subst_calls(eq.body, sigma)));
    d.equations.push_back(std::move(n));
  }
  return d;
}

Program normalize(const Program& p) {
  check_wellformed(p);
  Program out = p;
  std::set<Symbol> heads;
  std::vector<Symbol> head_list;
  for (auto& eq : out.equations) {
    eq.body = nnf(eq.body);
    heads.insert(eq.head);
    head_list.push_back(eq.head);
  }
  out.query = nnf(out.query);
  if (!has_negative_occurrence(out.query, head_list)) return alpha_normalize(out);

  // Only literal negations remain after NNF; anything else is a genuine
  // violation (predicate inside a term position).
  Expr redirected = redirect_negated(out.query, heads);
  if (has_negative_occurrence(redirected, head_list)) {
    std::vector<std::string> path{"query"};
    check_polarity(redirected, heads, true, path);
  }
  Program dual = demorgan_dual(p);
  for (const auto& eq : dual.equations) {
    if (heads.count(eq.head)) {
      throw WellFormednessError("dual predicate name " + eq.head.str() + " is already defined");
    }
  }
  for (auto& eq : dual.equations) out.equations.push_back(std::move(eq));
  out.query = redirected;
  return alpha_normalize(out);
}

// ---------------------------------------------------------------- prenex CNF

namespace {

constexpr std::size_t kMaxClauses = 200000;

Expr strip_foralls(const Expr& e, std::vector<Param>& prefix, NameSupply& ns) {
  switch (e->op) {
    case Op::Exists:
      throw ResidualExistential("existential quantifier over " + e->name.str() + " in clause body");
    case Op::Forall: {
      Param p{e->name, e->bound_sort};
      Expr body = e->kids[0];
      if (ns.is_used(p.name.str())) {
        Symbol fresh = ns.fresh(p.name.str());
        body = subst_vars(body, {{p.name, var(fresh, p.sort)}});
        p.name = fresh;
      } else {
        ns.reserve(p.name.str());
      }
      prefix.push_back(p);
      return strip_foralls(body, prefix, ns);
    }
    case Op::And:
    case Op::Or: {
      std::vector<Expr> kids;
      for (const auto& k : e->kids) kids.push_back(strip_foralls(k, prefix, ns));
      return with_kids(e, std::move(kids));
    }
    default:
      if (e->op == Op::Not && e->kids[0]->is_quantifier()) {
        throw ResidualExistential("formula is not in negation normal form");
      }
      return e;
  }
}

using ClauseList = std::vector<std::vector<Expr>>;

ClauseList cnf_rec(const Expr& e) {
  if (e->is_true()) return {};
  if (e->is_false()) return {{}};
  if (e->op == Op::And) {
    ClauseList out;
    for (const auto& k : e->kids) {
      ClauseList part = cnf_rec(k);
      out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
      if (out.size() > kMaxClauses) throw Error("CNF conversion exceeds clause limit");
    }
    return out;
  }
  if (e->op == Op::Or) {
    ClauseList acc{{}};
    for (const auto& k : e->kids) {
      ClauseList part = cnf_rec(k);
      ClauseList next;
      if (acc.size() * part.size() > kMaxClauses) throw Error("CNF conversion exceeds clause limit");
      for (const auto& a : acc) {
        for (const auto& b : part) {
          std::vector<Expr> c = a;
          c.insert(c.end(), b.begin(), b.end());
          next.push_back(std::move(c));
        }
      }
      acc = std::move(next);
    }
    return acc;
  }
  return {{e}};
}

}  // namespace

PrenexCnf prenex_cnf(const Expr& f) {
  PrenexCnf out;
  NameSupply ns;
  for (const auto& v : free_vars(f)) ns.reserve(v.name.str());
  Expr matrix = strip_foralls(f, out.prefix, ns);
  for (auto& lits : cnf_rec(matrix)) {
    std::vector<Expr> kept;
    std::unordered_set<Expr, ExprHash, ExprEq> seen;
    bool tautology = false;
    for (auto& l : lits) {
      if (l->is_false()) continue;
      if (l->is_true()) {
        tautology = true;
        break;
      }
      if (seen.insert(l).second) kept.push_back(l);
    }
    for (const auto& l : kept) {
      if (l->op == Op::Not && seen.count(l->kids[0])) tautology = true;
    }
    if (!tautology) out.clauses.push_back(std::move(kept));
  }
  return out;
}

}  // namespace muval
