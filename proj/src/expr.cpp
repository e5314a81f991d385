#include "muval/expr.hpp"

#include <algorithm>
#include <cctype>
#include <climits>
#include <mutex>
#include <unordered_set>

namespace muval {

namespace {

std::mutex& intern_mutex() {
  static std::mutex m;
  return m;
}

std::unordered_set<std::string>& intern_table() {
  static std::unordered_set<std::string> t;
  return t;
}

const std::string& empty_string() {
  static const std::string s;
  return s;
}

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

Symbol::Symbol(std::string_view text) {
  std::lock_guard lock(intern_mutex());
  auto [it, inserted] = intern_table().emplace(text);
  text_ = &*it;
}

const std::string& Symbol::str() const { return text_ ? *text_ : empty_string(); }

std::strong_ordering operator<=>(Symbol a, Symbol b) {
  if (a.text_ == b.text_) return std::strong_ordering::equal;
  int c = a.str().compare(b.str());
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string_view to_string(Sort s) { return s == Sort::Int ? "int" : "bool"; }

Node::Node(Op op_, Sort sort_, std::int64_t value_, Symbol name_, std::vector<Expr> kids_,
           CallKind kind, Sort bound)
    : op(op_), sort(sort_), call_kind(kind), bound_sort(bound), value(value_), name(name_),
      kids(std::move(kids_)) {
  std::size_t h = static_cast<std::size_t>(op) * 131 + static_cast<std::size_t>(sort);
  h = mix(h, static_cast<std::size_t>(value));
  h = mix(h, std::hash<std::string>{}(name.str()));
  h = mix(h, static_cast<std::size_t>(call_kind) * 7 + static_cast<std::size_t>(bound_sort));
  for (const auto& k : kids) h = mix(h, k->hash);
  hash = h;
}

namespace {

Expr make(Op op, Sort sort, std::vector<Expr> kids, std::int64_t value = 0, Symbol name = {},
          CallKind kind = CallKind::Pred, Sort bound = Sort::Int) {
  return std::make_shared<const Node>(op, sort, value, name, std::move(kids), kind, bound);
}

void require(const Expr& e, Sort s, const char* what) {
  if (e->sort != s) {
    throw SortError(std::string("sort mismatch in ") + what + ": expected " +
                    std::string(to_string(s)) + ", got " + to_muclp(e));
  }
}

}  // namespace

Expr int_lit(std::int64_t v) { return make(Op::IntLit, Sort::Int, {}, v); }
Expr bool_lit(bool b) { return make(Op::BoolLit, Sort::Bool, {}, b ? 1 : 0); }
Expr mk_true() {
  static const Expr t = bool_lit(true);
  return t;
}
Expr mk_false() {
  static const Expr f = bool_lit(false);
  return f;
}
Expr var(Symbol name, Sort sort) { return make(Op::Var, sort, {}, 0, name); }
Expr var(const Param& p) { return var(p.name, p.sort); }
Expr pred_call(Symbol name, std::vector<Expr> args) {
  return make(Op::Call, Sort::Bool, std::move(args), 0, name, CallKind::Pred);
}
Expr fun_call(Symbol name, Sort ret, std::vector<Expr> args) {
  return make(Op::Call, ret, std::move(args), 0, name, CallKind::Fun);
}
Expr add(Expr a, Expr b) {
  require(a, Sort::Int, "+");
  require(b, Sort::Int, "+");
  return make(Op::Add, Sort::Int, {std::move(a), std::move(b)});
}
Expr sub(Expr a, Expr b) {
  require(a, Sort::Int, "-");
  require(b, Sort::Int, "-");
  return make(Op::Sub, Sort::Int, {std::move(a), std::move(b)});
}
Expr mul(Expr a, Expr b) {
  require(a, Sort::Int, "*");
  require(b, Sort::Int, "*");
  return make(Op::Mul, Sort::Int, {std::move(a), std::move(b)});
}
Expr neg(Expr a) {
  require(a, Sort::Int, "unary -");
  return make(Op::Neg, Sort::Int, {std::move(a)});
}
Expr ite(Expr c, Expr t, Expr e) {
  require(c, Sort::Bool, "ite condition");
  if (t->sort != e->sort) throw SortError("ite branches have different sorts");
  Sort s = t->sort;
  return make(Op::Ite, s, {std::move(c), std::move(t), std::move(e)});
}
Expr cmp(Op op, Expr a, Expr b) {
  if (op == Op::Eq || op == Op::Neq) {
    if (a->sort != b->sort) throw SortError("equality between different sorts");
  } else {
    require(a, Sort::Int, "comparison");
    require(b, Sort::Int, "comparison");
  }
  return make(op, Sort::Bool, {std::move(a), std::move(b)});
}
Expr eq(Expr a, Expr b) { return cmp(Op::Eq, std::move(a), std::move(b)); }
Expr not_(Expr a) {
  require(a, Sort::Bool, "not");
  return make(Op::Not, Sort::Bool, {std::move(a)});
}
Expr and_(std::vector<Expr> kids) {
  if (kids.empty()) return mk_true();
  if (kids.size() == 1) return kids.front();
  for (const auto& k : kids) require(k, Sort::Bool, "/\\");
  return make(Op::And, Sort::Bool, std::move(kids));
}
Expr or_(std::vector<Expr> kids) {
  if (kids.empty()) return mk_false();
  if (kids.size() == 1) return kids.front();
  for (const auto& k : kids) require(k, Sort::Bool, "\\/");
  return make(Op::Or, Sort::Bool, std::move(kids));
}
Expr and_(Expr a, Expr b) { return and_(std::vector<Expr>{std::move(a), std::move(b)}); }
Expr or_(Expr a, Expr b) { return or_(std::vector<Expr>{std::move(a), std::move(b)}); }
Expr implies(Expr a, Expr b) { return or_(not_(std::move(a)), std::move(b)); }
Expr forall(const Param& p, Expr body) {
  require(body, Sort::Bool, "forall");
  return make(Op::Forall, Sort::Bool, {std::move(body)}, 0, p.name, CallKind::Pred, p.sort);
}
Expr exists(const Param& p, Expr body) {
  require(body, Sort::Bool, "exists");
  return make(Op::Exists, Sort::Bool, {std::move(body)}, 0, p.name, CallKind::Pred, p.sort);
}
Expr forall(const std::vector<Param>& ps, Expr body) {
  for (auto it = ps.rbegin(); it != ps.rend(); ++it) body = forall(*it, std::move(body));
  return body;
}
Expr exists(const std::vector<Param>& ps, Expr body) {
  for (auto it = ps.rbegin(); it != ps.rend(); ++it) body = exists(*it, std::move(body));
  return body;
}

Expr with_kids(const Expr& e, std::vector<Expr> kids) {
  switch (e->op) {
    case Op::Add: return add(kids[0], kids[1]);
    case Op::Sub: return sub(kids[0], kids[1]);
    case Op::Mul: return mul(kids[0], kids[1]);
    case Op::Neg: return neg(kids[0]);
    case Op::Ite: return ite(kids[0], kids[1], kids[2]);
    case Op::Not: return not_(kids[0]);
    case Op::And: return and_(std::move(kids));
    case Op::Or: return or_(std::move(kids));
    case Op::Forall: return forall(Param{e->name, e->bound_sort}, kids[0]);
    case Op::Exists: return exists(Param{e->name, e->bound_sort}, kids[0]);
    case Op::Call:
      return make(Op::Call, e->sort, std::move(kids), 0, e->name, e->call_kind);
    default:
      if (e->is_comparison()) return cmp(e->op, kids[0], kids[1]);
      return e;
  }
}

int compare(const Expr& a, const Expr& b) {
  if (a.get() == b.get()) return 0;
  if (a->op != b->op) return a->op < b->op ? -1 : 1;
  if (a->sort != b->sort) return a->sort < b->sort ? -1 : 1;
  if (a->value != b->value) return a->value < b->value ? -1 : 1;
  if (a->name != b->name) return a->name < b->name ? -1 : 1;
  if (a->call_kind != b->call_kind) return a->call_kind < b->call_kind ? -1 : 1;
  if (a->bound_sort != b->bound_sort) return a->bound_sort < b->bound_sort ? -1 : 1;
  if (a->kids.size() != b->kids.size()) return a->kids.size() < b->kids.size() ? -1 : 1;
  for (std::size_t i = 0; i < a->kids.size(); ++i) {
    int c = compare(a->kids[i], b->kids[i]);
    if (c != 0) return c;
  }
  return 0;
}

bool equal(const Expr& a, const Expr& b) {
  if (a.get() == b.get()) return true;
  if (a->hash != b->hash) return false;
  return compare(a, b) == 0;
}

// ---------------------------------------------------------------- printing

namespace {

int precedence(const Expr& e) {
  switch (e->op) {
    case Op::Forall:
    case Op::Exists: return 0;
    case Op::Or: return 2;
    case Op::And: return 3;
    case Op::Not: return 4;
    case Op::Add:
    case Op::Sub: return 6;
    case Op::Mul: return 7;
    case Op::Neg: return 8;
    default: return e->is_comparison() ? 5 : 9;
  }
}

const char* cmp_text(Op op) {
  switch (op) {
    case Op::Eq: return "=";
    case Op::Neq: return "!=";
    case Op::Le: return "<=";
    case Op::Lt: return "<";
    case Op::Ge: return ">=";
    case Op::Gt: return ">";
    default: return "?";
  }
}

void print_muclp(const Expr& e, int ctx, std::string& out);

void print_args(const std::vector<Expr>& args, std::string& out) {
  out += '(';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    print_muclp(args[i], 1, out);
  }
  out += ')';
}

void print_muclp(const Expr& e, int ctx, std::string& out) {
  const int p = precedence(e);
  const bool paren = p < ctx;
  if (paren) out += '(';
  switch (e->op) {
    case Op::IntLit: out += std::to_string(e->value); break;
    case Op::BoolLit: out += e->value ? "true" : "false"; break;
    case Op::Var: out += e->name.str(); break;
    case Op::Call:
      out += e->name.str();
      print_args(e->kids, out);
      break;
    case Op::Add:
    case Op::Sub:
      print_muclp(e->kids[0], 6, out);
      out += e->op == Op::Add ? " + " : " - ";
      print_muclp(e->kids[1], 7, out);
      break;
    case Op::Mul:
      print_muclp(e->kids[0], 8, out);
      out += " * ";
      print_muclp(e->kids[1], 8, out);
      break;
    case Op::Neg:
      out += '-';
      if (e->kids[0]->op == Op::IntLit) {
        out += '(';
        print_muclp(e->kids[0], 0, out);
        out += ')';
      } else {
        print_muclp(e->kids[0], 9, out);
      }
      break;
    case Op::Ite:
      out += "ite(";
      print_muclp(e->kids[0], 1, out);
      out += ", ";
      print_muclp(e->kids[1], 1, out);
      out += ", ";
      print_muclp(e->kids[2], 1, out);
      out += ')';
      break;
    case Op::Not:
      out += "not ";
      print_muclp(e->kids[0], 4, out);
      break;
    case Op::And:
    case Op::Or:
      for (std::size_t i = 0; i < e->kids.size(); ++i) {
        if (i) out += e->op == Op::And ? " /\\ " : " \\/ ";
        print_muclp(e->kids[i], p + 1, out);
      }
      break;
    case Op::Forall:
    case Op::Exists: {
      out += e->op == Op::Forall ? "forall " : "exists ";
      const Node* cur = e.get();
      bool first = true;
      while (true) {
        if (!first) out += ", ";
        first = false;
        out += cur->name.str();
        out += ':';
        out += to_string(cur->bound_sort);
        const Expr& body = cur->kids[0];
        if (body->op != e->op) break;
        cur = body.get();
      }
      out += ". ";
      print_muclp(cur->kids[0], 0, out);
      break;
    }
    default: {
      // Comparison. Bool-sorted operands are always parenthesised.
      const int side = e->kids[0]->sort == Sort::Bool ? 9 : 6;
      print_muclp(e->kids[0], side, out);
      out += ' ';
      out += cmp_text(e->op);
      out += ' ';
      print_muclp(e->kids[1], side, out);
      break;
    }
  }
  if (paren) out += ')';
}

bool simple_smt_char(char c) {
  if (std::isalnum(static_cast<unsigned char>(c))) return true;
  static const std::string extra = "~!@$%^&*_-+=<>.?/";
  return extra.find(c) != std::string::npos;
}

void print_smt(const Expr& e, std::string& out) {
  auto nary = [&](const char* f) {
    out += '(';
    out += f;
    for (const auto& k : e->kids) {
      out += ' ';
      print_smt(k, out);
    }
    out += ')';
  };
  switch (e->op) {
    case Op::IntLit:
      if (e->value < 0) {
        out += "(- ";
        out += e->value == INT64_MIN ? std::string("9223372036854775808")
                                     : std::to_string(-e->value);
        out += ')';
      } else {
        out += std::to_string(e->value);
      }
      break;
    case Op::BoolLit: out += e->value ? "true" : "false"; break;
    case Op::Var: out += smt2_symbol(e->name); break;
    case Op::Call:
      if (e->kids.empty()) {
        out += smt2_symbol(e->name);
      } else {
        std::string f = smt2_symbol(e->name);
        nary(f.c_str());
      }
      break;
    case Op::Add: nary("+"); break;
    case Op::Sub: nary("-"); break;
    case Op::Mul: nary("*"); break;
    case Op::Neg: nary("-"); break;
    case Op::Ite: nary("ite"); break;
    case Op::Eq: nary("="); break;
    case Op::Neq: nary("distinct"); break;
    case Op::Le: nary("<="); break;
    case Op::Lt: nary("<"); break;
    case Op::Ge: nary(">="); break;
    case Op::Gt: nary(">"); break;
    case Op::Not: nary("not"); break;
    case Op::And: nary("and"); break;
    case Op::Or: nary("or"); break;
    case Op::Forall:
    case Op::Exists:
      out += e->op == Op::Forall ? "(forall ((" : "(exists ((";
      out += smt2_symbol(e->name);
      out += e->bound_sort == Sort::Int ? " Int)) " : " Bool)) ";
      print_smt(e->kids[0], out);
      out += ')';
      break;
  }
}

}  // namespace

std::string to_muclp(const Expr& e) {
  std::string out;
  print_muclp(e, 0, out);
  return out;
}

std::string smt2_symbol(Symbol s) {
  const std::string& t = s.str();
  bool simple = !t.empty() && !std::isdigit(static_cast<unsigned char>(t[0]));
  for (char c : t) simple = simple && simple_smt_char(c);
  if (simple) return t;
  return "|" + t + "|";
}

std::string to_smt2(const Expr& e) {
  std::string out;
  print_smt(e, out);
  return out;
}

// ---------------------------------------------------------------- traversal

namespace {

void free_vars_rec(const Expr& e, std::vector<Symbol>& bound, std::vector<Param>& out,
                   std::set<Symbol>& seen) {
  switch (e->op) {
    case Op::Var:
      if (std::find(bound.begin(), bound.end(), e->name) == bound.end() &&
          seen.insert(e->name).second) {
        out.push_back(Param{e->name, e->sort});
      }
      return;
    case Op::Forall:
    case Op::Exists:
      bound.push_back(e->name);
      free_vars_rec(e->kids[0], bound, out, seen);
      bound.pop_back();
      return;
    default:
      for (const auto& k : e->kids) free_vars_rec(k, bound, out, seen);
  }
}

void calls_rec(const Expr& e, CallKind kind, std::vector<Symbol>& out, std::set<Symbol>& seen) {
  if (e->op == Op::Call && e->call_kind == kind && seen.insert(e->name).second) {
    out.push_back(e->name);
  }
  for (const auto& k : e->kids) calls_rec(k, kind, out, seen);
}

}  // namespace

std::vector<Param> free_vars(const Expr& e) {
  std::vector<Symbol> bound;
  std::vector<Param> out;
  std::set<Symbol> seen;
  free_vars_rec(e, bound, out, seen);
  return out;
}

std::vector<Symbol> called_symbols(const Expr& e, CallKind kind) {
  std::vector<Symbol> out;
  std::set<Symbol> seen;
  calls_rec(e, kind, out, seen);
  return out;
}

void collect_names(const Expr& e, std::set<std::string>& out) {
  if (!e->name.empty()) out.insert(e->name.str());
  for (const auto& k : e->kids) collect_names(k, out);
}

bool has_quantifier(const Expr& e) {
  if (e->is_quantifier()) return true;
  return std::any_of(e->kids.begin(), e->kids.end(), has_quantifier);
}

// ---------------------------------------------------------------- substitution

namespace {

Symbol rename_away(Symbol v, const std::set<std::string>& avoid, const Expr& body) {
  std::set<std::string> names = avoid;
  collect_names(body, names);
  NameSupply ns(std::move(names));
  return ns.fresh(v.str());
}

Expr subst_vars_rec(const Expr& e, const std::map<Symbol, Expr>& m,
                    const std::set<std::string>& replacement_fv) {
  switch (e->op) {
    case Op::Var: {
      auto it = m.find(e->name);
      if (it == m.end()) return e;
      if (it->second->sort != e->sort) throw SortError("substitution changes sort of " + e->name.str());
      return it->second;
    }
    case Op::IntLit:
    case Op::BoolLit: return e;
    case Op::Forall:
    case Op::Exists: {
      Param p{e->name, e->bound_sort};
      Expr body = e->kids[0];
      std::map<Symbol, Expr> inner = m;
      inner.erase(p.name);
      if (inner.empty()) return e;
      if (replacement_fv.count(p.name.str())) {
        Symbol fresh = rename_away(p.name, replacement_fv, body);
        body = subst_vars_rec(body, {{p.name, var(fresh, p.sort)}}, {fresh.str()});
        p.name = fresh;
      }
      body = subst_vars_rec(body, inner, replacement_fv);
      return e->op == Op::Forall ? forall(p, body) : exists(p, body);
    }
    default: {
      std::vector<Expr> kids;
      kids.reserve(e->kids.size());
      bool changed = false;
      for (const auto& k : e->kids) {
        kids.push_back(subst_vars_rec(k, m, replacement_fv));
        changed = changed || kids.back().get() != k.get();
      }
      return changed ? with_kids(e, std::move(kids)) : e;
    }
  }
}

Expr subst_calls_rec(const Expr& e, const std::map<Symbol, Lambda>& m,
                     const std::set<std::string>& lambda_fv) {
  switch (e->op) {
    case Op::Var:
    case Op::IntLit:
    case Op::BoolLit: return e;
    case Op::Forall:
    case Op::Exists: {
      Param p{e->name, e->bound_sort};
      Expr body = e->kids[0];
      if (lambda_fv.count(p.name.str())) {
        Symbol fresh = rename_away(p.name, lambda_fv, body);
        body = subst_vars(body, {{p.name, var(fresh, p.sort)}});
        p.name = fresh;
      }
      body = subst_calls_rec(body, m, lambda_fv);
      return e->op == Op::Forall ? forall(p, body) : exists(p, body);
    }
    default: {
      std::vector<Expr> kids;
      kids.reserve(e->kids.size());
      bool changed = false;
      for (const auto& k : e->kids) {
        kids.push_back(subst_calls_rec(k, m, lambda_fv));
        changed = changed || kids.back().get() != k.get();
      }
      if (e->op == Op::Call) {
        auto it = m.find(e->name);
        if (it != m.end()) return apply_lambda(it->second, kids);
      }
      return changed ? with_kids(e, std::move(kids)) : e;
    }
  }
}

}  // namespace

Expr subst_vars(const Expr& e, const std::map<Symbol, Expr>& m) {
  if (m.empty()) return e;
  std::set<std::string> fv;
  for (const auto& [k, v] : m) {
    for (const auto& p : free_vars(v)) fv.insert(p.name.str());
  }
  return subst_vars_rec(e, m, fv);
}

Expr apply_lambda(const Lambda& l, const std::vector<Expr>& args) {
  if (l.params.size() != args.size()) throw SortError("arity mismatch in application");
  std::map<Symbol, Expr> m;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i]->sort != l.params[i].sort) throw SortError("argument sort mismatch");
    m[l.params[i].name] = args[i];
  }
  return subst_vars(l.body, m);
}

Expr subst_calls(const Expr& e, const std::map<Symbol, Lambda>& m) {
  if (m.empty()) return e;
  std::set<std::string> fv;
  for (const auto& [k, l] : m) {
    for (const auto& p : free_vars(l.body)) {
      bool is_param = std::any_of(l.params.begin(), l.params.end(),
                                  [&](const Param& q) { return q.name == p.name; });
      if (!is_param) fv.insert(p.name.str());
    }
  }
  return subst_calls_rec(e, m, fv);
}

// ---------------------------------------------------------------- simplify

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw Error("integer overflow during simplification");
  return r;
}
std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw Error("integer overflow during simplification");
  return r;
}

struct Linear {
  std::map<Expr, std::int64_t, ExprLess> terms;
  std::int64_t constant = 0;

  bool is_constant() const { return terms.empty(); }
  void add_term(const Expr& atom, std::int64_t k) {
    if (k == 0) return;
    auto [it, inserted] = terms.emplace(atom, k);
    if (!inserted) {
      it->second = checked_add(it->second, k);
      if (it->second == 0) terms.erase(it);
    }
  }
  void add(const Linear& o, std::int64_t scale) {
    constant = checked_add(constant, checked_mul(o.constant, scale));
    for (const auto& [a, k] : o.terms) add_term(a, checked_mul(k, scale));
  }
};

Linear linearize(const Expr& e);

Linear linearize(const Expr& e) {
  Linear l;
  switch (e->op) {
    case Op::IntLit: l.constant = e->value; return l;
    case Op::Add:
      l.add(linearize(e->kids[0]), 1);
      l.add(linearize(e->kids[1]), 1);
      return l;
    case Op::Sub:
      l.add(linearize(e->kids[0]), 1);
      l.add(linearize(e->kids[1]), -1);
      return l;
    case Op::Neg: l.add(linearize(e->kids[0]), -1); return l;
    case Op::Mul: {
      Linear a = linearize(e->kids[0]);
      Linear b = linearize(e->kids[1]);
      if (a.is_constant()) {
        l.add(b, a.constant);
      } else if (b.is_constant()) {
        l.add(a, b.constant);
      } else {
        l.add_term(e, 1);
      }
      return l;
    }
    default:
      l.add_term(simplify(e), 1);
      return l;
  }
}

Expr scaled(const Expr& atom, std::int64_t k) {
  if (k == 1) return atom;
  return mul(int_lit(k), atom);
}

Expr build_linear(const Linear& l) {
  Expr acc;
  for (const auto& [atom, k] : l.terms) {
    if (!acc) {
      acc = k < 0 && k != -1 ? mul(int_lit(k), atom) : (k == -1 ? neg(atom) : scaled(atom, k));
    } else if (k < 0) {
      acc = sub(acc, scaled(atom, -k));
    } else {
      acc = add(acc, scaled(atom, k));
    }
  }
  if (!acc) return int_lit(l.constant);
  if (l.constant > 0) return add(acc, int_lit(l.constant));
  if (l.constant < 0) return sub(acc, int_lit(-l.constant));
  return acc;
}

bool eval_cmp(Op op, std::int64_t a, std::int64_t b) {
  switch (op) {
    case Op::Eq: return a == b;
    case Op::Neq: return a != b;
    case Op::Le: return a <= b;
    case Op::Lt: return a < b;
    case Op::Ge: return a >= b;
    default: return a > b;
  }
}

Op flip(Op op) {
  switch (op) {
    case Op::Le: return Op::Ge;
    case Op::Lt: return Op::Gt;
    case Op::Ge: return Op::Le;
    case Op::Gt: return Op::Lt;
    default: return op;
  }
}

Op negate_cmp(Op op) {
  switch (op) {
    case Op::Eq: return Op::Neq;
    case Op::Neq: return Op::Eq;
    case Op::Le: return Op::Gt;
    case Op::Lt: return Op::Ge;
    case Op::Ge: return Op::Lt;
    default: return Op::Le;
  }
}

Expr simplify_comparison(const Expr& e) {
  if (e->kids[0]->sort == Sort::Bool) {
    Expr a = simplify(e->kids[0]);
    Expr b = simplify(e->kids[1]);
    if (a->op == Op::BoolLit && b->op == Op::BoolLit) {
      return bool_lit((a->value == b->value) == (e->op == Op::Eq));
    }
    if (equal(a, b)) return bool_lit(e->op == Op::Eq);
    return cmp(e->op, a, b);
  }
  Linear l = linearize(e->kids[0]);
  l.add(linearize(e->kids[1]), -1);
  Op op = e->op;
  if (l.is_constant()) return bool_lit(eval_cmp(op, l.constant, 0));
  if (l.terms.begin()->second < 0) {
    Linear n;
    n.add(l, -1);
    l = n;
    op = flip(op);
  }
  std::int64_t rhs = checked_mul(l.constant, -1);
  l.constant = 0;
  return cmp(op, build_linear(l), int_lit(rhs));
}

Expr simplify_junction(const Expr& e) {
  const bool is_and = e->op == Op::And;
  std::vector<Expr> kids;
  std::unordered_set<Expr, ExprHash, ExprEq> seen;
  auto push = [&](const Expr& k, auto& self) -> bool {
    if (k->op == e->op) {
      for (const auto& g : k->kids) {
        if (!self(g, self)) return false;
      }
      return true;
    }
    if (k->op == Op::BoolLit) return (k->value != 0) == is_and;
    if (seen.insert(k).second) kids.push_back(k);
    return true;
  };
  for (const auto& k : e->kids) {
    if (!push(simplify(k), push)) return bool_lit(!is_and);
  }
  for (const auto& k : kids) {
    if (k->op == Op::Not && seen.count(k->kids[0])) return bool_lit(!is_and);
  }
  return is_and ? and_(std::move(kids)) : or_(std::move(kids));
}

bool occurs_free(const Expr& e, Symbol v) {
  if (e->op == Op::Var) return e->name == v;
  if (e->is_quantifier() && e->name == v) return false;
  return std::any_of(e->kids.begin(), e->kids.end(),
                     [&](const Expr& k) { return occurs_free(k, v); });
}

}  // namespace

Expr simplify(const Expr& e) {
  switch (e->op) {
    case Op::IntLit:
    case Op::BoolLit:
    case Op::Var: return e;
    case Op::Add:
    case Op::Sub:
    case Op::Neg:
    case Op::Mul: return build_linear(linearize(e));
    case Op::Ite: {
      Expr c = simplify(e->kids[0]);
      if (c->op == Op::BoolLit) return simplify(c->value ? e->kids[1] : e->kids[2]);
      Expr t = simplify(e->kids[1]);
      Expr f = simplify(e->kids[2]);
      if (equal(t, f)) return t;
      return ite(c, t, f);
    }
    case Op::Call: {
      std::vector<Expr> kids;
      for (const auto& k : e->kids) kids.push_back(simplify(k));
      return with_kids(e, std::move(kids));
    }
    case Op::Not: {
      Expr k = simplify(e->kids[0]);
      if (k->op == Op::BoolLit) return bool_lit(k->value == 0);
      if (k->op == Op::Not) return k->kids[0];
      if (k->is_comparison()) return cmp(negate_cmp(k->op), k->kids[0], k->kids[1]);
      return not_(k);
    }
    case Op::And:
    case Op::Or: return simplify_junction(e);
    case Op::Forall:
    case Op::Exists: {
      Expr body = simplify(e->kids[0]);
      if (!occurs_free(body, e->name)) return body;
      return with_kids(e, {body});
    }
    default: return simplify_comparison(e);
  }
}

// ---------------------------------------------------------------- alpha-equivalence

namespace {

bool alpha_rec(const Expr& a, const Expr& b, std::vector<std::pair<Symbol, Symbol>>& env) {
  if (a->op != b->op || a->sort != b->sort) return false;
  switch (a->op) {
    case Op::Var: {
      for (auto it = env.rbegin(); it != env.rend(); ++it) {
        if (it->first == a->name || it->second == b->name) {
          return it->first == a->name && it->second == b->name;
        }
      }
      return a->name == b->name;
    }
    case Op::Forall:
    case Op::Exists: {
      if (a->bound_sort != b->bound_sort) return false;
      env.emplace_back(a->name, b->name);
      bool r = alpha_rec(a->kids[0], b->kids[0], env);
      env.pop_back();
      return r;
    }
    default:
      if (a->value != b->value || a->name != b->name || a->call_kind != b->call_kind ||
          a->kids.size() != b->kids.size()) {
        return false;
      }
      for (std::size_t i = 0; i < a->kids.size(); ++i) {
        if (!alpha_rec(a->kids[i], b->kids[i], env)) return false;
      }
      return true;
  }
}

}  // namespace

bool alpha_equivalent(const Expr& a, const Expr& b) {
  std::vector<std::pair<Symbol, Symbol>> env;
  return alpha_rec(a, b, env);
}

Symbol NameSupply::fresh(std::string_view base) {
  std::string b(base);
  if (auto bang = b.rfind('!'); bang != std::string::npos && bang + 1 < b.size() &&
      std::all_of(b.begin() + static_cast<std::ptrdiff_t>(bang) + 1, b.end(),
                  [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; })) {
    b.resize(bang);
  }
  if (b.empty()) b = "v";
  if (used_.insert(b).second) return Symbol(b);
  for (std::size_t k = 1;; ++k) {
    std::string cand = b + "!" + std::to_string(k);
    if (used_.insert(cand).second) return Symbol(cand);
  }
}

}  // namespace muval
