#include "muval/pfwcsp.hpp"

#include <algorithm>
#include <functional>

#include "muval/sexpr.hpp"

namespace muval {

Clause make_clause(const std::vector<Expr>& literals, const std::vector<Param>& prefix) {
  Clause c;
  std::vector<Expr> rest;
  for (const auto& l : literals) {
    if (l->is_pred_call()) {
      c.pos.push_back(l);
    } else if (l->op == Op::Not && l->kids[0]->is_pred_call()) {
      c.neg.push_back(l->kids[0]);
    } else {
      rest.push_back(l);
    }
  }
  c.phi = or_(std::move(rest));
  Expr m = clause_matrix(c);
  for (const auto& v : free_vars(m)) {
    auto it = std::find_if(prefix.begin(), prefix.end(), [&](const Param& p) { return p.name == v.name; });
    if (it == prefix.end()) throw Error("clause variable " + v.name.str() + " is not quantified");
  }
  // Keep prefix order for determinism.
  auto fv = free_vars(m);
  for (const auto& p : prefix) {
    if (std::any_of(fv.begin(), fv.end(), [&](const Param& q) { return q.name == p.name; })) {
      c.vars.push_back(p);
    }
  }
  return c;
}

Expr clause_matrix(const Clause& c) {
  std::vector<Expr> lits;
  if (!c.phi->is_false()) lits.push_back(c.phi);
  for (const auto& p : c.pos) lits.push_back(p);
  for (const auto& n : c.neg) lits.push_back(not_(n));
  return or_(std::move(lits));
}

std::vector<Clause> clauses_of(const Expr& f, int source) {
  PrenexCnf pc = prenex_cnf(f);
  std::vector<Clause> out;
  for (const auto& lits : pc.clauses) {
    out.push_back(make_clause(lits, pc.prefix));
    out.back().source = source;
  }
  return out;
}

const Signature* PfwCsp::pred(Symbol name) const {
  for (const auto& s : preds) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const Signature* PfwCsp::fun(Symbol name) const {
  for (const auto& s : funs) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const char* to_string(ClauseClass c) {
  switch (c) {
    case ClauseClass::CHC: return "CHC";
    case ClauseClass::CoCHC: return "coCHC";
    case ClauseClass::LinearCHC: return "LinearCHC";
    default: return "General";
  }
}

ClauseClass classify(const Clause& c) {
  const std::size_t l = c.pos.size();
  const std::size_t m = c.pos.size() + c.neg.size();
  const bool chc = l <= 1;
  const bool co = m <= l + 1;
  if (chc && co) return ClauseClass::LinearCHC;
  if (chc) return ClauseClass::CHC;
  if (co) return ClauseClass::CoCHC;
  return ClauseClass::General;
}

ClauseClass classify(const PfwCsp& p) {
  bool chc = true, co = true;
  for (const auto& c : p.clauses) {
    ClauseClass k = classify(c);
    chc = chc && (k == ClauseClass::CHC || k == ClauseClass::LinearCHC);
    co = co && (k == ClauseClass::CoCHC || k == ClauseClass::LinearCHC);
  }
  if (chc && co) return ClauseClass::LinearCHC;
  if (chc) return ClauseClass::CHC;
  if (co) return ClauseClass::CoCHC;
  return ClauseClass::General;
}

PfwCsp negate_cochc_to_chc(const PfwCsp& p) {
  ClauseClass k = classify(p);
  if (k != ClauseClass::CoCHC && k != ClauseClass::LinearCHC) {
    throw PreconditionViolation(std::string("negation requires coCHC, got ") + to_string(k));
  }
  if (!p.wf.empty()) throw PreconditionViolation("negation requires no well-founded variables");
  if (!p.funs.empty()) throw PreconditionViolation("negation requires no function variables");
  auto flip = [](const Expr& call) { return pred_call(dual_name(call->name), call->kids); };
  PfwCsp out;
  for (const auto& s : p.preds) out.preds.push_back(Signature{dual_name(s.name), s.args, s.ret});
  for (const auto& c : p.clauses) {
    Clause n;
    n.vars = c.vars;
    n.phi = c.phi;
    n.source = c.source;
    for (const auto& x : c.neg) n.pos.push_back(flip(x));
    for (const auto& x : c.pos) n.neg.push_back(flip(x));
    out.clauses.push_back(std::move(n));
  }
  return out;
}

Expr apply_solution(const Clause& c, const CandidateSolution& s) {
  return subst_calls(clause_matrix(c), s);
}

std::vector<Expr> apply_solution(const PfwCsp& p, const CandidateSolution& s) {
  std::vector<Expr> out;
  for (const auto& c : p.clauses) out.push_back(forall(c.vars, apply_solution(c, s)));
  return out;
}

Clause instantiate(const Clause& c, const std::map<Symbol, std::int64_t>& theta) {
  std::map<Symbol, Expr> m;
  for (const auto& v : c.vars) {
    auto it = theta.find(v.name);
    std::int64_t value = it == theta.end() ? 0 : it->second;
    m[v.name] = v.sort == Sort::Int ? int_lit(value) : bool_lit(value != 0);
  }
  Clause g;
  g.source = c.source;
  g.phi = simplify(subst_vars(c.phi, m));
  for (const auto& x : c.pos) g.pos.push_back(simplify(subst_vars(x, m)));
  for (const auto& x : c.neg) g.neg.push_back(simplify(subst_vars(x, m)));
  return g;
}

std::int64_t SolutionContext::call(const Node& c, const std::vector<std::int64_t>& args) {
  auto it = s_.find(c.name);
  if (it == s_.end()) throw Error("candidate has no entry for " + c.name.str());
  const Lambda& l = it->second;
  if (l.params.size() != args.size()) throw SortError("arity mismatch for " + c.name.str());
  Env env;
  for (std::size_t i = 0; i < args.size(); ++i) env.emplace_back(l.params[i].name, args[i]);
  return evaluate(l.body, env, *this);
}

bool holds(const Clause& g, const CandidateSolution& s) {
  SolutionContext ctx(s);
  Env env;
  return evaluate(clause_matrix(g), env, ctx) != 0;
}

// ---------------------------------------------------------------- alpha-equivalence

namespace {

using VarMap = std::map<Symbol, Symbol>;

bool match(const Expr& a, const Expr& b, VarMap& fwd, VarMap& bwd) {
  if (a->op != b->op || a->sort != b->sort) return false;
  if (a->op == Op::Var) {
    auto f = fwd.find(a->name);
    auto g = bwd.find(b->name);
    if (f == fwd.end() && g == bwd.end()) {
      fwd[a->name] = b->name;
      bwd[b->name] = a->name;
      return true;
    }
    return f != fwd.end() && g != bwd.end() && f->second == b->name && g->second == a->name;
  }
  if (a->value != b->value || a->name != b->name || a->call_kind != b->call_kind ||
      a->bound_sort != b->bound_sort || a->kids.size() != b->kids.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a->kids.size(); ++i) {
    if (!match(a->kids[i], b->kids[i], fwd, bwd)) return false;
  }
  return true;
}

std::vector<Expr> literals(const Clause& c) {
  std::vector<Expr> out;
  if (c.phi->op == Op::Or) {
    out = c.phi->kids;
  } else if (!c.phi->is_false()) {
    out.push_back(c.phi);
  }
  for (const auto& p : c.pos) out.push_back(p);
  for (const auto& n : c.neg) out.push_back(not_(n));
  return out;
}

bool match_literals(const std::vector<Expr>& a, const std::vector<Expr>& b, std::size_t i,
                    std::vector<bool>& used, VarMap& fwd, VarMap& bwd) {
  if (i == a.size()) return true;
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (used[j]) continue;
    VarMap f2 = fwd, b2 = bwd;
    if (match(a[i], b[j], f2, b2)) {
      used[j] = true;
      if (match_literals(a, b, i + 1, used, f2, b2)) {
        fwd = f2;
        bwd = b2;
        return true;
      }
      used[j] = false;
    }
  }
  return false;
}

}  // namespace

bool alpha_equivalent(const Clause& a, const Clause& b) {
  auto la = literals(a);
  auto lb = literals(b);
  if (la.size() != lb.size()) return false;
  std::vector<bool> used(lb.size(), false);
  VarMap fwd, bwd;
  return match_literals(la, lb, 0, used, fwd, bwd);
}

bool alpha_equivalent(const std::vector<Clause>& a, const std::vector<Clause>& b) {
  if (a.size() != b.size()) return false;
  std::vector<bool> used(b.size(), false);
  std::function<bool(std::size_t)> go = [&](std::size_t i) {
    if (i == a.size()) return true;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (!used[j] && alpha_equivalent(a[i], b[j])) {
        used[j] = true;
        if (go(i + 1)) return true;
        used[j] = false;
      }
    }
    return false;
  };
  return go(0);
}

// ---------------------------------------------------------------- text format

namespace {

std::string sort_smt(Sort s) { return s == Sort::Int ? "Int" : "Bool"; }

std::string sorts_smt(const std::vector<Sort>& ss) {
  std::string out = "(";
  for (std::size_t i = 0; i < ss.size(); ++i) out += (i ? " " : "") + sort_smt(ss[i]);
  return out + ")";
}

void check_expr_calls(const Expr& e, const PfwCsp& p, bool allow_pred) {
  if (e->op == Op::Call) {
    if (e->call_kind == CallKind::Pred) {
      if (!allow_pred) throw Error("predicate variable " + e->name.str() + " inside a constraint or term");
      const Signature* s = p.pred(e->name);
      if (!s) throw Error("undeclared predicate " + e->name.str());
      if (s->args.size() != e->kids.size()) throw SortError("arity mismatch for " + e->name.str());
      for (std::size_t i = 0; i < s->args.size(); ++i) {
        if (s->args[i] != e->kids[i]->sort) throw SortError("argument sort mismatch for " + e->name.str());
      }
    } else {
      const Signature* s = p.fun(e->name);
      if (!s) throw Error("undeclared function " + e->name.str());
      if (s->args.size() != e->kids.size() || s->ret != e->sort) {
        throw SortError("signature mismatch for " + e->name.str());
      }
      for (std::size_t i = 0; i < s->args.size(); ++i) {
        if (s->args[i] != e->kids[i]->sort) throw SortError("argument sort mismatch for " + e->name.str());
      }
    }
  }
  for (const auto& k : e->kids) check_expr_calls(k, p, false);
}

}  // namespace

void check_pcsp(const PfwCsp& p) {
  for (Symbol w : p.wf) {
    const Signature* s = p.pred(w);
    if (!s) throw Error("undeclared well-founded variable " + w.str());
    if (s->args.size() % 2 != 0) throw SortError("well-founded variable with odd arity " + w.str());
    const std::size_t k = s->args.size() / 2;
    for (std::size_t i = 0; i < k; ++i) {
      if (s->args[i] != s->args[i + k]) throw SortError("well-founded variable with mismatched halves " + w.str());
    }
  }
  for (const auto& c : p.clauses) {
    if (has_quantifier(c.phi)) throw Error("quantifier inside clause constraint");
    check_expr_calls(c.phi, p, false);
    for (const auto& l : c.pos) check_expr_calls(l, p, true);
    for (const auto& l : c.neg) check_expr_calls(l, p, true);
  }
}

PfwCsp parse_pcsp(std::string_view text) {
  PfwCsp p;
  SmtScope scope;
  int source = 0;
  for (const auto& cmd : parse_sexprs(text)) {
    if (!cmd.is_list || cmd.list.empty() || cmd.list[0].is_list) {
      throw Error("unexpected top-level form " + cmd.str());
    }
    const std::string& head = cmd.list[0].atom;
    if (head == "set-logic" || head == "set-info" || head == "set-option" || head == "check-sat" ||
        head == "get-model" || head == "exit") {
      continue;
    }
    auto name_of = [&](std::size_t i) {
      if (cmd.list.size() <= i || cmd.list[i].is_list) throw Error("malformed " + head);
      return Symbol(cmd.list[i].atom);
    };
    auto sorts_of = [&](std::size_t i) {
      if (cmd.list.size() <= i || !cmd.list[i].is_list) throw Error("malformed " + head);
      std::vector<Sort> ss;
      for (const auto& s : cmd.list[i].list) ss.push_back(sexpr_to_sort(s));
      return ss;
    };
    if (head == "declare-fun" || head == "declare-fnvar") {
      if (cmd.list.size() != 4) throw Error("malformed " + head);
      Signature s{name_of(1), sorts_of(2), sexpr_to_sort(cmd.list[3])};
      if (head == "declare-fun" && s.ret == Sort::Bool) {
        p.preds.push_back(s);
        scope.preds.push_back(s);
      } else {
        p.funs.push_back(s);
        scope.funs.push_back(s);
      }
    } else if (head == "declare-wf") {
      if (cmd.list.size() != 3) throw Error("malformed declare-wf");
      Signature s{name_of(1), sorts_of(2), Sort::Bool};
      p.preds.push_back(s);
      p.wf.insert(s.name);
      scope.preds.push_back(s);
    } else if (head == "declare-const") {
      if (cmd.list.size() != 3) throw Error("malformed declare-const");
      Signature s{name_of(1), {}, sexpr_to_sort(cmd.list[2])};
      if (s.ret == Sort::Bool) {
        p.preds.push_back(s);
        scope.preds.push_back(s);
      } else {
        p.funs.push_back(s);
        scope.funs.push_back(s);
      }
    } else if (head == "assert") {
      if (cmd.list.size() != 2) throw Error("malformed assert");
      Expr f = sexpr_to_expr(cmd.list[1], scope);
      for (auto& c : clauses_of(nnf(f), source)) p.clauses.push_back(std::move(c));
      ++source;
    } else {
      throw Error("unsupported command " + head);
    }
  }
  check_pcsp(p);
  return p;
}

std::string to_string(const Clause& c) {
  std::string body = to_smt2(clause_matrix(c));
  if (c.vars.empty()) return body;
  std::string out = "(forall (";
  for (std::size_t i = 0; i < c.vars.size(); ++i) {
    out += (i ? " (" : "(") + smt2_symbol(c.vars[i].name) + " " + sort_smt(c.vars[i].sort) + ")";
  }
  return out + ") " + body + ")";
}

std::string to_pcsp(const PfwCsp& p) {
  std::string out;
  for (const auto& s : p.preds) {
    if (p.is_wf(s.name)) {
      out += "(declare-wf " + smt2_symbol(s.name) + " " + sorts_smt(s.args) + ")\n";
    } else {
      out += "(declare-fun " + smt2_symbol(s.name) + " " + sorts_smt(s.args) + " Bool)\n";
    }
  }
  for (const auto& s : p.funs) {
    out += std::string(s.ret == Sort::Bool ? "(declare-fnvar " : "(declare-fun ") + smt2_symbol(s.name) +
           " " + sorts_smt(s.args) + " " + sort_smt(s.ret) + ")\n";
  }
  for (const auto& c : p.clauses) out += "(assert " + to_string(c) + ")\n";
  out += "(check-sat)\n";
  return out;
}

std::string solution_to_smt2(const PfwCsp& p, const CandidateSolution& s) {
  std::string out;
  auto emit = [&](const Signature& sig) {
    auto it = s.find(sig.name);
    if (it == s.end()) return;
    const Lambda& l = it->second;
    out += "(define-fun " + smt2_symbol(sig.name) + " (";
    for (std::size_t i = 0; i < l.params.size(); ++i) {
      out += (i ? " (" : "(") + smt2_symbol(l.params[i].name) + " " + sort_smt(l.params[i].sort) + ")";
    }
    out += ") " + sort_smt(sig.ret) + " " + to_smt2(l.body) + ")\n";
  };
  for (const auto& sig : p.preds) emit(sig);
  for (const auto& sig : p.funs) emit(sig);
  return out;
}

CandidateSolution parse_solution(std::string_view text, const PfwCsp& p) {
  CandidateSolution out;
  for (const auto& cmd : parse_sexprs(text)) {
    if (!cmd.is_list || cmd.list.size() != 5 || !cmd.list[0].is_atom("define-fun") || cmd.list[1].is_list ||
        !cmd.list[2].is_list) {
      throw Error("expected (define-fun name (params) sort body), got " + cmd.str());
    }
    Symbol name(cmd.list[1].atom);
    const Signature* sig = p.pred(name);
    if (!sig) sig = p.fun(name);
    if (!sig) throw Error("model defines undeclared " + name.str());
    Lambda l;
    for (const auto& prm : cmd.list[2].list) {
      if (!prm.is_list || prm.list.size() != 2 || prm.list[0].is_list) throw Error("malformed parameter " + prm.str());
      l.params.push_back(Param{Symbol(prm.list[0].atom), sexpr_to_sort(prm.list[1])});
    }
    if (l.params.size() != sig->args.size() || sexpr_to_sort(cmd.list[3]) != sig->ret) {
      throw SortError("definition of " + name.str() + " does not match its declaration");
    }
    for (std::size_t i = 0; i < l.params.size(); ++i) {
      if (l.params[i].sort != sig->args[i]) throw SortError("parameter sort mismatch in " + name.str());
    }
    SmtScope scope;
    scope.vars = l.params;
    l.body = sexpr_to_expr(cmd.list[4], scope);
    if (l.body->sort != sig->ret) throw SortError("body sort mismatch in " + name.str());
    if (!out.emplace(name, std::move(l)).second) throw Error("duplicate definition of " + name.str());
  }
  return out;
}

}  // namespace muval
