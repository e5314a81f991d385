#include "muval/reduction.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <utility>

namespace muval {

NameSupply names_of(const Program& p) {
  NameSupply ns;
  ns.reserve(p.query);
  for (const auto& eq : p.equations) {
    ns.reserve(eq.head.str());
    for (const auto& prm : eq.params) ns.reserve(prm.name.str());
    ns.reserve(eq.body);
  }
  for (const auto& f : p.functions) ns.reserve(f.name.str());
  for (const auto& f : p.free_preds) ns.reserve(f.name.str());
  return ns;
}

// ---------------------------------------------------------------- elim_ex

namespace {

struct Skolemizer {
  ReductionTrace& trace;
  NameSupply& names;
  Program& out;
  Symbol site;

  Expr run(const Expr& e, std::vector<Param>& scope) {
    switch (e->op) {
      case Op::Forall: {
        scope.push_back(Param{e->name, e->bound_sort});
        Expr body = run(e->kids[0], scope);
        scope.pop_back();
        return forall(Param{e->name, e->bound_sort}, body);
      }
      case Op::Exists: {
        Symbol f = names.fresh("sk_" + e->name.str());
        std::vector<Expr> args;
        Signature sig{f, {}, e->bound_sort};
        for (const auto& v : scope) {
          args.push_back(var(v));
          sig.args.push_back(v.sort);
        }
        trace.skolems.push_back(SkolemInfo{f, e->name, site, scope, e->bound_sort});
        out.functions.push_back(sig);
        Expr call = fun_call(f, e->bound_sort, std::move(args));
        return run(subst_vars(e->kids[0], {{e->name, call}}), scope);
      }
      case Op::And:
      case Op::Or: {
        std::vector<Expr> kids;
        for (const auto& k : e->kids) kids.push_back(run(k, scope));
        return with_kids(e, std::move(kids));
      }
      default:
        if (has_quantifier(e)) throw Error("quantifier inside an atom cannot be skolemised");
        return e;
    }
  }
};

}  // namespace

Program elim_ex(const Program& p, ReductionTrace& trace, NameSupply& names) {
  Program out = p;
  {
    Skolemizer s{trace, names, out, Symbol{}};
    std::vector<Param> scope;
    out.query = s.run(nnf(p.query), scope);
  }
  for (auto& eq : out.equations) {
    Skolemizer s{trace, names, out, eq.head};
    std::vector<Param> scope = eq.params;
    eq.body = s.run(nnf(eq.body), scope);
  }
  return out;
}

// ---------------------------------------------------------------- elim_mu

namespace {

bool calls(const Expr& e, Symbol x) {
  if (e->op == Op::Call && e->name == x) return true;
  return std::any_of(e->kids.begin(), e->kids.end(), [&](const Expr& k) { return calls(k, x); });
}

std::vector<Expr> vars_of(const std::vector<Param>& ps) {
  std::vector<Expr> out;
  for (const auto& p : ps) out.push_back(var(p));
  return out;
}

std::vector<Expr> concat(std::vector<Expr> a, const std::vector<Expr>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// Flag positions that receive `true` at every call, directly or from a flag of
// the caller that is itself such a position (greatest fixpoint).
using Positions = std::set<std::pair<Symbol, std::size_t>>;

void refute_positions(const Expr& e, const std::set<Symbol>& ok_vars, Positions& cand, bool& changed) {
  if (e->is_pred_call()) {
    for (std::size_t i = 0; i < e->kids.size(); ++i) {
      const Expr& a = e->kids[i];
      bool ok = a->is_true() || (a->op == Op::Var && ok_vars.count(a->name));
      if (!ok && cand.erase({e->name, i})) changed = true;
    }
  }
  for (const auto& k : e->kids) refute_positions(k, ok_vars, cand, changed);
}

Expr drop_positions(const Expr& e, const Positions& drop) {
  if (e->kids.empty()) return e;
  std::vector<Expr> kids;
  for (std::size_t i = 0; i < e->kids.size(); ++i) {
    if (e->is_pred_call() && drop.count({e->name, i})) continue;
    kids.push_back(drop_positions(e->kids[i], drop));
  }
  return with_kids(e, std::move(kids));
}

void drop_constant_flags(Program& p, const std::map<Symbol, std::set<Symbol>>& flags) {
  Positions cand;
  for (const auto& eq : p.equations) {
    auto it = flags.find(eq.head);
    if (it == flags.end()) continue;
    for (std::size_t i = 0; i < eq.params.size(); ++i) {
      if (it->second.count(eq.params[i].name)) cand.insert({eq.head, i});
    }
  }
  for (bool changed = true; changed;) {
    changed = false;
    refute_positions(p.query, {}, cand, changed);
    for (const auto& eq : p.equations) {
      std::set<Symbol> ok;
      for (std::size_t i = 0; i < eq.params.size(); ++i) {
        if (cand.count({eq.head, i})) ok.insert(eq.params[i].name);
      }
      refute_positions(eq.body, ok, cand, changed);
    }
  }
  if (cand.empty()) return;
  p.query = drop_positions(p.query, cand);
  for (auto& eq : p.equations) {
    std::map<Symbol, Expr> truth;
    std::vector<Param> kept;
    for (std::size_t i = 0; i < eq.params.size(); ++i) {
      if (cand.count({eq.head, i})) {
        truth[eq.params[i].name] = mk_true();
      } else {
        kept.push_back(eq.params[i]);
      }
    }
    eq.body = drop_positions(subst_vars(eq.body, truth), cand);
    eq.params = std::move(kept);
  }
}

}  // namespace

Program elim_mu(const Program& input, ReductionTrace& trace, NameSupply& names, const ReductionOptions& opts) {
  Program p = input;
  std::map<Symbol, std::set<Symbol>> flags;  ///< Added flag parameters per head.
  while (true) {
    std::optional<std::size_t> last_mu;
    for (std::size_t i = 0; i < p.equations.size(); ++i) {
      if (p.equations[i].kind == Fixpoint::Mu) last_mu = i;
    }
    if (!last_mu) break;
    const std::size_t k = *last_mu;
    const Equation x_eq = p.equations[k];
    const Symbol x = x_eq.head;

    bool recursive = false;
    for (std::size_t i = k; i < p.equations.size(); ++i) recursive = recursive || calls(p.equations[i].body, x);
    Symbol wf;
    if (recursive) {
      wf = names.fresh("WF_" + x.str());
      Signature sig{wf, {}, Sort::Bool};
      for (int half = 0; half < 2; ++half) {
        for (const auto& prm : x_eq.params) sig.args.push_back(prm.sort);
      }
      p.free_preds.push_back(sig);
      trace.wf_vars.push_back(WfInfo{wf, x});
    }

    // Fresh lambda parameters, one list per predicate arity.
    auto lambda_params = [&](const std::vector<Param>& shape) {
      std::vector<Param> ps;
      for (const auto& s : shape) ps.push_back(Param{names.fresh("y"), s.sort});
      return ps;
    };

    // Suffix equations that can reach X through suffix calls. Only these
    // need the added parameters; the others never consult them.
    std::vector<bool> extended(p.equations.size(), true);
    if (opts.suppress_unused_arguments) {
      for (std::size_t i = k + 1; i < p.equations.size(); ++i) extended[i] = recursive && calls(p.equations[i].body, x);
      for (bool grew = true; grew;) {
        grew = false;
        for (std::size_t i = k + 1; i < p.equations.size(); ++i) {
          if (extended[i]) continue;
          for (std::size_t j = k + 1; j < p.equations.size() && !extended[i]; ++j) {
            if (extended[j] && calls(p.equations[i].body, p.equations[j].head)) extended[i] = grew = true;
          }
        }
      }
    }

    // Added parameters (b_i, mirrored copies of X's parameters) per suffix equation.
    struct Added {
      Param flag;
      std::vector<Param> mirror;
    };
    std::vector<Added> added;
    for (std::size_t i = k + 1; i < p.equations.size(); ++i) {
      const Equation& eq = p.equations[i];
      NameSupply local;
      for (const auto& prm : eq.params) local.reserve(prm.name.str());
      local.reserve(eq.body);
      local.reserve(eq.head.str());
      Added a;
      a.flag = Param{local.fresh("b"), Sort::Bool};
      for (const auto& prm : x_eq.params) a.mirror.push_back(Param{local.fresh(prm.name.str()), prm.sort});
      names.reserve(a.flag.name.str());
      for (const auto& m : a.mirror) names.reserve(m.name.str());
      added.push_back(std::move(a));
    }

    // X |-> \y. X(y) /\ guard(y)
    auto x_lambda = [&](const std::vector<Param>& source, std::optional<Param> flag) {
      std::vector<Param> ys = lambda_params(x_eq.params);
      Expr call = pred_call(x, vars_of(ys));
      Expr wf_atom = pred_call(wf, concat(vars_of(source), vars_of(ys)));
      Expr guard = flag ? implies(var(*flag), wf_atom) : wf_atom;
      return Lambda{ys, and_(call, guard)};
    };
    // X_j |-> \y. X_j(flag, source, y)
    auto suffix_lambda = [&](std::size_t j, Expr flag, const std::vector<Expr>& source) {
      const Equation& eq = p.equations[j];
      std::vector<Param> ys = lambda_params(eq.params);
      std::vector<Expr> args{std::move(flag)};
      args.insert(args.end(), source.begin(), source.end());
      for (const auto& y : ys) args.push_back(var(y));
      return Lambda{ys, pred_call(eq.head, std::move(args))};
    };

    std::vector<Equation> next = p.equations;
    // sigma_X on X's own body.
    {
      std::map<Symbol, Lambda> sigma;
      if (recursive) sigma[x] = x_lambda(x_eq.params, std::nullopt);
      for (std::size_t j = k + 1; j < p.equations.size(); ++j) {
        if (extended[j]) sigma[p.equations[j].head] = suffix_lambda(j, mk_true(), vars_of(x_eq.params));
      }
      next[k].body = subst_calls(x_eq.body, sigma);
      next[k].kind = Fixpoint::Nu;
    }
    // sigma_i on each suffix body.
    for (std::size_t i = k + 1; i < p.equations.size(); ++i) {
      if (!extended[i]) continue;
      const Added& a = added[i - k - 1];
      std::map<Symbol, Lambda> sigma;
      if (recursive) sigma[x] = x_lambda(a.mirror, a.flag);
      for (std::size_t j = k + 1; j < p.equations.size(); ++j) {
        if (extended[j]) sigma[p.equations[j].head] = suffix_lambda(j, var(a.flag), vars_of(a.mirror));
      }
      next[i].body = subst_calls(p.equations[i].body, sigma);
      std::vector<Param> params{a.flag};
      flags[p.equations[i].head].insert(a.flag.name);
      params.insert(params.end(), a.mirror.begin(), a.mirror.end());
      params.insert(params.end(), p.equations[i].params.begin(), p.equations[i].params.end());
      next[i].params = std::move(params);
    }
    // sigma_0 on the prefix and the query.
    {
      std::vector<Expr> dummies;
      for (const auto& prm : x_eq.params) dummies.push_back(prm.sort == Sort::Int ? int_lit(0) : mk_false());
      std::map<Symbol, Lambda> sigma;
      for (std::size_t j = k + 1; j < p.equations.size(); ++j) {
        if (extended[j]) sigma[p.equations[j].head] = suffix_lambda(j, mk_false(), dummies);
      }
      for (std::size_t i = 0; i < k; ++i) next[i].body = subst_calls(p.equations[i].body, sigma);
      p.query = subst_calls(p.query, sigma);
    }
    p.equations = std::move(next);
  }
  if (opts.suppress_unused_arguments) drop_constant_flags(p, flags);
  for (const auto& eq : p.equations) trace.params[eq.head] = eq.params;
  return p;
}

// ---------------------------------------------------------------- elim_nu

PfwCsp elim_nu(const Program& p) {
  PfwCsp csp;
  for (const auto& eq : p.equations) {
    if (eq.kind != Fixpoint::Nu) throw Error("elim_nu requires a nu-only program");
    Signature s{eq.head, {}, Sort::Bool};
    for (const auto& prm : eq.params) s.args.push_back(prm.sort);
    csp.preds.push_back(s);
  }
  for (const auto& f : p.free_preds) {
    csp.preds.push_back(f);
    csp.wf.insert(f.name);
  }
  csp.funs = p.functions;
  for (auto& c : clauses_of(nnf(p.query), 0)) csp.clauses.push_back(std::move(c));
  for (std::size_t i = 0; i < p.equations.size(); ++i) {
    const Equation& eq = p.equations[i];
    Expr head = pred_call(eq.head, vars_of(eq.params));
    Expr f = forall(eq.params, or_(not_(head), nnf(eq.body)));
    for (auto& c : clauses_of(f, static_cast<int>(i) + 1)) csp.clauses.push_back(std::move(c));
  }
  check_pcsp(csp);
  return csp;
}

Reduction reduce(const Program& p, const ReductionOptions& opts) {
  Reduction r;
  r.trace.normalized = normalize(p);
  NameSupply names = names_of(r.trace.normalized);
  r.trace.after_elim_ex = elim_ex(r.trace.normalized, r.trace, names);
  r.trace.after_elim_mu = elim_mu(r.trace.after_elim_ex, r.trace, names, opts);
  r.csp = elim_nu(r.trace.after_elim_mu);
  return r;
}

}  // namespace muval
