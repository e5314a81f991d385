#include "muval/templates.hpp"

#include <algorithm>

namespace muval {

const char* to_string(Family f) {
  switch (f) {
    case Family::Ordinary: return "ordinary";
    case Family::Function: return "function";
    case Family::WellFounded: return "wf";
  }
  return "?";
}

const std::vector<std::string>& component_names(Family f) {
  static const std::vector<std::string> ordinary{"nd", "nc", "ac", "ad"};
  static const std::vector<std::string> function{"nd", "nc", "dc", "dd", "ec", "ed"};
  static const std::vector<std::string> wf{"nl", "np", "nc", "rc", "rd", "dc", "dd"};
  switch (f) {
    case Family::Ordinary: return ordinary;
    case Family::Function: return function;
    case Family::WellFounded: return wf;
  }
  return ordinary;
}

bool is_structural(Family f, std::size_t component) {
  return component < (f == Family::WellFounded ? 3u : 2u);
}

namespace {

std::size_t component_index(Family f, std::string_view name) {
  const auto& names = component_names(f);
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw Error("no component " + std::string(name) + " in " + to_string(f) + " parameters");
  return static_cast<std::size_t>(it - names.begin());
}

}  // namespace

std::int64_t Params::get(std::string_view component) const { return values.at(component_index(family, component)); }
std::int64_t& Params::at(std::string_view component) { return values.at(component_index(family, component)); }

bool ParamVector::operator<=(const ParamVector& o) const {
  for (const auto& [name, p] : vars) {
    auto it = o.vars.find(name);
    if (it == o.vars.end() || it->second.family != p.family) return false;
    for (std::size_t i = 0; i < p.values.size(); ++i) {
      if (p.values[i] > it->second.values[i]) return false;
    }
  }
  return true;
}

Family family_of(const PfwCsp& p, Symbol v) {
  if (p.is_wf(v)) return Family::WellFounded;
  if (const Signature* f = p.fun(v)) return f->ret == Sort::Int ? Family::Function : Family::Ordinary;
  return Family::Ordinary;
}

ParamVector initial_params(const PfwCsp& p, const TemplateConfig& cfg) {
  ParamVector out;
  auto add = [&](Symbol name) {
    Params ps;
    ps.family = family_of(p, name);
    ps.values = ps.family == Family::Ordinary   ? cfg.ordinary
                : ps.family == Family::Function ? cfg.function
                                                : cfg.well_founded;
    if (ps.values.size() != component_names(ps.family).size()) throw Error("bad initial parameter record");
    out.vars[name] = ps;
  };
  for (const auto& s : p.preds) add(s.name);
  for (const auto& s : p.funs) add(s.name);
  return out;
}

// ---------------------------------------------------------------- builders

namespace {

struct Builder {
  TemplateInstance& t;
  std::vector<Expr> shape;

  Expr unknown(const std::string& tag, std::int64_t bound) {
    Symbol s(t.target.str() + "#" + tag);
    t.unknowns.push_back(s);
    t.bounds[s] = bound;
    return var(s, Sort::Int);
  }

  // c0 + sum c_k * x_k with sum |c_k| <= coeff_bound and |c0| <= const_bound.
  Expr affine(const std::string& tag, const std::vector<Expr>& xs, std::int64_t coeff_bound,
              std::int64_t const_bound) {
    Expr sum = unknown(tag + "#0", const_bound);
    std::vector<Expr> abs_terms;
    {
      Expr u = var(Symbol(t.target.str() + "#u" + tag + "#0"), Sort::Int);
      Expr c = sum;
      shape.push_back(cmp(Op::Ge, u, c));
      shape.push_back(cmp(Op::Ge, u, neg(c)));
      shape.push_back(cmp(Op::Le, u, int_lit(const_bound)));
    }
    for (std::size_t k = 0; k < xs.size(); ++k) {
      const std::string ktag = tag + "#" + std::to_string(k + 1);
      Expr c = unknown(ktag, coeff_bound);
      t.multipliers.insert(c->name);
      Expr u = var(Symbol(t.target.str() + "#u" + ktag), Sort::Int);
      shape.push_back(cmp(Op::Ge, u, c));
      shape.push_back(cmp(Op::Ge, u, neg(c)));
      abs_terms.push_back(u);
      sum = add(sum, mul(c, xs[k]));
    }
    if (!abs_terms.empty()) {
      Expr total = abs_terms[0];
      for (std::size_t k = 1; k < abs_terms.size(); ++k) total = add(total, abs_terms[k]);
      shape.push_back(cmp(Op::Le, total, int_lit(coeff_bound)));
    }
    return sum;
  }

  void finish() { t.shape = and_(shape); }
};

std::vector<Param> lambda_params(const std::vector<Sort>& args) {
  std::vector<Param> ps;
  for (std::size_t i = 0; i < args.size(); ++i) ps.push_back(Param{Symbol("z" + std::to_string(i)), args[i]});
  return ps;
}

// Int features of a parameter list; Bool parameters count as 0/1.
std::vector<Expr> features(const std::vector<Param>& ps) {
  std::vector<Expr> out;
  for (const auto& p : ps) out.push_back(p.sort == Sort::Int ? var(p) : ite(var(p), int_lit(1), int_lit(0)));
  return out;
}

std::string tag(std::initializer_list<std::size_t> idx, const char* kind) {
  std::string s = kind;
  for (std::size_t i : idx) s += "#" + std::to_string(i);
  return s;
}

}  // namespace

TemplateInstance build_pred_template(Symbol x, const std::vector<Sort>& args, const Params& p,
                                     unsigned bool_split_cap) {
  TemplateInstance t;
  t.target = x;
  t.family = Family::Ordinary;
  t.skeleton.params = lambda_params(args);
  Builder b{t, {}};
  std::vector<Expr> ints, bools;
  for (const auto& prm : t.skeleton.params) (prm.sort == Sort::Int ? ints : bools).push_back(var(prm));
  if (bools.size() > bool_split_cap) {
    throw Error("predicate " + x.str() + " has " + std::to_string(bools.size()) + " Bool parameters, above the split cap");
  }
  const std::int64_t nd = p.get("nd"), nc = p.get("nc"), ac = p.get("ac"), ad = p.get("ad");
  std::vector<Expr> copies;
  for (std::size_t v = 0; v < (std::size_t{1} << bools.size()); ++v) {
    std::vector<Expr> guard;
    for (std::size_t i = 0; i < bools.size(); ++i) guard.push_back((v >> i) & 1 ? bools[i] : not_(bools[i]));
    std::vector<Expr> disjuncts;
    for (std::int64_t i = 0; i < nd; ++i) {
      std::vector<Expr> conj;
      for (std::int64_t j = 0; j < nc; ++j) {
        auto tg = tag({v, std::size_t(i), std::size_t(j)}, "c");
        conj.push_back(cmp(Op::Ge, b.affine(tg, ints, ac, ad), int_lit(0)));
      }
      disjuncts.push_back(and_(conj));
    }
    guard.push_back(or_(disjuncts));
    copies.push_back(and_(guard));
  }
  t.skeleton.body = or_(copies);
  b.finish();
  return t;
}

TemplateInstance build_fun_template(Symbol f, const std::vector<Sort>& args, const Params& p) {
  TemplateInstance t;
  t.target = f;
  t.family = Family::Function;
  t.skeleton.params = lambda_params(args);
  Builder b{t, {}};
  const std::vector<Expr> xs = features(t.skeleton.params);
  const std::int64_t nd = p.get("nd"), nc = p.get("nc");
  Expr term = b.affine(tag({std::size_t(nd - 1)}, "e"), xs, p.get("ec"), p.get("ed"));
  for (std::int64_t i = nd - 2; i >= 0; --i) {
    std::vector<Expr> conj;
    for (std::int64_t j = 0; j < nc; ++j) {
      conj.push_back(cmp(Op::Ge, b.affine(tag({std::size_t(i), std::size_t(j)}, "d"), xs, p.get("dc"), p.get("dd")),
                         int_lit(0)));
    }
    Expr e = b.affine(tag({std::size_t(i)}, "e"), xs, p.get("ec"), p.get("ed"));
    term = ite(and_(conj), e, term);
  }
  t.skeleton.body = term;
  b.finish();
  return t;
}

TemplateInstance build_wf_template(Symbol x, const std::vector<Sort>& args, const Params& p) {
  if (args.size() % 2 != 0) throw Error("well-founded predicate " + x.str() + " has odd arity");
  TemplateInstance t;
  t.target = x;
  t.family = Family::WellFounded;
  t.skeleton.params = lambda_params(args);
  Builder b{t, {}};
  const std::size_t half = args.size() / 2;
  const std::vector<Expr> all = features(t.skeleton.params);
  const std::vector<Expr> xs(all.begin(), all.begin() + half), ys(all.begin() + half, all.end());
  const std::size_t nl = p.get("nl"), np = p.get("np"), nc = p.get("nc");

  // Coefficients are shared between the x and y instances of each r and D.
  std::vector<std::vector<std::vector<Expr>>> r(nl, std::vector<std::vector<Expr>>(np));
  std::vector<std::vector<std::vector<std::vector<Expr>>>> d(
      nl, std::vector<std::vector<std::vector<Expr>>>(np, std::vector<std::vector<Expr>>(nc)));
  // Each affine form is stored as its coefficient list [c0, c1, ...].
  auto coeffs = [&](const std::string& tg, std::int64_t cb, std::int64_t db) {
    std::vector<Expr> dummy(half, int_lit(0));
    // Build once against zero features to register unknowns and shape; the
    // coefficients are read back from the fresh unknown list.
    std::size_t before = t.unknowns.size();
    b.affine(tg, dummy, cb, db);
    std::vector<Expr> cs;
    for (std::size_t k = before; k < t.unknowns.size(); ++k) cs.push_back(var(t.unknowns[k], Sort::Int));
    return cs;
  };
  auto eval = [](const std::vector<Expr>& cs, const std::vector<Expr>& v) {
    Expr s = cs[0];
    for (std::size_t k = 0; k < v.size(); ++k) s = add(s, mul(cs[k + 1], v[k]));
    return s;
  };
  for (std::size_t i = 0; i < nl; ++i) {
    for (std::size_t j = 0; j < np; ++j) {
      r[i][j] = coeffs(tag({i, j}, "r"), p.get("rc"), p.get("rd"));
      for (std::size_t k = 0; k < nc; ++k) d[i][j][k] = coeffs(tag({i, j, k}, "d"), p.get("dc"), p.get("dd"));
    }
  }
  auto region = [&](std::size_t i, std::size_t j, const std::vector<Expr>& v) {
    std::vector<Expr> conj;
    for (std::size_t k = 0; k < nc; ++k) conj.push_back(cmp(Op::Ge, eval(d[i][j][k], v), int_lit(0)));
    return and_(conj);
  };
  auto decrease = [&](std::size_t i, Op op) {
    std::vector<Expr> disj;
    for (std::size_t j = 0; j < np; ++j) {
      std::vector<Expr> conj{region(i, j, xs)};
      for (std::size_t k = 0; k < np; ++k) {
        conj.push_back(or_(not_(region(i, k, ys)), cmp(op, eval(r[i][j], xs), eval(r[i][k], ys))));
      }
      disj.push_back(and_(conj));
    }
    return or_(disj);
  };
  std::vector<Expr> body;
  for (std::size_t i = 0; i < nl; ++i) {
    for (std::size_t j = 0; j < np; ++j) body.push_back(cmp(Op::Ge, eval(r[i][j], xs), int_lit(0)));
  }
  for (const auto* v : {&xs, &ys}) {
    for (std::size_t i = 0; i < nl; ++i) {
      std::vector<Expr> cover;
      for (std::size_t j = 0; j < np; ++j) cover.push_back(region(i, j, *v));
      body.push_back(or_(cover));
    }
  }
  std::vector<Expr> lex;
  for (std::size_t i = 0; i < nl; ++i) {
    std::vector<Expr> conj{decrease(i, Op::Gt)};
    for (std::size_t l = 0; l < i; ++l) conj.push_back(decrease(l, Op::Ge));
    lex.push_back(and_(conj));
  }
  body.push_back(or_(lex));
  t.skeleton.body = and_(body);
  b.finish();
  return t;
}

TemplateSet build_templates(const PfwCsp& csp, const ParamVector& p, const TemplateConfig& cfg) {
  TemplateSet ts;
  auto build = [&](const Signature& s) {
    auto it = p.vars.find(s.name);
    if (it == p.vars.end()) throw Error("no parameters for " + s.name.str());
    switch (it->second.family) {
      case Family::Ordinary: ts[s.name] = build_pred_template(s.name, s.args, it->second, cfg.bool_split_cap); break;
      case Family::Function: ts[s.name] = build_fun_template(s.name, s.args, it->second); break;
      case Family::WellFounded: ts[s.name] = build_wf_template(s.name, s.args, it->second); break;
    }
  };
  for (const auto& s : csp.preds) build(s);
  for (const auto& s : csp.funs) build(s);
  return ts;
}

// ---------------------------------------------------------------- application

namespace {

struct Linearizer {
  std::map<Symbol, std::int64_t> bounds;

  Expr product(const Expr& c, const Expr& t) {
    auto it = c->op == Op::Var ? bounds.find(c->name) : bounds.end();
    if (it == bounds.end()) throw Error("nonlinear product outside template coefficients: " + to_muclp(mul(c, t)));
    // Values outside the bound are excluded by the shape constraint.
    Expr acc = int_lit(0);
    for (std::int64_t k = it->second; k >= -it->second; --k) {
      if (k == 0) continue;
      acc = ite(eq(c, int_lit(k)), mul(int_lit(k), t), acc);
    }
    return acc;
  }

  Expr run(const Expr& e) {
    if (e->kids.empty()) return e;
    std::vector<Expr> kids;
    for (const auto& k : e->kids) kids.push_back(run(k));
    if (e->op == Op::Mul) {
      Expr a = simplify(kids[0]), b = simplify(kids[1]);
      if (a->op == Op::IntLit || b->op == Op::IntLit) return mul(a, b);
      if (a->op == Op::Var && bounds.count(a->name)) return product(a, b);
      return product(b, a);
    }
    return with_kids(e, std::move(kids));
  }
};

Linearizer linearizer_of(const TemplateSet& ts) {
  Linearizer l;
  for (const auto& [name, t] : ts) l.bounds.insert(t.bounds.begin(), t.bounds.end());
  return l;
}

std::map<Symbol, Lambda> skeletons(const TemplateSet& ts) {
  std::map<Symbol, Lambda> m;
  for (const auto& [name, t] : ts) m[name] = t.skeleton;
  return m;
}

void collect_targets(const Expr& e, std::set<Symbol>& out) {
  if (e->op == Op::Call) out.insert(e->name);
  for (const auto& k : e->kids) collect_targets(k, out);
}

}  // namespace

Expr apply_templates(const Expr& e, const TemplateSet& ts) {
  // Calls nested in arguments are replaced bottom-up by subst_calls.
  Expr applied = subst_calls(e, skeletons(ts));
  return simplify(linearizer_of(ts).run(applied));
}

namespace {

// Replaces Int-valued function calls bottom-up by auxiliary variables, one
// per distinct call, recording each definition. Products of predicate
// coefficients with a call then stay small.
struct CallNamer {
  const TemplateSet& ts;
  const std::map<Symbol, Lambda>& sk;
  Linearizer& lin;
  std::map<std::string, Expr> seen;
  std::vector<std::pair<Symbol, NamedAssertion>> defs;  ///< (owner, definition)

  Expr run(const Expr& e) {
    if (e->kids.empty()) return e;
    std::vector<Expr> kids;
    for (const auto& k : e->kids) kids.push_back(run(k));
    Expr out = with_kids(e, std::move(kids));
    if (out->op != Op::Call || out->call_kind != CallKind::Fun || out->sort != Sort::Int || !ts.count(out->name)) {
      return out;
    }
    const std::string key = to_smt2(out);
    if (auto it = seen.find(key); it != seen.end()) return it->second;
    Expr aux = var(Symbol(out->name.str() + "#v" + std::to_string(defs.size())), Sort::Int);
    Expr def = eq(aux, simplify(lin.run(subst_calls(out, sk))));
    defs.push_back({out->name, NamedAssertion{"f" + std::to_string(defs.size()), def}});
    seen.emplace(key, aux);
    return aux;
  }
};

}  // namespace

Hypothesis hypothesis_constraint(const std::vector<Clause>& examples, const TemplateSet& ts) {
  Hypothesis h;
  const auto sk = skeletons(ts);
  Linearizer lin = linearizer_of(ts);
  CallNamer namer{ts, sk, lin, {}, {}};
  for (std::size_t i = 0; i < examples.size(); ++i) {
    Expr f = subst_calls(namer.run(clause_matrix(examples[i])), sk);
    h.assertions.push_back(NamedAssertion{"e" + std::to_string(i), simplify(lin.run(f))});
  }
  for (auto& [owner, def] : namer.defs) {
    h.shape_owner[def.name] = owner;
    h.assertions.push_back(std::move(def));
  }
  std::size_t k = 0;
  for (const auto& [name, t] : ts) {
    std::string n = "c" + std::to_string(k++);
    h.assertions.push_back(NamedAssertion{n, t.shape});
    h.shape_owner[n] = name;
    h.unknowns.insert(h.unknowns.end(), t.unknowns.begin(), t.unknowns.end());
  }
  return h;
}

CandidateSolution extract_candidate(const TemplateSet& ts, const CoeffAssignment& theta) {
  CandidateSolution s;
  for (const auto& [name, t] : ts) {
    std::map<Symbol, Expr> m;
    for (Symbol u : t.unknowns) {
      auto it = theta.find(u);
      m[u] = int_lit(it == theta.end() ? 0 : it->second);
    }
    s[name] = Lambda{t.skeleton.params, simplify(subst_vars(t.skeleton.body, m))};
  }
  return s;
}

CoreBlame implicated(const std::vector<std::string>& core, const std::vector<Clause>& examples,
                     const Hypothesis& h) {
  CoreBlame out;
  for (const auto& name : core) {
    if (auto it = h.shape_owner.find(name); it != h.shape_owner.end()) {
      out.vars.insert(it->second);
      if (name[0] == 'c') out.bounded.insert(it->second);
    } else if (name.size() > 1 && name[0] == 'e') {
      std::size_t i = std::stoul(name.substr(1));
      if (i < examples.size()) collect_targets(clause_matrix(examples[i]), out.vars);
    }
  }
  return out;
}

namespace {

void bump_one(Params& ps, bool bounded) {
  const std::size_t nstruct = ps.family == Family::WellFounded ? 3 : 2;
  bool structural = !bounded || ps.level % 3 == 2;
  if (bounded) {
    for (std::size_t i = nstruct; i < ps.values.size(); ++i) ps.values[i] = ps.values[i] == 0 ? 1 : 2 * ps.values[i];
  }
  if (structural) {
    // Round-robin over the structural components by total structural growth.
    // Ordinary and function templates add a conjunct before a disjunct.
    std::int64_t grown = 0;
    for (std::size_t i = 0; i < nstruct; ++i) grown += ps.values[i];
    std::size_t slot = static_cast<std::size_t>(grown) % nstruct;
    if (ps.family != Family::WellFounded) slot = nstruct - 1 - slot;
    ps.values[slot] += 1;
  }
  ++ps.level;
}

}  // namespace

ParamVector bump_params(const ParamVector& p, const CoreBlame& blame, unsigned fairness) {
  ParamVector out = p;
  bool any = false;
  for (auto& [name, ps] : out.vars) {
    if (blame.vars.count(name)) {
      bump_one(ps, blame.bounded.count(name) != 0);
      any = true;
    }
  }
  if (!any) {
    for (auto& [name, ps] : out.vars) bump_one(ps, true);
  }
  unsigned top = 0;
  for (const auto& [name, ps] : out.vars) top = std::max(top, ps.level);
  for (auto& [name, ps] : out.vars) {
    while (ps.level + fairness < top) bump_one(ps, true);
  }
  return out;
}

ParamVector bump_params(const ParamVector& p, const std::set<Symbol>& vars, unsigned fairness) {
  return bump_params(p, CoreBlame{vars, vars}, fairness);
}

std::optional<TemplateSet> unit_multipliers(const TemplateSet& ts) {
  TemplateSet out = ts;
  bool changed = false;
  for (auto& [name, t] : out) {
    std::vector<Expr> box{t.shape};
    for (Symbol c : t.multipliers) {
      auto& b = t.bounds.at(c);
      if (b <= 1) continue;
      b = 1;
      changed = true;
      box.push_back(cmp(Op::Le, var(c, Sort::Int), int_lit(1)));
      box.push_back(cmp(Op::Ge, var(c, Sort::Int), int_lit(-1)));
    }
    t.shape = and_(box);
  }
  if (!changed) return std::nullopt;
  return out;
}

}  // namespace muval
