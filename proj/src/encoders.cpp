#include "muval/encoders.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <string>

#include "muval/cycles.hpp"

namespace muval {

// ---------------------------------------------------------------- model

std::vector<Symbol> SymbolicLts::labels() const {
  std::vector<Symbol> out;
  for (const auto& t : transitions) {
    if (std::find(out.begin(), out.end(), t.label) == out.end()) out.push_back(t.label);
  }
  return out;
}

namespace {
Symbol primed(Symbol x) { return Symbol(x.str() + "'"); }
}  // namespace

Expr SymbolicLts::step(Symbol label, const std::vector<Expr>& from, const std::vector<Expr>& to) const {
  std::map<Symbol, Expr> m;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    m[vars[i].name] = from[i];
    m[primed(vars[i].name)] = to[i];
  }
  std::vector<Expr> alts;
  for (const auto& t : transitions) {
    if (t.label == label) alts.push_back(subst_vars(t.relation, m));
  }
  return or_(std::move(alts));
}

std::vector<Symbol> BuchiAutomaton::delta(Symbol q, Symbol label) const {
  std::vector<Symbol> out;
  for (const auto& e : edges) {
    if (e.from != q || (!e.label.empty() && e.label != label)) continue;
    if (std::find(out.begin(), out.end(), e.to) == out.end()) out.push_back(e.to);
  }
  return out;
}

// ---------------------------------------------------------------- parsing

namespace {

struct Statement {
  std::size_t line;
  std::string text;
};

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

// Splits on ';' after removing // comments. Each statement records the line
// of its first non-blank character.
std::vector<Statement> statements(std::string_view text) {
  std::vector<Statement> out;
  std::string cur;
  std::size_t line = 1, start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') ++i;
      if (i == text.size()) break;
      c = '\n';
    }
    if (c == '\n') ++line;
    if (c == ';') {
      if (!trim(cur).empty()) out.push_back({start, trim(cur)});
      cur.clear();
      start = 0;
      continue;
    }
    if (start == 0 && !std::isspace(static_cast<unsigned char>(c))) start = line;
    cur += c;
  }
  if (!trim(cur).empty()) throw ParseError(start, 1, "missing ';'");
  return out;
}

std::pair<std::string, std::string> keyword(const std::string& s) {
  std::size_t i = 0;
  while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != ':') ++i;
  return {s.substr(0, i), trim(std::string_view(s).substr(i))};
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t c = s.find(',', pos);
    out.push_back(trim(s.substr(pos, c == std::string_view::npos ? std::string_view::npos : c - pos)));
    if (c == std::string_view::npos) break;
    pos = c + 1;
  }
  return out;
}

bool is_ident(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

Symbol ident(const std::string& s, std::size_t line) {
  if (!is_ident(s)) throw ParseError(line, 1, "expected identifier, got '" + s + "'");
  return Symbol(s);
}

std::vector<Param> parse_vars(const std::string& body, std::size_t line) {
  std::vector<Param> out;
  for (const auto& item : split_list(body)) {
    auto colon = item.find(':');
    if (colon == std::string::npos) throw ParseError(line, 1, "expected 'name: sort'");
    std::string sort = trim(std::string_view(item).substr(colon + 1));
    Param p{ident(trim(std::string_view(item).substr(0, colon)), line), Sort::Int};
    if (sort == "bool") {
      p.sort = Sort::Bool;
    } else if (sort != "int") {
      throw ParseError(line, 1, "unknown sort '" + sort + "'");
    }
    for (const auto& q : out) {
      if (q.name == p.name) throw ParseError(line, 1, "duplicate variable " + p.name.str());
    }
    out.push_back(p);
  }
  return out;
}

Expr formula_at(const std::string& text, const std::vector<Param>& scope, std::size_t line) {
  try {
    Expr e = parse_formula(text, scope);
    if (e->sort != Sort::Bool) throw ParseError(line, 1, "expected a formula");
    // Unknown identifiers parse as nullary predicate calls.
    for (Symbol s : called_symbols(e, CallKind::Pred)) throw ParseError(line, 1, "undeclared name " + s.str());
    return e;
  } catch (const ParseError& err) {
    throw ParseError(line + err.line - 1, err.column, err.what());
  }
}

std::vector<Param> with_primes(const std::vector<Param>& vars) {
  std::vector<Param> out = vars;
  for (const auto& v : vars) out.push_back(Param{primed(v.name), v.sort});
  return out;
}

// Shared by .lts and .game. Returns false for statements it does not own.
bool lts_statement(SymbolicLts& lts, const Statement& st, const std::string& kw, const std::string& rest,
                   bool* exists_player, bool game) {
  if (kw == "vars") {
    if (!lts.vars.empty() || !lts.transitions.empty()) throw ParseError(st.line, 1, "'vars' must come first, once");
    lts.vars = parse_vars(rest, st.line);
    return true;
  }
  if (kw == "trans") {
    auto colon = rest.find(':');
    if (colon == std::string::npos) throw ParseError(st.line, 1, "expected ':' after transition label");
    std::string head = trim(std::string_view(rest).substr(0, colon));
    std::string owner;
    if (auto sp = head.find_first_of(" \t"); sp != std::string::npos) {
      owner = trim(std::string_view(head).substr(sp));
      head = trim(std::string_view(head).substr(0, sp));
    }
    if (game != !owner.empty()) {
      throw ParseError(st.line, 1, game ? "game transitions need 'exists' or 'forall'" : "unexpected player tag");
    }
    if (game) {
      if (owner != "exists" && owner != "forall") throw ParseError(st.line, 1, "unknown player '" + owner + "'");
      *exists_player = owner == "exists";
    }
    Transition t{ident(head, st.line), formula_at(rest.substr(colon + 1), with_primes(lts.vars), st.line)};
    lts.transitions.push_back(std::move(t));
    return true;
  }
  if (kw == "init") {
    lts.init = formula_at(rest, lts.vars, st.line);
    return true;
  }
  return false;
}

}  // namespace

SymbolicLts parse_lts(std::string_view text) {
  SymbolicLts lts;
  lts.init = mk_true();
  for (const auto& st : statements(text)) {
    auto [kw, rest] = keyword(st.text);
    if (!lts_statement(lts, st, kw, rest, nullptr, false)) throw ParseError(st.line, 1, "unknown statement '" + kw + "'");
  }
  return lts;
}

GameSpec parse_game(std::string_view text) {
  GameSpec g;
  g.lts.init = mk_true();
  bool objective_seen = false;
  for (const auto& st : statements(text)) {
    auto [kw, rest] = keyword(st.text);
    bool ex = false;
    if (lts_statement(g.lts, st, kw, rest, &ex, true)) {
      if (kw == "trans") {
        Symbol l = g.lts.transitions.back().label;
        auto& mine = ex ? g.exists_labels : g.forall_labels;
        auto& theirs = ex ? g.forall_labels : g.exists_labels;
        if (theirs.count(l)) throw ParseError(st.line, 1, "label " + l.str() + " belongs to both players");
        mine.insert(l);
      }
      continue;
    }
    if (kw != "safe" && kw != "reach" && kw != "ltl") throw ParseError(st.line, 1, "unknown statement '" + kw + "'");
    if (objective_seen) throw ParseError(st.line, 1, "more than one objective");
    objective_seen = true;
    if (kw == "ltl") {
      if (!rest.empty()) throw ParseError(st.line, 1, "'ltl' takes no argument");
      g.objective = Objective::Ltl;
    } else {
      g.objective = kw == "safe" ? Objective::Safety : Objective::Reach;
      g.target = formula_at(rest, g.lts.vars, st.line);
    }
  }
  if (!objective_seen) throw ParseError(1, 1, "missing objective (safe, reach or ltl)");
  return g;
}

BuchiAutomaton parse_buchi(std::string_view text) {
  BuchiAutomaton a;
  auto known = [&](Symbol q, std::size_t line) {
    if (std::find(a.states.begin(), a.states.end(), q) == a.states.end()) {
      throw ParseError(line, 1, "undeclared state " + q.str());
    }
    return q;
  };
  for (const auto& st : statements(text)) {
    if (auto arrow = st.text.find("->"); arrow != std::string::npos) {
      auto colon = st.text.find(':', arrow);
      if (colon == std::string::npos) throw ParseError(st.line, 1, "expected ':' after edge");
      Symbol from = known(ident(trim(std::string_view(st.text).substr(0, arrow)), st.line), st.line);
      Symbol to = known(ident(trim(std::string_view(st.text).substr(arrow + 2, colon - arrow - 2)), st.line), st.line);
      for (const auto& l : split_list(std::string_view(st.text).substr(colon + 1))) {
        a.edges.push_back(BuchiEdge{from, l == "*" ? Symbol() : ident(l, st.line), to});
      }
      continue;
    }
    auto [kw, rest] = keyword(st.text);
    if (kw == "states") {
      for (const auto& s : split_list(rest)) a.states.push_back(ident(s, st.line));
    } else if (kw == "init") {
      a.init = known(ident(rest, st.line), st.line);
    } else if (kw == "final") {
      for (const auto& s : split_list(rest)) a.final.insert(known(ident(s, st.line), st.line));
    } else {
      throw ParseError(st.line, 1, "unknown statement '" + kw + "'");
    }
  }
  if (a.init.empty()) throw ParseError(1, 1, "missing 'init'");
  return a;
}

// ---------------------------------------------------------------- encoders

namespace {

std::vector<Param> suffixed(const std::vector<Param>& vars, const std::string& suffix) {
  std::vector<Param> out;
  for (const auto& v : vars) out.push_back(Param{Symbol(v.name.str() + suffix), v.sort});
  return out;
}

std::vector<Expr> vars_of(const std::vector<Param>& ps) {
  std::vector<Expr> out;
  for (const auto& p : ps) out.push_back(var(p));
  return out;
}

Expr rename(const Expr& e, const std::vector<Param>& from, const std::vector<Param>& to) {
  std::map<Symbol, Expr> m;
  for (std::size_t i = 0; i < from.size(); ++i) m[from[i].name] = var(to[i]);
  return subst_vars(e, m);
}

// Union of the labels' steps.
Expr player_step(const SymbolicLts& lts, const std::set<Symbol>& labels, const std::vector<Param>& from,
                 const std::vector<Param>& to) {
  std::vector<Expr> alts;
  for (Symbol l : lts.labels()) {
    if (labels.count(l)) alts.push_back(lts.step(l, vars_of(from), vars_of(to)));
  }
  return or_(std::move(alts));
}

Program finish(Program p) {
  p = alpha_normalize(p);
  check_wellformed(p);
  return p;
}

void check_game(const GameSpec& g, Objective want) {
  if (g.objective != want) throw Error("game has the wrong objective kind");
  for (Symbol l : g.lts.labels()) {
    if (!g.exists_labels.count(l) && !g.forall_labels.count(l)) throw Error("label " + l.str() + " has no player");
  }
  if (want != Objective::Ltl && !g.target) throw Error("game has no target predicate");
  if (want == Objective::Ltl && !g.automaton) throw Error("LTL game needs an automaton");
}

// Orders the equations of an automaton product: components of the call graph
// in Tarjan order (callees first), nu before mu inside each component.
struct ProductNode {
  Symbol q;
  Fixpoint kind;
  friend bool operator<(const ProductNode& a, const ProductNode& b) {
    return a.q != b.q ? a.q < b.q : a.kind < b.kind;
  }
};

std::vector<std::size_t> equation_order(const std::vector<ProductNode>& nodes, const Digraph& g) {
  const auto comp = detail::components_from(g, 0);
  std::size_t ncomp = 0;
  for (auto c : comp) ncomp = std::max(ncomp, c + 1);
  std::vector<std::size_t> order;
  for (std::size_t c = 0; c < ncomp; ++c) {
    for (Fixpoint k : {Fixpoint::Nu, Fixpoint::Mu}) {
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (comp[i] == c && nodes[i].kind == k) order.push_back(i);
      }
    }
  }
  return order;
}

// Builds the product equations from `body(q, call)`, where `call(q', kind)`
// registers a reference and returns the call expression.
template <class Body>
Program automaton_program(const std::vector<Param>& params, Symbol init_state, const Expr& init, Body body) {
  std::vector<ProductNode> nodes;
  std::map<ProductNode, std::size_t> index;
  Digraph g;
  std::vector<Expr> bodies;
  auto intern = [&](ProductNode n) {
    auto [it, fresh] = index.emplace(n, nodes.size());
    if (fresh) {
      nodes.push_back(n);
      g.emplace_back();
    }
    return it->second;
  };
  intern(ProductNode{init_state, Fixpoint::Nu});
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const ProductNode self = nodes[i];
    auto call = [&](Symbol q, Fixpoint k, const std::vector<Param>& args) {
      std::size_t j = intern(ProductNode{q, k});
      g[i].push_back(j);
      return pred_call(automaton_predicate(q, k), vars_of(args));
    };
    bodies.push_back(body(self.q, call));
  }
  Program p;
  for (std::size_t i : equation_order(nodes, g)) {
    p.equations.push_back(Equation{automaton_predicate(nodes[i].q, nodes[i].kind), params, nodes[i].kind, bodies[i]});
  }
  p.query = forall(params, implies(init, pred_call(automaton_predicate(init_state, Fixpoint::Nu), vars_of(params))));
  return p;
}

}  // namespace

Symbol automaton_predicate(Symbol q, Fixpoint kind) {
  return Symbol("Z_" + q.str() + (kind == Fixpoint::Nu ? "_nu" : "_mu"));
}

Program encode_buchi(const SymbolicLts& lts, const BuchiAutomaton& a) {
  const auto labels = lts.labels();
  for (const auto& e : a.edges) {
    if (!e.label.empty() && std::find(labels.begin(), labels.end(), e.label) == labels.end()) {
      throw Error("automaton label " + e.label.str() + " is not a transition label");
    }
  }
  const std::vector<Param> xs = lts.vars, ys = suffixed(lts.vars, "'");
  auto kind_of = [&](Symbol q) { return a.final.count(q) ? Fixpoint::Nu : Fixpoint::Mu; };
  return finish(automaton_program(xs, a.init, lts.init, [&](Symbol q, auto& call) {
    std::vector<Expr> conj;
    for (Symbol l : labels) {
      std::vector<Expr> next;
      for (Symbol q2 : a.delta(q, l)) next.push_back(call(q2, kind_of(q2), ys));
      conj.push_back(forall(ys, implies(lts.step(l, vars_of(xs), vars_of(ys)), or_(std::move(next)))));
    }
    return and_(std::move(conj));
  }));
}

Program encode_safety_game(const GameSpec& g) {
  check_game(g, Objective::Safety);
  const auto xs = g.lts.vars, ys = suffixed(xs, "'"), zs = suffixed(xs, "''");
  const Symbol sg("sg");
  Expr body = and_(g.target,
                   forall(ys, implies(player_step(g.lts, g.forall_labels, xs, ys),
                                      and_(rename(g.target, xs, ys),
                                           exists(zs, and_(player_step(g.lts, g.exists_labels, ys, zs),
                                                           pred_call(sg, vars_of(zs))))))));
  Program p;
  p.equations.push_back(Equation{sg, xs, Fixpoint::Nu, body});
  p.query = forall(xs, implies(g.lts.init, pred_call(sg, vars_of(xs))));
  return finish(p);
}

Program encode_reachability_game(const GameSpec& g) {
  check_game(g, Objective::Reach);
  const auto xs = g.lts.vars, ys = suffixed(xs, "'"), zs = suffixed(xs, "''");
  const Symbol rg("rg");
  Expr body = or_(g.target,
                  forall(ys, implies(player_step(g.lts, g.forall_labels, xs, ys),
                                     or_(rename(g.target, xs, ys),
                                         exists(zs, and_(player_step(g.lts, g.exists_labels, ys, zs),
                                                         pred_call(rg, vars_of(zs))))))));
  Program p;
  p.equations.push_back(Equation{rg, xs, Fixpoint::Mu, body});
  p.query = forall(xs, implies(g.lts.init, pred_call(rg, vars_of(xs))));
  return finish(p);
}

Program safety_complement_as_reachability(const GameSpec& g) {
  check_game(g, Objective::Safety);
  GameSpec swapped = g;
  std::swap(swapped.exists_labels, swapped.forall_labels);
  swapped.objective = Objective::Reach;
  swapped.target = not_(g.target);
  Program p = encode_reachability_game(swapped);
  const auto xs = g.lts.vars, ys = suffixed(xs, "'");
  const Symbol rg = p.equations.front().head;
  p.query = exists(xs, and_(g.lts.init, or_(not_(g.target), exists(ys, and_(player_step(g.lts, g.forall_labels, xs, ys),
                                                                            pred_call(rg, vars_of(ys)))))));
  return finish(p);
}

Program encode_ltl_game(const GameSpec& g) {
  check_game(g, Objective::Ltl);
  const BuchiAutomaton& a = *g.automaton;
  const auto labels = g.lts.labels();
  for (const auto& e : a.edges) {
    if (!e.label.empty() && std::find(labels.begin(), labels.end(), e.label) == labels.end()) {
      throw Error("automaton label " + e.label.str() + " is not a transition label");
    }
  }
  const auto xs = g.lts.vars, ys = suffixed(xs, "'"), zs = suffixed(xs, "''");
  auto kind_of = [&](Symbol q1, Symbol q2) {
    return a.final.count(q1) || a.final.count(q2) ? Fixpoint::Nu : Fixpoint::Mu;
  };
  return finish(automaton_program(xs, a.init, g.lts.init, [&](Symbol q, auto& call) {
    std::vector<Expr> conj;
    for (Symbol l : labels) {
      if (!g.forall_labels.count(l)) continue;
      std::vector<Expr> replies;
      for (Symbol q1 : a.delta(q, l)) {
        for (Symbol l2 : labels) {
          if (!g.exists_labels.count(l2)) continue;
          for (Symbol q2 : a.delta(q1, l2)) {
            replies.push_back(exists(zs, and_(g.lts.step(l2, vars_of(ys), vars_of(zs)), call(q2, kind_of(q1, q2), zs))));
          }
        }
      }
      conj.push_back(forall(ys, implies(g.lts.step(l, vars_of(xs), vars_of(ys)), or_(std::move(replies)))));
    }
    return and_(std::move(conj));
  }));
}

std::vector<Param> bisim_vars(const SymbolicLts& a, const SymbolicLts& b) {
  std::vector<Param> out = suffixed(a.vars, "1");
  for (const auto& p : suffixed(b.vars, "2")) out.push_back(p);
  return out;
}

Program encode_bisimulation(const SymbolicLts& a, const SymbolicLts& b, const BisimQuery& q) {
  auto la = a.labels(), lb = b.labels();
  std::sort(la.begin(), la.end());
  std::sort(lb.begin(), lb.end());
  if (la != lb) throw Error("bisimulation needs a shared label alphabet");
  const auto x1 = suffixed(a.vars, "1"), x2 = suffixed(b.vars, "2");
  const auto y1 = suffixed(x1, "'"), y2 = suffixed(x2, "'");
  const auto all = bisim_vars(a, b);
  auto succ = y1;
  succ.insert(succ.end(), y2.begin(), y2.end());
  const Symbol bisim("bisim");
  Expr rel = pred_call(bisim, vars_of(succ));
  std::vector<Expr> conj;
  for (Symbol l : a.labels()) {
    Expr s1 = a.step(l, vars_of(x1), vars_of(y1)), s2 = b.step(l, vars_of(x2), vars_of(y2));
    conj.push_back(forall(y1, implies(s1, exists(y2, and_(s2, rel)))));
    conj.push_back(forall(y2, implies(s2, exists(y1, and_(s1, rel)))));
  }
  Program p;
  p.equations.push_back(Equation{bisim, all, Fixpoint::Nu, and_(std::move(conj))});
  switch (q.kind) {
    case BisimQueryKind::Pairs: {
      std::vector<Expr> atoms;
      for (const auto& v : q.pairs) {
        if (v.size() != all.size()) throw Error("state pair has the wrong arity");
        std::vector<Expr> args;
        for (std::size_t i = 0; i < v.size(); ++i) {
          args.push_back(all[i].sort == Sort::Bool ? bool_lit(v[i] != 0) : int_lit(v[i]));
        }
        atoms.push_back(pred_call(bisim, std::move(args)));
      }
      p.query = and_(std::move(atoms));
      return finish(p);
    }
    case BisimQueryKind::Lower:
      p.query = forall(all, implies(q.formula, pred_call(bisim, vars_of(all))));
      return finish(p);
    case BisimQueryKind::Upper:
      // Negated query, then the complement program: phi \/ not_bisim(x).
      p.query = exists(all, and_(not_(q.formula), pred_call(bisim, vars_of(all))));
      return finish(demorgan_dual(finish(p)));
  }
  throw Error("unreachable");
}

}  // namespace muval
