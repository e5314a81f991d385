#pragma once

// Hand-written solutions of reduced fixture programs.

#include <map>
#include <string>
#include <vector>

#include "muval/pfwcsp.hpp"
#include "muval/reduction.hpp"

namespace muval::testing {

inline Lambda int_lambda(const std::vector<std::string>& names, const std::string& body) {
  std::vector<Param> ps;
  for (const auto& n : names) ps.push_back(Param{Symbol(n), Sort::Int});
  return Lambda{ps, parse_formula(body, ps)};
}

/// I = true, J = x2 >= 0, NP = false, WF_I from the lexicographic ranking
/// (x1, x1 + x2) and WF_J from max(22 - x2, x2) on x2 >= 0, lifted onto the
/// reduced parameter lists (original parameters trail).
inline CandidateSolution planted_p_term(const Reduction& r) {
  std::map<Symbol, Lambda> base{
      {Symbol("I"), int_lambda({"x1", "x2"}, "true")},
      {Symbol("J"), int_lambda({"x2"}, "x2 >= 0")},
      {Symbol("NP"), int_lambda({"x2", "x2p"}, "false")},
  };
  CandidateSolution s;
  for (const auto& [name, l] : base) {
    const auto& ps = r.trace.params.at(name);
    std::map<Symbol, Expr> m;
    for (std::size_t i = 0; i < l.params.size(); ++i) {
      m[l.params[i].name] = var(ps[ps.size() - l.params.size() + i]);
    }
    s[name] = Lambda{ps, subst_vars(l.body, m)};
  }
  s[Symbol("WF_I")] =
      int_lambda({"a", "b", "c", "d"}, "a >= 0 /\\ a + b >= 0 /\\ (a > c \\/ a >= c /\\ a + b > c + d)");
  s[Symbol("WF_J")] = int_lambda({"a", "c"},
                                 "a >= 0 /\\ c >= 0 /\\ ite(22 - a >= a, 22 - a, a) >= 0 /\\ "
                                 "ite(22 - a >= a, 22 - a, a) > ite(22 - c >= c, 22 - c, c)");
  return s;
}

/// Counter bisimulation: the relation y1 - x1 = y2 - x2, and Skolem
/// functions that copy the other system's step.
inline CandidateSolution planted_counter(const Reduction& r) {
  CandidateSolution s;
  s[Symbol("bisim")] = int_lambda({"x1", "y1", "x2", "y2"}, "y1 - x1 = y2 - x2");
  for (const auto& sk : r.trace.skolems) {
    // Skolem of v_k' (v in {x, y}) over (x1, y1, x2, y2, x_o', y_o').
    const std::string name = sk.variable.str();
    const std::size_t v = name[0] == 'x' ? 0 : 1;
    const std::size_t k = name[1] == '1' ? 0 : 1;
    const std::size_t o = 1 - k;
    const Expr moved = sub(var(sk.args[4 + v]), var(sk.args[2 * o + v]));
    s[sk.function] = Lambda{sk.args, add(var(sk.args[2 * k + v]), moved)};
  }
  return s;
}

}  // namespace muval::testing
