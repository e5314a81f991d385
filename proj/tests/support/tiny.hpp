#pragma once

// Random tiny MuCLP programs: at most three equations of arity at most two,
// constants in [-2, 2]. Every recursive argument is a parameter, a constant,
// or a parameter moved by one under a guard that keeps it in [-2, 2], and the
// query only inspects [-2, 2]. Values stay in that box, so evaluation bounded
// to any box containing it agrees with the unbounded semantics.

#include <string>
#include <vector>

#include "finite.hpp"

namespace muval::testing {

struct TinyProgram {
  std::string text;
  int equations = 0;
};

namespace tiny_detail {

inline std::string constant(Rng& rng) {
  int c = uniform(rng, -2, 2);
  return c < 0 ? "-" + std::to_string(-c) : std::to_string(c);
}

inline std::string atom(Rng& rng, const std::vector<std::string>& ps) {
  static const char* ops[] = {"<=", ">=", "=", "!="};
  const std::string& x = ps[uniform(rng, 0, int(ps.size()) - 1)];
  if (ps.size() == 2 && coin(rng, 0.25)) return ps[0] + " + " + ps[1] + " " + ops[uniform(rng, 0, 1)] + " " + constant(rng);
  return x + " " + ops[uniform(rng, 0, 3)] + " " + constant(rng);
}

// One argument and its guard ("" when none is needed).
inline std::pair<std::string, std::string> argument(Rng& rng, const std::vector<std::string>& ps) {
  const std::string& x = ps[uniform(rng, 0, int(ps.size()) - 1)];
  switch (uniform(rng, 0, 4)) {
    case 0: return {constant(rng), ""};
    case 1: return {x + " - 1", x + " >= -1"};
    case 2: return {x + " + 1", x + " <= 1"};
    default: return {x, ""};
  }
}

inline std::string call(Rng& rng, const std::vector<std::string>& ps, const std::string& callee, int arity) {
  std::vector<std::string> guards;
  std::string args;
  for (int i = 0; i < arity; ++i) {
    auto [a, g] = argument(rng, ps);
    args += (i ? ", " : "") + a;
    if (!g.empty()) guards.push_back(g);
  }
  std::string s = callee + "(" + args + ")";
  for (const auto& g : guards) s = g + " /\\ " + s;
  return guards.empty() ? s : "(" + s + ")";
}

inline std::string formula(Rng& rng, const std::vector<std::string>& ps, const std::vector<std::string>& names,
                           const std::vector<int>& arities, int depth) {
  if (depth == 0 || coin(rng, 0.3)) {
    if (coin(rng, 0.55)) {
      int j = uniform(rng, 0, int(names.size()) - 1);
      return call(rng, ps, names[j], arities[j]);
    }
    return atom(rng, ps);
  }
  std::string a = formula(rng, ps, names, arities, depth - 1), b = formula(rng, ps, names, arities, depth - 1);
  return "(" + a + (coin(rng) ? " /\\ " : " \\/ ") + b + ")";
}

}  // namespace tiny_detail

inline TinyProgram random_tiny_program(Rng& rng) {
  using namespace tiny_detail;
  TinyProgram out;
  const int k = uniform(rng, 1, 3);
  out.equations = k;
  std::vector<std::string> names;
  std::vector<int> arities;
  for (int i = 0; i < k; ++i) {
    names.push_back("X" + std::to_string(i));
    arities.push_back(uniform(rng, 1, 2));
  }
  std::string eqs;
  for (int i = 0; i < k; ++i) {
    std::vector<std::string> ps{"x"};
    if (arities[i] == 2) ps.push_back("y");
    std::string head = names[i] + "(x: int" + (arities[i] == 2 ? ", y: int" : "") + ")";
    // A non-recursive disjunct or conjunct keeps the fixpoints non-trivial.
    std::string base = atom(rng, ps), rec = formula(rng, ps, names, arities, 2);
    std::string body = coin(rng) ? base + " \\/ " + rec : base + " /\\ " + rec;
    eqs += head + (coin(rng) ? " =mu " : " =nu ") + body + ";\n";
  }
  std::string q;
  const int arity0 = arities[0];
  std::string args = arity0 == 2 ? "x, " + constant(rng) : "x";
  switch (uniform(rng, 0, 2)) {
    case 0: q = "forall x: int. x < -2 \\/ x > 2 \\/ X0(" + args + ")"; break;
    case 1: q = "exists x: int. x >= -2 /\\ x <= 2 /\\ X0(" + args + ")"; break;
    default: q = "X0(" + constant(rng) + (arity0 == 2 ? ", " + constant(rng) : "") + ")"; break;
  }
  out.text = "query " + q + ";\n" + eqs;
  return out;
}

}  // namespace muval::testing
