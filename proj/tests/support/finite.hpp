#pragma once

// Explicit finite-state systems, their text rendering in the .lts/.game/.buchi
// formats, random generators and explicit-state oracles. States are the
// values 0..n-1 of a single Int variable.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace muval::testing {

using Rng = std::mt19937_64;

inline int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

struct FiniteLts {
  int n = 1;
  std::vector<std::string> labels;
  std::map<std::string, std::vector<std::pair<int, int>>> edges;  ///< Keyed by label.
  int init = 0;

  std::vector<int> succ(const std::string& l, int s) const {
    std::vector<int> out;
    auto it = edges.find(l);
    if (it == edges.end()) return out;
    for (auto [a, b] : it->second) {
      if (a == s) out.push_back(b);
    }
    return out;
  }
};

/// Complete deterministic automaton over the LTS labels.
struct DetBuchi {
  int m = 1;
  std::vector<std::map<std::string, int>> delta;
  std::set<int> final;
};

struct FiniteGame {
  FiniteLts lts;
  std::set<std::string> exists, forall;
  std::set<int> target;  ///< Safe or reach states.
};

// ---------------------------------------------------------------- rendering

inline std::string relation_text(const FiniteLts& t, const std::string& l, const std::string& x = "x") {
  auto it = t.edges.find(l);
  if (it == t.edges.end() || it->second.empty()) return "false";
  std::string s;
  for (auto [a, b] : it->second) {
    if (!s.empty()) s += " \\/ ";
    s += "(" + x + " = " + std::to_string(a) + " /\\ " + x + "' = " + std::to_string(b) + ")";
  }
  return s;
}

inline std::string set_text(const std::set<int>& states) {
  if (states.empty()) return "false";
  std::string s;
  for (int v : states) s += (s.empty() ? "" : " \\/ ") + std::string("x = ") + std::to_string(v);
  return s;
}

inline std::string lts_text(const FiniteLts& t) {
  std::string s = "vars x: int;\n";
  for (const auto& l : t.labels) s += "trans " + l + ": " + relation_text(t, l) + ";\n";
  return s + "init x = " + std::to_string(t.init) + ";\n";
}

/// `objective` is "safe", "reach" or "ltl".
inline std::string game_text(const FiniteGame& g, const std::string& objective) {
  std::string s = "vars x: int;\n";
  for (const auto& l : g.lts.labels) {
    s += "trans " + l + (g.exists.count(l) ? " exists" : " forall") + ": " + relation_text(g.lts, l) + ";\n";
  }
  s += "init x = " + std::to_string(g.lts.init) + ";\n";
  s += objective == "ltl" ? "ltl;\n" : objective + " " + set_text(g.target) + ";\n";
  return s;
}

inline std::string buchi_text(const DetBuchi& a) {
  std::string s = "states ";
  for (int q = 0; q < a.m; ++q) s += (q ? ", q" : "q") + std::to_string(q);
  s += ";\ninit q0;\n";
  if (!a.final.empty()) {
    s += "final ";
    bool first = true;
    for (int q : a.final) {
      s += (first ? "q" : ", q") + std::to_string(q);
      first = false;
    }
    s += ";\n";
  }
  for (int q = 0; q < a.m; ++q) {
    for (const auto& [l, q2] : a.delta[q]) s += "q" + std::to_string(q) + " -> q" + std::to_string(q2) + " : " + l + ";\n";
  }
  return s;
}

// ---------------------------------------------------------------- generators

/// Every label gets edges with probability `density`; `total` adds a
/// successor to states that have none.
inline FiniteLts random_lts(Rng& rng, int n, const std::vector<std::string>& labels, double density, bool total) {
  FiniteLts t;
  t.n = n;
  t.labels = labels;
  t.init = uniform(rng, 0, n - 1);
  for (const auto& l : labels) {
    auto& es = t.edges[l];
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (coin(rng, density)) es.push_back({a, b});
      }
    }
  }
  if (total) {
    for (int a = 0; a < n; ++a) {
      bool any = false;
      for (const auto& l : labels) any = any || !t.succ(l, a).empty();
      if (!any) t.edges[labels[uniform(rng, 0, int(labels.size()) - 1)]].push_back({a, uniform(rng, 0, n - 1)});
    }
  }
  return t;
}

inline DetBuchi random_det_buchi(Rng& rng, int m, const std::vector<std::string>& labels) {
  DetBuchi a;
  a.m = m;
  a.delta.resize(m);
  for (int q = 0; q < m; ++q) {
    for (const auto& l : labels) a.delta[q][l] = uniform(rng, 0, m - 1);
    if (coin(rng, 0.4)) a.final.insert(q);
  }
  if (a.final.empty()) a.final.insert(uniform(rng, 0, m - 1));
  return a;
}

inline FiniteGame random_game(Rng& rng, int n, double density) {
  FiniteGame g;
  g.lts = random_lts(rng, n, {"e1", "e2", "u1", "u2"}, density, false);
  g.exists = {"e1", "e2"};
  g.forall = {"u1", "u2"};
  for (int s = 0; s < n; ++s) {
    if (coin(rng, 0.6)) g.target.insert(s);
  }
  return g;
}

// ---------------------------------------------------------------- oracles

/// Every infinite run from the initial state visits a final state infinitely
/// often: no lasso through non-final product states is reachable.
inline bool buchi_oracle(const FiniteLts& t, const DetBuchi& a) {
  const int n = t.n * a.m;
  auto id = [&](int s, int q) { return s * a.m + q; };
  std::vector<std::vector<int>> g(n);
  for (int s = 0; s < t.n; ++s) {
    for (int q = 0; q < a.m; ++q) {
      for (const auto& l : t.labels) {
        for (int s2 : t.succ(l, s)) g[id(s, q)].push_back(id(s2, a.delta[q].at(l)));
      }
    }
  }
  std::vector<bool> reach(n, false);
  std::vector<int> work{id(t.init, 0)};
  reach[work[0]] = true;
  while (!work.empty()) {
    int v = work.back();
    work.pop_back();
    for (int w : g[v]) {
      if (!reach[w]) reach[w] = true, work.push_back(w);
    }
  }
  auto bad = [&](int v) { return reach[v] && !a.final.count(v % a.m); };
  // A bad node lies on a bad cycle iff it can return to itself through bad nodes.
  for (int v = 0; v < n; ++v) {
    if (!bad(v)) continue;
    std::vector<bool> seen(n, false);
    std::vector<int> st;
    for (int w : g[v]) {
      if (bad(w) && !seen[w]) seen[w] = true, st.push_back(w);
    }
    while (!st.empty()) {
      int u = st.back();
      st.pop_back();
      if (u == v) return false;
      for (int w : g[u]) {
        if (bad(w) && !seen[w]) seen[w] = true, st.push_back(w);
      }
    }
  }
  return true;
}

inline std::vector<int> moves(const FiniteGame& g, const std::set<std::string>& player, int s) {
  std::vector<int> out;
  for (const auto& l : g.lts.labels) {
    if (!player.count(l)) continue;
    for (int s2 : g.lts.succ(l, s)) out.push_back(s2);
  }
  return out;
}

/// Attractor of `goal` in rounds where `first` moves and `second` replies.
/// The attracting player is `first` when `first_forces`, else `second`. A
/// player with no move available loses the round.
inline std::vector<bool> round_attractor(const FiniteGame& g, const std::set<std::string>& first,
                                         const std::set<std::string>& second, const std::vector<bool>& goal,
                                         bool first_forces) {
  const int n = g.lts.n;
  std::vector<bool> attr = goal;
  for (bool changed = true; changed;) {
    changed = false;
    for (int s = 0; s < n; ++s) {
      if (attr[s]) continue;
      auto response_ok = [&](int y) {
        if (goal[y]) return true;
        const auto zs = moves(g, second, y);
        if (first_forces) return std::all_of(zs.begin(), zs.end(), [&](int z) { return bool(attr[z]); });
        return std::any_of(zs.begin(), zs.end(), [&](int z) { return bool(attr[z]); });
      };
      const auto ys = moves(g, first, s);
      bool in = first_forces ? std::any_of(ys.begin(), ys.end(), response_ok)
                             : std::all_of(ys.begin(), ys.end(), response_ok);
      if (in) attr[s] = changed = true;
    }
  }
  return attr;
}

/// The existential player keeps the play inside the safe states: the
/// universal player cannot force an unsafe state.
inline bool safety_oracle(const FiniteGame& g) {
  std::vector<bool> unsafe(g.lts.n);
  for (int s = 0; s < g.lts.n; ++s) unsafe[s] = !g.target.count(s);
  return !round_attractor(g, g.forall, g.exists, unsafe, true)[g.lts.init];
}

/// The existential player, answering each universal move, forces a reach state.
inline bool reach_oracle(const FiniteGame& g) {
  std::vector<bool> goal(g.lts.n);
  for (int s = 0; s < g.lts.n; ++s) goal[s] = g.target.count(s) != 0;
  return round_attractor(g, g.forall, g.exists, goal, false)[g.lts.init];
}

/// Büchi game on positions (state, automaton state); a round is a universal
/// move followed by an existential move and is accepting when either
/// automaton state it enters is final.
inline bool ltl_game_oracle(const FiniteGame& g, const DetBuchi& a) {
  const int n = g.lts.n * a.m;
  auto id = [&](int s, int q) { return s * a.m + q; };
  auto cpre = [&](const std::vector<bool>& z, const std::vector<bool>& y, int v) {
    const int s = v / a.m, q = v % a.m;
    for (const auto& l : g.lts.labels) {
      if (!g.forall.count(l)) continue;
      const int q1 = a.delta[q].at(l);
      for (int s1 : g.lts.succ(l, s)) {
        bool answered = false;
        for (const auto& l2 : g.lts.labels) {
          if (!g.exists.count(l2)) continue;
          const int q2 = a.delta[q1].at(l2);
          const bool acc = a.final.count(q1) || a.final.count(q2);
          for (int s2 : g.lts.succ(l2, s1)) answered = answered || (acc ? z[id(s2, q2)] : y[id(s2, q2)]);
        }
        if (!answered) return false;
      }
    }
    return true;
  };
  std::vector<bool> z(n, true);
  for (;;) {
    std::vector<bool> y(n, false);
    for (bool changed = true; changed;) {
      changed = false;
      for (int v = 0; v < n; ++v) {
        if (!y[v] && cpre(z, y, v)) y[v] = changed = true;
      }
    }
    if (y == z) break;
    z = y;
  }
  return z[id(g.lts.init, 0)];
}

/// Greatest bisimulation by refinement from the full relation.
inline std::vector<std::vector<bool>> bisimulation_oracle(const FiniteLts& a, const FiniteLts& b) {
  std::vector<std::vector<bool>> r(a.n, std::vector<bool>(b.n, true));
  std::set<std::string> labels(a.labels.begin(), a.labels.end());
  labels.insert(b.labels.begin(), b.labels.end());
  auto simulated = [&](const FiniteLts& from, const FiniteLts& to, int s, int t, bool flip) {
    for (const auto& l : labels) {
      for (int s2 : from.succ(l, s)) {
        bool matched = false;
        for (int t2 : to.succ(l, t)) matched = matched || (flip ? r[t2][s2] : r[s2][t2]);
        if (!matched) return false;
      }
    }
    return true;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (int s = 0; s < a.n; ++s) {
      for (int t = 0; t < b.n; ++t) {
        if (r[s][t] && !(simulated(a, b, s, t, false) && simulated(b, a, t, s, true))) r[s][t] = false, changed = true;
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------- digraphs

/// Adjacency lists; same shape as muval::Digraph.
using Adjacency = std::vector<std::vector<std::size_t>>;

inline Adjacency random_digraph(Rng& rng, std::size_t n, double p) {
  Adjacency g(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (coin(rng, p)) g[a].push_back(b);
    }
  }
  return g;
}

/// Elementary circuits by depth-first extension of paths whose start is
/// their least vertex.
inline std::set<std::vector<std::size_t>> brute_force_circuits(const Adjacency& g) {
  std::set<std::vector<std::size_t>> out;
  const std::size_t n = g.size();
  std::vector<std::set<std::size_t>> adj(n);
  for (std::size_t v = 0; v < n; ++v) adj[v].insert(g[v].begin(), g[v].end());
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<std::size_t> path{s};
    std::vector<bool> on(n, false);
    on[s] = true;
    std::function<void()> extend = [&] {
      for (std::size_t w : adj[path.back()]) {
        if (w == s) out.insert(path);
        if (w <= s || on[w]) continue;
        on[w] = true;
        path.push_back(w);
        extend();
        path.pop_back();
        on[w] = false;
      }
    };
    extend();
  }
  return out;
}

}  // namespace muval::testing
