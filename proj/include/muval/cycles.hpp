#pragma once

// Elementary circuits of a directed graph (Johnson 1975). Header-only.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <vector>

namespace muval {

/// Adjacency lists over vertices 0..n-1. Parallel edges are ignored; a
/// self-loop is a circuit of length one.
using Digraph = std::vector<std::vector<std::size_t>>;

namespace detail {

// Tarjan restricted to vertices >= lo. Returns the component id of each
// vertex (or npos when below lo).
inline std::vector<std::size_t> components_from(const Digraph& g, std::size_t lo) {
  constexpr std::size_t npos = static_cast<std::size_t>(-1);
  const std::size_t n = g.size();
  std::vector<std::size_t> index(n, npos), low(n, 0), comp(n, npos), stack;
  std::vector<bool> on_stack(n, false);
  std::size_t counter = 0, ncomp = 0;
  // Iterative DFS: frame = (vertex, next edge position).
  std::vector<std::pair<std::size_t, std::size_t>> frames;
  for (std::size_t root = lo; root < n; ++root) {
    if (index[root] != npos) continue;
    frames.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!frames.empty()) {
      auto& [v, pos] = frames.back();
      if (pos < g[v].size()) {
        std::size_t w = g[v][pos++];
        if (w < lo) continue;
        if (index[w] == npos) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      std::size_t done = v;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().first] = std::min(low[frames.back().first], low[done]);
      if (low[done] == index[done]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = ncomp;
        } while (w != done);
        ++ncomp;
      }
    }
  }
  return comp;
}

}  // namespace detail

/// Calls `visit` once per elementary circuit, given as its vertex sequence
/// starting at the least vertex. Enumeration stops when `visit` returns false.
/// Returns the number of circuits reported.
inline std::size_t for_each_circuit(const Digraph& graph, const std::function<bool(const std::vector<std::size_t>&)>& visit) {
  const std::size_t n = graph.size();
  Digraph g(n);
  for (std::size_t v = 0; v < n; ++v) {
    g[v] = graph[v];
    std::sort(g[v].begin(), g[v].end());
    g[v].erase(std::unique(g[v].begin(), g[v].end()), g[v].end());
  }
  std::size_t found = 0;
  bool stop = false;
  std::vector<bool> blocked(n, false);
  std::vector<std::vector<std::size_t>> b_sets(n);
  std::vector<std::size_t> path;

  // A vertex alone in its component of the whole graph lies on a circuit only
  // through a self-loop; skipping those keeps acyclic graphs linear.
  const auto whole = detail::components_from(g, 0);
  std::vector<std::size_t> comp_size(n, 0);
  for (std::size_t v = 0; v < n; ++v) ++comp_size[whole[v]];

  for (std::size_t s = 0; s < n && !stop; ++s) {
    if (comp_size[whole[s]] == 1) {
      if (std::binary_search(g[s].begin(), g[s].end(), s)) {
        ++found;
        path.assign(1, s);
        if (!visit(path)) stop = true;
      }
      continue;
    }
    const auto comp = detail::components_from(g, s);
    const std::size_t cs = comp[s];
    auto in_scope = [&](std::size_t w) { return w >= s && comp[w] == cs; };
    for (std::size_t v = s; v < n; ++v) {
      blocked[v] = false;
      b_sets[v].clear();
    }
    // Iterative CIRCUIT(v). Frame = (vertex, next edge, found a circuit).
    struct Frame {
      std::size_t v, pos;
      bool closed;
    };
    std::vector<Frame> frames{{s, 0, false}};
    path.assign(1, s);
    blocked[s] = true;
    while (!frames.empty() && !stop) {
      Frame& f = frames.back();
      if (f.pos < g[f.v].size()) {
        std::size_t w = g[f.v][f.pos++];
        if (!in_scope(w)) continue;
        if (w == s) {
          ++found;
          f.closed = true;
          if (!visit(path)) stop = true;
        } else if (!blocked[w]) {
          blocked[w] = true;
          path.push_back(w);
          frames.push_back({w, 0, false});
        }
        continue;
      }
      const Frame done = f;
      frames.pop_back();
      if (done.closed) {
        // unblock(done.v)
        std::vector<std::size_t> work{done.v};
        while (!work.empty()) {
          std::size_t u = work.back();
          work.pop_back();
          if (!blocked[u]) continue;
          blocked[u] = false;
          for (std::size_t x : b_sets[u]) work.push_back(x);
          b_sets[u].clear();
        }
      } else {
        for (std::size_t w : g[done.v]) {
          if (!in_scope(w)) continue;
          auto& bw = b_sets[w];
          if (std::find(bw.begin(), bw.end(), done.v) == bw.end()) bw.push_back(done.v);
        }
      }
      path.pop_back();
      if (!frames.empty() && done.closed) frames.back().closed = true;
    }
  }
  return found;
}

/// All elementary circuits, each starting at its least vertex.
inline std::vector<std::vector<std::size_t>> elementary_circuits(const Digraph& g) {
  std::vector<std::vector<std::size_t>> out;
  for_each_circuit(g, [&](const std::vector<std::size_t>& c) {
    out.push_back(c);
    return true;
  });
  return out;
}

}  // namespace muval
