#pragma once

// The matroid of a star tree read off the graph Gamma(L) = (X, L): it is the
// bias matroid of the all-negative complete signed graph, so everything is
// decided by components, bipartiteness and cycle structure.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <queue>
#include <utility>
#include <vector>

#include "treematroid/tree.hpp"

namespace treematroid {

struct GraphComponent {
  std::vector<Leaf> vertices;
  CordSet edges;
  bool bipartite = true;
  std::size_t cycle_count = 0;  // |edges| - |vertices| + 1
  bool odd_cycle = false;
  std::vector<Leaf> side_a;  // 2-colouring when bipartite; side_a holds the smallest vertex
  std::vector<Leaf> side_b;
};

struct ComponentReport {
  std::size_t vertex_count = 0;
  std::vector<GraphComponent> components;  // ordered by smallest vertex

  std::size_t bipartite_count() const {
    return static_cast<std::size_t>(std::count_if(components.begin(), components.end(),
                                                  [](const GraphComponent& c) { return c.bipartite; }));
  }
  bool connected() const { return components.size() == 1; }
};

inline ComponentReport analyze(std::size_t n, const CordSet& cords) {
  std::vector<std::vector<Leaf>> adjacency(n);
  for (const auto& c : cords) {
    if (c.b >= n) throw std::invalid_argument("cord endpoint outside the leaf set");
    adjacency[c.a].push_back(c.b);
    adjacency[c.b].push_back(c.a);
  }
  ComponentReport report;
  report.vertex_count = n;
  std::vector<int> colour(n, -1);
  std::vector<std::size_t> component_of(n, 0);
  for (Leaf start = 0; start < n; ++start) {
    if (colour[start] != -1) continue;
    GraphComponent comp;
    std::queue<Leaf> pending;
    colour[start] = 0;
    pending.push(start);
    while (!pending.empty()) {
      const Leaf v = pending.front();
      pending.pop();
      comp.vertices.push_back(v);
      component_of[v] = report.components.size();
      for (const Leaf w : adjacency[v]) {
        if (colour[w] == -1) {
          colour[w] = 1 - colour[v];
          pending.push(w);
        } else if (colour[w] == colour[v]) {
          comp.bipartite = false;
        }
      }
    }
    std::sort(comp.vertices.begin(), comp.vertices.end());
    report.components.push_back(std::move(comp));
  }
  std::vector<std::vector<Cord>> edges(report.components.size());
  for (const auto& c : cords) edges[component_of[c.a]].push_back(c);
  for (std::size_t i = 0; i < report.components.size(); ++i) {
    auto& comp = report.components[i];
    comp.edges = CordSet(std::move(edges[i]));
    comp.cycle_count = comp.edges.size() + 1 - comp.vertices.size();
    comp.odd_cycle = !comp.bipartite;
    const int first = colour[comp.vertices.front()];
    for (const Leaf v : comp.vertices) (colour[v] == first ? comp.side_a : comp.side_b).push_back(v);
  }
  return report;
}

/// Rank in the star-tree matroid: n minus the number of bipartite
/// components, isolated vertices included.
inline std::size_t star_rank(std::size_t n, const CordSet& cords) { return n - analyze(n, cords).bipartite_count(); }

/// No component of Gamma(L) is bipartite.
inline bool star_is_lasso(std::size_t n, const CordSet& cords) { return analyze(n, cords).bipartite_count() == 0; }

/// Every component is a tree or has exactly one cycle, and that cycle is odd.
inline bool star_is_independent(std::size_t n, const CordSet& cords) {
  const auto report = analyze(n, cords);
  return std::all_of(report.components.begin(), report.components.end(), [](const GraphComponent& c) {
    return c.cycle_count == 0 || (c.cycle_count == 1 && c.odd_cycle);
  });
}

/// Every component has exactly one cycle, of odd length.
inline bool star_is_basis(std::size_t n, const CordSet& cords) {
  if (cords.size() != n) return false;
  const auto report = analyze(n, cords);
  return std::all_of(report.components.begin(), report.components.end(),
                     [](const GraphComponent& c) { return c.cycle_count == 1 && c.odd_cycle; });
}

namespace detail {

// Walks from branch vertex `from` through `first` along degree-2 vertices;
// returns the vertex where the walk stops and the number of edges used.
inline std::pair<Leaf, std::size_t> trace(const std::vector<std::vector<Leaf>>& adjacency, Leaf from, Leaf first) {
  Leaf previous = from, current = first;
  std::size_t length = 1;
  while (adjacency[current].size() == 2) {
    const Leaf next = adjacency[current][0] == previous ? adjacency[current][1] : adjacency[current][0];
    previous = current;
    current = next;
    ++length;
  }
  return {current, length};
}

}  // namespace detail

/// An even cycle, or two odd cycles sharing one vertex, or two disjoint odd
/// cycles joined by a path.
inline bool star_is_circuit(std::size_t n, const CordSet& cords) {
  if (cords.empty()) return false;
  const auto report = analyze(n, cords);
  const GraphComponent* body = nullptr;
  for (const auto& c : report.components) {
    if (c.edges.empty()) continue;
    if (body) return false;
    body = &c;
  }
  std::vector<std::vector<Leaf>> adjacency(n);
  for (const auto& c : cords) {
    adjacency[c.a].push_back(c.b);
    adjacency[c.b].push_back(c.a);
  }
  std::vector<Leaf> branch;
  for (const Leaf v : body->vertices) {
    if (adjacency[v].size() < 2) return false;
    if (adjacency[v].size() > 2) branch.push_back(v);
  }
  if (body->cycle_count == 1) return body->bipartite;
  if (body->cycle_count != 2) return false;

  if (branch.size() == 1) {
    // Two cycles through one vertex of degree 4.
    const Leaf hub = branch.front();
    if (adjacency[hub].size() != 4) return false;
    for (const Leaf w : adjacency[hub]) {
      const auto [end, length] = detail::trace(adjacency, hub, w);
      if (end != hub || length % 2 == 0) return false;
    }
    return true;
  }
  if (branch.size() != 2) return false;
  // Two degree-3 vertices: a loop at each (handcuff) or three parallel paths (theta).
  for (const Leaf u : branch) {
    std::size_t loops = 0;
    for (const Leaf w : adjacency[u]) {
      const auto [end, length] = detail::trace(adjacency, u, w);
      if (end == u) {
        if (length % 2 == 0) return false;
        ++loops;
      }
    }
    if (loops == 0) return false;
  }
  return true;
}

/// The complete graph on the vertices of non-bipartite components, together
/// with A vee B for every bipartite component with parts A, B.
inline CordSet star_closure(std::size_t n, const CordSet& cords) {
  const auto report = analyze(n, cords);
  std::vector<Leaf> odd;
  CordSet out;
  for (const auto& c : report.components) {
    if (!c.bipartite) {
      odd.insert(odd.end(), c.vertices.begin(), c.vertices.end());
    } else if (!c.edges.empty()) {
      out = out | join(c.side_a, c.side_b);
    }
  }
  std::sort(odd.begin(), odd.end());
  std::vector<Cord> complete;
  for (std::size_t i = 0; i < odd.size(); ++i)
    for (std::size_t j = i + 1; j < odd.size(); ++j) complete.emplace_back(odd[i], odd[j]);
  return out | CordSet(std::move(complete));
}

/// Bipartition (A, B) of X when Gamma(L) is connected on all of X and
/// bipartite; A holds the smallest leaf.
inline std::optional<std::pair<std::vector<Leaf>, std::vector<Leaf>>> connected_bipartition(std::size_t n,
                                                                                           const CordSet& cords) {
  const auto report = analyze(n, cords);
  if (!report.connected() || !report.components.front().bipartite) return std::nullopt;
  const auto& c = report.components.front();
  return std::make_pair(c.side_a, c.side_b);
}

/// Gamma(L) has no odd cycle (isolated vertices allowed).
inline bool is_bipartite(std::size_t n, const CordSet& cords) {
  const auto report = analyze(n, cords);
  return report.bipartite_count() == report.components.size();
}

/// Gamma(L) restricted to the leaves L touches is connected.
inline bool touches_connected(std::size_t n, const CordSet& cords) {
  const auto report = analyze(n, cords);
  return std::count_if(report.components.begin(), report.components.end(),
                       [](const GraphComponent& c) { return !c.edges.empty(); }) <= 1;
}

}  // namespace treematroid
