#pragma once

// Test-only reference implementations.  None of them call the library's
// elimination, path or enumeration code they are used to check.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "treematroid/lasso.hpp"
#include "treematroid/matroid.hpp"
#include "treematroid/reconstruct.hpp"
#include "treematroid/stargraph.hpp"
#include "treematroid/tree.hpp"

namespace oracle {

using namespace treematroid;

// ---------------------------------------------------------------------------
// Fractions over __int128 and rank by plain Gaussian elimination.

struct Frac {
  __int128 p = 0;
  __int128 q = 1;

  Frac() = default;
  Frac(long long v) : p(v) {}
  Frac(__int128 num, __int128 den) : p(num), q(den) { normalize(); }

  void normalize() {
    if (q < 0) {
      p = -p;
      q = -q;
    }
    __int128 a = p < 0 ? -p : p, b = q;
    while (b != 0) {
      const __int128 r = a % b;
      a = b;
      b = r;
    }
    if (a > 1) {
      p /= a;
      q /= a;
    }
  }
  bool zero() const { return p == 0; }
  friend Frac operator-(const Frac& x, const Frac& y) { return {x.p * y.q - y.p * x.q, x.q * y.q}; }
  friend Frac operator*(const Frac& x, const Frac& y) { return {x.p * y.p, x.q * y.q}; }
  friend Frac operator/(const Frac& x, const Frac& y) { return {x.p * y.q, x.q * y.p}; }
};

inline std::size_t fraction_rank(const std::vector<std::vector<long long>>& rows) {
  if (rows.empty()) return 0;
  std::vector<std::vector<Frac>> m;
  for (const auto& r : rows) m.emplace_back(r.begin(), r.end());
  const std::size_t cols = m.front().size();
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols && rank < m.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < m.size() && m[pivot][c].zero()) ++pivot;
    if (pivot == m.size()) continue;
    std::swap(m[rank], m[pivot]);
    for (std::size_t r = 0; r < m.size(); ++r) {
      if (r == rank || m[r][c].zero()) continue;
      const Frac factor = m[r][c] / m[rank][c];
      for (std::size_t k = c; k < cols; ++k) m[r][k] = m[r][k] - factor * m[rank][k];
    }
    ++rank;
  }
  return rank;
}

// ---------------------------------------------------------------------------
// Paths by edge separation: e lies on the x-y path iff deleting e separates x from y.

inline bool separates(const XTree& t, std::size_t edge, Vertex x, Vertex y) {
  std::vector<bool> seen(t.vertex_count(), false);
  std::vector<Vertex> stack{x};
  seen[x] = true;
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    for (const auto& inc : t.incidences(v)) {
      if (inc.edge == edge || seen[inc.neighbor]) continue;
      seen[inc.neighbor] = true;
      stack.push_back(inc.neighbor);
    }
  }
  return !seen[y];
}

inline std::vector<long long> incidence(const XTree& t, Cord c) {
  std::vector<long long> row(t.edge_count(), 0);
  for (std::size_t e = 0; e < t.edge_count(); ++e) row[e] = separates(t, e, c.a, c.b) ? 1 : 0;
  return row;
}

inline std::size_t rank(const XTree& t, const CordSet& cords) {
  std::vector<std::vector<long long>> rows;
  for (const auto& c : cords) rows.push_back(incidence(t, c));
  return fraction_rank(rows);
}

inline std::vector<Cord> all_cords(std::size_t n) {
  std::vector<Cord> out;
  for (Leaf a = 0; a < n; ++a)
    for (Leaf b = a + 1; b < n; ++b) out.emplace_back(a, b);
  return out;
}

// Calls f on every subset of `items` with exactly k elements, lexicographically.
template <class F>
void for_each_subset(const std::vector<Cord>& items, std::size_t k, F&& f) {
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  if (k > items.size()) return;
  while (true) {
    std::vector<Cord> pick;
    for (const auto i : idx) pick.push_back(items[i]);
    f(CordSet(std::move(pick)));
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == items.size() - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

/// Every |E|-subset whose square form matrix is non-singular.
inline std::set<CordSet> bases(const XTree& t) {
  std::set<CordSet> out;
  for_each_subset(all_cords(t.leaf_count()), t.edge_count(), [&](const CordSet& s) {
    if (rank(t, s) == s.size()) out.insert(s);
  });
  return out;
}

/// Every minimal dependent set of size <= max_size.
inline std::set<CordSet> circuits(const XTree& t, std::size_t max_size) {
  std::set<CordSet> out;
  const auto ground = all_cords(t.leaf_count());
  for (std::size_t k = 1; k <= max_size; ++k)
    for_each_subset(ground, k, [&](const CordSet& s) {
      if (rank(t, s) != k - 1) return;
      for (const auto& c : s)
        if (rank(t, s.without(c)) != k - 1) return;
      out.insert(s);
    });
  return out;
}

// ---------------------------------------------------------------------------
// X-trees as compatible split systems.

using Split = std::uint32_t;  // leaves on the side without leaf 0

inline bool compatible(Split a, Split b, std::size_t n) {
  const Split all = (Split{1} << n) - 1;
  const Split ca = all & ~a, cb = all & ~b;
  return (a & b) == 0 || (a & cb) == 0 || (ca & b) == 0 || (ca & cb) == 0;
}

inline std::vector<Split> nontrivial_splits(std::size_t n) {
  std::vector<Split> out;
  for (Split s = 1; s < (Split{1} << n); ++s) {
    if (s & 1) continue;
    const int k = __builtin_popcount(s);
    if (k >= 2 && static_cast<std::size_t>(k) <= n - 2) out.push_back(s);
  }
  return out;
}

/// Sets of pairwise-compatible non-trivial splits; one per X-tree.
inline std::set<std::set<Split>> compatible_families(std::size_t n) {
  const auto splits = nontrivial_splits(n);
  std::set<std::set<Split>> out;
  std::vector<Split> chosen;
  auto grow = [&](auto& self, std::size_t from) -> void {
    out.insert(std::set<Split>(chosen.begin(), chosen.end()));
    for (std::size_t i = from; i < splits.size(); ++i) {
      if (!std::all_of(chosen.begin(), chosen.end(), [&](Split s) { return compatible(s, splits[i], n); })) continue;
      chosen.push_back(splits[i]);
      self(self, i + 1);
      chosen.pop_back();
    }
  };
  grow(grow, 0);
  return out;
}

/// The non-trivial splits of T, read off by cutting each interior edge.
inline std::set<Split> splits_of(const XTree& t) {
  std::set<Split> out;
  for (std::size_t e = 0; e < t.edge_count(); ++e) {
    if (!t.is_interior_edge(e)) continue;
    Split s = 0;
    for (Leaf x = 1; x < t.leaf_count(); ++x)
      if (separates(t, e, 0, x)) s |= Split{1} << x;
    out.insert(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quartets through restriction and comparison with the three quartet trees.

inline QuartetTopology quartet_by_restriction(const XTree& t, Leaf a, Leaf b, Leaf c, Leaf d) {
  const auto r = restrict_tree(t, std::vector<Leaf>{a, b, c, d}).tree;
  const auto& l = t.labels();
  auto quartet = [&](Leaf w, Leaf x, Leaf y, Leaf z) {
    return parse_newick_tree("((" + l[w] + "," + l[x] + "),(" + l[y] + "," + l[z] + "));");
  };
  if (are_equivalent(r, quartet(a, b, c, d))) return QuartetTopology::ab_cd;
  if (are_equivalent(r, quartet(a, c, b, d))) return QuartetTopology::ac_bd;
  if (are_equivalent(r, quartet(a, d, b, c))) return QuartetTopology::ad_bc;
  return QuartetTopology::star;
}

inline Rational ratio(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

// ---------------------------------------------------------------------------
// Feasibility by searching a rational grid (finds witnesses only).

inline bool grid_witness(const LinearSystem& system, int radius, int denominator) {
  const std::size_t d = system.dimension();
  std::vector<int> k(d, -radius * denominator);
  while (true) {
    std::vector<Rational> x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = ratio(k[i], denominator);
    if (system.satisfied_by(x)) return true;
    std::size_t i = 0;
    while (i < d && ++k[i] > radius * denominator) k[i++] = -radius * denominator;
    if (i == d) return false;
  }
}

// ---------------------------------------------------------------------------
// Generators.

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }
  long between(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }

  CordSet cords(std::size_t n, double density) {
    std::vector<Cord> out;
    for (const auto& c : all_cords(n))
      if (coin(density)) out.push_back(c);
    return CordSet(std::move(out));
  }

  /// Cord subsets biased toward every size, not only the density's mean.
  CordSet cords(std::size_t n) { return cords(n, 0.05 + 0.9 * std::uniform_real_distribution<double>(0, 1)(rng_)); }

  template <class T>
  const T& pick(const std::vector<T>& items) {
    return items[below(items.size())];
  }

  std::vector<Leaf> leaf_subset(std::size_t n, std::size_t at_least) {
    while (true) {
      std::vector<Leaf> out;
      for (Leaf x = 0; x < n; ++x)
        if (coin()) out.push_back(x);
      if (out.size() >= at_least) return out;
    }
  }

  std::vector<EdgeId> interior_subset(const XTree& t) {
    std::vector<EdgeId> out;
    for (const auto e : t.interior_edges())
      if (coin()) out.push_back(e);
    return out;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

// ---------------------------------------------------------------------------
// Named trees and cord-set literals.

/// Space-separated cords over single-character labels, or "x1-x2" tokens.
inline CordSet cords(const XTree& t, const std::string& text) {
  CordSet out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto end = std::min(text.find(' ', pos), text.size());
    const std::string token = text.substr(pos, end - pos);
    pos = end + 1;
    if (token.empty()) continue;
    const auto dash = token.find('-');
    if (dash == std::string::npos)
      out.insert(Cord(t.leaf(token.substr(0, 1)), t.leaf(token.substr(1))));
    else
      out.insert(Cord(t.leaf(token.substr(0, dash)), t.leaf(token.substr(dash + 1))));
  }
  return out;
}

inline XTree quartet() { return parse_newick_tree("((a,b),(c,d));"); }
inline std::vector<std::string> letters(std::size_t n) {
  std::vector<std::string> l;
  for (std::size_t i = 0; i < n; ++i) l.emplace_back(1, static_cast<char>('a' + i));
  return l;
}
inline XTree star(std::size_t n) { return star_tree(letters(n)); }
inline XTree snowflake() { return parse_newick_tree("((a,b),(c,d),(e,f));"); }
inline XTree six_leaf_tree() { return parse_newick_tree("((a,b),c,(d,(e,f)));"); }
inline XTree two_vertex_tree() { return parse_newick_tree("(a,b,c,d,(e,f));"); }

inline std::vector<XTree> trees(std::size_t n) { return enumerate_xtrees(indexed_labels("x", n)); }

}  // namespace oracle
