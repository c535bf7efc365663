#pragma once

// Edge-weight, topological and strong lassos; t-covers and the cherry
// condition on bipartitions; pointed covers; bipartite sets and hyperplanes.

#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "treematroid/exact.hpp"
#include "treematroid/matroid.hpp"
#include "treematroid/stargraph.hpp"
#include "treematroid/tree.hpp"

namespace treematroid {

using Bipartition = std::pair<std::vector<Leaf>, std::vector<Leaf>>;

/// Every bipartition {A, B} of the n leaves once, with leaf 0 in A.
inline std::vector<Bipartition> bipartitions(std::size_t n) {
  std::vector<Bipartition> out;
  if (n < 2) return out;
  for (std::size_t mask = 0; mask + 1 < (std::size_t{1} << (n - 1)); ++mask) {
    Bipartition p;
    p.first.push_back(0);
    for (Leaf x = 1; x < n; ++x) ((mask >> (x - 1)) & 1 ? p.first : p.second).push_back(x);
    out.push_back(std::move(p));
  }
  return out;
}

/// For interior vertex v: the index in t.incidences(v) of the branch holding each leaf.
inline std::vector<std::size_t> leaf_branches(const XTree& t, Vertex v) {
  std::vector<std::size_t> side(t.leaf_count(), 0);
  const auto& around = t.incidences(v);
  for (std::size_t i = 0; i < around.size(); ++i) {
    std::vector<Vertex> stack{around[i].neighbor};
    std::vector<bool> seen(t.vertex_count(), false);
    seen[v] = seen[around[i].neighbor] = true;
    while (!stack.empty()) {
      const Vertex w = stack.back();
      stack.pop_back();
      if (t.is_leaf(w)) side[w] = i;
      for (const auto& inc : t.incidences(w))
        if (!seen[inc.neighbor]) {
          seen[inc.neighbor] = true;
          stack.push_back(inc.neighbor);
        }
    }
  }
  return side;
}

// ---------------------------------------------------------------------------
// t-covers and bipartitions.

/// Every pair of edges sharing an interior vertex lies on a common cord path.
inline bool is_t_cover(const XTree& t, const CordSet& cords) {
  std::set<std::pair<std::size_t, std::size_t>> covered;
  for (const auto& c : cords) {
    const auto path = path_edge_positions(t, c.a, c.b);
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
      covered.emplace(std::min(path[i], path[i + 1]), std::max(path[i], path[i + 1]));
  }
  for (Vertex v = static_cast<Vertex>(t.leaf_count()); v < t.vertex_count(); ++v) {
    const auto& around = t.incidences(v);
    for (std::size_t i = 0; i < around.size(); ++i)
      for (std::size_t j = i + 1; j < around.size(); ++j)
        if (!covered.count({std::min(around[i].edge, around[j].edge), std::max(around[i].edge, around[j].edge)}))
          return false;
  }
  return true;
}

namespace detail {

inline std::vector<bool> membership(const XTree& t, const std::vector<Leaf>& a_side, const std::vector<Leaf>& b_side) {
  std::vector<int> count(t.leaf_count(), 0);
  std::vector<bool> in_a(t.leaf_count(), false);
  for (const Leaf x : a_side) {
    if (x >= t.leaf_count()) throw std::invalid_argument("leaf outside the tree");
    ++count[x];
    in_a[x] = true;
  }
  for (const Leaf x : b_side) {
    if (x >= t.leaf_count()) throw std::invalid_argument("leaf outside the tree");
    ++count[x];
  }
  if (a_side.empty() || b_side.empty() || std::any_of(count.begin(), count.end(), [](int k) { return k != 1; }))
    throw std::invalid_argument("A and B must be non-empty and partition the leaf set");
  return in_a;
}

}  // namespace detail

/// Every T-cherry meets both A and B.  Cross-checked against the t-cover
/// property of A vee B; a disagreement throws std::logic_error.
inline bool split_check(const XTree& t, const std::vector<Leaf>& a_side, const std::vector<Leaf>& b_side) {
  const auto in_a = detail::membership(t, a_side, b_side);
  if (t.leaf_count() < 4) throw std::invalid_argument("the cherry condition needs at least 4 leaves");
  bool split = true;
  for (const auto& ch : cherries(t))
    if (in_a[ch.cord.a] == in_a[ch.cord.b]) split = false;
  if (split != is_t_cover(t, join(a_side, b_side)))
    throw std::logic_error("cherry condition and t-cover disagree on " + format_cords(t, join(a_side, b_side)));
  return split;
}

/// omega_{A|B}: 0 on interior edges, +1 on pendant edges at A, -1 at B.
inline EdgeWeighting split_weighting(const XTree& t, const std::vector<Leaf>& a_side, const std::vector<Leaf>& b_side) {
  const auto in_a = detail::membership(t, a_side, b_side);
  EdgeWeighting w;
  for (const auto& e : t.edges()) w[e.id] = 0;
  for (Leaf x = 0; x < t.leaf_count(); ++x) w[t.edge(t.pendant_edge(x)).id] = in_a[x] ? 1 : -1;
  return w;
}

// ---------------------------------------------------------------------------
// Pointed covers.

/// P_x(T): {ax : a != x} together with one cord y_v z_v per interior vertex
/// v, its ends taken from the two branches at v away from x.  Sorted.
inline std::vector<CordSet> pointed_covers(const XTree& t, Leaf x) {
  if (!t.is_binary()) throw std::invalid_argument("pointed covers need a binary tree");
  if (x >= t.leaf_count()) throw std::invalid_argument("unknown leaf");
  std::vector<Cord> spokes;
  for (Leaf a = 0; a < t.leaf_count(); ++a)
    if (a != x) spokes.emplace_back(a, x);

  std::vector<std::vector<Cord>> choices;
  for (Vertex v = static_cast<Vertex>(t.leaf_count()); v < t.vertex_count(); ++v) {
    const auto side = leaf_branches(t, v);
    std::vector<std::vector<Leaf>> away(3);
    for (Leaf y = 0; y < t.leaf_count(); ++y)
      if (side[y] != side[x]) away[side[y]].push_back(y);
    std::vector<std::vector<Leaf>*> parts;
    for (auto& part : away)
      if (!part.empty()) parts.push_back(&part);
    std::vector<Cord> here;
    for (const Leaf y : *parts[0])
      for (const Leaf z : *parts[1]) here.emplace_back(y, z);
    choices.push_back(std::move(here));
  }

  std::set<CordSet> out;
  std::vector<std::size_t> pick(choices.size(), 0);
  while (true) {
    std::vector<Cord> cords = spokes;
    for (std::size_t i = 0; i < choices.size(); ++i) cords.push_back(choices[i][pick[i]]);
    out.insert(CordSet(std::move(cords)));
    std::size_t i = 0;
    while (i < pick.size() && ++pick[i] == choices[i].size()) pick[i++] = 0;
    if (i == pick.size()) break;
  }
  return {out.begin(), out.end()};
}

// ---------------------------------------------------------------------------
// Topological lassos by exhaustive comparison with every other X-tree.

struct TopologyOptions {
  std::size_t max_leaves = 6;
  bool strict_pendant = false;        // pendant weights > 0 rather than >= 0
  bool connectivity_shortcut = true;  // n >= 4 and Gamma(L) disconnected: not a lasso
  std::size_t max_variables = 24;
};

struct TopologyVerdict {
  bool decided = false;
  bool lasso = false;
  std::optional<XTree> witness;  // a tree not equivalent to T with agreeing proper weightings
  std::string reason;
};

class TopologicalDecider {
 public:
  explicit TopologicalDecider(TopologyOptions options = {}) : options_(options) {}

  const TopologyOptions& options() const { return options_; }

  TopologyVerdict decide(const XTree& t, const CordSet& cords) const {
    TopologyVerdict verdict;
    const std::size_t n = t.leaf_count();
    if (n > options_.max_leaves) {
      verdict.reason = "undecided (scale): " + std::to_string(n) + " leaves exceeds the bound of " +
                       std::to_string(options_.max_leaves);
      return verdict;
    }
    if (!cords.empty() && cords.cords().back().b >= n) throw std::invalid_argument("cord endpoint outside the leaf set");
    if (options_.connectivity_shortcut && n >= 4 && !analyze(n, cords).connected()) {
      verdict.decided = true;
      verdict.reason = "Gamma(L) is disconnected";
      return verdict;
    }
    const TreeMatroid self(t);
    const std::string own = canonical_form(t);
    try {
      for (const auto& other : trees_on(t.labels())) {
        if (other.canonical == own) continue;
        if (agreeing_weightings_exist(other.matroid, self, cords)) {
          verdict.decided = true;
          verdict.witness = other.matroid.tree();
          verdict.reason = "agreeing proper weightings on " + other.canonical;
          return verdict;
        }
      }
    } catch (const ScaleError& e) {
      verdict.reason = std::string("undecided (scale): ") + e.what();
      return verdict;
    }
    verdict.decided = true;
    verdict.lasso = true;
    return verdict;
  }

  std::optional<bool> is_lasso(const XTree& t, const CordSet& cords) const {
    const auto v = decide(t, cords);
    if (!v.decided) return std::nullopt;
    return v.lasso;
  }

 private:
  struct Candidate {
    std::string canonical;
    TreeMatroid matroid;
  };

  const std::vector<Candidate>& trees_on(const std::vector<std::string>& labels) const {
    const std::lock_guard<std::mutex> lock(mutex_);
    auto it = cache_.find(labels);
    if (it == cache_.end()) {
      std::vector<Candidate> found;
      for (auto& tree : enumerate_xtrees(labels, options_.max_leaves)) {
        std::string canonical = canonical_form(tree);
        found.push_back({std::move(canonical), TreeMatroid(std::move(tree))});
      }
      it = cache_.emplace(labels, std::move(found)).first;
    }
    return it->second;
  }

  // Variables: weights on the edges of `other`, then on the edges of `self`.
  bool agreeing_weightings_exist(const TreeMatroid& other, const TreeMatroid& self, const CordSet& cords) const {
    const std::size_t e1 = other.edge_count(), e2 = self.edge_count();
    LinearSystem system(e1 + e2);
    for (const auto& c : cords) {
      std::vector<Rational> row(e1 + e2);
      const auto& r1 = other.row(c);
      const auto& r2 = self.row(c);
      for (std::size_t i = 0; i < e1; ++i) row[i] = static_cast<long>(r1[i]);
      for (std::size_t j = 0; j < e2; ++j) row[e1 + j] = -static_cast<long>(r2[j]);
      system.add_equality(std::move(row));
    }
    auto positivity = [&](const XTree& tree, std::size_t offset) {
      for (std::size_t p = 0; p < tree.edge_count(); ++p) {
        std::vector<Rational> unit(e1 + e2);
        unit[offset + p] = 1;
        if (tree.is_interior_edge(p) || options_.strict_pendant)
          system.add_strict(std::move(unit));
        else
          system.add_weak(std::move(unit));
      }
    };
    positivity(other.tree(), 0);
    positivity(self.tree(), e1);
    FeasibilityOptions fo;
    fo.max_variables = options_.max_variables;
    return feasible(system, fo);
  }

  TopologyOptions options_;
  mutable std::mutex mutex_;
  mutable std::map<std::vector<std::string>, std::vector<Candidate>> cache_;
};

inline std::optional<bool> is_topological_lasso(const XTree& t, const CordSet& cords, const TopologyOptions& options = {}) {
  return TopologicalDecider(options).is_lasso(t, cords);
}

inline std::optional<bool> is_strong_lasso(const XTree& t, const CordSet& cords, const TopologicalDecider& decider) {
  if (rank_of(t, cords) != t.edge_count()) return false;
  return decider.is_lasso(t, cords);
}

struct LassoReport {
  std::size_t rank = 0;
  bool edge_weight = false;
  std::optional<bool> topological;  // nullopt: undecided (scale)
  std::optional<bool> strong;
  std::optional<Bipartition> bipartition;  // when Gamma(L) is connected and bipartite
  std::string topology_note;
};

inline LassoReport lasso_report(const XTree& t, const CordSet& cords, const TopologicalDecider& decider) {
  LassoReport r;
  r.rank = rank_of(t, cords);
  r.edge_weight = r.rank == t.edge_count();
  const auto verdict = decider.decide(t, cords);
  if (verdict.decided) r.topological = verdict.lasso;
  r.topology_note = verdict.reason;
  if (!r.edge_weight)
    r.strong = false;
  else
    r.strong = r.topological;
  r.bipartition = connected_bipartition(t.leaf_count(), cords);
  return r;
}

/// A strong lasso none of whose single-cord deletions is one.
inline std::optional<bool> is_minimal_strong_lasso(const XTree& t, const CordSet& cords, const TopologicalDecider& decider) {
  const auto strong = is_strong_lasso(t, cords, decider);
  if (!strong || !*strong) return strong;
  for (const auto& c : cords) {
    const auto smaller = is_strong_lasso(t, cords.without(c), decider);
    if (!smaller) return std::nullopt;
    if (*smaller) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Bipartite sets and hyperplanes.

struct BipartiteAnalysis {
  std::size_t rank = 0;
  std::size_t edge_count = 0;
  bool hyperplane_rank = false;  // rank == |E| - 1
  bool connected = false;
  std::optional<Bipartition> bipartition;
  std::optional<EdgeWeighting> omega;  // omega_{A|B}, vanishing on L
  bool omega_vanishes = false;
  CordSet closure;
  bool closure_is_join = false;  // closure == A vee B
  bool is_hyperplane = false;    // closure has rank |E| - 1 and every extension spans
  CordSet lasso_extensions;        // xy with L + xy an edge-weight lasso
  CordSet nonbipartite_extensions; // xy with Gamma(L + xy) not bipartite
  bool extensions_agree = false;
};

inline BipartiteAnalysis bipartite_analysis(const XTree& t, const CordSet& cords) {
  const std::size_t n = t.leaf_count();
  if (!is_bipartite(n, cords)) throw std::invalid_argument("Gamma(L) is not bipartite");
  const TreeMatroid m(t);
  BipartiteAnalysis out;
  out.rank = m.rank_of(cords);
  out.edge_count = t.edge_count();
  out.hyperplane_rank = out.rank + 1 == out.edge_count;
  out.connected = analyze(n, cords).connected();
  out.closure = m.closure(cords);
  if (!out.hyperplane_rank) return out;

  out.bipartition = connected_bipartition(n, cords);
  if (out.bipartition) {
    const auto& [a_side, b_side] = *out.bipartition;
    out.omega = split_weighting(t, a_side, b_side);
    out.omega_vanishes = std::all_of(cords.begin(), cords.end(),
                                     [&](const Cord& c) { return m.lambda_vector(c).apply(*out.omega) == 0; });
    out.closure_is_join = out.closure == join(a_side, b_side);
  }
  std::vector<Cord> lasso, odd;
  for (const auto& c : m.ground_set()) {
    if (cords.contains(c)) continue;
    const CordSet bigger = cords.with(c);
    if (m.rank_of(bigger) == out.edge_count) lasso.push_back(c);
    if (!is_bipartite(n, bigger)) odd.push_back(c);
  }
  out.lasso_extensions = CordSet(std::move(lasso));
  out.nonbipartite_extensions = CordSet(std::move(odd));
  out.extensions_agree = out.lasso_extensions == out.nonbipartite_extensions;
  out.is_hyperplane = m.rank_of(out.closure) + 1 == out.edge_count &&
                      std::all_of(m.ground_set().begin(), m.ground_set().end(), [&](const Cord& c) {
                        return out.closure.contains(c) || m.rank_of(out.closure.with(c)) == out.edge_count;
                      });
  return out;
}

// ---------------------------------------------------------------------------
// Topological lassos of deficient rank.

/// The four equivalent conditions on T, each evaluated on its own:
/// (i) some bipartite set is a topological lasso, (ii) some topological
/// lasso has rank < |E|, (ii') some has rank |E| - 1, (iii) every cherry is
/// proper.  Topological lassos are closed under supersets, so (i) scans
/// the sets A vee B and (ii), (ii') scan the hyperplanes.
struct CherryConditions {
  std::optional<bool> bipartite_topological;
  std::optional<bool> deficient_topological;
  std::optional<bool> hyperplane_topological;
  bool cherries_proper = false;
  std::optional<CordSet> bipartite_witness;
  std::optional<CordSet> hyperplane_witness;

  bool decided() const { return bipartite_topological && deficient_topological && hyperplane_topological; }
  bool agree() const {
    return decided() && *bipartite_topological == cherries_proper && *deficient_topological == cherries_proper &&
           *hyperplane_topological == cherries_proper;
  }
};

inline CherryConditions cherry_conditions(const XTree& t, const TopologicalDecider& decider) {
  CherryConditions out;
  const auto all = cherries(t);
  out.cherries_proper = std::all_of(all.begin(), all.end(), [](const Cherry& c) { return c.proper; });

  bool undecided = false;
  out.bipartite_topological = false;
  for (const auto& [a_side, b_side] : bipartitions(t.leaf_count())) {
    const CordSet candidate = join(a_side, b_side);
    const auto v = decider.is_lasso(t, candidate);
    if (!v) {
      undecided = true;
      continue;
    }
    if (*v) {
      out.bipartite_topological = true;
      out.bipartite_witness = candidate;
      break;
    }
  }
  if (undecided && !*out.bipartite_topological) out.bipartite_topological.reset();

  const TreeMatroid m(t);
  undecided = false;
  bool found = false;
  for (const auto& h : m.hyperplanes()) {
    const auto v = decider.is_lasso(t, h);
    if (!v) {
      undecided = true;
      continue;
    }
    if (*v) {
      found = true;
      out.hyperplane_witness = h;
      break;
    }
  }
  if (found || !undecided) {
    out.deficient_topological = found && m.rank_of(*out.hyperplane_witness) < t.edge_count();
    out.hyperplane_topological = found && m.rank_of(*out.hyperplane_witness) + 1 == t.edge_count();
  }
  return out;
}

struct TopologicalRankReport {
  std::optional<bool> topological;
  std::size_t rank = 0;
  bool deficient = false;  // topological with rank < |E|
  bool bipartite = false;
  bool hyperplane_rank = false;
  bool cherries_proper = false;
  std::optional<bool> extensions_strong;  // L + xy strong for every non-bipartite extension
  std::optional<bool> conclusions_hold;   // vacuously true unless deficient
  std::optional<CherryConditions> cherry_conditions;
};

/// When L is a topological lasso of rank < |E|, checks that L is bipartite,
/// of rank |E| - 1, that every cherry is proper, and that each
/// non-bipartite extension L + xy is a strong lasso.
inline TopologicalRankReport topological_rank_theorems(const XTree& t, const CordSet& cords,
                                                       const TopologicalDecider& decider, bool with_cherry_conditions = true) {
  TopologicalRankReport r;
  const std::size_t n = t.leaf_count();
  const TreeMatroid m(t);
  r.topological = decider.is_lasso(t, cords);
  r.rank = m.rank_of(cords);
  r.bipartite = is_bipartite(n, cords);
  r.hyperplane_rank = r.rank + 1 == t.edge_count();
  const auto all = cherries(t);
  r.cherries_proper = std::all_of(all.begin(), all.end(), [](const Cherry& c) { return c.proper; });
  if (with_cherry_conditions) r.cherry_conditions = cherry_conditions(t, decider);
  if (!r.topological) return r;
  r.deficient = *r.topological && r.rank < t.edge_count();
  if (!r.deficient) {
    r.conclusions_hold = true;
    return r;
  }
  bool all_strong = true;
  for (const auto& c : m.ground_set()) {
    if (cords.contains(c) || is_bipartite(n, cords.with(c))) continue;
    const auto strong = is_strong_lasso(t, cords.with(c), decider);
    if (!strong) return r;
    all_strong = all_strong && *strong;
  }
  r.extensions_strong = all_strong;
  r.conclusions_hold = r.bipartite && r.hyperplane_rank && r.cherries_proper && all_strong;
  return r;
}

}  // namespace treematroid
