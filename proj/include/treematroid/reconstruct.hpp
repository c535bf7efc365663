#pragma once

// Recovering T from the rank function of M(T) through its quartets, matroid
// equality, and binariness of M(T).

#include <algorithm>
#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "treematroid/matroid.hpp"
#include "treematroid/tree.hpp"

namespace treematroid {

/// A resolved quartet left|right; both cords normalized and left < right.
struct Quartet {
  Cord left;
  Cord right;

  Quartet(Cord x, Cord y) : left(std::min(x, y)), right(std::max(x, y)) {
    if (left.contains(right.a) || left.contains(right.b)) throw std::invalid_argument("quartet pairs must be disjoint");
  }
  friend auto operator<=>(const Quartet&, const Quartet&) = default;
};

using QuartetSet = std::set<Quartet>;
using RankOracle = std::function<std::size_t(const CordSet&)>;

/// Q(T) read from the tree itself.
inline QuartetSet quartet_set(const XTree& t) {
  QuartetSet q;
  const auto n = static_cast<Leaf>(t.leaf_count());
  for (Leaf a = 0; a < n; ++a)
    for (Leaf b = a + 1; b < n; ++b)
      for (Leaf c = b + 1; c < n; ++c)
        for (Leaf d = c + 1; d < n; ++d) switch (quartet_topology(t, a, b, c, d)) {
            case QuartetTopology::ab_cd: q.emplace(Cord(a, b), Cord(c, d)); break;
            case QuartetTopology::ac_bd: q.emplace(Cord(a, c), Cord(b, d)); break;
            case QuartetTopology::ad_bc: q.emplace(Cord(a, d), Cord(b, c)); break;
            case QuartetTopology::star: break;
          }
  return q;
}

/// Q(T) from rank queries alone.  The 4-cycle w-x-y-z-w is dependent
/// exactly when T restricted to {w, x, y, z} is a star or wy|xz, so wx|yz
/// is resolved iff both 4-cycles through the cords wx and yz are independent.
inline QuartetSet quartet_set_from_oracle(const RankOracle& rank, std::size_t n) {
  auto cycle_independent = [&](Leaf p, Leaf q, Leaf r, Leaf s) {
    return rank(CordSet{Cord(p, q), Cord(q, r), Cord(r, s), Cord(s, p)}) == 4;
  };
  QuartetSet out;
  const auto m = static_cast<Leaf>(n);
  for (Leaf a = 0; a < m; ++a)
    for (Leaf b = a + 1; b < m; ++b)
      for (Leaf c = b + 1; c < m; ++c)
        for (Leaf d = c + 1; d < m; ++d) {
          const std::array<std::array<Leaf, 4>, 3> pairings{{{a, b, c, d}, {a, c, b, d}, {a, d, b, c}}};
          for (const auto& [w, x, y, z] : pairings)
            if (cycle_independent(w, x, y, z) && cycle_independent(w, x, z, y)) out.emplace(Cord(w, x), Cord(y, z));
        }
  return out;
}

class ReconstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The unique enumerated X-tree on `labels` whose quartets match the oracle's.
inline XTree tree_from_oracle(const RankOracle& rank, std::vector<std::string> labels, std::size_t max_leaves = 6) {
  std::sort(labels.begin(), labels.end());
  const auto target = quartet_set_from_oracle(rank, labels.size());
  std::optional<XTree> match;
  for (auto& candidate : enumerate_xtrees(labels, max_leaves)) {
    if (quartet_set(candidate) != target) continue;
    if (match)
      throw ReconstructionError("two inequivalent trees share the oracle's quartets: " + canonical_form(*match) + " and " +
                                canonical_form(candidate));
    match = std::move(candidate);
  }
  if (!match) throw ReconstructionError("no X-tree has the oracle's quartets");
  return std::move(*match);
}

inline RankOracle rank_oracle(const XTree& t) {
  auto m = std::make_shared<const TreeMatroid>(t);
  return [m](const CordSet& cords) { return m->rank_of(cords); };
}

/// Rank functions agree on every cord set of size <= max(|E1|, |E2|) + 1.
inline bool matroids_equal(const XTree& t1, const XTree& t2, std::size_t max_leaves = 7) {
  if (t1.labels() != t2.labels()) throw std::invalid_argument("trees have different leaf sets");
  if (t1.leaf_count() > max_leaves)
    throw ScaleError("matroid comparison on " + std::to_string(t1.leaf_count()) + " leaves exceeds the bound of " +
                     std::to_string(max_leaves));
  const TreeMatroid m1(t1), m2(t2);
  const auto& ground = m1.ground_set();
  const std::size_t limit = std::min(ground.size(), std::max(t1.edge_count(), t2.edge_count()) + 1);
  std::vector<Cord> chosen;
  std::function<bool(std::size_t)> agree = [&](std::size_t from) {
    const CordSet s(chosen);
    if (m1.rank_of(s) != m2.rank_of(s)) return false;
    if (chosen.size() == limit) return true;
    for (std::size_t i = from; i < ground.size(); ++i) {
      chosen.push_back(ground[i]);
      const bool ok = agree(i + 1);
      chosen.pop_back();
      if (!ok) return false;
    }
    return true;
  };
  return agree(0);
}

// ---------------------------------------------------------------------------
// Binariness.

struct NonbinaryWitness {
  std::array<Leaf, 6> x{};  // x_i x_{i+3} is a cherry for i = 1, 2, 3
  CordSet first;            // the 6-cycle x1 x2 ... x6
  CordSet second;           // {x1x3, x3x4, x4x6, x6x1}
  CordSet difference;       // first ^ second: triangles x1x2x3 and x4x5x6
  bool first_circuit = false;
  bool second_circuit = false;
  bool difference_independent = false;

  bool confirmed() const { return first_circuit && second_circuit && difference_independent; }
};

/// Built from the first three pairwise-disjoint cherries; nullopt when T has none.
inline std::optional<NonbinaryWitness> nonbinary_witness(const XTree& t) {
  const auto all = cherries(t);
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j)
      for (std::size_t k = j + 1; k < all.size(); ++k) {
        const Cord p = all[i].cord, q = all[j].cord, r = all[k].cord;
        const std::set<Leaf> ends{p.a, p.b, q.a, q.b, r.a, r.b};
        if (ends.size() != 6) continue;
        NonbinaryWitness w;
        w.x = {p.a, q.a, r.a, p.b, q.b, r.b};
        const auto& x = w.x;
        w.first = CordSet{Cord(x[0], x[1]), Cord(x[1], x[2]), Cord(x[2], x[3]),
                          Cord(x[3], x[4]), Cord(x[4], x[5]), Cord(x[5], x[0])};
        w.second = CordSet{Cord(x[0], x[2]), Cord(x[2], x[3]), Cord(x[3], x[5]), Cord(x[5], x[0])};
        w.difference = w.first ^ w.second;
        const TreeMatroid m(t);
        w.first_circuit = m.is_circuit(w.first);
        w.second_circuit = m.is_circuit(w.second);
        w.difference_independent = m.rank_of(w.difference) == w.difference.size();
        return w;
      }
  return std::nullopt;
}

struct BinaryCheck {
  bool binary = true;
  std::size_t circuit_count = 0;
  std::optional<std::pair<CordSet, CordSet>> violation;  // first offending circuit pair
};

namespace detail {

// A circuit inside a dependent set, by deleting elements while dependence survives.
inline CordSet circuit_inside(const TreeMatroid& m, CordSet s) {
  for (const auto& c : CordSet(s)) {
    const CordSet smaller = s.without(c);
    if (m.rank_of(smaller) < smaller.size()) s = smaller;
  }
  return s;
}

// Peels circuits off `s` until nothing is left; false if an independent remainder appears.
inline bool disjoint_union_of_circuits(const TreeMatroid& m, CordSet s) {
  while (!s.empty()) {
    if (m.rank_of(s) == s.size()) return false;
    s = s - circuit_inside(m, s);
  }
  return true;
}

}  // namespace detail

/// M(T) is binary iff the symmetric difference of any two distinct circuits
/// is a disjoint union of circuits.
inline BinaryCheck is_binary_matroid(const XTree& t, std::size_t max_leaves = 6) {
  EnumerationOptions options;
  options.max_leaves = max_leaves;
  const TreeMatroid m(t);
  const auto all = m.circuits(t.edge_count() + 1, options);
  BinaryCheck out;
  out.circuit_count = all.size();
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j)
      if (!detail::disjoint_union_of_circuits(m, all[i] ^ all[j])) {
        out.binary = false;
        out.violation = std::make_pair(all[i], all[j]);
        return out;
      }
  return out;
}

}  // namespace treematroid
