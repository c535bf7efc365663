#pragma once

// The matroid M(T) on the cords of an X-tree T, represented over Q by the
// path-incidence forms lambda_xy.  The rank oracle is exact; enumerations
// are depth-first searches over independent sets in lexicographic order.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <future>
#include <set>
#include <stdexcept>
#include <vector>

#include "treematroid/exact.hpp"
#include "treematroid/tree.hpp"

namespace treematroid {

/// lambda_xy as a 0/1 vector over the edges of its tree (edge-position order).
struct LambdaVector {
  Cord cord;
  std::vector<EdgeId> edge_ids;
  std::vector<std::uint8_t> incidence;

  std::vector<Rational> to_rationals() const { return {incidence.begin(), incidence.end()}; }

  /// lambda_xy(w), the path sum.
  Rational apply(const EdgeWeighting& w) const {
    Rational s = 0;
    for (std::size_t i = 0; i < incidence.size(); ++i)
      if (incidence[i]) s += w.at(edge_ids[i]);
    return s;
  }
};

struct MatroidVerdict {
  std::size_t rank = 0;
  bool independent = false;
  bool lasso = false;  // edge-weight lasso: rank == |E|
  bool basis = false;
};

struct EnumerationOptions {
  std::size_t max_leaves = 7;
  std::size_t threads = 1;  // > 1 partitions the search by first element; output order is unchanged
};

using CordCallback = std::function<void(const CordSet&)>;

class TreeMatroid {
 public:
  explicit TreeMatroid(XTree tree) : tree_(std::move(tree)), ground_(CordSet::all(tree_.leaf_count()).cords()) {
    rows_.reserve(ground_.size());
    for (const auto& c : ground_) {
      std::vector<std::int64_t> row(tree_.edge_count(), 0);
      for (const auto p : path_edge_positions(tree_, c.a, c.b)) row[p] = 1;
      rows_.push_back(std::move(row));
    }
  }

  const XTree& tree() const { return tree_; }
  std::size_t leaf_count() const { return tree_.leaf_count(); }
  /// |E|, the rank of the whole ground set.
  std::size_t edge_count() const { return tree_.edge_count(); }
  const std::vector<Cord>& ground_set() const { return ground_; }

  const std::vector<std::int64_t>& row(Cord c) const { return rows_.at(index(c)); }

  LambdaVector lambda_vector(Cord c) const {
    LambdaVector v{c, {}, {}};
    for (const auto& e : tree_.edges()) v.edge_ids.push_back(e.id);
    for (const auto x : row(c)) v.incidence.push_back(static_cast<std::uint8_t>(x));
    return v;
  }

  RationalMatrix lambda_matrix(const CordSet& cords) const {
    RationalMatrix m(cords.size(), edge_count());
    for (std::size_t r = 0; r < cords.size(); ++r) {
      const auto& src = row(cords[r]);
      for (std::size_t c = 0; c < src.size(); ++c) m(r, c) = static_cast<long>(src[c]);
    }
    return m;
  }

  std::size_t rank_of(const CordSet& cords) const {
    try {
      RowEchelon<std::int64_t> e(edge_count());
      for (const auto& c : cords) e.insert(row(c));
      return e.rank();
    } catch (const std::overflow_error&) {
      return rank(lambda_matrix(cords));
    }
  }

  MatroidVerdict verdict(const CordSet& cords) const {
    MatroidVerdict v;
    v.rank = rank_of(cords);
    v.independent = v.rank == cords.size();
    v.lasso = v.rank == edge_count();
    v.basis = v.independent && v.lasso;
    return v;
  }

  /// Every cord whose form lies in the span of the forms of `cords`.
  CordSet closure(const CordSet& cords) const {
    RowEchelon<Rational> span(edge_count());
    for (const auto& c : cords) span.insert(rational_row(c));
    std::vector<Cord> out;
    for (const auto& c : ground_)
      if (span.in_span(rational_row(c))) out.push_back(c);
    return CordSet(std::move(out));
  }

  /// Dependent, and every single-cord deletion independent.
  bool is_circuit(const CordSet& cords) const {
    if (cords.empty() || rank_of(cords) != cords.size() - 1) return false;
    return std::all_of(cords.begin(), cords.end(), [&](const Cord& c) {
      return rank_of(cords.without(c)) == cords.size() - 1;
    });
  }

  /// Streams circuits of size <= max_size (clamped to |E| + 1).  Each
  /// circuit C is reached once, as (C minus its largest cord) + that cord.
  void for_each_circuit(std::size_t max_size, const CordCallback& emit, const EnumerationOptions& options = {}) const {
    check_scale(options);
    max_size = std::min(max_size, edge_count() + 1);
    if (max_size == 0) return;
    std::vector<std::size_t> chosen;
    circuit_search(0, RowEchelon<Rational>(edge_count()), chosen, max_size, emit);
  }

  /// Circuits of size <= max_size, sorted by size then lexicographically.
  std::vector<CordSet> circuits(std::size_t max_size, const EnumerationOptions& options = {}) const {
    std::vector<CordSet> out;
    for_each_circuit(max_size, [&](const CordSet& c) { out.push_back(c); }, options);
    std::sort(out.begin(), out.end(), [](const CordSet& x, const CordSet& y) {
      return x.size() != y.size() ? x.size() < y.size() : x < y;
    });
    return out;
  }

  /// Streams every independent set of exactly `size` cords, lexicographically.
  void for_each_independent(std::size_t size, const CordCallback& emit, const EnumerationOptions& options = {}) const {
    check_scale(options);
    if (size > edge_count()) return;
    if (options.threads <= 1) {
      std::vector<std::size_t> chosen;
      independent_search(0, ground_.size(), RowEchelon<std::int64_t>(edge_count()), chosen, size, emit);
      return;
    }
    // Partition by first element; each partition is collected and replayed in order.
    std::vector<std::future<std::vector<CordSet>>> parts;
    auto run = [this, size](std::size_t first) {
      std::vector<CordSet> found;
      std::vector<std::size_t> chosen;
      independent_search(first, first + 1, RowEchelon<std::int64_t>(edge_count()), chosen, size,
                         [&](const CordSet& s) { found.push_back(s); });
      return found;
    };
    const std::size_t last = size == 0 ? 1 : ground_.size();
    std::size_t next = 0;
    while (next < last) {
      const std::size_t batch_end = std::min(last, next + options.threads);
      for (std::size_t first = next; first < batch_end; ++first) parts.push_back(std::async(std::launch::async, run, first));
      next = batch_end;
    }
    for (auto& p : parts)
      for (const auto& s : p.get()) emit(s);
  }

  void for_each_basis(const CordCallback& emit, const EnumerationOptions& options = {}) const {
    for_each_independent(edge_count(), emit, options);
  }

  std::vector<CordSet> bases(const EnumerationOptions& options = {}) const {
    std::vector<CordSet> out;
    for_each_basis([&](const CordSet& b) { out.push_back(b); }, options);
    return out;
  }

  /// Cords lying in every basis: removing one drops the rank of the ground set.
  CordSet coloops() const {
    const CordSet all(ground_);
    std::vector<Cord> out;
    for (const auto& c : ground_)
      if (rank_of(all.without(c)) < edge_count()) out.push_back(c);
    return CordSet(std::move(out));
  }

  /// Closed sets of rank |E| - 1, sorted.
  std::vector<CordSet> hyperplanes(const EnumerationOptions& options = {}) const {
    std::set<CordSet> found;
    if (edge_count() == 0) return {};
    for_each_independent(edge_count() - 1, [&](const CordSet& s) { found.insert(closure(s)); }, options);
    return {found.begin(), found.end()};
  }

 private:
  std::size_t index(Cord c) const {
    if (c.b >= tree_.leaf_count()) throw std::invalid_argument("cord endpoint is not a leaf of the tree");
    return cord_index(c, tree_.leaf_count());
  }

  std::vector<Rational> rational_row(Cord c) const {
    const auto& r = row(c);
    return {r.begin(), r.end()};
  }

  void check_scale(const EnumerationOptions& options) const {
    if (tree_.leaf_count() > options.max_leaves)
      throw ScaleError("enumeration on " + std::to_string(tree_.leaf_count()) + " leaves exceeds the bound of " +
                       std::to_string(options.max_leaves));
  }

  CordSet to_set(const std::vector<std::size_t>& chosen) const {
    std::vector<Cord> cords;
    for (const auto i : chosen) cords.push_back(ground_[i]);
    return CordSet(std::move(cords));
  }

  // Independent sets extending `chosen`, next element drawn from [from, to)
  // at this level and from anything larger below.
  void independent_search(std::size_t from, std::size_t to, const RowEchelon<std::int64_t>& span,
                          std::vector<std::size_t>& chosen, std::size_t size, const CordCallback& emit) const {
    if (chosen.size() == size) {
      emit(to_set(chosen));
      return;
    }
    const std::size_t needed = size - chosen.size();
    for (std::size_t i = from; i < to && ground_.size() - i >= needed; ++i) {
      RowEchelon<std::int64_t> next = span;
      if (!next.insert(rows_[i])) continue;
      chosen.push_back(i);
      independent_search(i + 1, ground_.size(), next, chosen, size, emit);
      chosen.pop_back();
    }
  }

  void circuit_search(std::size_t from, const RowEchelon<Rational>& span, std::vector<std::size_t>& chosen,
                      std::size_t max_size, const CordCallback& emit) const {
    for (std::size_t i = from; i < ground_.size(); ++i) {
      RowEchelon<Rational> next = span;
      const auto r = rational_row(ground_[i]);
      if (next.insert(r)) {
        if (chosen.size() + 2 <= max_size) {
          chosen.push_back(i);
          circuit_search(i + 1, next, chosen, max_size, emit);
          chosen.pop_back();
        }
        continue;
      }
      // chosen + i is dependent with chosen independent: a circuit iff every
      // deletion of an element of `chosen` leaves an independent set.
      chosen.push_back(i);
      const CordSet candidate = to_set(chosen);
      chosen.pop_back();
      bool minimal = true;
      for (const auto& c : candidate) {
        if (c == ground_[i]) continue;
        if (rank_of(candidate.without(c)) != candidate.size() - 1) {
          minimal = false;
          break;
        }
      }
      if (minimal) emit(candidate);
    }
  }

  XTree tree_;
  std::vector<Cord> ground_;
  std::vector<std::vector<std::int64_t>> rows_;
};

// Free-function forms.

inline LambdaVector lambda_vector(const XTree& t, Cord c) { return TreeMatroid(t).lambda_vector(c); }
inline std::size_t rank_of(const XTree& t, const CordSet& cords) { return TreeMatroid(t).rank_of(cords); }
inline MatroidVerdict verdict(const XTree& t, const CordSet& cords) { return TreeMatroid(t).verdict(cords); }
inline CordSet closure(const XTree& t, const CordSet& cords) { return TreeMatroid(t).closure(cords); }
inline std::vector<CordSet> circuits(const XTree& t, std::size_t max_size) { return TreeMatroid(t).circuits(max_size); }
inline std::vector<CordSet> bases(const XTree& t, const EnumerationOptions& options = {}) { return TreeMatroid(t).bases(options); }
inline CordSet coloops(const XTree& t) { return TreeMatroid(t).coloops(); }

// ---------------------------------------------------------------------------
// Bases from the bases of a single-edge contraction.

/// Builds the bases of M(T) from those of M(T/f): B + xy is a basis iff
/// the coordinates rho of lambda^{T/f}_xy over B satisfy
/// sum_b rho(b) [f on path b] != [f on path xy].
class ContractionStep {
 public:
  ContractionStep(const XTree& t, EdgeId f) : full_(t), contracted_(contract(t, {f})), f_(f) {
    const auto pos = t.edge_position(f);
    f_position_ = *pos;
  }

  const TreeMatroid& full() const { return full_; }
  const TreeMatroid& contracted() const { return contracted_; }
  EdgeId edge() const { return f_; }

  /// Coordinates of lambda^{T/f}_xy over a basis B of M(T/f), in B's order.
  std::vector<Rational> coordinates(const CordSet& basis, Cord xy) const {
    const CoordinateSolver solver(contracted_.lambda_matrix(basis));
    return solve_with(solver, xy);
  }

  bool addable(const CordSet& basis, Cord xy) const {
    const CoordinateSolver solver(contracted_.lambda_matrix(basis));
    return addable_with(solver, basis, xy);
  }

  /// The set B_f, deduplicated and sorted.  The sum over b of rho(b) [f on
  /// path b] equals lambda^{T/f}_xy . u where M_B u = ([f on path b])_b, so
  /// one integer solve per basis serves every cord.
  std::vector<CordSet> bases(const EnumerationOptions& options = {}) const {
    std::set<CordSet> found;
    const std::size_t k = contracted_.edge_count();
    contracted_.for_each_basis(
        [&](const CordSet& basis) {
          Matrix<std::int64_t> m(k, k);
          std::vector<std::int64_t> through_f(k);
          for (std::size_t i = 0; i < k; ++i) {
            const auto& r = contracted_.row(basis[i]);
            for (std::size_t c = 0; c < k; ++c) m(i, c) = r[c];
            through_f[i] = full_.row(basis[i])[f_position_];
          }
          std::optional<std::pair<std::int64_t, std::vector<std::int64_t>>> solved;
          try {
            solved = integer_cramer(m, through_f);
          } catch (const std::overflow_error&) {
            const CoordinateSolver solver(contracted_.lambda_matrix(basis));
            for (const auto& xy : full_.ground_set())
              if (addable_with(solver, basis, xy)) found.insert(basis.with(xy));
            return;
          }
          if (!solved) throw std::logic_error("basis of M(T/f) has a singular form matrix");
          const auto& [det, w] = *solved;
          for (const auto& xy : full_.ground_set()) {
            const auto& r = contracted_.row(xy);
            std::int64_t sum = 0;
            for (std::size_t c = 0; c < k; ++c)
              if (r[c]) sum += w[c];
            if (sum != det * full_.row(xy)[f_position_]) found.insert(basis.with(xy));
          }
        },
        options);
    return {found.begin(), found.end()};
  }

 private:
  std::vector<Rational> solve_with(const CoordinateSolver& solver, Cord xy) const {
    const auto& r = contracted_.row(xy);
    const std::vector<Rational> target(r.begin(), r.end());
    auto rho = solver.solve(target);
    if (!rho) throw std::logic_error("basis of M(T/f) does not span lambda^{T/f}");
    return std::move(*rho);
  }

  bool addable_with(const CoordinateSolver& solver, const CordSet& basis, Cord xy) const {
    const auto rho = solve_with(solver, xy);
    Rational through_f = 0;
    for (std::size_t i = 0; i < basis.size(); ++i)
      if (full_.row(basis[i])[f_position_] != 0) through_f += rho[i];
    return through_f != full_.row(xy)[f_position_];
  }

  TreeMatroid full_;
  TreeMatroid contracted_;
  EdgeId f_;
  std::size_t f_position_ = 0;
};

inline std::vector<CordSet> contraction_bases(const XTree& t, EdgeId f, const EnumerationOptions& options = {}) {
  const auto pos = t.edge_position(f);
  if (!pos) throw std::invalid_argument("edge is not in the tree");
  if (!t.is_interior_edge(*pos)) throw std::invalid_argument("contraction edge must be interior");
  return ContractionStep(t, f).bases(options);
}

// ---------------------------------------------------------------------------
// Rank identities under contraction and restriction.

struct RankDecomposition {
  std::size_t full_rank = 0;        // rk^T(L)
  std::size_t contracted_rank = 0;  // rk^{T/F}(L)
  std::size_t kernel_dim = 0;       // dim{lambda in <L>^T : lambda vanishes on E - F}
  bool identity_holds = false;      // full = contracted + kernel_dim
  bool bound_holds = false;         // full <= contracted + |F|
};

/// Computes rk^T(L), rk^{T/F}(L) on the contracted tree, and the dimension
/// of the forms in <L>^T supported on F, each by its own elimination.
inline RankDecomposition contract_rank_decomposition(const XTree& t, std::span<const EdgeId> collapse, const CordSet& cords) {
  const TreeMatroid full(t);
  const TreeMatroid contracted(contract(t, collapse));
  RankDecomposition d;
  d.full_rank = full.rank_of(cords);
  d.contracted_rank = contracted.rank_of(cords);

  // Combinations y with y^T M vanishing on E - F, then the dimension of {y^T M}.
  const RationalMatrix m = full.lambda_matrix(cords);
  std::vector<std::size_t> keep;
  for (std::size_t p = 0; p < t.edge_count(); ++p)
    if (std::find(collapse.begin(), collapse.end(), t.edge(p).id) == collapse.end()) keep.push_back(p);
  const auto left_kernel = kernel_basis(m.select_columns(keep).transpose());
  if (!left_kernel.empty()) {
    const RationalMatrix y = RationalMatrix::from_rows(left_kernel, cords.size());
    d.kernel_dim = rank(y * m);
  }
  d.identity_holds = d.full_rank == d.contracted_rank + d.kernel_dim;
  d.bound_holds = d.full_rank <= d.contracted_rank + collapse.size();
  return d;
}

struct RestrictionRanks {
  std::size_t full_rank = 0;        // rk^T(L)
  std::size_t restricted_rank = 0;  // rk^{T|Y}(L)
  bool equal = false;
};

/// rk^T(L) against rk^{T|Y}(L) for L inside Y-choose-2.
inline RestrictionRanks restriction_rank(const XTree& t, const std::vector<Leaf>& subset, const CordSet& cords) {
  const auto r = restrict_tree(t, subset);
  RestrictionRanks out;
  out.full_rank = rank_of(t, cords);
  out.restricted_rank = rank_of(r.tree, r.map_cords(cords));
  out.equal = out.full_rank == out.restricted_rank;
  return out;
}

}  // namespace treematroid
