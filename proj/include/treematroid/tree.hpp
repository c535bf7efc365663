#pragma once

// X-trees: finite trees whose degree-1 vertices carry distinct labels and
// which have no vertex of degree 2.
//
// Representation: with n leaves, vertices 0..n-1 are the leaves, in sorted
// label order, so leaf index i is also vertex i.  Interior vertices follow.
// Edges carry stable ids that survive contraction.

#include <algorithm>
#include <array>
#include <cctype>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "treematroid/exact.hpp"

namespace treematroid {

using Leaf = std::uint32_t;
using Vertex = std::uint32_t;
enum class EdgeId : std::uint32_t {};

inline std::uint32_t to_underlying(EdgeId id) { return static_cast<std::uint32_t>(id); }

/// Unordered pair of distinct leaves, stored with a < b.
struct Cord {
  Leaf a;
  Leaf b;

  Cord(Leaf x, Leaf y) : a(std::min(x, y)), b(std::max(x, y)) {
    if (x == y) throw std::invalid_argument("a cord needs two distinct leaves");
  }

  bool contains(Leaf x) const { return a == x || b == x; }
  friend auto operator<=>(const Cord&, const Cord&) = default;
};

/// Position of `c` in the lexicographic listing of all cords on n leaves.
inline std::size_t cord_index(Cord c, std::size_t n) {
  return c.a * (2 * n - c.a - 1) / 2 + (c.b - c.a - 1);
}

/// Duplicate-free sorted set of cords.
class CordSet {
 public:
  CordSet() = default;
  CordSet(std::initializer_list<Cord> cords) : cords_(cords) { normalize(); }
  explicit CordSet(std::vector<Cord> cords) : cords_(std::move(cords)) { normalize(); }

  /// Every cord on n leaves.
  static CordSet all(std::size_t n) {
    CordSet s;
    for (Leaf a = 0; a < n; ++a)
      for (Leaf b = a + 1; b < n; ++b) s.cords_.emplace_back(a, b);
    return s;
  }

  std::size_t size() const { return cords_.size(); }
  bool empty() const { return cords_.empty(); }
  auto begin() const { return cords_.begin(); }
  auto end() const { return cords_.end(); }
  const Cord& operator[](std::size_t i) const { return cords_[i]; }
  const std::vector<Cord>& cords() const { return cords_; }

  bool contains(Cord c) const { return std::binary_search(cords_.begin(), cords_.end(), c); }

  bool insert(Cord c) {
    const auto it = std::lower_bound(cords_.begin(), cords_.end(), c);
    if (it != cords_.end() && *it == c) return false;
    cords_.insert(it, c);
    return true;
  }

  bool erase(Cord c) {
    const auto it = std::lower_bound(cords_.begin(), cords_.end(), c);
    if (it == cords_.end() || *it != c) return false;
    cords_.erase(it);
    return true;
  }

  CordSet with(Cord c) const {
    CordSet s = *this;
    s.insert(c);
    return s;
  }

  CordSet without(Cord c) const {
    CordSet s = *this;
    s.erase(c);
    return s;
  }

  bool is_subset_of(const CordSet& other) const {
    return std::includes(other.cords_.begin(), other.cords_.end(), cords_.begin(), cords_.end());
  }

  /// Leaves touched by some cord, sorted.
  std::vector<Leaf> leaves() const {
    std::vector<Leaf> out;
    for (const auto& c : cords_) {
      out.push_back(c.a);
      out.push_back(c.b);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  friend CordSet operator|(const CordSet& x, const CordSet& y) {
    CordSet s;
    std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(s.cords_));
    return s;
  }
  friend CordSet operator&(const CordSet& x, const CordSet& y) {
    CordSet s;
    std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(s.cords_));
    return s;
  }
  friend CordSet operator-(const CordSet& x, const CordSet& y) {
    CordSet s;
    std::set_difference(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(s.cords_));
    return s;
  }
  friend CordSet operator^(const CordSet& x, const CordSet& y) {
    CordSet s;
    std::set_symmetric_difference(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(s.cords_));
    return s;
  }
  friend auto operator<=>(const CordSet&, const CordSet&) = default;

 private:
  void normalize() {
    std::sort(cords_.begin(), cords_.end());
    cords_.erase(std::unique(cords_.begin(), cords_.end()), cords_.end());
  }

  std::vector<Cord> cords_;
};

/// A vee B: every cord with one end in `a_side` and the other in `b_side`.
inline CordSet join(std::span<const Leaf> a_side, std::span<const Leaf> b_side) {
  std::vector<Cord> cords;
  for (const Leaf x : a_side)
    for (const Leaf y : b_side) cords.emplace_back(x, y);
  return CordSet(std::move(cords));
}

/// Exact branch lengths keyed by edge id.
using EdgeWeighting = std::map<EdgeId, Rational>;

class XTree {
 public:
  struct Edge {
    EdgeId id;
    Vertex u;
    Vertex v;
  };

  struct Incidence {
    Vertex neighbor;
    std::size_t edge;  // position in edges()
  };

  /// Validates every X-tree invariant.  `labels` must be strictly increasing;
  /// vertex i < labels.size() is the leaf labelled labels[i].
  XTree(std::vector<std::string> labels, std::size_t vertex_count, std::vector<Edge> edges)
      : labels_(std::move(labels)), vertex_count_(vertex_count), edges_(std::move(edges)) {
    const std::size_t n = labels_.size();
    if (n < 3) throw std::invalid_argument("an X-tree needs at least 3 leaves");
    if (!std::is_sorted(labels_.begin(), labels_.end()) ||
        std::adjacent_find(labels_.begin(), labels_.end()) != labels_.end())
      throw std::invalid_argument("leaf labels must be distinct and sorted");
    if (vertex_count_ < n + 1) throw std::invalid_argument("an X-tree needs an interior vertex");
    if (edges_.size() + 1 != vertex_count_) throw std::invalid_argument("edge count must be vertex count - 1");

    std::sort(edges_.begin(), edges_.end(), [](const Edge& x, const Edge& y) { return x.id < y.id; });
    for (std::size_t i = 1; i < edges_.size(); ++i)
      if (edges_[i - 1].id == edges_[i].id) throw std::invalid_argument("duplicate edge id");

    adjacency_.assign(vertex_count_, {});
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const auto& e = edges_[i];
      if (e.u >= vertex_count_ || e.v >= vertex_count_ || e.u == e.v) throw std::invalid_argument("malformed edge");
      adjacency_[e.u].push_back({e.v, i});
      adjacency_[e.v].push_back({e.u, i});
    }
    for (Vertex v = 0; v < vertex_count_; ++v) {
      const std::size_t d = adjacency_[v].size();
      if (v < n && d != 1) throw std::invalid_argument("leaf '" + labels_[v] + "' does not have degree 1");
      if (v >= n && d == 2) throw std::invalid_argument("degree-2 vertex");
      if (v >= n && d < 2) throw std::invalid_argument("unlabelled vertex of degree " + std::to_string(d));
    }
    // Connected with |E| = |V| - 1 implies acyclic.
    std::vector<bool> seen(vertex_count_, false);
    std::vector<Vertex> stack{0};
    seen[0] = true;
    std::size_t reached = 1;
    while (!stack.empty()) {
      const Vertex v = stack.back();
      stack.pop_back();
      for (const auto& inc : adjacency_[v])
        if (!seen[inc.neighbor]) {
          seen[inc.neighbor] = true;
          ++reached;
          stack.push_back(inc.neighbor);
        }
    }
    if (reached != vertex_count_) throw std::invalid_argument("graph is not connected");
  }

  std::size_t leaf_count() const { return labels_.size(); }
  std::size_t vertex_count() const { return vertex_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t interior_vertex_count() const { return vertex_count_ - labels_.size(); }

  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(Leaf x) const { return labels_.at(x); }

  std::optional<Leaf> find_leaf(std::string_view label) const {
    const auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
    if (it == labels_.end() || *it != label) return std::nullopt;
    return static_cast<Leaf>(it - labels_.begin());
  }

  Leaf leaf(std::string_view label) const {
    if (auto x = find_leaf(label)) return *x;
    throw std::invalid_argument("unknown leaf '" + std::string(label) + "'");
  }

  bool is_leaf(Vertex v) const { return v < labels_.size(); }

  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(std::size_t position) const { return edges_.at(position); }

  std::optional<std::size_t> edge_position(EdgeId id) const {
    const auto it = std::lower_bound(edges_.begin(), edges_.end(), id, [](const Edge& e, EdgeId x) { return e.id < x; });
    if (it == edges_.end() || it->id != id) return std::nullopt;
    return static_cast<std::size_t>(it - edges_.begin());
  }

  std::size_t degree(Vertex v) const { return adjacency_.at(v).size(); }
  const std::vector<Incidence>& incidences(Vertex v) const { return adjacency_.at(v); }

  /// Position of the pendant edge e_x.
  std::size_t pendant_edge(Leaf x) const { return adjacency_.at(x).front().edge; }

  bool is_interior_edge(std::size_t position) const {
    const auto& e = edges_.at(position);
    return !is_leaf(e.u) && !is_leaf(e.v);
  }

  std::vector<EdgeId> interior_edges() const {
    std::vector<EdgeId> out;
    for (std::size_t i = 0; i < edges_.size(); ++i)
      if (is_interior_edge(i)) out.push_back(edges_[i].id);
    return out;
  }

  bool is_binary() const {
    for (Vertex v = static_cast<Vertex>(labels_.size()); v < vertex_count_; ++v)
      if (degree(v) != 3) return false;
    return true;
  }

 private:
  std::vector<std::string> labels_;
  std::size_t vertex_count_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Incidence>> adjacency_;
};

// ---------------------------------------------------------------------------
// Construction helpers.

/// Builds an X-tree from arbitrary labels and vertex numbering: `leaf_labels`
/// maps leaf vertices to labels.  Vertices are renumbered into the canonical
/// layout; edge ids are kept.
inline XTree build_xtree(const std::map<Vertex, std::string>& leaf_labels, const std::vector<XTree::Edge>& edges) {
  std::vector<std::pair<std::string, Vertex>> by_label;
  for (const auto& [v, l] : leaf_labels) by_label.emplace_back(l, v);
  std::sort(by_label.begin(), by_label.end());
  for (std::size_t i = 1; i < by_label.size(); ++i)
    if (by_label[i - 1].first == by_label[i].first)
      throw std::invalid_argument("duplicate leaf label '" + by_label[i].first + "'");

  std::map<Vertex, Vertex> renumber;
  std::vector<std::string> labels;
  for (const auto& [l, v] : by_label) {
    renumber[v] = static_cast<Vertex>(labels.size());
    labels.push_back(l);
  }
  auto map_vertex = [&](Vertex v) {
    auto [it, inserted] = renumber.try_emplace(v, static_cast<Vertex>(renumber.size()));
    return it->second;
  };
  // Interior vertices numbered by first appearance, edges in the order given.
  std::vector<XTree::Edge> mapped;
  for (const auto& e : edges) {
    const Vertex u = map_vertex(e.u);
    const Vertex v = map_vertex(e.v);
    mapped.push_back({e.id, u, v});
  }
  return XTree(std::move(labels), renumber.size(), std::move(mapped));
}

/// The star tree on the given labels.
inline XTree star_tree(std::vector<std::string> labels) {
  std::sort(labels.begin(), labels.end());
  const auto n = static_cast<Vertex>(labels.size());
  std::vector<XTree::Edge> edges;
  for (Vertex x = 0; x < n; ++x) edges.push_back({EdgeId{x}, x, n});
  return XTree(std::move(labels), n + 1, std::move(edges));
}

/// Caterpillar with cherries {labels[0], labels[1]} and {labels[n-2], labels[n-1]}
/// and the remaining leaves hanging off the spine in order.
inline XTree caterpillar_tree(const std::vector<std::string>& labels) {
  const auto n = static_cast<Vertex>(labels.size());
  if (n < 3) throw std::invalid_argument("an X-tree needs at least 3 leaves");
  std::map<Vertex, std::string> leaf_labels;
  for (Vertex i = 0; i < n; ++i) leaf_labels[i] = labels[i];
  // Spine vertices n .. n+(n-3); spine vertex k carries leaf k+1.
  std::vector<XTree::Edge> edges;
  std::uint32_t id = 0;
  const Vertex first = n;
  const Vertex last = n + (n - 3);
  edges.push_back({EdgeId{id++}, 0, first});
  for (Vertex k = 0; k + 2 < n; ++k) edges.push_back({EdgeId{id++}, k + 1, first + k});
  edges.push_back({EdgeId{id++}, n - 1, last});
  for (Vertex k = 0; k + 3 < n; ++k) edges.push_back({EdgeId{id++}, first + k, first + k + 1});
  return build_xtree(leaf_labels, edges);
}

/// Labels "a1", "a2", ..., "a<n>".
inline std::vector<std::string> indexed_labels(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

// ---------------------------------------------------------------------------
// Newick.

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

struct NewickTree {
  XTree tree;
  std::optional<EdgeWeighting> weights;
};

namespace detail {

struct NewickNode {
  std::string label;
  std::optional<Rational> length;
  std::vector<std::size_t> children;
  std::size_t position = 0;
};

class NewickParser {
 public:
  explicit NewickParser(std::string_view text) : text_(text) {}

  std::vector<NewickNode> parse() {
    skip_space();
    parse_subtree();
    skip_space();
    expect(';');
    skip_space();
    if (pos_ != text_.size()) throw ParseError("trailing characters after ';'", pos_);
    return std::move(nodes_);
  }

 private:
  std::size_t parse_subtree() {
    const std::size_t index = nodes_.size();
    nodes_.push_back({});
    nodes_[index].position = pos_;
    if (peek() == '(') {
      ++pos_;
      while (true) {
        skip_space();
        const std::size_t child = parse_subtree();
        nodes_[index].children.push_back(child);
        skip_space();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        expect(')');
        break;
      }
      skip_space();
      if (is_label_char(peek())) throw ParseError("interior node labels are not supported", pos_);
    } else {
      skip_space();
      const std::size_t start = pos_;
      while (is_label_char(peek())) ++pos_;
      if (start == pos_) throw ParseError("expected a leaf label or '('", pos_);
      nodes_[index].label = std::string(text_.substr(start, pos_ - start));
    }
    skip_space();
    if (peek() == ':') {
      ++pos_;
      skip_space();
      const std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                                     text_[pos_] == '/' || text_[pos_] == '-' || text_[pos_] == '+'))
        ++pos_;
      try {
        nodes_[index].length = parse_rational(text_.substr(start, pos_ - start));
      } catch (const std::invalid_argument&) {
        throw ParseError("malformed branch length", start);
      }
    }
    return index;
  }

  static bool is_label_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  void expect(char c) {
    if (peek() != c) {
      if (pos_ >= text_.size()) throw ParseError(std::string("unexpected end of input, expected '") + c + "'", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<NewickNode> nodes_;
};

}  // namespace detail

/// Parses a Newick string.  A root with two children is suppressed (its two
/// branches become one edge); any other degree-2 vertex is an error.  Branch
/// lengths are exact rationals and must be given on every edge or none.
inline NewickTree parse_newick(std::string_view text) {
  auto nodes = detail::NewickParser(text).parse();
  const auto& root = nodes[0];
  if (root.length) throw ParseError("branch length on the root", root.position);

  std::map<Vertex, std::string> leaf_labels;
  std::vector<XTree::Edge> edges;
  std::vector<std::optional<Rational>> lengths;
  std::set<std::string> seen_labels;

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& node = nodes[i];
    if (node.children.empty()) {
      if (!seen_labels.insert(node.label).second)
        throw ParseError("duplicate leaf label '" + node.label + "'", node.position);
      leaf_labels[static_cast<Vertex>(i)] = node.label;
    } else if (i != 0 && node.children.size() == 1) {
      throw ParseError("degree-2 vertex", node.position);
    }
  }
  if (leaf_labels.size() < 3) throw ParseError("fewer than 3 leaves", 0);
  if (root.children.size() == 1) throw ParseError("root has a single child (unlabelled leaf)", root.position);

  const bool suppress_root = root.children.size() == 2;
  std::uint32_t next_id = 0;
  // Pre-order walk emitting parent-child edges.
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const std::size_t p = stack.back();
    stack.pop_back();
    const auto& children = nodes[p].children;
    for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back(*it);
    if (p == 0 && suppress_root) continue;
    for (const std::size_t c : children) {
      edges.push_back({EdgeId{next_id++}, static_cast<Vertex>(p), static_cast<Vertex>(c)});
      lengths.push_back(nodes[c].length);
    }
  }
  if (suppress_root) {
    const std::size_t c0 = root.children[0];
    const std::size_t c1 = root.children[1];
    std::optional<Rational> len;
    if (nodes[c0].length && nodes[c1].length) len = *nodes[c0].length + *nodes[c1].length;
    else if (nodes[c0].length || nodes[c1].length) throw ParseError("branch lengths must be given on every edge or none", root.position);
    edges.insert(edges.begin(), {EdgeId{0}, static_cast<Vertex>(c0), static_cast<Vertex>(c1)});
    lengths.insert(lengths.begin(), len);
    for (std::size_t i = 1; i < edges.size(); ++i) edges[i].id = EdgeId{static_cast<std::uint32_t>(i)};
  }

  const auto given = std::count_if(lengths.begin(), lengths.end(), [](const auto& l) { return l.has_value(); });
  if (given != 0 && static_cast<std::size_t>(given) != lengths.size())
    throw ParseError("branch lengths must be given on every edge or none", 0);

  std::optional<XTree> tree;
  try {
    tree.emplace(build_xtree(leaf_labels, edges));
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), 0);
  }
  NewickTree result{std::move(*tree), std::nullopt};
  if (given != 0) {
    EdgeWeighting w;
    for (std::size_t i = 0; i < edges.size(); ++i) w[edges[i].id] = *lengths[i];
    result.weights = std::move(w);
  }
  return result;
}

inline XTree parse_newick_tree(std::string_view text) { return parse_newick(text).tree; }

namespace detail {

inline std::string subtree_string(const XTree& t, Vertex v, Vertex parent, std::size_t via_edge, const EdgeWeighting* w) {
  std::string s;
  if (t.is_leaf(v)) {
    s = t.label(v);
  } else {
    std::vector<std::string> parts;
    for (const auto& inc : t.incidences(v))
      if (inc.neighbor != parent) parts.push_back(subtree_string(t, inc.neighbor, v, inc.edge, w));
    std::sort(parts.begin(), parts.end());
    s = "(";
    for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? "," : "") + parts[i];
    s += ")";
  }
  if (w != nullptr) s += ":" + to_string(w->at(t.edge(via_edge).id));
  return s;
}

}  // namespace detail

/// Canonical Newick: rooted at the neighbour of the smallest leaf, children
/// sorted by their canonical strings.  With `weights`, branch lengths are
/// written after each subtree.
inline std::string to_newick(const XTree& t, const EdgeWeighting* weights = nullptr) {
  const Vertex root = t.incidences(0).front().neighbor;
  std::vector<std::string> parts;
  for (const auto& inc : t.incidences(root))
    parts.push_back(detail::subtree_string(t, inc.neighbor, root, inc.edge, weights));
  std::sort(parts.begin(), parts.end());
  std::string s = "(";
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? "," : "") + parts[i];
  return s + ");";
}

inline std::string canonical_form(const XTree& t) { return to_newick(t); }

/// Leaf-fixing isomorphism test.
inline bool are_equivalent(const XTree& t1, const XTree& t2) {
  if (t1.labels() != t2.labels()) throw std::invalid_argument("trees have different leaf sets");
  if (t1.vertex_count() != t2.vertex_count()) return false;
  return canonical_form(t1) == canonical_form(t2);
}

// ---------------------------------------------------------------------------
// Paths, contraction, restriction.

namespace detail {

// Edge positions on the path from `from` to every vertex: parent edge per vertex.
inline std::vector<std::optional<std::size_t>> parent_edges(const XTree& t, Vertex from) {
  std::vector<std::optional<std::size_t>> parent(t.vertex_count());
  std::vector<bool> seen(t.vertex_count(), false);
  std::vector<Vertex> stack{from};
  seen[from] = true;
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    for (const auto& inc : t.incidences(v))
      if (!seen[inc.neighbor]) {
        seen[inc.neighbor] = true;
        parent[inc.neighbor] = inc.edge;
        stack.push_back(inc.neighbor);
      }
  }
  return parent;
}

inline Vertex other_end(const XTree& t, std::size_t edge, Vertex v) {
  const auto& e = t.edge(edge);
  return e.u == v ? e.v : e.u;
}

}  // namespace detail

/// Edge positions along p(u, v), in order from u.
inline std::vector<std::size_t> path_edge_positions(const XTree& t, Vertex u, Vertex v) {
  if (u >= t.vertex_count() || v >= t.vertex_count()) throw std::invalid_argument("unknown vertex id");
  const auto parent = detail::parent_edges(t, v);
  std::vector<std::size_t> out;
  for (Vertex x = u; x != v;) {
    const std::size_t e = *parent[x];
    out.push_back(e);
    x = detail::other_end(t, e, x);
  }
  return out;
}

/// The ordered edge ids of the path from u to v; empty when u == v.
inline std::vector<EdgeId> path_edges(const XTree& t, Vertex u, Vertex v) {
  std::vector<EdgeId> ids;
  for (const auto p : path_edge_positions(t, u, v)) ids.push_back(t.edge(p).id);
  return ids;
}

/// T/F: collapses the given interior edges.  Surviving edges keep their ids.
inline XTree contract(const XTree& t, std::span<const EdgeId> collapse) {
  std::vector<Vertex> parent(t.vertex_count());
  std::iota(parent.begin(), parent.end(), Vertex{0});
  std::function<Vertex(Vertex)> find = [&](Vertex v) { return parent[v] == v ? v : parent[v] = find(parent[v]); };

  std::set<EdgeId> removed;
  for (const EdgeId id : collapse) {
    const auto pos = t.edge_position(id);
    if (!pos) throw std::invalid_argument("edge id " + std::to_string(to_underlying(id)) + " is not in the tree");
    if (!t.is_interior_edge(*pos)) throw std::invalid_argument("cannot contract pendant edge " + std::to_string(to_underlying(id)));
    removed.insert(id);
    const auto& e = t.edge(*pos);
    const Vertex a = find(e.u), b = find(e.v);
    parent[std::max(a, b)] = std::min(a, b);
  }
  if (removed.empty()) return t;

  std::map<Vertex, Vertex> renumber;
  const auto n = static_cast<Vertex>(t.leaf_count());
  for (Vertex v = 0; v < n; ++v) renumber[v] = v;
  for (Vertex v = n; v < t.vertex_count(); ++v) {
    const Vertex r = find(v);
    if (!renumber.contains(r)) renumber[r] = static_cast<Vertex>(renumber.size());
  }
  std::vector<XTree::Edge> edges;
  for (const auto& e : t.edges())
    if (!removed.contains(e.id)) edges.push_back({e.id, renumber.at(find(e.u)), renumber.at(find(e.v))});
  return XTree(t.labels(), renumber.size(), std::move(edges));
}

inline XTree contract(const XTree& t, std::initializer_list<EdgeId> collapse) {
  return contract(t, std::span<const EdgeId>(collapse.begin(), collapse.size()));
}

/// T restricted to a leaf subset.
struct Restriction {
  XTree tree;
  /// Each edge of the restricted tree -> the edges of T it condenses, path order.
  std::map<EdgeId, std::vector<EdgeId>> condensed;
  /// Restricted leaf index -> leaf index in T.
  std::vector<Leaf> leaf_map;

  /// The induced weighting: each restricted edge gets the sum over what it condenses.
  EdgeWeighting induced(const EdgeWeighting& w) const {
    EdgeWeighting out;
    for (const auto& [id, parts] : condensed) {
      Rational s = 0;
      for (const auto p : parts) s += w.at(p);
      out[id] = s;
    }
    return out;
  }

  /// Re-indexes a cord of T (both ends in the subset) to the restricted tree.
  Cord map_cord(Cord c) const {
    const auto find = [&](Leaf x) {
      const auto it = std::lower_bound(leaf_map.begin(), leaf_map.end(), x);
      if (it == leaf_map.end() || *it != x) throw std::invalid_argument("cord leaves outside the restriction subset");
      return static_cast<Leaf>(it - leaf_map.begin());
    };
    return Cord(find(c.a), find(c.b));
  }

  CordSet map_cords(const CordSet& cords) const {
    std::vector<Cord> out;
    for (const auto& c : cords) out.push_back(map_cord(c));
    return CordSet(std::move(out));
  }
};

/// T|_Y: the minimal subtree spanning Y with degree-2 vertices suppressed.
/// A condensed edge takes the smallest id among the edges it replaces.
inline Restriction restrict_tree(const XTree& t, std::vector<Leaf> subset) {
  std::sort(subset.begin(), subset.end());
  if (std::adjacent_find(subset.begin(), subset.end()) != subset.end()) throw std::invalid_argument("repeated leaf in subset");
  if (subset.size() < 3) throw std::invalid_argument("restriction needs at least 3 leaves");
  for (const Leaf x : subset)
    if (x >= t.leaf_count()) throw std::invalid_argument("subset contains a non-leaf");

  // Keep a vertex iff it lies on a path between two subset leaves.
  const auto parent = detail::parent_edges(t, subset.front());
  std::vector<bool> kept(t.vertex_count(), false);
  std::vector<bool> kept_edge(t.edge_count(), false);
  for (const Leaf x : subset) {
    for (Vertex v = x; !kept[v];) {
      kept[v] = true;
      if (!parent[v]) break;
      kept_edge[*parent[v]] = true;
      v = detail::other_end(t, *parent[v], v);
    }
  }
  std::vector<std::size_t> kept_degree(t.vertex_count(), 0);
  for (std::size_t e = 0; e < t.edge_count(); ++e)
    if (kept_edge[e]) {
      ++kept_degree[t.edge(e).u];
      ++kept_degree[t.edge(e).v];
    }
  auto is_node = [&](Vertex v) { return kept[v] && kept_degree[v] != 2; };

  Restriction r{XTree(t), {}, subset};
  std::map<Vertex, std::string> leaf_labels;
  for (const Leaf x : subset) leaf_labels[x] = t.label(x);
  std::vector<XTree::Edge> edges;
  std::set<std::size_t> used;
  for (Vertex start = 0; start < t.vertex_count(); ++start) {
    if (!is_node(start)) continue;
    for (const auto& inc : t.incidences(start)) {
      if (!kept_edge[inc.edge] || used.contains(inc.edge)) continue;
      std::vector<EdgeId> chain{t.edge(inc.edge).id};
      used.insert(inc.edge);
      Vertex prev = start, cur = inc.neighbor;
      while (!is_node(cur)) {
        for (const auto& next : t.incidences(cur))
          if (kept_edge[next.edge] && next.neighbor != prev) {
            chain.push_back(t.edge(next.edge).id);
            used.insert(next.edge);
            prev = cur;
            cur = next.neighbor;
            break;
          }
      }
      const EdgeId id = *std::min_element(chain.begin(), chain.end());
      edges.push_back({id, start, cur});
      r.condensed[id] = std::move(chain);
    }
  }
  r.tree = build_xtree(leaf_labels, edges);
  return r;
}

/// Restriction by label.
inline Restriction restrict_tree(const XTree& t, const std::vector<std::string>& labels) {
  std::vector<Leaf> subset;
  for (const auto& l : labels) subset.push_back(t.leaf(l));
  return restrict_tree(t, std::move(subset));
}

// ---------------------------------------------------------------------------
// Cherries and shape predicates.

struct Cherry {
  Cord cord;
  bool proper;
  friend bool operator==(const Cherry&, const Cherry&) = default;
};

/// Every T-cherry, sorted by cord; proper iff the shared vertex has degree 3.
inline std::vector<Cherry> cherries(const XTree& t) {
  std::vector<Cherry> out;
  for (Vertex v = static_cast<Vertex>(t.leaf_count()); v < t.vertex_count(); ++v) {
    std::vector<Leaf> leaves;
    for (const auto& inc : t.incidences(v))
      if (t.is_leaf(inc.neighbor)) leaves.push_back(inc.neighbor);
    for (std::size_t i = 0; i < leaves.size(); ++i)
      for (std::size_t j = i + 1; j < leaves.size(); ++j) out.push_back({Cord(leaves[i], leaves[j]), t.degree(v) == 3});
  }
  std::sort(out.begin(), out.end(), [](const Cherry& x, const Cherry& y) { return x.cord < y.cord; });
  return out;
}

/// Binary with all interior vertices on one path.
inline bool is_caterpillar(const XTree& t) {
  if (!t.is_binary()) return false;
  for (Vertex v = static_cast<Vertex>(t.leaf_count()); v < t.vertex_count(); ++v) {
    std::size_t interior_neighbors = 0;
    for (const auto& inc : t.incidences(v))
      if (!t.is_leaf(inc.neighbor)) ++interior_neighbors;
    if (interior_neighbors > 2) return false;
  }
  return true;
}

enum class QuartetTopology { ab_cd, ac_bd, ad_bc, star };

/// Shape of T restricted to {a, b, c, d}, named relative to the argument order.
/// ab|cd holds iff the a-b and c-d paths share no vertex.
inline QuartetTopology quartet_topology(const XTree& t, Leaf a, Leaf b, Leaf c, Leaf d) {
  const std::array<Leaf, 4> q{a, b, c, d};
  for (std::size_t i = 0; i < 4; ++i) {
    if (q[i] >= t.leaf_count()) throw std::invalid_argument("quartet labels must be leaves");
    for (std::size_t j = i + 1; j < 4; ++j)
      if (q[i] == q[j]) throw std::invalid_argument("quartet labels must be distinct");
  }
  auto path_vertices = [&](Leaf x, Leaf y) {
    std::vector<bool> on(t.vertex_count(), false);
    Vertex v = x;
    on[v] = true;
    for (const auto e : path_edge_positions(t, x, y)) {
      v = detail::other_end(t, e, v);
      on[v] = true;
    }
    return on;
  };
  auto disjoint = [&](Leaf w, Leaf x, Leaf y, Leaf z) {
    const auto p = path_vertices(w, x);
    const auto q2 = path_vertices(y, z);
    for (Vertex v = 0; v < t.vertex_count(); ++v)
      if (p[v] && q2[v]) return false;
    return true;
  };
  if (disjoint(a, b, c, d)) return QuartetTopology::ab_cd;
  if (disjoint(a, c, b, d)) return QuartetTopology::ac_bd;
  if (disjoint(a, d, b, c)) return QuartetTopology::ad_bc;
  return QuartetTopology::star;
}

/// D_w(x, y): sum of weights along the x-y path.
inline Rational distance(const XTree& t, const EdgeWeighting& w, Cord c) {
  if (c.b >= t.leaf_count()) throw std::invalid_argument("cord endpoints must be leaves");
  Rational s = 0;
  for (const auto p : path_edge_positions(t, c.a, c.b)) {
    const auto it = w.find(t.edge(p).id);
    if (it == w.end()) throw std::invalid_argument("weighting does not cover every edge");
    s += it->second;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Enumeration.

/// Every X-tree on `labels` up to equivalence: binary trees by leaf
/// insertion, then every subset of interior edges contracted, deduplicated
/// by canonical form.  Ordered by interior edge count, then canonical form.
inline std::vector<XTree> enumerate_xtrees(std::vector<std::string> labels, std::size_t max_leaves = 8) {
  std::sort(labels.begin(), labels.end());
  const auto n = static_cast<Vertex>(labels.size());
  if (n < 3) throw std::invalid_argument("an X-tree needs at least 3 leaves");
  if (n > max_leaves)
    throw ScaleError("tree enumeration on " + std::to_string(n) + " leaves exceeds the bound of " + std::to_string(max_leaves));

  using EdgeList = std::vector<std::pair<Vertex, Vertex>>;
  std::vector<EdgeList> binary{{{0, n}, {1, n}, {2, n}}};
  for (Vertex leaf = 3; leaf < n; ++leaf) {
    std::vector<EdgeList> grown;
    const Vertex fresh = n + (leaf - 2);
    for (const auto& edges : binary)
      for (std::size_t i = 0; i < edges.size(); ++i) {
        EdgeList next = edges;
        const auto [u, v] = next[i];
        next[i] = {u, fresh};
        next.push_back({fresh, v});
        next.push_back({leaf, fresh});
        grown.push_back(std::move(next));
      }
    binary = std::move(grown);
  }

  std::vector<std::pair<std::size_t, std::string>> keys;
  std::vector<XTree> out;
  std::unordered_set<std::string> seen;
  for (const auto& edges : binary) {
    std::vector<XTree::Edge> tree_edges;
    for (std::size_t i = 0; i < edges.size(); ++i)
      tree_edges.push_back({EdgeId{static_cast<std::uint32_t>(i)}, edges[i].first, edges[i].second});
    const XTree t(labels, 2 * n - 2, std::move(tree_edges));
    const auto interior = t.interior_edges();
    for (std::uint32_t mask = 0; mask < (1u << interior.size()); ++mask) {
      std::vector<EdgeId> collapse;
      for (std::size_t i = 0; i < interior.size(); ++i)
        if (mask & (1u << i)) collapse.push_back(interior[i]);
      XTree c = contract(t, collapse);
      std::string key = canonical_form(c);
      if (seen.insert(key).second) {
        keys.emplace_back(c.interior_vertex_count(), std::move(key));
        out.push_back(std::move(c));
      }
    }
  }
  std::vector<std::size_t> order(out.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return keys[i] < keys[j]; });
  std::vector<XTree> sorted;
  sorted.reserve(out.size());
  for (const auto i : order) sorted.push_back(std::move(out[i]));
  return sorted;
}

// ---------------------------------------------------------------------------
// Display helpers.

inline std::string format_cord(const XTree& t, Cord c) { return t.label(c.a) + "-" + t.label(c.b); }

inline std::string format_cords(const XTree& t, const CordSet& cords) {
  std::string s = "{";
  for (std::size_t i = 0; i < cords.size(); ++i) s += (i ? ", " : "") + format_cord(t, cords[i]);
  return s + "}";
}

}  // namespace treematroid
