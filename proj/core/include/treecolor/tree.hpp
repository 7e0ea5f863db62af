#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace treecolor {

using EdgeId = std::uint32_t;
using VertexId = std::uint32_t;

struct Edge {
  VertexId parent;
  VertexId child;
};

/// Rooted tree with edges indexed breadth-first (parents before children,
/// siblings left to right). Vertices are renumbered in the same order, so
/// edge e always has child vertex e + 1.
class Tree {
 public:
  /// T_k: root with `degree` children, every other internal vertex with
  /// degree - 1 children, leaves at depth k.
  static Tree complete_regular(int degree, int depth);
  /// T*_l: a level-0 edge r above a complete (degree-1)-ary tree of depth l.
  static Tree hanging_root(int degree, int depth);
  /// Path of `edges` edges rooted at one end.
  static Tree path(int edges);
  static Tree star(int edges);
  /// Two adjacent vertices of degree `degree` joined by the root's first edge.
  static Tree double_star(int degree);
  /// Children counts listed breadth-first starting at the root.
  static Tree from_child_counts(std::span<const int> counts, bool hanging);
  /// Arbitrary tree from (child, parent) pairs; children keep input order.
  static Tree from_parent_pairs(std::size_t n_vertices, VertexId root,
                                std::span<const std::pair<VertexId, VertexId>> child_parent,
                                bool hanging);
  static Tree read(std::istream& in);
  void write(std::ostream& out) const;

  std::size_t num_vertices() const { return parent_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  const Edge& edge(EdgeId e) const { return edges_.at(e); }
  std::span<const Edge> edges() const { return edges_; }
  VertexId root() const { return 0; }
  bool has_hanging_root() const { return hanging_; }

  int level(EdgeId e) const { return level_.at(e); }
  int max_level() const { return max_level_; }
  int min_level() const { return hanging_ ? 0 : 1; }
  std::vector<EdgeId> level_edges(int i) const;

  int degree(VertexId v) const { return static_cast<int>(incident_.at(v).size()); }
  int max_degree() const { return max_degree_; }

  /// Edges sharing an endpoint with e, ascending.
  std::span<const EdgeId> neighbors(EdgeId e) const { return neighbors_.at(e); }
  /// Edges hanging below the child vertex of e, left to right.
  std::span<const EdgeId> child_edges(EdgeId e) const { return children_.at(edges_.at(e).child); }
  std::span<const EdgeId> edges_below(VertexId v) const { return children_.at(v); }
  std::span<const EdgeId> incident(VertexId v) const { return incident_.at(v); }
  bool is_leaf_edge(EdgeId e) const { return child_edges(e).empty(); }
  /// Parent edge of e, or -1 for root-incident edges.
  std::int64_t parent_edge(EdgeId e) const;
  bool adjacent(EdgeId e, EdgeId f) const;

  /// Subtree spanned by `subset`, which must contain the root-incident edges it
  /// uses and be closed under taking parent edges. Returns the subtree and the
  /// map from its edge ids to ids in *this.
  std::pair<Tree, std::vector<EdgeId>> subtree(std::span<const EdgeId> subset) const;

  /// FNV-1a over the canonical parent-array serialization.
  std::string content_hash() const;
  std::string describe() const;

  friend bool operator==(const Tree& a, const Tree& b) {
    return a.parent_ == b.parent_ && a.hanging_ == b.hanging_;
  }

 private:
  Tree(const std::vector<std::vector<VertexId>>& children, VertexId root, bool hanging);

  std::vector<std::int64_t> parent_;  // per vertex, -1 for root
  std::vector<Edge> edges_;
  std::vector<int> level_;
  std::vector<std::vector<EdgeId>> children_;  // per vertex
  std::vector<std::vector<EdgeId>> incident_;  // per vertex
  std::vector<std::vector<EdgeId>> neighbors_;  // per edge
  bool hanging_ = false;
  int max_level_ = 0;
  int max_degree_ = 0;
};

}  // namespace treecolor
