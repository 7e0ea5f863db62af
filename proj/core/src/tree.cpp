#include "treecolor/tree.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>

#include "treecolor/errors.hpp"

namespace treecolor {

Tree::Tree(const std::vector<std::vector<VertexId>>& children, VertexId root, bool hanging)
    : hanging_(hanging) {
  const std::size_t n = children.size();
  if (root >= n) throw ParameterError("root vertex out of range");
  if (hanging && children[root].size() != 1)
    throw ParameterError("a hanging-root tree needs exactly one edge at the root");

  // Breadth-first relabelling; children keep their listed order.
  std::vector<std::int64_t> new_id(n, -1);
  std::vector<VertexId> order{root};
  new_id[root] = 0;
  parent_.assign(1, -1);
  std::vector<int> depth{0};
  for (std::size_t head = 0; head < order.size(); ++head) {
    const VertexId old = order[head];
    for (VertexId c : children[old]) {
      if (c >= n || new_id[c] != -1) throw ParameterError("input is not a tree");
      new_id[c] = static_cast<std::int64_t>(order.size());
      order.push_back(c);
      parent_.push_back(static_cast<std::int64_t>(head));
      depth.push_back(depth[head] + 1);
    }
  }
  if (order.size() != n) throw ParameterError("input tree is disconnected");

  children_.assign(n, {});
  incident_.assign(n, {});
  for (VertexId v = 1; v < n; ++v) {
    const auto e = static_cast<EdgeId>(v - 1);
    const auto p = static_cast<VertexId>(parent_[v]);
    edges_.push_back({p, v});
    children_[p].push_back(e);
    incident_[p].push_back(e);
    incident_[v].push_back(e);
    level_.push_back(hanging ? depth[p] : depth[p] + 1);
  }
  for (auto& inc : incident_) std::sort(inc.begin(), inc.end());
  neighbors_.assign(edges_.size(), {});
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    auto& nb = neighbors_[e];
    for (VertexId v : {edges_[e].parent, edges_[e].child})
      for (EdgeId f : incident_[v])
        if (f != e) nb.push_back(f);
    std::sort(nb.begin(), nb.end());
  }
  for (int l : level_) max_level_ = std::max(max_level_, l);
  for (const auto& inc : incident_) max_degree_ = std::max(max_degree_, static_cast<int>(inc.size()));
}

Tree Tree::from_child_counts(std::span<const int> counts, bool hanging) {
  std::vector<std::vector<VertexId>> children(1);
  VertexId next = 1;
  for (std::size_t v = 0; v < children.size(); ++v) {
    const int k = v < counts.size() ? counts[v] : 0;
    if (k < 0) throw ParameterError("negative child count");
    for (int i = 0; i < k; ++i) {
      children[v].push_back(next++);
      children.emplace_back();
    }
  }
  if (children.size() < 2) throw ParameterError("tree without edges");
  return Tree(children, 0, hanging);
}

Tree Tree::complete_regular(int degree, int depth) {
  if (degree < 2 || depth < 1) throw ParameterError("complete regular tree needs degree >= 2 and depth >= 1");
  std::vector<int> counts{degree};
  std::size_t layer = static_cast<std::size_t>(degree);
  for (int dep = 1; dep < depth; ++dep) {
    counts.insert(counts.end(), layer, degree - 1);
    layer *= static_cast<std::size_t>(degree - 1);
  }
  return from_child_counts(counts, false);
}

Tree Tree::hanging_root(int degree, int depth) {
  if (degree < 2 || depth < 1) throw ParameterError("hanging-root tree needs degree >= 2 and depth >= 1");
  std::vector<int> counts{1};
  std::size_t layer = 1;
  for (int dep = 0; dep < depth; ++dep) {
    counts.insert(counts.end(), layer, degree - 1);
    layer *= static_cast<std::size_t>(degree - 1);
  }
  return from_child_counts(counts, true);
}

Tree Tree::path(int edges) {
  if (edges < 1) throw ParameterError("path needs at least one edge");
  std::vector<int> counts(static_cast<std::size_t>(edges), 1);
  return from_child_counts(counts, false);
}

Tree Tree::star(int edges) {
  if (edges < 1) throw ParameterError("star needs at least one edge");
  const std::vector<int> counts{edges};
  return from_child_counts(counts, false);
}

Tree Tree::double_star(int degree) {
  if (degree < 2) throw ParameterError("double star needs degree >= 2");
  std::vector<int> counts{degree, degree - 1};
  return from_child_counts(counts, false);
}

Tree Tree::from_parent_pairs(std::size_t n_vertices, VertexId root,
                             std::span<const std::pair<VertexId, VertexId>> child_parent,
                             bool hanging) {
  if (n_vertices < 2) throw ParameterError("tree without edges");
  if (child_parent.size() != n_vertices - 1) throw ParameterError("a tree on n vertices has n-1 edges");
  std::vector<std::vector<VertexId>> children(n_vertices);
  std::vector<bool> has_parent(n_vertices, false);
  for (auto [c, p] : child_parent) {
    if (c >= n_vertices || p >= n_vertices || c == p) throw ParameterError("vertex id out of range");
    if (has_parent[c] || c == root) throw ParameterError("vertex with two parents");
    has_parent[c] = true;
    children[p].push_back(c);
  }
  return Tree(children, root, hanging);
}

Tree Tree::read(std::istream& in) {
  std::string header;
  while (std::getline(in, header) && header.find_first_not_of(" \t\r") == std::string::npos) {}
  std::istringstream hs(header);
  std::size_t n = 0;
  VertexId root = 0;
  if (!(hs >> n >> root)) throw ParameterError("tree file: bad header");
  std::string flag;
  bool hanging = false;
  if (hs >> flag) {
    if (flag != "hanging") throw ParameterError("tree file: unknown header token '" + flag + "'");
    hanging = true;
  }
  std::vector<std::pair<VertexId, VertexId>> pairs;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    VertexId c = 0, p = 0;
    if (!(in >> c >> p)) throw ParameterError("tree file: truncated edge list");
    pairs.emplace_back(c, p);
  }
  return from_parent_pairs(n, root, pairs, hanging);
}

void Tree::write(std::ostream& out) const {
  out << num_vertices() << ' ' << root() << (hanging_ ? " hanging" : "") << '\n';
  for (const Edge& e : edges_) out << e.child << ' ' << e.parent << '\n';
}

std::vector<EdgeId> Tree::level_edges(int i) const {
  if (i < min_level() || i > max_level_) throw ParameterError("level out of range");
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < edges_.size(); ++e)
    if (level_[e] == i) out.push_back(e);
  return out;
}

std::int64_t Tree::parent_edge(EdgeId e) const {
  const VertexId p = edges_.at(e).parent;
  return p == 0 ? -1 : static_cast<std::int64_t>(p) - 1;
}

bool Tree::adjacent(EdgeId e, EdgeId f) const {
  const auto& nb = neighbors_.at(e);
  return std::binary_search(nb.begin(), nb.end(), f);
}

std::pair<Tree, std::vector<EdgeId>> Tree::subtree(std::span<const EdgeId> subset) const {
  std::vector<bool> keep(edges_.size(), false);
  for (EdgeId e : subset) keep.at(e) = true;
  for (EdgeId e : subset) {
    const auto pe = parent_edge(e);
    if (pe >= 0 && !keep[static_cast<EdgeId>(pe)]) throw ParameterError("edge subset is not a rooted subtree");
  }
  // Vertices touched by kept edges, in breadth-first order of *this.
  std::vector<std::int64_t> local(num_vertices(), -1);
  local[0] = 0;
  std::vector<std::vector<VertexId>> children(1);
  std::vector<EdgeId> kept;
  for (EdgeId e = 0; e < edges_.size(); ++e) {
    if (!keep[e]) continue;
    const auto lc = static_cast<VertexId>(children.size());
    children.emplace_back();
    local[edges_[e].child] = lc;
    children[static_cast<std::size_t>(local[edges_[e].parent])].push_back(lc);
    kept.push_back(e);
  }
  return {Tree(children, 0, hanging_ && keep[0]), kept};
}

std::string Tree::content_hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  mix(num_vertices());
  mix(hanging_ ? 1 : 0);
  for (auto p : parent_) mix(static_cast<std::uint64_t>(p));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string Tree::describe() const {
  std::ostringstream os;
  os << (hanging_ ? "hanging" : "rooted") << " tree: " << num_edges() << " edges, max degree "
     << max_degree_ << ", levels " << min_level() << ".." << max_level_;
  return os.str();
}

}  // namespace treecolor
