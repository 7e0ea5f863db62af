#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "treecolor/errors.hpp"
#include "treecolor/tree.hpp"

using namespace treecolor;

namespace {

std::size_t level_count(const Tree& t, int i) { return t.level_edges(i).size(); }

}  // namespace

TEST_CASE("complete regular trees follow the branching rule") {
  const Tree t32 = Tree::complete_regular(3, 2);
  CHECK(t32.num_edges() == 9);
  CHECK(level_count(t32, 1) == 3);
  CHECK(level_count(t32, 2) == 6);
  CHECK(t32.max_level() == 2);

  const Tree t23 = Tree::complete_regular(2, 3);
  CHECK(t23.num_edges() == 6);
  CHECK(t23.max_degree() == 2);
  CHECK(t23.degree(t23.root()) == 2);

  CHECK(Tree::complete_regular(4, 2).num_edges() == 16);
  for (int d = 3; d <= 5; ++d)
    for (int k = 1; k <= 3; ++k) {
      int p = 1;
      for (int i = 0; i < k; ++i) p *= d - 1;
      CHECK(Tree::complete_regular(d, k).num_edges() == static_cast<std::size_t>(d * (p - 1) / (d - 2)));
    }
}

TEST_CASE("hanging-root trees") {
  const Tree a = Tree::hanging_root(3, 1);
  CHECK(a.num_edges() == 3);
  CHECK(a.has_hanging_root());
  CHECK(a.level(0) == 0);
  CHECK(a.level_edges(0) == std::vector<EdgeId>{0});

  const Tree b = Tree::hanging_root(2, 3);
  CHECK(b.num_edges() == 4);
  CHECK(b.max_degree() == 2);

  CHECK(Tree::hanging_root(3, 2).num_edges() == 7);
  CHECK(Tree::hanging_root(3, 2).level_edges(0).size() == 1);
}

TEST_CASE("degenerate parameters are rejected") {
  CHECK_THROWS_AS(Tree::complete_regular(1, 2), ParameterError);
  CHECK_THROWS_AS(Tree::complete_regular(3, 0), ParameterError);
  CHECK_THROWS_AS(Tree::hanging_root(3, 0), ParameterError);
  CHECK_THROWS_AS(Tree::path(0), ParameterError);
  CHECK_THROWS_AS(Tree::complete_regular(3, 2).level_edges(3), ParameterError);
  CHECK_THROWS_AS(Tree::complete_regular(3, 2).level_edges(0), ParameterError);
}

TEST_CASE("levels partition the edge set") {
  for (const Tree& t : {Tree::complete_regular(3, 3), Tree::hanging_root(4, 2), Tree::path(7), Tree::double_star(4)}) {
    std::size_t total = 0;
    std::set<EdgeId> seen;
    for (int i = t.min_level(); i <= t.max_level(); ++i)
      for (EdgeId e : t.level_edges(i)) {
        seen.insert(e);
        ++total;
        CHECK(t.level(e) == i);
      }
    CHECK(total == t.num_edges());
    CHECK(seen.size() == t.num_edges());
  }
}

TEST_CASE("edge neighbors") {
  const Tree p = Tree::path(3);
  // root at one end, so the BFS order is the path order
  const auto mid = p.neighbors(1);
  CHECK(std::vector<EdgeId>(mid.begin(), mid.end()) == std::vector<EdgeId>{0, 2});

  const Tree s = Tree::star(3);
  for (EdgeId e = 0; e < 3; ++e) CHECK(s.neighbors(e).size() == 2);

  const Tree t = Tree::complete_regular(3, 2);
  for (EdgeId e : t.level_edges(2)) {
    const auto nb = t.neighbors(e);
    CHECK(nb.size() == 2);
    CHECK(std::count(nb.begin(), nb.end(), static_cast<EdgeId>(t.parent_edge(e))) == 1);
  }
}

TEST_CASE("neighbor relation is symmetric and bounded") {
  for (const Tree& t : {Tree::complete_regular(4, 2), Tree::hanging_root(3, 3), Tree::double_star(5)}) {
    for (EdgeId e = 0; e < t.num_edges(); ++e) {
      CHECK(static_cast<int>(t.neighbors(e).size()) <= 2 * (t.max_degree() - 1));
      for (EdgeId f : t.neighbors(e)) {
        const auto back = t.neighbors(f);
        CHECK(std::find(back.begin(), back.end(), e) != back.end());
        CHECK(t.adjacent(e, f));
      }
    }
  }
}

TEST_CASE("construction is deterministic and round-trips through the file format") {
  const Tree a = Tree::complete_regular(3, 3);
  const Tree b = Tree::complete_regular(3, 3);
  CHECK(a == b);
  CHECK(a.content_hash() == b.content_hash());
  for (EdgeId e = 0; e < a.num_edges(); ++e) {
    CHECK(a.edge(e).parent == b.edge(e).parent);
    CHECK(a.edge(e).child == e + 1);
  }

  for (const Tree& t : {Tree::complete_regular(3, 2), Tree::hanging_root(3, 2)}) {
    std::stringstream ss;
    t.write(ss);
    const Tree back = Tree::read(ss);
    CHECK(back == t);
    CHECK(back.content_hash() == t.content_hash());
  }
  CHECK(Tree::path(4).content_hash() != Tree::star(4).content_hash());
}

TEST_CASE("tree file reader rejects malformed input") {
  std::stringstream cyc("3 0\n1 2\n2 1\n");
  CHECK_THROWS_AS(Tree::read(cyc), ParameterError);
  std::stringstream shortlist("4 0\n1 0\n");
  CHECK_THROWS_AS(Tree::read(shortlist), ParameterError);
  std::stringstream hang("4 0 hanging\n1 0\n2 0\n3 1\n");
  CHECK_THROWS_AS(Tree::read(hang), ParameterError);
}

TEST_CASE("subtree extraction") {
  const Tree t = Tree::complete_regular(3, 2);
  const std::vector<EdgeId> keep{0, 1, 2};
  const auto [sub, map] = t.subtree(keep);
  CHECK(sub == Tree::star(3));
  CHECK(map == keep);
  const std::vector<EdgeId> orphan{3};
  CHECK_THROWS_AS(t.subtree(orphan), ParameterError);
}
