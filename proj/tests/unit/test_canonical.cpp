#include <doctest.h>

#include <cmath>
#include <json.hpp>
#include <set>

#include "treecolor/canonical.hpp"
#include "treecolor/errors.hpp"

using namespace treecolor;

namespace {

struct Hanging {
  Tree tree;
  ListSpec lists;
  DistributionTable dist;
  Hanging(int delta, int ell, int q)
      : tree(Tree::hanging_root(delta, ell)), lists(ListSpec::star_root(tree, q)), dist(enumerate_colorings(tree, lists)) {}
};

}  // namespace

TEST_CASE("color order") {
  CHECK(color_order(5, 2, 1) == std::vector<Color>{3, 4, 5, 2, 1});
  CHECK(color_order(4, 1, 2) == std::vector<Color>{3, 4, 1, 2});
}

TEST_CASE("flip coupling") {
  const Hanging h(3, 1, 5);
  const Coupling ab = flip_coupling(h.tree, h.dist, 1, 2);
  CHECK(ab.pairs.size() == 12);
  CHECK(ab.weight == doctest::Approx(1.0 / 12).epsilon(1e-15));
  const Coupling ba = flip_coupling(h.tree, h.dist, 2, 1);
  std::set<std::pair<std::size_t, std::size_t>> fwd, back;
  for (auto [s, t] : ab.pairs) fwd.insert({s, t});
  for (auto [s, t] : ba.pairs) back.insert({t, s});
  CHECK(fwd == back);
  for (auto [s, t] : ab.pairs) {
    const auto sigma = h.dist.state(s);
    CHECK(difference(sigma, h.dist.state(t)) == alternating_path(h.tree, sigma, 0, 2));
  }
}

TEST_CASE("first color under the order avoids a and b when both meet the vertex") {
  const Hanging h(2, 3, 4);
  for (std::size_t i = 0; i < h.dist.size(); ++i) {
    const auto c = h.dist.state(i);
    for (VertexId v = 0; v < h.tree.num_vertices(); ++v) {
      const ColorMask free = free_at_vertex(h.tree, 4, c, v);
      ColorMask present = 0;
      for (EdgeId e : h.tree.incident(v)) present |= color_bit(c[e]);
      for (Color a = 1; a <= 2; ++a)
        for (Color b = 1; b <= 2; ++b) {
          if (a == b || !(present & color_bit(a)) || !(present & color_bit(b))) continue;
          for (Color x : color_order(4, a, b))
            if (free & color_bit(x)) {
              CHECK(x != a);
              CHECK(x != b);
              break;
            }
        }
    }
  }
}

TEST_CASE("length-one glauber path") {
  const Hanging h(2, 1, 4);
  // r = 1 with no child colored 2
  const Coloring sigma{1, 3};
  const auto path = glauber_canonical_path(h.tree, h.lists, sigma, 2);
  REQUIRE(path.steps.size() == 1);
  CHECK(path.steps[0].block == Block{0});
  CHECK(path.states.back() == Coloring{2, 3});
}

TEST_CASE("glauber paths verify on (Delta, l) = (2, 3)") {
  const Hanging h(2, 3, 4);
  const PathSweep sw = sweep_paths(PathFamily::glauber, h.tree, h.lists, h.dist);
  CHECK(sw.paths == 81 * 2);
  CHECK(sw.verified == sw.paths);
  CHECK(sw.reversal_ok == sw.paths);
  CHECK(sw.stage_two_leaf_free == sw.paths);
  INFO(sw.first_failure);
}

TEST_CASE("verify_path rejects broken paths") {
  const Hanging h(2, 3, 4);
  const auto allowed = allowed_blocks(h.tree, false);
  for (std::size_t i = 0; i < h.dist.size(); ++i) {
    const auto sigma = h.dist.state(i);
    if (sigma[0] != 1) continue;
    const Coloring tau = flip(h.tree, sigma, 0, 2);
    auto path = glauber_canonical_path(h.tree, h.lists, sigma, 2);
    CHECK(verify_path(h.tree, h.lists, path, allowed, sigma, tau).ok);
    if (path.steps.size() < 3) continue;
    auto cut = path;
    cut.states.pop_back();
    cut.steps.pop_back();
    CHECK_FALSE(verify_path(h.tree, h.lists, cut, allowed, sigma, tau).ok);
    auto loop = path;
    loop.states.insert(loop.states.begin() + 1, {loop.states[1], loop.states[0]});
    loop.steps.insert(loop.steps.begin() + 1, {loop.steps[0], loop.steps[0]});
    CHECK_FALSE(verify_path(h.tree, h.lists, loop, allowed, sigma, tau).ok);
    break;
  }
}

TEST_CASE("glauber paths refuse q != Delta + 2") {
  const Hanging h(3, 1, 4);
  CHECK_THROWS_AS(glauber_canonical_path(h.tree, h.lists, h.dist.state(0), 2), UnsupportedRegime);
}

TEST_CASE("edge dynamics paths") {
  const Hanging h(2, 3, 3);
  const PathSweep sw = sweep_paths(PathFamily::edge_dynamics, h.tree, h.lists, h.dist);
  CHECK(sw.verified == sw.paths);
  INFO(sw.first_failure);

  // |E*| = 2 below l = 3: the only move is the pair exchange
  const Coloring sigma{1, 2, 3, 1};
  const auto path = edge_dynamics_canonical_path(h.tree, h.lists, sigma, 2);
  REQUIRE(path.steps.size() == 1);
  CHECK(path.steps[0].block == Block{0, 1});
  CHECK(path.states.back() == Coloring{2, 1, 3, 1});

  const Hanging s(3, 1, 4);
  const Coloring lone{1, 3, 4};
  const auto one = edge_dynamics_canonical_path(s.tree, s.lists, lone, 2);
  REQUIRE(one.steps.size() == 1);
  CHECK(one.steps[0].block == Block{0});
  CHECK(one.states.back() == Coloring{2, 3, 4});
  const PathSweep sw3 = sweep_paths(PathFamily::edge_dynamics, s.tree, s.lists, s.dist);
  CHECK(sw3.verified == sw3.paths);

  const Hanging even(2, 2, 3);
  CHECK_THROWS_AS(edge_dynamics_canonical_path(even.tree, even.lists, even.dist.state(0), 2), UnsupportedRegime);
}

TEST_CASE("congestion is finite and ignores unused transitions") {
  const Hanging h(2, 1, 4);
  const auto rep = congestion(PathFamily::glauber, h.tree, h.lists, h.dist);
  REQUIRE(rep.xi.size() == 2);
  CHECK(std::isfinite(rep.xi[0]));
  CHECK(std::isfinite(rep.xi[1]));
  CHECK(rep.xi[0] > 0);
  CHECK(rep.xi_A == 0);
  const auto usage = usage_table(PathFamily::glauber, h.tree, h.lists, h.dist, 1, 2);
  for (const auto& [key, n] : usage.count) CHECK(n >= 1);
  const auto j = nlohmann::json::parse(rep.to_json());
  for (const char* key : {"Delta", "q", "ell", "kind", "xi", "xi_A", "r_ab"}) CHECK(j.contains(key));
}

TEST_CASE("R^{ab} against direct leaf summation") {
  const Hanging h(3, 1, 5);
  const auto rep = congestion(PathFamily::glauber, h.tree, h.lists, h.dist);
  for (const auto& p : rep.pairs) {
    const auto usage = usage_table(PathFamily::glauber, h.tree, h.lists, h.dist, p.a, p.b);
    double direct = 0;
    for (const auto& [key, n] : usage.count)
      if (usage.block.at(key).size() == 1 && h.tree.level(usage.block.at(key)[0]) == 1) direct += double(n) * n;
    CHECK(p.r_ab == doctest::Approx(direct / h.dist.size()).epsilon(1e-12));
    CHECK(p.r_ab > 0);
  }
}

TEST_CASE("gamma statistics") {
  const Hanging h(2, 3, 4);
  for (std::size_t i = 0; i < h.dist.size(); ++i) {
    const auto g = h.dist.state(i);
    if (g[0] != 1 && g[0] != 2) continue;
    const GammaStats st = gamma_stats(h.tree, h.lists, g, 1, 2);
    CHECK(st.S >= 0);
    CHECK(st.S <= 3);
    CHECK(st.P <= (st.S + 1) / 2);
    CHECK(st.Z == (st.S >= 2 ? 1 : 0));
    if (alternating_path(h.tree, g, 0, g[0] == 1 ? 2 : 1).size() == 1) {
      CHECK(st.S == 0);
      CHECK(st.P == 0);
    }
  }
  const Coloring other{3, 1, 2, 1};
  CHECK_THROWS_AS(gamma_stats(h.tree, h.lists, other, 1, 2), ParameterError);
}

TEST_CASE("leaf load and spine probability bounds") {
  const Hanging h(2, 3, 4);
  const auto leaf = leaf_load_check(h.tree, h.lists, h.dist);
  CHECK(leaf.violations == 0);
  CHECK(leaf.checked == h.dist.size() * 6);  // ordered (a, b) from a 3-color root list
  for (const auto& r : spine_probability_check(h.tree, h.lists, h.dist)) {
    CHECK(r.ok);
    if (r.s == 0 && r.x == 0) CHECK(r.bound == 1.0);
    if (r.x > (r.s + 1) / 2) CHECK(r.conditional == 0);
  }
}

TEST_CASE("routing bound for l = 1") {
  const auto r2 = routing_bound_ell1(2);
  CHECK(r2.certified);
  CHECK(r2.alpha[1] <= 8 + 1e-12);
  CHECK(r2.multiplicity[1] == 1);
  const auto r3 = routing_bound_ell1(3);
  CHECK(r3.alpha[0] <= 12 + 1e-12);
  CHECK(r3.certified);
}
