#include <doctest.h>

#include <json.hpp>
#include <numeric>

#include "treecolor/errors.hpp"
#include "treecolor/oracle.hpp"

using namespace treecolor;

namespace {

BigInt falling(int q, int k) {
  BigInt r = 1;
  for (int i = 0; i < k; ++i) r *= q - i;
  return r;
}

}  // namespace

TEST_CASE("enumeration matches closed forms") {
  const Tree s3 = Tree::star(3);
  CHECK(enumerate_colorings(s3, ListSpec::uniform(s3, 4)).size() == 24);
  const Tree p3 = Tree::path(3);
  CHECK(enumerate_colorings(p3, ListSpec::uniform(p3, 3)).size() == 12);
  const Tree h = Tree::hanging_root(3, 1);
  const auto d = enumerate_colorings(h, ListSpec::star_root(h, 5));
  CHECK(d.size() == 36);
  CHECK(count_colorings(h, ListSpec::star_root(h, 5)) == 36);
}

TEST_CASE("dp counts") {
  const Tree p10 = Tree::path(10);
  CHECK(count_colorings(p10, ListSpec::uniform(p10, 3)) == 1536);
  for (int delta = 1; delta <= 5; ++delta)
    for (int q = delta; q <= delta + 2; ++q) {
      const Tree s = Tree::star(delta);
      CHECK(count_colorings(s, ListSpec::uniform(s, q)) == falling(q, delta));
    }
  const Tree t = Tree::complete_regular(3, 2);
  const auto lists = ListSpec::uniform(t, 5);
  CHECK(count_colorings(t, lists) == BigInt(enumerate_colorings(t, lists).size()));
  // far beyond enumeration
  const Tree big = Tree::path(200);
  CHECK(count_colorings(big, ListSpec::uniform(big, 3)) == BigInt(3) * (BigInt(1) << 199));
}

TEST_CASE("canonical order and index") {
  const Tree p = Tree::path(2);
  const auto d = enumerate_colorings(p, ListSpec::uniform(p, 3));
  REQUIRE(d.size() == 6);
  CHECK(d.coloring(0) == Coloring{1, 2});
  CHECK(d.coloring(1) == Coloring{1, 3});
  CHECK(d.coloring(5) == Coloring{3, 2});
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(d.require_index(d.state(i)) == i);
  CHECK_FALSE(d.index_of(Coloring{1, 1}).has_value());
  double total = 0;
  for (std::size_t i = 0; i < d.size(); ++i) total += d.weight(i);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("capacity cap") {
  const Tree p = Tree::path(12);
  CHECK_THROWS_AS(enumerate_colorings(p, ListSpec::uniform(p, 3), 1000), CapacityError);
}

TEST_CASE("conditionals") {
  const Tree h = Tree::hanging_root(3, 1);
  const auto d = enumerate_colorings(h, ListSpec::star_root(h, 5));
  Coloring pin(3, 0);
  pin[0] = 1;
  CHECK(d.conditional(pin).size() == d.size() / 3);
  CHECK(d.conditional(d.coloring(5)).size() == 1);
  const Coloring clash{0, 2, 2};
  CHECK_THROWS_AS(d.conditional(clash), InfeasiblePinning);
}

TEST_CASE("marginals") {
  const Tree h = Tree::hanging_root(3, 2);
  const auto d = enumerate_colorings(h, ListSpec::star_root(h, 5));
  const std::vector<EdgeId> r{0};
  const auto mr = d.marginal(r);
  CHECK(mr.size() == 3);
  for (const auto& [c, p] : mr) CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-12));

  const Tree t1 = Tree::complete_regular(3, 1);
  const auto d1 = enumerate_colorings(t1, ListSpec::uniform(t1, 4));
  const std::vector<EdgeId> leaf{2};
  const auto ml = d1.marginal(leaf);
  CHECK(ml.size() == 4);
  for (const auto& [c, p] : ml) CHECK(p == doctest::Approx(0.25).epsilon(1e-12));

  std::vector<EdgeId> all(t1.num_edges());
  std::iota(all.begin(), all.end(), EdgeId{0});
  CHECK(d1.marginal(all).size() == d1.size());
  CHECK_THROWS_AS(d1.marginal(std::vector<EdgeId>{}), ParameterError);
}

TEST_CASE("conditional independence across a separator") {
  const Tree p = Tree::path(5);
  const auto d = enumerate_colorings(p, ListSpec::uniform(p, 3));
  const std::vector<EdgeId> A{0}, B{3, 4}, C{1};
  CHECK(conditional_independence_error(p, d, A, B, C) <= 1e-12);
  const std::vector<EdgeId> bad{};
  CHECK_THROWS_AS(conditional_independence_error(p, d, A, std::vector<EdgeId>{1}, bad), ParameterError);

  const Tree t = Tree::complete_regular(3, 2);
  const auto dt = enumerate_colorings(t, ListSpec::uniform(t, 4));
  const std::vector<EdgeId> A2{3, 4}, B2{5, 6, 2}, C2{0, 1};
  CHECK(conditional_independence_error(t, dt, A2, B2, C2) <= 1e-12);
}

TEST_CASE("distribution json") {
  const Tree p = Tree::path(2);
  const auto d = enumerate_colorings(p, ListSpec::uniform(p, 3));
  const auto j = nlohmann::json::parse(d.to_json(true));
  CHECK(j["size"] == 6);
  CHECK(j["tree_hash"] == p.content_hash());
  CHECK(j.contains("lists"));
  CHECK(j["states"].size() == 6);
}
