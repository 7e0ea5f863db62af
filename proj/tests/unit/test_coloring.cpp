#include <doctest.h>

#include <set>
#include <sstream>

#include "treecolor/coloring.hpp"
#include "treecolor/errors.hpp"
#include "treecolor/oracle.hpp"

using namespace treecolor;

TEST_CASE("is_proper") {
  const Tree p2 = Tree::path(2);
  const auto u3 = ListSpec::uniform(p2, 3);
  CHECK(is_proper(p2, u3, Coloring{1, 2}));
  CHECK_FALSE(is_proper(p2, u3, Coloring{1, 1}));
  CHECK_THROWS_AS(is_proper(p2, u3, Coloring{1, 0}), ParameterError);

  const Tree h = Tree::hanging_root(3, 1);
  const auto sr = ListSpec::star_root(h, 5);
  CHECK(sr.list(0) == std::vector<Color>{1, 2, 3});
  CHECK(is_proper(h, sr, Coloring{3, 1, 2}));
  CHECK_FALSE(is_proper(h, sr, Coloring{4, 1, 2}));
}

TEST_CASE("list presets") {
  const Tree h = Tree::hanging_root(3, 2);
  const auto pin = ListSpec::pinned_root(h, 5, 2);
  CHECK(pin.list(0) == std::vector<Color>{2});
  CHECK(pin.list(1).size() == 5);
  CHECK_THROWS_AS(ListSpec::pinned_root(h, 5, 6), ParameterError);
  CHECK_THROWS_AS(ListSpec::star_root(h, 2), ParameterError);
  CHECK(ListSpec::from_preset(h, 5, ListPreset::star_root) == ListSpec::star_root(h, 5));
}

TEST_CASE("available colors") {
  const Tree p3 = Tree::path(3);
  const auto u3 = ListSpec::uniform(p3, 3);
  const Coloring c{1, 0, 2};
  CHECK(available_colors(p3, u3, c, 1) == std::vector<Color>{3});

  const Tree s3 = Tree::star(3);
  const auto u5 = ListSpec::uniform(s3, 5);
  const Coloring leaf{0, 1, 2};
  CHECK(available_colors(s3, u5, leaf, 0) == std::vector<Color>{3, 4, 5});

  // q = Delta + 1, both endpoints of degree Delta, neighbors use every other color
  const Tree ds = Tree::double_star(3);
  const auto u4 = ListSpec::uniform(ds, 4);
  const auto dist = enumerate_colorings(ds, u4);
  std::size_t surrounded = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const auto s = dist.state(i);
    ColorMask around = 0;
    for (EdgeId f : ds.neighbors(0)) around |= color_bit(s[f]);
    if (mask_size(around) == 3) {
      ++surrounded;
      CHECK(available_colors(ds, u4, s, 0) == std::vector<Color>{s[0]});
    }
    for (EdgeId e = 0; e < ds.num_edges(); ++e)
      for (Color x : available_colors(ds, u4, s, e))
        for (EdgeId f : ds.neighbors(e)) CHECK(x != s[f]);
  }
  CHECK(surrounded > 0);
}

TEST_CASE("alternating paths") {
  const Tree h = Tree::hanging_root(3, 1);
  CHECK(alternating_path(h, Coloring{1, 3, 4}, 0, 2) == std::vector<EdgeId>{0});

  const Tree p = Tree::path(4);
  CHECK(alternating_path(p, Coloring{1, 2, 1, 3}, 0, 2) == std::vector<EdgeId>{0, 1, 2});
  CHECK_THROWS_AS(alternating_path(p, Coloring{1, 2, 1, 3}, 0, 1), ParameterError);

  // maximality on sampled states of T*_2 (Delta = 3, q = 5)
  const Tree t = Tree::hanging_root(3, 2);
  const auto lists = ListSpec::star_root(t, 5);
  const auto dist = enumerate_colorings(t, lists);
  for (std::size_t i = 0; i < dist.size(); i += 7) {
    const auto c = dist.state(i);
    for (Color b = 1; b <= 5; ++b) {
      if (b == c[0]) continue;
      const auto ap = alternating_path(t, c, 0, b);
      for (std::size_t k = 0; k < ap.size(); ++k) CHECK(c[ap[k]] == (k % 2 == 0 ? c[0] : b));
      const Color next = ap.size() % 2 == 0 ? c[0] : b;
      for (EdgeId f : t.child_edges(ap.back())) CHECK(c[f] != next);
    }
  }
}

TEST_CASE("flip") {
  const Tree h = Tree::hanging_root(3, 1);
  CHECK(flip(h, Coloring{1, 3, 4}, 0, 2) == Coloring{2, 3, 4});
  const Tree p = Tree::path(3);
  CHECK(flip(p, Coloring{1, 2, 1}, 0, 2) == Coloring{2, 1, 2});

  const Tree t = Tree::hanging_root(3, 2);
  const auto lists = ListSpec::star_root(t, 5);
  const auto dist = enumerate_colorings(t, lists);
  std::set<Coloring> image;
  std::size_t fiber = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    const auto c = dist.state(i);
    if (c[0] != 1) continue;
    ++fiber;
    const Coloring f = flip(t, c, 0, 2);
    CHECK(is_proper(t, lists, f));
    CHECK(f[0] == 2);
    CHECK(flip(t, f, 0, 1) == dist.coloring(i));
    CHECK(difference(c, f) == alternating_path(t, c, 0, 2));
    image.insert(f);
  }
  std::size_t target = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) target += dist.state(i)[0] == 2;
  CHECK(image.size() == fiber);
  CHECK(image.size() == target);
}

TEST_CASE("coloring csv") {
  std::ostringstream os;
  write_coloring_csv(os, Coloring{2, 1, 3});
  CHECK(os.str() == "0,2\r\n1,1\r\n2,3\r\n");
  CHECK(format_colors(Coloring{2, 1, 3}) == "2 1 3");
}
