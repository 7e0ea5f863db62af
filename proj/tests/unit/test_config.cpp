#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "config.hpp"

using namespace treecolor;
using namespace treecolor::cli;

TEST_CASE("config rejects unknown keys") {
  CHECK_THROWS_AS(Config::from_map({{"tree.colour", "3"}}), ConfigError);
  CHECK_NOTHROW(Config::from_map({{"tree.shape", "path"}, {"tree.edges", "3"}}));
}

TEST_CASE("config typed access") {
  const auto c = Config::from_map({{"coloring.q", " 4 "}, {"sweep.values", "4, 6,8 ,"}, {"run.eps", "x"}});
  CHECK(c.require<int>("coloring.q") == 4);
  CHECK(c.get<int>("run.seed", 9) == 9);
  CHECK(c.list<int>("sweep.values") == std::vector<int>{4, 6, 8});
  CHECK(c.list<int>("tensorize.alpha").empty());
  CHECK_THROWS_AS(c.get<double>("run.eps", 0.25), ConfigError);
  CHECK_THROWS_AS(c.require<int>("tree.edges"), ConfigError);
}

TEST_CASE("config loads ini sections as dotted keys") {
  const auto path = std::filesystem::temp_directory_path() / "treecolor_config_test.ini";
  {
    std::ofstream out(path);
    out << "command = gap\n[tree]\nshape = complete\ndelta = 2\ndepth = 2\n[coloring]\nq = 3\nlists = star_root\n";
  }
  const auto c = Config::load(path.string());
  CHECK(c.get("command", "") == "gap");
  const Tree t = tree_from(c);
  CHECK(t.num_edges() == 4);
  const auto lists = lists_from(c, t);
  CHECK(lists.q() == 3);
  std::filesystem::remove(path);

  {
    std::ofstream out(path);
    out << "[tree]\nshape = path\nedges = 2\n[bogus]\nkey = 1\n";
  }
  CHECK_THROWS_AS(Config::load(path.string()), ConfigError);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(Config::load(path.string()), ConfigError);
}

TEST_CASE("config tree shapes") {
  CHECK(tree_from(Config::from_map({{"tree.shape", "star"}, {"tree.edges", "4"}})).num_edges() == 4);
  CHECK(tree_from(Config::from_map({{"tree.shape", "double_star"}, {"tree.delta", "3"}})).num_edges() == 5);
  CHECK(tree_from(Config::from_map({{"tree.shape", "hanging"}, {"tree.delta", "2"}, {"tree.depth", "1"}}))
            .has_hanging_root());
  CHECK(tree_from(Config::from_map({{"subtree.shape", "path"}, {"subtree.edges", "2"}}), "subtree").num_edges() == 2);
  CHECK_THROWS_AS(tree_from(Config::from_map({{"tree.shape", "cycle"}})), ConfigError);
  const auto caps = caps_from(Config::from_map({{"caps.dense", "10"}}));
  CHECK(caps.dense_cap == 10);
  CHECK(caps.mixing_cap == MatrixCaps{}.mixing_cap);
}
